"""Arithmetic in GF(q^2), q = p^r, with GF(q) as the fixed field of x -> x^q.

Elements are plain integers ("codes"): the little-endian base-p digits of a
code are the coefficients of the residue polynomial modulo the tower's
primitive modulus.  Code 0 is zero, code 1 is one, code p is the root x.
"""

from functools import lru_cache
from itertools import product
from math import gcd

import numpy as np

MAX_FIELD_SIZE = 2 ** 32
_TABLE_LIMIT = 1024


def is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_factors(n):
    """Distinct prime factors of n by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _poly_mulmod(a, b, f, p):
    # a, b: coefficient lists of length n; f monic of degree n
    n = len(f) - 1
    prod = [0] * (2 * n - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for k in range(2 * n - 2, n - 1, -1):
        c = prod[k]
        if c:
            for i in range(n):
                prod[k - n + i] = (prod[k - n + i] - c * f[i]) % p
    return prod[:n]


def _poly_powmod(base, e, f, p):
    n = len(f) - 1
    result = [1] + [0] * (n - 1)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        e >>= 1
    return result


def is_primitive_polynomial(f, p):
    """True iff monic f (low degree first) has a root of order p^deg - 1."""
    n = len(f) - 1
    if f[0] % p == 0:
        return False
    N = p ** n - 1
    x = [0] * n
    if n == 1:
        x = [(-f[0]) % p]
    else:
        x[1] = 1
    one = [1] + [0] * (n - 1)
    if _poly_powmod(x, N, f, p) != one:
        return False
    return all(_poly_powmod(x, N // ell, f, p) != one for ell in prime_factors(N))


def smallest_primitive_polynomial(p, n):
    """Lexicographically smallest monic primitive polynomial of degree n.

    Coefficient tuples (c0, ..., c_{n-1}) are compared low degree first.
    """
    for low in product(range(p), repeat=n):
        f = list(low) + [1]
        if is_primitive_polynomial(f, p):
            return tuple(f)
    raise RuntimeError(f"no primitive polynomial of degree {n} over GF({p})")


class FieldTower:
    """GF(p) < GF(q) < GF(q^2) realised as GF(p)[x]/(modulus).

    Build with :func:`make_tower`; instances are immutable and cached.
    """

    def __init__(self, p, r, modulus):
        self.p = p
        self.r = r
        self.n = 2 * r
        self.modulus = tuple(modulus)
        self.q = p ** r
        self.q2 = self.q * self.q
        self.order = self.q2 - 1
        self._digit_weights = np.array([p ** k for k in range(self.n)], dtype=np.int64)

        exp = np.zeros(self.order, dtype=np.int64)
        log = np.full(self.q2, -1, dtype=np.int64)
        digits = [1] + [0] * (self.n - 1)
        for k in range(self.order):
            code = sum(d * p ** i for i, d in enumerate(digits))
            exp[k] = code
            log[code] = k
            # multiply by the root x
            top = digits[-1]
            digits = [0] + digits[:-1]
            if top:
                digits = [(d - top * m) % p for d, m in zip(digits, self.modulus)]
        if (log[1:] < 0).any():
            raise RuntimeError("modulus is not primitive")
        exp.setflags(write=False)
        log.setflags(write=False)
        self.exp = exp
        self.log = log
        self._exp_list = exp.tolist()
        self._log_list = log.tolist()

        self._add_table = None
        if self.q2 <= _TABLE_LIMIT:
            codes = np.arange(self.q2, dtype=np.int64)
            table = self._vadd_digits(codes[:, None], codes[None, :])
            table.setflags(write=False)
            self._add_table = table
            self._add_list = table.tolist()
        self._neg_list = [self._neg_digits(a) for a in range(self.q2)] if self.q2 <= 1 << 20 else None
        self.subfield = tuple(a for a in range(self.q2) if self.frobenius(a) == a)
        self.root = int(exp[1])

    def __repr__(self):
        return f"FieldTower(p={self.p}, r={self.r}, modulus={list(self.modulus)})"

    def __reduce__(self):
        return (make_tower, (self.p, self.r))

    def header(self):
        return {"p": self.p, "r": self.r, "modulus": list(self.modulus)}

    # digits ---------------------------------------------------------------

    def digits(self, a):
        return [(a // self.p ** k) % self.p for k in range(self.n)]

    def from_digits(self, digits):
        return sum((d % self.p) * self.p ** k for k, d in enumerate(digits))

    def _neg_digits(self, a):
        return self.from_digits([-d for d in self.digits(a)])

    def _vadd_digits(self, a, b):
        p = self.p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for w in self._digit_weights:
            out += ((a // w + b // w) % p) * w
        return out

    # scalar arithmetic ------------------------------------------------------

    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        if self._add_table is not None:
            return self._add_list[a][b]
        return self.from_digits([x + y for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a):
        if self._neg_list is not None:
            return self._neg_list[a]
        return self._neg_digits(a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp_list[(self._log_list[a] + self._log_list[b]) % self.order]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._exp_list[-self._log_list[a] % self.order]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a, k):
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if k == 0 else 0
        return self._exp_list[(self._log_list[a] * k) % self.order]

    def sum(self, values):
        total = 0
        for v in values:
            total = self.add(total, v)
        return total

    def element(self, k):
        """The field element k * 1 for an integer k."""
        return k % self.p

    def frobenius(self, a):
        return self.power(a, self.q)

    def norm(self, a):
        return self.power(a, self.q + 1)

    def trace(self, a):
        return self.add(a, self.frobenius(a))

    def in_subfield(self, a):
        return self.frobenius(a) == a

    def multiplicative_order(self, a):
        if a == 0:
            raise ValueError("zero has no multiplicative order")
        return self.order // gcd(self._log_list[a], self.order)

    def is_primitive(self, a, subfield=False):
        """Generator test for GF(q^2)^*, or for GF(q)^* when ``subfield``."""
        if a == 0:
            raise ValueError("zero is never primitive")
        if subfield:
            if not self.in_subfield(a):
                raise ValueError(f"{a} is not in GF({self.q})")
            return self.multiplicative_order(a) == self.q - 1
        return self.multiplicative_order(a) == self.order

    def is_square(self, a):
        """Euler criterion inside GF(q); a must lie in GF(q)."""
        if a == 0:
            return True
        if self.p == 2:
            return True
        return self.power(a, (self.q - 1) // 2) == 1

    def primitive_elements(self, subfield=False):
        pool = self.subfield if subfield else range(1, self.q2)
        return [a for a in pool if a and self.is_primitive(a, subfield=subfield)]

    # vectorised arithmetic on integer arrays -------------------------------

    def vadd(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self._add_table is not None:
            return self._add_table[a, b]
        return self._vadd_digits(a, b)

    def vneg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a.copy()
        out = np.zeros_like(a)
        for w in self._digit_weights:
            out += ((-(a // w)) % self.p) * w
        return out

    def vmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        la = self.log[a]
        lb = self.log[b]
        out = self.exp[(la + lb) % self.order]
        return np.where((a == 0) | (b == 0), 0, out)

    def vpower(self, a, k):
        a = np.asarray(a, dtype=np.int64)
        out = self.exp[(self.log[a] * k) % self.order]
        if k == 0:
            return np.ones_like(a)
        return np.where(a == 0, 0, out)

    def vinv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if (a == 0).any():
            raise ZeroDivisionError("inverse of zero")
        return self.exp[(-self.log[a]) % self.order]

    def vfrobenius(self, a):
        return self.vpower(a, self.q)


@lru_cache(maxsize=None)
def make_tower(p, r):
    """Return the (cached, deterministic) tower with q = p^r."""
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"p={p!r} is not prime")
    if not isinstance(r, int) or r < 1:
        raise ValueError(f"r={r!r} must be a positive integer")
    if p ** (2 * r) >= MAX_FIELD_SIZE:
        raise OverflowError(f"p^(2r) = {p ** (2 * r)} exceeds 2^32")
    modulus = smallest_primitive_polynomial(p, 2 * r)
    return FieldTower(p, r, modulus)


def tower_for_q(q):
    """Tower for a prime power q."""
    for p in range(2, q + 1):
        if q % p == 0:
            break
    r = 0
    m = q
    while m % p == 0:
        m //= p
        r += 1
    if m != 1 or not is_prime(p):
        raise ValueError(f"{q} is not a prime power")
    return make_tower(p, r)
