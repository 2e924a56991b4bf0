"""Small dense linear algebra over a FieldTower (lists of integer codes)."""


def matmul(F, A, B):
    return tuple(
        tuple(F.sum(F.mul(A[i][k], B[k][j]) for k in range(len(B))) for j in range(len(B[0])))
        for i in range(len(A))
    )


def matvec(F, A, v):
    return tuple(F.sum(F.mul(a, x) for a, x in zip(row, v)) for row in A)


def transpose(A):
    return tuple(zip(*A))


def frobenius_matrix(F, A):
    return tuple(tuple(F.frobenius(a) for a in row) for row in A)


def det3(F, A):
    (a, b, c), (d, e, f), (g, h, i) = A
    m, s = F.mul, F.sub
    return F.add(
        s(m(a, s(m(e, i), m(f, h))), m(b, s(m(d, i), m(f, g)))),
        m(c, s(m(d, h), m(e, g))),
    )


def inverse3(F, A):
    det = det3(F, A)
    if det == 0:
        raise ZeroDivisionError("singular matrix")
    (a, b, c), (d, e, f), (g, h, i) = A
    m, s = F.mul, F.sub
    adj = (
        (s(m(e, i), m(f, h)), s(m(c, h), m(b, i)), s(m(b, f), m(c, e))),
        (s(m(f, g), m(d, i)), s(m(a, i), m(c, g)), s(m(c, d), m(a, f))),
        (s(m(d, h), m(e, g)), s(m(b, g), m(a, h)), s(m(a, e), m(b, d))),
    )
    inv_det = F.inv(det)
    return tuple(tuple(m(x, inv_det) for x in row) for row in adj)


def cross(F, u, v):
    m, s = F.mul, F.sub
    return (
        s(m(u[1], v[2]), m(u[2], v[1])),
        s(m(u[2], v[0]), m(u[0], v[2])),
        s(m(u[0], v[1]), m(u[1], v[0])),
    )


def dot(F, u, v):
    return F.sum(F.mul(a, b) for a, b in zip(u, v))


def rref(F, rows):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    M = [list(r) for r in rows]
    if not M:
        return [], []
    ncols = len(M[0])
    pivots = []
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(M)) if M[i][col]), None)
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        inv = F.inv(M[rank][col])
        M[rank] = [F.mul(inv, x) for x in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][col]:
                f = M[i][col]
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(M):
            break
    return M[:rank], pivots


def rank(F, rows):
    return len(rref(F, rows)[1])


def nullspace(F, rows, ncols=None):
    """Basis of {v : rows . v = 0} as a list of tuples."""
    if ncols is None:
        ncols = len(rows[0])
    R, pivots = rref(F, rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [0] * ncols
        v[fcol] = 1
        for r, pcol in zip(R, pivots):
            v[pcol] = F.neg(r[fcol])
        basis.append(tuple(v))
    return basis
