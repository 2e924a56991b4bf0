"""Text and JSON file formats: towers, unitals, reports."""

import json
from pathlib import Path

from .finite_field import make_tower
from .projective_plane import ProjPoint
from .unitals import Unital


class TowerMismatch(ValueError):
    pass


def tower_header_line(F):
    return f"# p={F.p} r={F.r} modulus={','.join(str(c) for c in F.modulus)}"


def parse_tower_header(line):
    fields = dict(tok.split("=", 1) for tok in line.lstrip("#").split())
    p, r = int(fields["p"]), int(fields["r"])
    modulus = tuple(int(c) for c in fields["modulus"].split(","))
    return p, r, modulus


def check_tower(F, p, r, modulus):
    if (F.p, F.r) != (p, r) or F.modulus != modulus:
        raise TowerMismatch(
            f"file is over p={p} r={r} modulus={list(modulus)}, expected p={F.p} r={F.r} modulus={list(F.modulus)}"
        )


def write_unital(path, U, certificate=None):
    lines = ["# unitalkit unital", tower_header_line(U.F), f"# kind: {U.kind}"]
    if certificate is not None:
        spectrum = ",".join(f"{k}:{v}" for k, v in sorted(certificate.spectrum.items()))
        lines.append(f"# certificate: is_unital={'true' if certificate.ok else 'false'} size={certificate.size} spectrum={spectrum}")
    lines += [str(P) for P in U.points]
    Path(path).write_text("\n".join(lines) + "\n")


def read_unital(path, F=None):
    """Load a unital file.  When ``F`` is given the header must match it."""
    text = Path(path).read_text().splitlines()
    header = [ln for ln in text if ln.startswith("#")]
    body = [ln for ln in text if ln.strip() and not ln.startswith("#")]
    tower_line = next((ln for ln in header if "p=" in ln and "modulus=" in ln), None)
    if tower_line is None:
        raise ValueError(f"{path}: missing tower header")
    try:
        p, r, modulus = parse_tower_header(tower_line)
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}: malformed tower header") from exc
    if F is None:
        F = make_tower(p, r)
    check_tower(F, p, r, modulus)
    kind = next((ln.split(":", 1)[1].strip() for ln in header if ln.startswith("# kind:")), "custom")
    points = [ProjPoint.parse(ln) for ln in body]
    return Unital(F, points, kind=kind)


def dump_json(obj, path=None):
    text = json.dumps(obj, indent=2) + "\n"
    if path is None:
        return text
    Path(path).write_text(text)
    return text


def read_quotient_plane(path, F=None):
    """Rebuild the orbit plane recorded in a JSON file and check that the
    stored point table and incidence rows match the rebuilt one."""
    from .quotient_plane import build_quotient_plane

    data = json.loads(Path(path).read_text())
    t = data["tower"]
    if F is None:
        F = make_tower(t["p"], t["r"])
    check_tower(F, t["p"], t["r"], tuple(t["modulus"]))
    pi = build_quotient_plane(F, data["lambda"])
    if pi.to_dict() != data:
        raise ValueError(f"{path}: stored plane differs from the rebuilt one")
    return pi
