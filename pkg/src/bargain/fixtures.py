"""Named worked-example collections."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .characterize import pie_collection
from .core import Collection, Point, serialize_collection, to_rational

__all__ = ["example3_collection", "thm3_Appp", "fixture_collections", "write_fixtures", "PIE_KS"]

PIE_KS = (1, 2, 3, 4, 20)


def _c(*pts) -> Collection:
    return Collection(tuple(Point(to_rational(a), to_rational(b)) for a, b in pts))


def example3_collection(k: int) -> Collection:
    """``3^j`` copies each of ``(2^-j, 0)`` and ``(0, 2^-j)`` for ``j = 0..k``."""
    pts = []
    for j in range(k + 1):
        v = Fraction(1, 2**j)
        pts += [Point(v, Fraction(0))] * 3**j
        pts += [Point(Fraction(0), v)] * 3**j
    return Collection(tuple(pts))


def thm3_Appp(eps=Fraction(1, 4)) -> Collection:
    eps = to_rational(eps)
    mid = Fraction(3, 4) + eps / 2
    return _c((1, 0), (mid, mid), (0, 1))


def fixture_collections(eps=Fraction(1, 4)) -> dict[str, Collection]:
    """Every fixture keyed by its stable file stem."""
    out = {
        "example1": _c((1, 0), (0, 1), ("0.99", "0.99"), ("2/3", "2/3")),
        "example2": _c((1, 1), ("0.98", 0), (0, "0.98")),
    }
    for k in (1, 2, 3):
        out[f"example3_k{k}"] = example3_collection(k)
    out["frontier_example"] = _c((1, 0), ("0.4", 0), ("0.4", 0), (0, 1), (0, "0.4"), (0, "0.4"))
    out["thm2_A"] = _c((0, 0), (1, 1))
    out["thm2_Ap"] = _c((0, 1), (1, 0))
    out["thm2_App"] = _c((0, 1), (1, 1))
    out["thm3_A"] = _c((1, 0), (0, 1))
    out["thm3_Ap"] = _c((1, 0), (0, 1), (0, 1))
    out["thm3_App"] = _c((1, 0), (1, 0), (0, 1))
    out["thm3_Appp"] = thm3_Appp(eps)
    for k in PIE_KS:
        out[f"pie_k{k}"] = pie_collection(k)
    return out


def write_fixtures(out_dir, eps=Fraction(1, 4)) -> list[Path]:
    """Write ``<name>.json`` for every fixture; rewriting gives identical bytes."""
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, A in fixture_collections(eps).items():
        p = d / f"{name}.json"
        data = serialize_collection(A)
        if not p.exists() or p.read_bytes() != data:
            p.write_bytes(data)
        paths.append(p)
    return paths
