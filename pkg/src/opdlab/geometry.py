"""The projective plane PG(2, q), hyperovals and the two designs they carry."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .design import Design, nwords
from .gf import Field
from .poly import Poly, exponent_orbit, is_opolynomial


class GeometryError(ValueError):
    pass


def normalize(F: Field, triple) -> tuple[int, int, int]:
    """Scale so the last nonzero coordinate is 1."""
    t = [int(x) for x in triple]
    nz = [i for i in range(3) if t[i]]
    if not nz:
        raise GeometryError("the zero vector is not a projective point")
    s = F.inv(t[nz[-1]])
    return tuple(F.mul(s, x) for x in t)


def _normalized_triples(q: int) -> np.ndarray:
    out = [(x0, x1, 1) for x0 in range(q) for x1 in range(q)]
    out += [(x0, 1, 0) for x0 in range(q)]
    out.append((1, 0, 0))
    return np.array(sorted(out), dtype=np.int64)


class ProjectivePlane:
    """Points and lines of PG(2, q) as normalized triples in lexicographic order."""

    def __init__(self, F: Field):
        self.field = F
        self.q = F.q
        self.points = _normalized_triples(F.q)
        self.lines = self.points  # dual triples share the normalization
        self.size = len(self.points)
        self._index = {tuple(r): i for i, r in enumerate(self.points.tolist())}

    def index(self, triple) -> int:
        return self._index[normalize(self.field, triple)]

    @cached_property
    def incidence(self) -> np.ndarray:
        """``incidence[line, point]``: zero dot product."""
        F = self.field
        L, P = self.lines, self.points
        acc = np.zeros((self.size, self.size), dtype=np.int64)
        for i in range(3):
            acc = F.add(acc, F.mul_table[L[:, i][:, None], P[:, i][None, :]])
        inc = acc == 0
        inc.setflags(write=False)
        return inc

    def line_through(self, i: int, j: int) -> int:
        both = self.incidence[:, i] & self.incidence[:, j]
        return int(np.nonzero(both)[0][0])


@dataclass(frozen=True)
class Hyperoval:
    plane: ProjectivePlane
    points: tuple  # indices into plane.points

    @property
    def q(self) -> int:
        return self.plane.q

    def triples(self) -> list[tuple]:
        return [tuple(self.plane.points[i].tolist()) for i in self.points]

    def mask(self) -> np.ndarray:
        m = np.zeros(self.plane.size, dtype=bool)
        m[list(self.points)] = True
        return m


_PLANES: dict = {}


def plane_of(F: Field) -> ProjectivePlane:
    if F not in _PLANES:
        _PLANES[F] = ProjectivePlane(F)
    return _PLANES[F]


def hyperoval_of(f: Poly) -> Hyperoval:
    """``{(f(c), c, 1)} + {(1, 0, 0), (0, 1, 0)}`` for an o-polynomial ``f``."""
    F = f.field
    if not is_opolynomial(f):
        raise GeometryError("not an o-polynomial")
    P = plane_of(F)
    pts = [P.index((int(f.values[c]), c, 1)) for c in range(F.q)]
    pts += [P.index((1, 0, 0)), P.index((0, 1, 0))]
    H = Hyperoval(P, tuple(sorted(pts)))
    if not is_hyperoval(H.points, P):
        raise GeometryError("construction did not produce a hyperoval")
    return H


def is_hyperoval(points, plane: ProjectivePlane) -> bool:
    """``q + 2`` points, every line meeting them in 0 or 2."""
    idx = sorted({p if isinstance(p, (int, np.integer)) else plane.index(p) for p in points})
    if len(idx) != plane.q + 2:
        return False
    counts = plane.incidence[:, idx].sum(axis=1)
    return bool(np.all((counts == 0) | (counts == 2)))


def no_three_collinear(points, plane: ProjectivePlane) -> bool:
    """Direct triple check, independent of the per-line counts."""
    idx = [p if isinstance(p, (int, np.integer)) else plane.index(p) for p in points]
    F = plane.field
    for a, b, c in itertools.combinations(idx, 3):
        M = plane.points[[a, b, c]]
        if _det3(F, M) == 0:
            return False
    return True


def _det3(F: Field, M) -> int:
    m = [[int(x) for x in r] for r in M]
    t1 = F.mul(m[0][0], F.sub(F.mul(m[1][1], m[2][2]), F.mul(m[1][2], m[2][1])))
    t2 = F.mul(m[0][1], F.sub(F.mul(m[1][0], m[2][2]), F.mul(m[1][2], m[2][0])))
    t3 = F.mul(m[0][2], F.sub(F.mul(m[1][0], m[2][1]), F.mul(m[1][1], m[2][0])))
    return F.add(F.sub(t1, t2), t3)


def classify_lines(H: Hyperoval) -> tuple[np.ndarray, np.ndarray]:
    """Indices of secant and exterior lines."""
    counts = H.plane.incidence[:, list(H.points)].sum(axis=1)
    if np.any((counts != 0) & (counts != 2)):
        raise GeometryError("not a hyperoval")
    return np.nonzero(counts == 2)[0], np.nonzero(counts == 0)[0]


def build_W(H: Hyperoval) -> Design:
    """Points: exterior lines.  Blocks: points off ``H``, each as its exterior lines."""
    P = H.plane
    _, exterior = classify_lines(H)
    off = np.nonzero(~H.mask())[0]
    inc = P.incidence[np.ix_(exterior, off)].T  # block per off point
    v = len(exterior)
    return Design(v, kernels.pack_rows(np.ascontiguousarray(inc), nwords(v)),
                  source={"construction": "W", "q": P.q},
                  point_labels=[tuple(P.lines[i].tolist()) for i in exterior])


def build_S(H: Hyperoval) -> Design:
    """Points: the points off ``H``.  Block of ``x``: ``x`` and every ``y`` with ``xy`` secant."""
    P = H.plane
    secants, _ = classify_lines(H)
    off = np.nonzero(~H.mask())[0]
    on_secant = P.incidence[np.ix_(secants, off)]  # secant x off point
    si = on_secant.astype(np.int32)
    # x ~ y iff some secant passes through both; distinct points share at most one line
    adj = (si.T @ si) > 0
    v = len(off)
    return Design(v, kernels.pack_rows(np.ascontiguousarray(adj), nwords(v)),
                  source={"construction": "S", "q": P.q},
                  point_labels=[tuple(P.points[i].tolist()) for i in off])


def monomial_hyperovals_equivalent(e1: int, e2: int, F: Field) -> bool:
    """Equivalence of the hyperovals of ``x^e1`` and ``x^e2`` via the exponent orbit."""
    return e2 % (F.q - 1) in exponent_orbit(e1, F)
