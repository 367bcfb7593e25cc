"""Contractibility semi-decision: integral homology via Smith normal form,
greedy elementary collapse, and explicit contraction homotopies replayed from
collapse sequences.

Contractibility is undecidable in general; the Unknown verdict is first-class
and must be propagated by callers rather than guessed away.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import (
    MalformedInputError,
    Point,
    Simplex,
    SimplicialComplex,
    TOL,
    combine_points,
    make_point,
)
from .evaluators import Homotopy


class NotContractibleError(ValueError):
    """A full contraction was requested from a partial collapse."""


# -- Smith normal form over exact integers --------------------------------------

def smith_diagonal(matrix: list[list[int]]) -> list[int]:
    """Diagonal of the Smith normal form (nonnegative, divisibility chain).

    Arbitrary-precision integers throughout, so torsion cannot overflow.
    """
    A = [row[:] for row in matrix]
    m = len(A)
    n = len(A[0]) if m else 0
    t = 0
    while True:
        pivot = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = A[i][j]
                if v != 0 and (best is None or abs(v) < best):
                    best = abs(v)
                    pivot = (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        A[t], A[pi] = A[pi], A[t]
        for row in A:
            row[t], row[pj] = row[pj], row[t]
        while True:
            reduced = True
            for i in range(t + 1, m):
                if A[i][t] != 0:
                    q = A[i][t] // A[t][t]
                    for j in range(t, n):
                        A[i][j] -= q * A[t][j]
                    if A[i][t] != 0:  # remainder becomes the new, smaller pivot
                        A[t], A[i] = A[i], A[t]
                        reduced = False
            for j in range(t + 1, n):
                if A[t][j] != 0:
                    q = A[t][j] // A[t][t]
                    for i in range(t, m):
                        A[i][j] -= q * A[i][t]
                    if A[t][j] != 0:
                        for i in range(t, m):
                            A[i][t], A[i][j] = A[i][j], A[i][t]
                        reduced = False
            if reduced:
                break
        # enforce divisibility of the remaining block by the pivot
        p = A[t][t]
        fixed = True
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if A[i][j] % p != 0:
                    for jj in range(t, n):
                        A[t][jj] += A[i][jj]
                    fixed = False
                    break
            if not fixed:
                break
        if not fixed:
            continue
        t += 1
    return [abs(A[i][i]) for i in range(min(m, n)) if A[i][i] != 0]


def boundary_matrix(K: SimplicialComplex, d: int) -> list[list[int]]:
    """Matrix of the boundary map C_d -> C_{d-1}; d = 0 gives the augmentation."""
    cols = K.simplices_of_dim(d)
    if d == 0:
        return [[1] * len(cols)]
    rows = K.simplices_of_dim(d - 1)
    index = {s: i for i, s in enumerate(rows)}
    M = [[0] * len(cols) for _ in rows]
    for j, s in enumerate(cols):
        for i in range(len(s.vertices)):
            face = Simplex(s.vertices[:i] + s.vertices[i + 1 :])
            M[index[face]][j] = (-1) ** i
    return M


@dataclass(frozen=True)
class HomologyProfile:
    """Reduced Betti numbers and torsion coefficients per degree."""

    betti: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]

    @property
    def trivial(self) -> bool:
        return all(b == 0 for b in self.betti) and all(not t for t in self.torsion)


def homology(K: SimplicialComplex) -> HomologyProfile:
    """Reduced integral simplicial homology via Smith normal form."""
    dim = K.dimension
    diags = {d: smith_diagonal(boundary_matrix(K, d)) for d in range(dim + 2)}
    ranks = {d: len(diags[d]) for d in diags}
    counts = {d: len(K.simplices_of_dim(d)) for d in range(dim + 1)}
    betti = []
    torsion = []
    for d in range(dim + 1):
        b = counts[d] - ranks.get(d, 0) - ranks.get(d + 1, 0)
        betti.append(b)
        torsion.append(tuple(v for v in diags.get(d + 1, []) if v > 1))
    return HomologyProfile(betti=tuple(betti), torsion=tuple(torsion))


# -- greedy collapse -------------------------------------------------------------

@dataclass(frozen=True)
class CollapseSequence:
    """Elementary collapses (free face, its unique coface), replayable in order."""

    steps: tuple[tuple[Simplex, Simplex], ...]
    complete: bool
    basepoint: str | None
    remaining: tuple[Simplex, ...]


def greedy_collapse(K: SimplicialComplex) -> CollapseSequence:
    """Repeatedly remove the smallest free face (order: dimension, then vertex
    indices); terminates at a single vertex or at a stuck core."""
    alive: set[Simplex] = set(K.simplices)
    steps: list[tuple[Simplex, Simplex]] = []
    while True:
        free: list[tuple[tuple, Simplex, Simplex]] = []
        for s in alive:
            cofaces = [t for t in alive if s < t]
            if len(cofaces) == 1:
                free.append((K.sort_key(s), s, cofaces[0]))
        if not free:
            break
        _, a, b = min(free)
        alive.discard(a)
        alive.discard(b)
        steps.append((a, b))
    remaining = sorted(alive, key=K.sort_key)
    complete = len(remaining) == 1 and remaining[0].dim == 0
    return CollapseSequence(
        steps=tuple(steps),
        complete=complete,
        basepoint=remaining[0].vertices[0] if complete else None,
        remaining=tuple(remaining),
    )


# -- verdicts --------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    kind: str  # "contractible" | "not_contractible" | "unknown"
    reason: str
    sequence: CollapseSequence | None = None
    profile: HomologyProfile | None = None

    @property
    def is_contractible(self) -> bool:
        return self.kind == "contractible"


def contractibility_verdict(K: SimplicialComplex | None) -> Verdict:
    """Empty, disconnected or homologically nontrivial complexes are refuted;
    a full collapse certifies contractibility; otherwise Unknown."""
    if K is None:
        return Verdict(kind="not_contractible", reason="empty complex")
    prof = homology(K)
    if not prof.trivial:
        nz = [f"b~{d}={b}" for d, b in enumerate(prof.betti) if b] + [
            f"torsion in degree {d}" for d, t in enumerate(prof.torsion) if t
        ]
        if prof.betti[0] > 0:
            nz.append("disconnected")
        return Verdict(kind="not_contractible", reason=", ".join(nz), profile=prof)
    seq = greedy_collapse(K)
    if seq.complete:
        # soundness cross-check: a collapse certificate implies trivial homology
        assert prof.trivial
        return Verdict(kind="contractible", reason="full collapse", sequence=seq, profile=prof)
    return Verdict(kind="unknown", reason="greedy collapse stuck, homology trivial", profile=prof)


# -- contraction homotopy from a collapse sequence -------------------------------

def _squash(K: SimplicialComplex, p: Point, free: Simplex, coface: Simplex) -> Point:
    """The elementary-collapse retraction on the coface: subtract the minimal
    free-face coordinate from the free face and push it onto the apex vertex."""
    if not coface.contains(p.carrier):
        return p
    d = p.as_dict()
    apex = next(v for v in coface.vertices if v not in free.vertices)
    m = min(d.get(v, 0.0) for v in free.vertices)
    if m <= 0.0:
        return p
    out = {}
    for v in free.vertices:
        out[v] = d.get(v, 0.0) - m
    out[apex] = d.get(apex, 0.0) + m * len(free.vertices)
    return make_point(K, out)


def contraction_from_collapse(K: SimplicialComplex, seq: CollapseSequence) -> Homotopy:
    """Contraction K x I -> K: each elementary collapse contributes its linear
    deformation retraction on an equal subinterval, composed in order."""
    if not seq.complete:
        raise NotContractibleError("collapse sequence is partial; no contraction")
    steps = seq.steps
    N = len(steps)
    base = seq.basepoint

    def fn(p: Point, t: float) -> Point:
        if N == 0 or t <= 0.0:
            return p
        s = min(max(t, 0.0), 1.0) * N
        k = min(int(s), N - 1)
        frac = s - k
        cur = p
        for i in range(k):
            cur = _squash(K, cur, *steps[i])
        if frac <= 0.0:
            return cur
        nxt = _squash(K, cur, *steps[k])
        if frac >= 1.0:
            return nxt
        return combine_points(K, [(1.0 - frac, cur), (frac, nxt)])

    return Homotopy(
        domain=K,
        codomain=K,
        fn=fn,
        name=f"contraction to {base}",
        lipschitz=float(2 * max(1, N)),
    )
