"""Finite abstract simplicial complexes, points in barycentric coordinates,
barycentric subdivision and open stars.

A complex carries the "standard" geometry: every n-simplex is identified with
the convex hull of the unit basis vectors of R^{n+1}, so barycentric
coordinates over a common carrier simplex double as Euclidean coordinates.
All global metric questions live in :mod:`plcontrol.metrics`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

TOL = 1e-9


class MalformedInputError(ValueError):
    """Raised for inputs violating structural preconditions."""


class NotFoundError(KeyError):
    """Raised when a simplex or point does not belong to the complex at hand."""


@dataclass(frozen=True)
class Simplex:
    """A simplex as a duplicate-free tuple of vertex labels.

    The tuple order is the owning complex's vertex order (first appearance);
    complexes canonicalize on construction, so equal vertex sets compare equal.
    """

    vertices: tuple[str, ...]

    def __post_init__(self):
        if not self.vertices:
            raise MalformedInputError("empty simplex")
        if len(set(self.vertices)) != len(self.vertices):
            raise MalformedInputError(f"duplicate vertex in simplex {self.vertices}")

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def faces(self) -> Iterable["Simplex"]:
        """All nonempty faces, the simplex itself included."""
        n = len(self.vertices)
        for mask in range(1, 1 << n):
            yield Simplex(tuple(v for i, v in enumerate(self.vertices) if mask >> i & 1))

    def facets(self) -> list["Simplex"]:
        """Codimension-one faces (empty list for a vertex)."""
        if self.dim == 0:
            return []
        return [
            Simplex(self.vertices[:i] + self.vertices[i + 1 :])
            for i in range(len(self.vertices))
        ]

    def contains(self, other: "Simplex") -> bool:
        return set(other.vertices) <= set(self.vertices)

    def __le__(self, other: "Simplex") -> bool:
        return other.contains(self)

    def __lt__(self, other: "Simplex") -> bool:
        return self != other and other.contains(self)

    def __str__(self) -> str:
        return "{" + ",".join(self.vertices) + "}"


class SimplicialComplex:
    """A finite complex closed under taking faces.

    Vertex order is fixed at construction (first appearance in the generator
    list) and is the total order used everywhere determinism matters.
    """

    def __init__(self, generators: Iterable[Iterable[str]], vertex_order: Iterable[str] | None = None):
        gens = [tuple(g) for g in generators]
        if not gens:
            raise MalformedInputError("a complex needs at least one generator simplex")
        order: list[str] = []
        seen: set[str] = set()
        if vertex_order is not None:
            for v in vertex_order:
                if v in seen:
                    raise MalformedInputError(f"duplicate vertex label {v!r}")
                seen.add(v)
                order.append(v)
        for g in gens:
            if len(set(g)) != len(g):
                raise MalformedInputError(f"duplicate vertex inside one simplex: {g}")
            for v in g:
                if v not in seen:
                    seen.add(v)
                    order.append(v)
        self._order: tuple[str, ...] = tuple(order)
        self._index: dict[str, int] = {v: i for i, v in enumerate(order)}

        simplices: set[Simplex] = set()
        for g in gens:
            top = self.simplex(g)
            simplices.update(top.faces())
        self._simplices = frozenset(simplices)
        self._by_dim: dict[int, tuple[Simplex, ...]] = {}
        for s in sorted(self._simplices, key=self.sort_key):
            self._by_dim.setdefault(s.dim, ())
            self._by_dim[s.dim] += (s,)
        self._cache: dict = {}

    # -- basic structure ----------------------------------------------------

    @property
    def vertex_order(self) -> tuple[str, ...]:
        return self._order

    @property
    def simplices(self) -> frozenset[Simplex]:
        return self._simplices

    @property
    def dimension(self) -> int:
        return max(self._by_dim)

    def vertex_index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise NotFoundError(f"vertex {label!r} not in complex") from None

    def simplex(self, labels: Iterable[str]) -> Simplex:
        """Canonical simplex on the given labels (sorted by vertex order)."""
        labels = tuple(labels)
        for v in labels:
            if v not in self._index:
                raise NotFoundError(f"vertex {v!r} not in complex")
        return Simplex(tuple(sorted(labels, key=self._index.__getitem__)))

    def sort_key(self, s: Simplex) -> tuple:
        return (s.dim, tuple(self._index[v] for v in s.vertices))

    def sorted_simplices(self) -> list[Simplex]:
        out: list[Simplex] = []
        for d in sorted(self._by_dim):
            out.extend(self._by_dim[d])
        return out

    def simplices_of_dim(self, d: int) -> tuple[Simplex, ...]:
        return self._by_dim.get(d, ())

    def maximal_simplices(self) -> list[Simplex]:
        return [s for s in self.sorted_simplices() if not any(s < t for t in self._simplices)]

    def __contains__(self, s: Simplex) -> bool:
        return s in self._simplices

    def contains_labels(self, labels: Iterable[str]) -> bool:
        labels = tuple(labels)
        if any(v not in self._index for v in labels):
            return False
        return self.simplex(labels) in self._simplices

    def star(self, s: Simplex) -> set[Simplex]:
        """Open star: all cofaces of ``s`` (each standing for its open cell)."""
        if s not in self._simplices:
            raise NotFoundError(f"simplex {s} not in complex")
        return {t for t in self._simplices if s <= t}

    def cofaces(self, s: Simplex) -> list[Simplex]:
        """Proper cofaces of ``s``, deterministically ordered."""
        return [t for t in self.sorted_simplices() if s < t]

    def components(self) -> list[frozenset[str]]:
        """Connected components as vertex sets (union-find over edges)."""
        parent = {v: v for v in self._order}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for e in self.simplices_of_dim(1):
            a, b = (find(v) for v in e.vertices)
            if a != b:
                parent[a] = b
        groups: dict[str, set[str]] = {}
        for v in self._order:
            groups.setdefault(find(v), set()).add(v)
        return [frozenset(g) for g in groups.values()]

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * len(self._by_dim[d]) for d in self._by_dim)

    def __repr__(self) -> str:
        return f"SimplicialComplex(dim={self.dimension}, simplices={len(self._simplices)})"


def closure_complex(generators: Iterable[Iterable[str]], vertex_order: Iterable[str] | None = None) -> SimplicialComplex:
    """Build the complex generated by the given simplices, closed under faces."""
    return SimplicialComplex(generators, vertex_order)


# -- points ------------------------------------------------------------------

@dataclass(frozen=True)
class Point:
    """A location in a complex: carrier simplex plus barycentric coordinates.

    Canonical form has all coordinates strictly positive, so the carrier is
    the unique simplex whose interior contains the point.
    """

    carrier: Simplex
    coords: tuple[float, ...]

    def __post_init__(self):
        if len(self.coords) != len(self.carrier.vertices):
            raise MalformedInputError(
                f"{len(self.coords)} coords for carrier {self.carrier} "
                f"with {len(self.carrier.vertices)} vertices"
            )
        if any(c < -TOL for c in self.coords):
            raise MalformedInputError(f"negative barycentric coordinate in {self.coords}")
        if abs(sum(self.coords) - 1.0) > 1e-7:
            raise MalformedInputError(f"coordinates sum to {sum(self.coords)}, not 1")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.carrier.vertices, self.coords))

    def coord_of(self, label: str) -> float:
        try:
            return self.coords[self.carrier.vertices.index(label)]
        except ValueError:
            return 0.0

    def support(self) -> tuple[str, ...]:
        return tuple(v for v, c in zip(self.carrier.vertices, self.coords) if c > TOL)


def make_point(K: SimplicialComplex, weights: Mapping[str, float], tol: float = TOL) -> Point:
    """Canonical point from a vertex-weight mapping (zeros dropped, renormalized)."""
    items = [(v, w) for v, w in weights.items() if w > tol]
    if not items:
        raise MalformedInputError("point with empty support")
    items.sort(key=lambda kv: K.vertex_index(kv[0]))
    total = sum(w for _, w in items)
    if abs(total - 1.0) > 1e-7:
        raise MalformedInputError(f"weights sum to {total}, not 1")
    carrier = K.simplex([v for v, _ in items])
    if carrier not in K.simplices:
        raise NotFoundError(f"support {carrier} spans no simplex of the complex")
    return Point(carrier, tuple(w / total for _, w in items))


def canonical(K: SimplicialComplex, p: Point, tol: float = TOL) -> Point:
    """Drop (near-)zero coordinates so the carrier is minimal."""
    if all(c > tol for c in p.coords):
        if p.carrier not in K.simplices:
            raise NotFoundError(f"carrier {p.carrier} not in complex")
        total = sum(p.coords)
        if abs(total - 1.0) > 1e-12:
            return Point(p.carrier, tuple(c / total for c in p.coords))
        return p
    return make_point(K, p.as_dict(), tol=tol)


def vertex_point(K: SimplicialComplex, label: str) -> Point:
    return Point(K.simplex([label]), (1.0,))


def barycenter(K: SimplicialComplex, s: Simplex) -> Point:
    if s not in K.simplices:
        raise NotFoundError(f"simplex {s} not in complex")
    n = len(s.vertices)
    return Point(s, (1.0 / n,) * n)


def combine_points(K: SimplicialComplex, weighted: Iterable[tuple[float, Point]]) -> Point:
    """Affine combination of points; their carriers must span a common simplex."""
    acc: dict[str, float] = {}
    for w, p in weighted:
        if w == 0.0:
            continue
        for v, c in zip(p.carrier.vertices, p.coords):
            acc[v] = acc.get(v, 0.0) + w * c
    return make_point(K, acc)


# -- barycentric subdivision ---------------------------------------------------

def _sd_label(s: Simplex) -> str:
    return "{" + ",".join(s.vertices) + "}"


def barycentric_subdivision(K: SimplicialComplex) -> tuple[SimplicialComplex, dict[str, Point]]:
    """Barycentric subdivision Sd K together with the vertex-to-point mapping.

    Vertices of Sd K are the barycenters of simplices of K; the simplices of
    Sd K are the chains in the face poset of K.
    """
    order = [_sd_label(s) for s in K.sorted_simplices()]
    chains: list[tuple[str, ...]] = []

    def extend(chain: list[Simplex]):
        chains.append(tuple(_sd_label(s) for s in chain))
        last = chain[-1]
        for t in K.sorted_simplices():
            if last < t:
                chain.append(t)
                extend(chain)
                chain.pop()

    for s in K.sorted_simplices():
        extend([s])
    sd = SimplicialComplex(chains, vertex_order=order)
    mapping = {_sd_label(s): barycenter(K, s) for s in K.sorted_simplices()}
    return sd, mapping


def count_chains(K: SimplicialComplex) -> int:
    """Number of nonempty chains in the face poset (brute-force oracle)."""
    simps = K.sorted_simplices()
    memo: dict[Simplex, int] = {}

    def chains_from(s: Simplex) -> int:
        if s in memo:
            return memo[s]
        total = 1  # the chain consisting of s alone
        for t in simps:
            if s < t:
                total += chains_from(t)
        memo[s] = total
        return total

    return sum(chains_from(s) for s in simps)


def subdivision_points(K: SimplicialComplex, rounds: int = 1) -> list[Point]:
    """Vertices of the r-fold barycentric subdivision, as points of K."""
    points = {v: vertex_point(K, v) for v in K.vertex_order}
    current = K
    mappings: list[dict[str, Point]] = []
    for _ in range(rounds):
        current, mapping = barycentric_subdivision(current)
        mappings.append(mapping)
    # push each Sd^r vertex down through the mapping chain
    out: list[Point] = []
    for v in current.vertex_order:
        p = _push_down(v, mappings, K, points)
        out.append(p)
    return out


def _push_down(label: str, mappings: list[dict[str, Point]], K: SimplicialComplex, base: dict[str, Point]) -> Point:
    if not mappings:
        return base[label]
    p = mappings[-1][label]
    if len(mappings) == 1:
        return p
    rest = mappings[:-1]
    parts = []
    for v, c in zip(p.carrier.vertices, p.coords):
        parts.append((c, _push_down(v, rest, K, base)))
    return combine_points(K, parts)
