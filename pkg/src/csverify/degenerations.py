"""Ground-truth instances from dual graphs of degenerate curve fibres.

For a one-parameter family of curves whose special fibre is totally
degenerate (all components rational, simple normal crossings, inside a
smooth total surface), every cohomology group in the picture is governed
by the combinatorics of the dual graph: vertices are components, edges
are nodes, and the first Betti number b1 = e - v + 1 controls the
weight-0 part of the limit H^1.  The dictionary used here:

  degree k :   0            1                          2
  A_k      :   Q (wt 0)     Q^b1 (wt 0)                Q^v (wt 2)
  P_k      :   Q (wt 0)     Q^b1(wt 0) + Q^b1(wt 2)    Q (wt 2)
  B_{k+2}  :   Q^v (wt 2)   Q^b1 (wt 4)                Q (wt 4)

with the nilpotent operator on P_1 pairing the weight-2 copy identically
onto the weight-0 copy, and the map B_2 -> A_2 given by the intersection
matrix of the components.  The loop convention adds 2 per loop to the
diagonal so that a single irreducible fibre (one vertex, one loop) has
self-intersection 0; with the default self-intersections (-degree) the
matrix has row sums zero and one-dimensional kernel, which is exactly
what exactness of the assembled sequences needs.  Every fixture is run
through the full hypothesis checker before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .filtration import FilteredSpace, full_subspace
from .generators import assemble_row
from .linalg import Matrix, hstack, span_of_vectors, vstack
from .verifier import CSInstance, check_instance_hypotheses


class DisconnectedGraphError(ValueError):
    """The dual graph of a fibre must be connected."""


class FixtureError(RuntimeError):
    """The assembled fixture failed its own hypothesis check."""


@dataclass(frozen=True)
class DualGraph:
    """Dual graph of a degenerate fibre: loops and multi-edges allowed.

    ``self_intersections`` defaults to -degree per vertex (degree counts
    loops twice), the convention for a fibre of an elliptic fibration.
    """

    vertices: int
    edges: Tuple[Tuple[int, int], ...]
    self_intersections: Tuple[int, ...]

    @staticmethod
    def make(vertices: int, edges: Sequence[Sequence[int]],
             self_intersections: Optional[Sequence[int]] = None) -> "DualGraph":
        if vertices < 1:
            raise ValueError("a dual graph needs at least one vertex")
        norm = []
        for e in edges:
            i, j = int(e[0]), int(e[1])
            if not (0 <= i < vertices and 0 <= j < vertices):
                raise ValueError(f"edge {e} out of range")
            norm.append((min(i, j), max(i, j)))
        norm_edges = tuple(sorted(norm))
        if self_intersections is None:
            deg = [0] * vertices
            for i, j in norm_edges:
                deg[i] += 1
                deg[j] += 1
            self_int = tuple(-d for d in deg)
        else:
            if len(self_intersections) != vertices:
                raise ValueError("one self-intersection per vertex required")
            self_int = tuple(int(s) for s in self_intersections)
        graph = DualGraph(vertices, norm_edges, self_int)
        if not graph._connected():
            raise DisconnectedGraphError("dual graph is not connected")
        return graph

    def _connected(self) -> bool:
        parent = list(range(self.vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in self.edges:
            parent[find(i)] = find(j)
        return len({find(x) for x in range(self.vertices)}) == 1

    def loops(self, i: int) -> int:
        return sum(1 for a, b in self.edges if a == b == i)

    def multiplicity(self, i: int, j: int) -> int:
        a, b = min(i, j), max(i, j)
        return sum(1 for e in self.edges if e == (a, b))


def cycle_graph(n: int) -> DualGraph:
    """The dual graph of an n-gon of rational curves (type I_n)."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return DualGraph.make(1, [(0, 0)])
    if n == 2:
        return DualGraph.make(2, [(0, 1), (0, 1)])
    return DualGraph.make(n, [(i, (i + 1) % n) for i in range(n)])


def theta_graph() -> DualGraph:
    """Two vertices joined by three parallel edges."""
    return DualGraph.make(2, [(0, 1), (0, 1), (0, 1)])


def betti(g: DualGraph) -> Tuple[int, int]:
    """(b0, b1) of the graph; b0 must be 1."""
    if not g._connected():
        raise DisconnectedGraphError("dual graph is not connected")
    return 1, len(g.edges) - g.vertices + 1


def intersection_matrix(g: DualGraph) -> Matrix:
    """Symmetric intersection pairing of the fibre components.

    Off-diagonal entries are edge multiplicities; diagonal entries are the
    self-intersections plus 2 per loop.  With default self-intersections
    the rows sum to zero and the kernel is spanned by (1, ..., 1).
    """
    v = g.vertices
    rows = []
    for i in range(v):
        row = []
        for j in range(v):
            if i == j:
                row.append(g.self_intersections[i] + 2 * g.loops(i))
            else:
                row.append(g.multiplicity(i, j))
        rows.append(row)
    return Matrix.from_rows(rows, ncols=v)


def curve_cs_instance(g: DualGraph) -> CSInstance:
    """Full CS instance of a totally degenerate curve with dual graph g.

    The instance is validated with the hypothesis checker; an
    inconsistency raises FixtureError naming the first failing node.
    """
    _, b1 = betti(g)
    v = g.vertices

    p_family = {0: FilteredSpace.pure(1, 0), 2: FilteredSpace.pure(1, 2)}
    n_family = {0: Matrix.zero(1, 1), 2: Matrix.zero(1, 1)}
    if b1 > 0:
        w0 = span_of_vectors(
            [tuple(1 if c == i else 0 for c in range(2 * b1)) for i in range(b1)], 2 * b1)
        p_family[1] = FilteredSpace(2 * b1, {0: w0, 2: full_subspace(2 * b1)})
        n_rows = [[0] * (2 * b1) for _ in range(2 * b1)]
        for i in range(b1):
            n_rows[i][b1 + i] = 1
        n_family[1] = Matrix.from_rows(n_rows, ncols=2 * b1)

    _, c_family, r_family, s_family = assemble_row(p_family, n_family, range(0, 5))

    a_family = {0: FilteredSpace.pure(1, 0), 1: FilteredSpace.pure(b1, 0), 2: FilteredSpace.pure(v, 2)}
    b_family = {2: FilteredSpace.pure(v, 2), 3: FilteredSpace.pure(b1, 4), 4: FilteredSpace.pure(1, 4)}

    ones_row = Matrix.from_rows([[1] * v], ncols=v)
    a_maps = {
        0: Matrix.identity(1),
        1: vstack(Matrix.zero(1, b1), Matrix.identity(b1)),
        2: vstack(Matrix.zero(b1, v), ones_row),
    }
    b_maps = {2: intersection_matrix(g)}
    c_maps = {
        1: hstack(Matrix.from_rows([[1]] * v, ncols=1), Matrix.zero(v, b1)),
        2: hstack(Matrix.identity(b1), Matrix.zero(b1, 1)),
        3: Matrix.identity(1),
    }

    inst = CSInstance((0, 4), a_family, b_family, c_family, p_family,
                      n_family, b_maps, a_maps, c_maps, r_family, s_family,
                      profile="geometric")
    report = check_instance_hypotheses(inst)
    if not report.clean:
        category, key = report.failures()[0]
        raise FixtureError(f"fixture construction inconsistency: {category} fails at {key}")
    return inst
