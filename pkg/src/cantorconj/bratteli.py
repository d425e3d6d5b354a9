"""Ordered Bratteli diagrams and their finite-level Vershik combinatorics.

Conventions, which everything downstream depends on:

* Level 0 is the root and has exactly one vertex, index 0.  Vertices at each
  level are indexed 0..k-1.
* An edge table for the transition level n -> n+1 is a list with one entry
  per *target* vertex v of level n+1; the entry is the ordered list of source
  vertex indices at level n.  Repeating a source index means parallel edges;
  the position inside the list is the edge's order rank (0 = minimal).
* Two diagram kinds share one type.  A "stationary" diagram stores two
  tables, the root table (transition 0 -> 1, all sources 0) and the repeating
  table used for every transition n -> n+1 with n >= 1; levels are unbounded.
  An "explicit" diagram stores one table per transition and raises
  LevelRangeError past its last level.
* A path from the root to level m is a tuple of m pairs (target_vertex,
  position), listed root-first.  Pair n describes the edge crossing the
  transition n -> n+1, so its source must be the target of pair n-1 (the
  root for n=0).
* Paths to a common end vertex are ordered lexicographically with the most
  significant edge LAST (nearest the end vertex).  The successor therefore
  increments the lowest incrementable edge and resets every edge below it to
  the minimal path, which on the dyadic diagram is literally binary
  increment of the root-first digit string.
* Kakutani-Rohlin bookkeeping: tower v at level m has height h_m(v) = number
  of paths from the root to v, and its floors are 1-indexed.  Floor k is the
  path of rank k-1 in the order above, so the Vershik successor restricted
  to non-maximal paths is exactly floor increment inside each tower.

The JSON interchange format "obd-v1"::

    {"format": "obd-v1", "kind": "stationary", "vertices": 2,
     "edges": [ROOT_TABLE, REPEATING_TABLE]}
    {"format": "obd-v1", "kind": "explicit", "vertices": [1, 2, 2],
     "edges": [TABLE_0, TABLE_1]}

with each table encoded as an array of arrays of 0-based source indices.
Serialization is canonical (sorted keys, no whitespace) and parse/serialize
round-trips bit-exactly on canonical input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

FORMAT_NAME = "obd-v1"

# Enumeration guard: operations that materialize every cell of a level stay
# below this many cells and raise CapabilityError beyond.
CELL_CAP = 2 ** 12


class DiagramSyntaxError(ValueError):
    """Diagram text is not valid JSON; message carries the position."""


class DiagramStructureError(ValueError):
    """Parsed JSON is not a well-formed ordered Bratteli diagram."""


class LevelRangeError(ValueError):
    """An explicit diagram was asked about a level past its last table."""


class CapabilityError(RuntimeError):
    """The request exceeds the supported desk scale for exact enumeration."""


EdgeTable = tuple[tuple[int, ...], ...]
Path = tuple[tuple[int, int], ...]
Cell = tuple[int, int]  # (vertex, floor), floors 1-indexed


class MaxPath:
    """Sentinel returned by vershik_successor on a maximal path.

    The successor of the maximal path to a vertex is not determined at a
    finite level (it is the roof-to-base transition), so the map signals it
    explicitly instead of guessing.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "MaxPath()"


MAX_PATH = MaxPath()


@dataclass(frozen=True)
class DgElement:
    """A K0 element presented at a level: an integer vector over the towers.

    Lives here rather than in dimgroup because counting vectors of clopen
    cell sets are produced by the diagram layer; dimgroup re-exports it.
    """

    level: int
    vector: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vector", tuple(int(x) for x in self.vector))


@dataclass(frozen=True)
class OrderedBratteliDiagram:
    kind: str
    vertex_counts: tuple[int, ...]
    tables: tuple[EdgeTable, ...]

    def num_vertices(self, level: int) -> int:
        if level < 0:
            raise LevelRangeError("negative level")
        if self.kind == "stationary":
            return 1 if level == 0 else self.vertex_counts[1]
        if level >= len(self.vertex_counts):
            raise LevelRangeError(
                "explicit diagram has no level %d (last is %d)"
                % (level, len(self.vertex_counts) - 1)
            )
        return self.vertex_counts[level]

    def table(self, n: int) -> EdgeTable:
        """Edge table of the transition n -> n+1."""
        if n < 0:
            raise LevelRangeError("negative transition index")
        if self.kind == "stationary":
            return self.tables[0] if n == 0 else self.tables[1]
        if n >= len(self.tables):
            raise LevelRangeError(
                "explicit diagram has no transition %d -> %d" % (n, n + 1)
            )
        return self.tables[n]

    def max_level(self):
        """Deepest available level; None when levels are unbounded."""
        return None if self.kind == "stationary" else len(self.vertex_counts) - 1

    def check_level(self, m: int) -> int:
        if m < 0:
            raise LevelRangeError("negative level")
        top = self.max_level()
        if top is not None and m > top:
            raise LevelRangeError(
                "explicit diagram has no level %d (last is %d)" % (m, top)
            )
        return m


def _as_table(obj, n_targets, n_sources, where) -> EdgeTable:
    if not isinstance(obj, list):
        raise DiagramStructureError("%s: edge table must be an array" % where)
    if len(obj) != n_targets:
        raise DiagramStructureError(
            "%s: expected %d target rows, got %d" % (where, n_targets, len(obj))
        )
    rows = []
    for v, row in enumerate(obj):
        if not isinstance(row, list) or not row:
            raise DiagramStructureError(
                "%s: target %d has an empty or non-array edge list" % (where, v)
            )
        for s in row:
            if not isinstance(s, int) or isinstance(s, bool) or not (0 <= s < n_sources):
                raise DiagramStructureError(
                    "%s: target %d has dangling source index %r "
                    "(valid range 0..%d)" % (where, v, s, n_sources - 1)
                )
        rows.append(tuple(row))
    return tuple(rows)


def parse_diagram(text: str) -> OrderedBratteliDiagram:
    """Parse obd-v1 JSON text into a diagram.

    Raises DiagramSyntaxError (with position) on malformed JSON and
    DiagramStructureError on well-formed JSON that is not a valid diagram.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise DiagramSyntaxError(
            "invalid JSON at line %d column %d: %s" % (e.lineno, e.colno, e.msg)
        ) from e
    if not isinstance(raw, dict):
        raise DiagramStructureError("top level must be an object")
    if raw.get("format") != FORMAT_NAME:
        raise DiagramStructureError(
            "unsupported format %r (expected %r)" % (raw.get("format"), FORMAT_NAME)
        )
    kind = raw.get("kind")
    if kind not in ("stationary", "explicit"):
        raise DiagramStructureError("kind must be 'stationary' or 'explicit'")
    vertices = raw.get("vertices")
    edges = raw.get("edges")
    extra = set(raw) - {"format", "kind", "vertices", "edges"}
    if extra:
        raise DiagramStructureError("unknown keys: %s" % sorted(extra))
    if kind == "stationary":
        if not isinstance(vertices, int) or isinstance(vertices, bool) or vertices < 1:
            raise DiagramStructureError("stationary vertices must be a positive integer")
        if not isinstance(edges, list) or len(edges) != 2:
            raise DiagramStructureError(
                "stationary edges must be [root_table, repeating_table]"
            )
        root = _as_table(edges[0], vertices, 1, "root table")
        rep = _as_table(edges[1], vertices, vertices, "repeating table")
        return OrderedBratteliDiagram("stationary", (1, vertices), (root, rep))
    if not isinstance(vertices, list) or not vertices:
        raise DiagramStructureError("explicit vertices must be a non-empty array")
    for k in vertices:
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            raise DiagramStructureError("vertex counts must be positive integers")
    if vertices[0] != 1:
        raise DiagramStructureError("level 0 must have exactly one vertex (the root)")
    if not isinstance(edges, list) or len(edges) != len(vertices) - 1:
        raise DiagramStructureError(
            "explicit edges must hold %d tables, got %r"
            % (len(vertices) - 1, len(edges) if isinstance(edges, list) else edges)
        )
    tables = tuple(
        _as_table(edges[n], vertices[n + 1], vertices[n], "table %d" % n)
        for n in range(len(edges))
    )
    return OrderedBratteliDiagram("explicit", tuple(vertices), tables)


def _to_jsonable(d: OrderedBratteliDiagram) -> dict:
    if d.kind == "stationary":
        vertices = d.vertex_counts[1]
    else:
        vertices = list(d.vertex_counts)
    return {
        "format": FORMAT_NAME,
        "kind": d.kind,
        "vertices": vertices,
        "edges": [[list(row) for row in tab] for tab in d.tables],
    }


def serialize_diagram(d: OrderedBratteliDiagram) -> str:
    """Canonical JSON text: sorted keys, no whitespace, bit-exact round trip."""
    return json.dumps(_to_jsonable(d), sort_keys=True, separators=(",", ":"))


def load_diagram(path: str) -> OrderedBratteliDiagram:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_diagram(fh.read())


def dump_diagram(d: OrderedBratteliDiagram, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_diagram(d) + "\n")


# ---------------------------------------------------------------------------
# Heights and incidence


def heights(d: OrderedBratteliDiagram, m: int) -> tuple[int, ...]:
    """Tower heights at level m; h_0 = (1,), h_{n+1}(v) = sum over v's sources."""
    d.check_level(m)
    h = (1,)
    for n in range(m):
        h = tuple(sum(h[s] for s in row) for row in d.table(n))
    return h


def incidence(d: OrderedBratteliDiagram, n: int) -> tuple[tuple[int, ...], ...]:
    """Multiplicity matrix of transition n -> n+1; rows = targets, cols = sources."""
    tab = d.table(n)
    cols = d.num_vertices(n)
    out = []
    for row in tab:
        counts = [0] * cols
        for s in row:
            counts[s] += 1
        out.append(tuple(counts))
    return tuple(out)


def composed_incidence(d: OrderedBratteliDiagram, m: int, m2: int) -> tuple[tuple[int, ...], ...]:
    """Product of the incidence matrices from level m up to level m2."""
    if m2 < m:
        raise ValueError("m2 must be >= m")
    d.check_level(m2)
    size = d.num_vertices(m)
    acc = tuple(tuple(1 if i == j else 0 for j in range(size)) for i in range(size))
    for n in range(m, m2):
        step = incidence(d, n)
        acc = tuple(
            tuple(sum(step[i][k] * acc[k][j] for k in range(len(acc))) for j in range(size))
            for i in range(len(step))
        )
    return acc


# ---------------------------------------------------------------------------
# Paths


def path_end(path: Path) -> int:
    return path[-1][0]


def validate_path(d: OrderedBratteliDiagram, path: Path) -> None:
    if not path:
        raise ValueError("empty path")
    d.check_level(len(path))
    prev = 0
    for n, (v, t) in enumerate(path):
        tab = d.table(n)
        if not (0 <= v < len(tab)):
            raise ValueError("path leaves vertex range at transition %d" % n)
        if not (0 <= t < len(tab[v])):
            raise ValueError("path edge position out of range at transition %d" % n)
        if tab[v][t] != prev:
            raise ValueError(
                "path is disconnected at transition %d: edge source %d, expected %d"
                % (n, tab[v][t], prev)
            )
        prev = v


def min_path(d: OrderedBratteliDiagram, v: int, m: int) -> Path:
    """The all-minimal-edge path from the root to vertex v at level m."""
    d.check_level(m)
    rev = []
    cur = v
    for n in range(m, 0, -1):
        rev.append((cur, 0))
        cur = d.table(n - 1)[cur][0]
    return tuple(reversed(rev))


def max_path(d: OrderedBratteliDiagram, v: int, m: int) -> Path:
    """The all-maximal-edge path from the root to vertex v at level m."""
    d.check_level(m)
    rev = []
    cur = v
    for n in range(m, 0, -1):
        row = d.table(n - 1)[cur]
        rev.append((cur, len(row) - 1))
        cur = row[-1]
    return tuple(reversed(rev))


def vershik_successor(d: OrderedBratteliDiagram, path: Path):
    """Lexicographic successor among paths to the same end vertex.

    Increments the lowest (nearest the root) incrementable edge and resets
    every edge below it to the minimal path into the new source.  Returns
    MAX_PATH when every edge already sits at its maximal position.
    """
    path = tuple(path)
    validate_path(d, path)
    for n, (v, t) in enumerate(path):
        row = d.table(n)[v]
        if t + 1 < len(row):
            prefix = min_path(d, row[t + 1], n)
            return prefix + ((v, t + 1),) + path[n + 1:]
    return MAX_PATH


def vershik_predecessor(d: OrderedBratteliDiagram, path: Path):
    """Inverse of vershik_successor; MAX_PATH signals the minimal path."""
    path = tuple(path)
    validate_path(d, path)
    for n, (v, t) in enumerate(path):
        if t > 0:
            row = d.table(n)[v]
            prefix = max_path(d, row[t - 1], n)
            return prefix + ((v, t - 1),) + path[n + 1:]
    return MAX_PATH


def path_rank(d: OrderedBratteliDiagram, path: Path) -> int:
    """Number of paths to the same end vertex strictly below, in path order."""
    validate_path(d, path)
    rank = 0
    h = (1,)
    for n, (v, t) in enumerate(path):
        tab = d.table(n)
        row = tab[v]
        rank += sum(h[row[i]] for i in range(t))
        h = tuple(sum(h[s] for s in r) for r in tab)
    return rank


def path_for_floor(d: OrderedBratteliDiagram, v: int, m: int, floor: int) -> Path:
    """The path of tower v at level m whose 1-indexed floor is given."""
    d.check_level(m)
    hs = [heights(d, n) for n in range(m)]
    h_v = sum(hs[m - 1][s] for s in d.table(m - 1)[v]) if m >= 1 else 1
    if not (1 <= floor <= h_v):
        raise ValueError("floor %d out of range 1..%d" % (floor, h_v))
    rank = floor - 1
    rev = []
    cur = v
    for n in range(m, 0, -1):
        row = d.table(n - 1)[cur]
        h = hs[n - 1]
        for t, src in enumerate(row):
            if rank < h[src]:
                rev.append((cur, t))
                cur = src
                break
            rank -= h[src]
        else:  # pragma: no cover - guarded by the range check above
            raise AssertionError("floor unranking fell off the edge list")
    return tuple(reversed(rev))


# ---------------------------------------------------------------------------
# Cells and towers


def cells(d: OrderedBratteliDiagram, m: int) -> list[Cell]:
    """All Kakutani-Rohlin cells (vertex, floor) at level m, capped at CELL_CAP."""
    h = heights(d, m)
    total = sum(h)
    if total > CELL_CAP:
        raise CapabilityError(
            "level %d has %d cells, above the supported cap of %d"
            % (m, total, CELL_CAP)
        )
    return [(v, k) for v in range(len(h)) for k in range(1, h[v] + 1)]


def cell_for_path(d: OrderedBratteliDiagram, path: Path) -> Cell:
    return (path_end(path), path_rank(d, path) + 1)


@dataclass(frozen=True)
class TowerMap:
    """Successor and projection data between a fine and a coarse level.

    successor maps each fine cell to the next cell of its tower, or None on
    the tower's roof (the roof-to-base transition is not a single cell at
    this level).  project sends each fine cell to the coarse cell its paths
    refine.  Floor increment at the fine level projects to floor increment
    at the coarse level away from coarse roofs, and resolves the coarse
    roof-to-base transition everywhere except on fine roofs.
    """

    coarse_level: int
    fine_level: int
    successor: dict
    project: dict


def tower_map(d: OrderedBratteliDiagram, m: int, m_fine: int) -> TowerMap:
    if m_fine < m:
        raise ValueError("fine level must be >= coarse level")
    h_fine = heights(d, m_fine)
    fine_cells = cells(d, m_fine)
    succ = {}
    proj = {}
    for (w, j) in fine_cells:
        succ[(w, j)] = (w, j + 1) if j < h_fine[w] else None
        path = path_for_floor(d, w, m_fine, j)
        prefix = path[:m]
        if m == 0:
            proj[(w, j)] = (0, 1)
        else:
            proj[(w, j)] = cell_for_path(d, prefix)
    return TowerMap(m, m_fine, succ, proj)


def class_of_clopen(d: OrderedBratteliDiagram, level: int, cell_set: Iterable[Cell]) -> DgElement:
    """Counting vector of a union of level cells, as a DgElement.

    The class only sees how many floors of each tower the set uses; which
    floors they are is invisible to K0, which is the point.
    """
    h = heights(d, level)
    counts = [0] * len(h)
    seen = set()
    for (v, k) in cell_set:
        if not (0 <= v < len(h)) or not (1 <= k <= h[v]):
            raise ValueError("cell (%d, %d) does not exist at level %d" % (v, k, level))
        if (v, k) in seen:
            raise ValueError("cell (%d, %d) listed twice" % (v, k))
        seen.add((v, k))
        counts[v] += 1
    return DgElement(level, tuple(counts))


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class ValidationReport:
    primitive: bool | None
    primitivity_level: int | None
    properly_ordered: bool | None
    min_chain_witness: tuple
    max_chain_witness: tuple
    issues: tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        """Primitivity is the hard requirement; ordering defects are reported."""
        return self.primitive is True


def _eventual_image(f: Sequence[int]) -> tuple[int, ...]:
    # image of f^k for k = len(f): by then the image has stabilized
    cur = sorted(set(range(len(f))))
    for _ in range(len(f)):
        cur = sorted(set(f[v] for v in cur))
    return tuple(cur)


def validate(d: OrderedBratteliDiagram, depth: int = 40) -> ValidationReport:
    """Primitivity and proper-orderedness report with explicit witnesses.

    Primitivity: some composed incidence product from level 1 is strictly
    positive within depth (for stationary diagrams the Wielandt bound caps
    the search).  Proper ordering: the minimal-edge and maximal-edge source
    chains funnel to a single vertex; for stationary diagrams this is exact
    (eventual image of the source maps), for explicit diagrams it is checked
    on the available levels and left None when the data runs out.
    """
    issues = []
    top = d.max_level()
    if d.kind == "stationary":
        k = d.num_vertices(1)
        bound = min(depth, (k - 1) ** 2 + 2) if k > 1 else 1
        primitive = False
        prim_level = None
        acc = composed_incidence(d, 1, 1)
        for j in range(1, bound + 1):
            acc = _mat_mul(incidence(d, 1), acc)
            if all(all(x > 0 for x in row) for row in acc):
                primitive = True
                prim_level = j
                break
        if not primitive:
            issues.append(
                "no strictly positive incidence power up to the Wielandt bound; "
                "stationary matrix is not primitive"
            )
        tab = d.table(1)
        s_min = [row[0] for row in tab]
        s_max = [row[-1] for row in tab]
        e_min = _eventual_image(s_min)
        e_max = _eventual_image(s_max)
        properly = len(e_min) == 1 and len(e_max) == 1
        if not properly:
            issues.append(
                "minimal/maximal edge chains do not funnel to unique paths "
                "(min cycle %s, max cycle %s)" % (list(e_min), list(e_max))
            )
        return ValidationReport(
            primitive, prim_level, properly, e_min, e_max, tuple(issues)
        )

    # explicit kind: work with what the finite data admits
    primitive = None
    prim_level = None
    for m2 in range(1, min(depth, top) + 1):
        acc = composed_incidence(d, 1, m2)
        if all(all(x > 0 for x in row) for row in acc):
            primitive = True
            prim_level = m2
            break
    if primitive is None:
        issues.append(
            "no strictly positive composed incidence within the available "
            "levels; primitivity undetermined"
        )
    min_chain = None
    max_chain = None
    properly = None
    probe = min(depth, top)
    if probe >= 1:
        mins = list(range(d.num_vertices(probe)))
        maxs = list(range(d.num_vertices(probe)))
        for n in range(probe, 0, -1):
            tab = d.table(n - 1)
            mins = [tab[v][0] for v in mins]
            maxs = [tab[v][-1] for v in maxs]
        min_chain = tuple(sorted(set(mins)))
        max_chain = tuple(sorted(set(maxs)))
        if len(min_chain) == 1 and len(max_chain) == 1:
            properly = True
        else:
            properly = None
            issues.append(
                "min/max chains have not funnelled within the available levels"
            )
    return ValidationReport(
        primitive, prim_level, properly,
        min_chain or (), max_chain or (), tuple(issues),
    )


def _mat_mul(a, b):
    rows = len(a)
    inner = len(b)
    cols = len(b[0]) if inner else 0
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols))
        for i in range(rows)
    )
