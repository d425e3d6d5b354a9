"""Dimension group of an ordered Bratteli diagram.

The group is the direct limit of Z^{V_m} under the incidence matrices, with
the positive cone generated by coordinatewise-nonnegative vectors and the
order unit given by the height vector at any level.  Elements are DgElement
values: a level together with an integer vector over that level's towers.
Two presentations are identified when they agree after pushing forward.

Decision style mandated throughout: for stationary diagrams answers are
exact (the kernel chain of incidence powers stabilizes within |V| steps, and
positivity is settled by the certified sign of the unique normalized trace);
for explicit diagrams answers are depth-bounded three-valued, never guessed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd

from .bratteli import (
    DgElement,
    OrderedBratteliDiagram,
    composed_incidence,
    heights,
    incidence,
    validate,
)
from .fieldpoly import (
    FieldElement,
    NumberField,
    charpoly,
    irreducible_factor_of_largest_root,
)

__all__ = [
    "DgElement",
    "DimGroup",
    "Decision",
    "PositivityResult",
    "POSITIVE",
    "ZERO",
    "NEGATIVE",
    "NOT_COMPARABLE",
    "UNKNOWN",
    "PerronData",
    "CertifiedReal",
]


POSITIVE = "Positive"
ZERO = "Zero"
NEGATIVE = "Negative"
NOT_COMPARABLE = "NotComparable"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Decision:
    """Three-valued answer; value None means undetermined at the given depth."""

    value: bool | None
    depth: int | None = None
    witness_level: int | None = None


@dataclass(frozen=True)
class PositivityResult:
    verdict: str
    witness_level: int | None = None
    depth: int | None = None


@dataclass(frozen=True)
class PerronData:
    """Exact spectral data of a primitive stationary diagram.

    minpoly is the monic irreducible integer factor of the characteristic
    polynomial carrying the Perron root; field holds that root in a rational
    isolating interval.  left_eigenvector is normalized with its last entry
    equal to 1 and is strictly positive (certified signs).  normalizer is
    <v, heights(1)>, so the trace of g presented at level m >= 1 is
    <v, g> / (root^(m-1) * normalizer) and the order unit's trace is 1.
    """

    char_poly: tuple
    minpoly: tuple
    field: NumberField
    left_eigenvector: tuple
    normalizer: FieldElement


@dataclass
class CertifiedReal:
    """A real algebraic number with certified sign and refinable enclosure."""

    element: FieldElement

    def sign(self) -> int:
        return self.element.sign()

    def interval(self, eps) -> tuple:
        return self.element.interval(eps)

    def is_rational(self) -> bool:
        return self.element.is_rational()

    def as_fraction(self) -> Fraction:
        return self.element.as_rational()

    def approx(self) -> float:
        return self.element.approx()


def _apply(matrix, vec):
    return tuple(sum(row[j] * vec[j] for j in range(len(vec))) for row in matrix)


class DimGroup:
    def __init__(self, diagram: OrderedBratteliDiagram):
        self.diagram = diagram

    # -- presentation plumbing ---------------------------------------------

    def element(self, level: int, vector) -> DgElement:
        self.diagram.check_level(level)
        vec = tuple(int(x) for x in vector)
        if len(vec) != self.diagram.num_vertices(level):
            raise ValueError(
                "vector length %d does not match %d towers at level %d"
                % (len(vec), self.diagram.num_vertices(level), level)
            )
        return DgElement(level, vec)

    def unit(self, level: int = 1) -> DgElement:
        return DgElement(level, heights(self.diagram, level))

    def push(self, g: DgElement, to_level: int) -> DgElement:
        """Push a presentation forward along the composed incidence matrices."""
        if to_level < g.level:
            raise ValueError("cannot push backwards (from %d to %d)" % (g.level, to_level))
        m = composed_incidence(self.diagram, g.level, to_level)
        return DgElement(to_level, _apply(m, g.vector))

    def common_level(self, a: DgElement, b: DgElement) -> tuple:
        lvl = max(a.level, b.level)
        return self.push(a, lvl), self.push(b, lvl)

    def add(self, a: DgElement, b: DgElement) -> DgElement:
        a, b = self.common_level(a, b)
        return DgElement(a.level, tuple(x + y for x, y in zip(a.vector, b.vector)))

    def sub(self, a: DgElement, b: DgElement) -> DgElement:
        a, b = self.common_level(a, b)
        return DgElement(a.level, tuple(x - y for x, y in zip(a.vector, b.vector)))

    def scale(self, n: int, a: DgElement) -> DgElement:
        return DgElement(a.level, tuple(n * x for x in a.vector))

    # -- exact/bounded decisions --------------------------------------------

    def is_zero(self, g: DgElement, depth: int = 40) -> Decision:
        """Is g the zero class?

        Stationary: exact.  The kernels of A, A^2, ... form an increasing
        chain in Z^{|V|} whose rational spans stabilize within |V| steps, so
        g vanishes in the limit iff A^{|V|} kills a level->=1 representative.
        Explicit: decided within depth, None when the data runs out.
        """
        d = self.diagram
        if d.kind == "stationary":
            k = d.num_vertices(1)
            vec = self.push(g, max(1, g.level)).vector
            a = incidence(d, 1)
            for _ in range(k):
                vec = _apply(a, vec)
            return Decision(all(x == 0 for x in vec))
        vec = g.vector
        level = g.level
        top = d.max_level()
        limit = min(depth + g.level, top)
        while True:
            if all(x == 0 for x in vec):
                return Decision(True, witness_level=level)
            if all(x > 0 for x in vec) or all(x < 0 for x in vec):
                # strictly one-signed vectors stay strictly one-signed
                return Decision(False, witness_level=level)
            if level >= limit:
                return Decision(None, depth=limit)
            level += 1
            vec = _apply(incidence(d, level - 1), vec)

    def equal(self, a: DgElement, b: DgElement, depth: int = 40) -> Decision:
        return self.is_zero(self.sub(a, b), depth)

    def is_positive(self, g: DgElement, depth: int = 40) -> PositivityResult:
        """Order position of g: Positive, Zero, Negative, NotComparable, Unknown.

        Primitive stationary case is exact: the sign of the normalized trace
        decides (strictly positive trace forces an eventually strictly
        positive representative by Perron-Frobenius; zero trace with nonzero
        class is an infinitesimal-free contradiction, reported as
        NotComparable).  A witness level with an all-nonnegative
        representative is located by pushing.
        """
        d = self.diagram
        if d.kind == "stationary" and self.primitive:
            tau = self.trace_value(g)
            s = tau.sign()
            if s == 0:
                if self.is_zero(g).value:
                    return PositivityResult(ZERO)
                return PositivityResult(NOT_COMPARABLE)
            target = g if s > 0 else self.scale(-1, g)
            vec = self.push(target, max(1, g.level))
            level = vec.level
            cap = max(64, 8 * depth)
            witness = None
            for _ in range(cap):
                if all(x >= 0 for x in vec.vector):
                    witness = level
                    break
                level += 1
                vec = DgElement(level, _apply(incidence(d, level - 1), vec.vector))
            return PositivityResult(POSITIVE if s > 0 else NEGATIVE, witness)
        # bounded scan for explicit (or non-primitive stationary) diagrams
        vec = g.vector
        level = g.level
        top = d.max_level()
        limit = depth + g.level if top is None else min(depth + g.level, top)
        while True:
            if all(x == 0 for x in vec):
                return PositivityResult(ZERO, witness_level=level)
            if all(x > 0 for x in vec):
                return PositivityResult(POSITIVE, witness_level=level)
            if all(x < 0 for x in vec):
                return PositivityResult(NEGATIVE, witness_level=level)
            if level >= limit:
                return PositivityResult(UNKNOWN, depth=limit)
            level += 1
            vec = _apply(incidence(d, level - 1), vec)

    # -- spectral data -------------------------------------------------------

    @cached_property
    def primitive(self) -> bool:
        return validate(self.diagram).primitive is True

    @cached_property
    def perron(self) -> PerronData:
        d = self.diagram
        if d.kind != "stationary":
            raise ValueError("Perron data requires a stationary diagram")
        if not self.primitive:
            raise ValueError("Perron data requires a primitive incidence matrix")
        a = incidence(d, 1)
        if len(a) > 8:
            raise ValueError("spectral factorization supported up to 8 towers")
        cp = charpoly(a)
        minpoly, (lo, hi) = irreducible_factor_of_largest_root(cp)
        field = NumberField(minpoly, lo, hi)
        root = field.generator()
        k = len(a)
        v = self._left_eigenvector(a, field, root)
        h1 = heights(d, 1)
        normalizer = field.rational(0)
        for i in range(k):
            normalizer = normalizer + v[i] * h1[i]
        if normalizer.sign() <= 0:
            raise AssertionError("trace normalizer must be positive")
        return PerronData(cp, minpoly, field, tuple(v), normalizer)

    @staticmethod
    def _left_eigenvector(a, field, root):
        """Solve v A = root v with v[last] = 1, certified strictly positive."""
        k = len(a)
        one = field.rational(1)
        zero = field.rational(0)
        # unknowns x_0..x_{k-2}; equation j: sum_i x_i (A[i][j] - root delta_ij) = 0
        # with x_{k-1} = 1 moved to the right-hand side.
        rows = []
        rhs = []
        for j in range(k):
            row = []
            for i in range(k - 1):
                coef = field.rational(a[i][j])
                if i == j:
                    coef = coef - root
                row.append(coef)
            last = field.rational(a[k - 1][j])
            if j == k - 1:
                last = last - root
            rows.append(row)
            rhs.append(zero - last)
        # Gaussian elimination on the k x (k-1) system (rank k-1).
        pivots = []
        r = 0
        for col in range(k - 1):
            piv = None
            for i in range(r, k):
                if not rows[i][col].is_zero():
                    piv = i
                    break
            if piv is None:
                raise AssertionError("Perron eigenvector system lost rank")
            rows[r], rows[piv] = rows[piv], rows[r]
            rhs[r], rhs[piv] = rhs[piv], rhs[r]
            inv = rows[r][col].inverse()
            rows[r] = [c * inv for c in rows[r]]
            rhs[r] = rhs[r] * inv
            for i in range(k):
                if i != r and not rows[i][col].is_zero():
                    f = rows[i][col]
                    rows[i] = [ci - f * cr for ci, cr in zip(rows[i], rows[r])]
                    rhs[i] = rhs[i] - f * rhs[r]
            pivots.append(col)
            r += 1
            if r == k - 1:
                break
        x = [zero] * (k - 1)
        for idx, col in enumerate(pivots):
            x[col] = rhs[idx]
        v = x + [one]
        # verify v A = root v exactly, and certify strict positivity
        for j in range(k):
            acc = zero
            for i in range(k):
                acc = acc + v[i] * a[i][j]
            if not (acc - root * v[j]).is_zero():
                raise AssertionError("left eigenvector verification failed")
        for entry in v:
            if entry.sign() <= 0:
                raise AssertionError("Perron left eigenvector must be positive")
        return v

    def trace_value(self, g: DgElement) -> CertifiedReal:
        """The unique normalized trace of g, as a certified algebraic real."""
        data = self.perron
        rep = self.push(g, max(1, g.level))
        field = data.field
        root = field.generator()
        num = field.rational(0)
        for vi, gi in zip(data.left_eigenvector, rep.vector):
            num = num + vi * gi
        denom = (root ** (rep.level - 1)) * data.normalizer
        return CertifiedReal(num / denom)

    def gcd_chain(self, up_to: int) -> list[int]:
        """gcd of the height entries at levels 1..up_to (a divisibility chain)."""
        out = []
        h = (1,)
        for n in range(up_to):
            h = tuple(sum(h[s] for s in row) for row in self.diagram.table(n))
            g = 0
            for x in h:
                g = gcd(g, x)
            out.append(g)
        return out
