"""Divisibility invariants and trace images of dimension groups.

The divisor set of a unital ordered group G with unit u collects every n
such that u splits into n copies of a single positive element.  In a
Bratteli-Vershik presentation this happens exactly when some level has all
tower heights divisible by n, so membership reduces to the height vector
trajectory mod n.  Stationary diagrams make that trajectory eventually
periodic and every verdict here is exact; explicit finite diagrams only
support bounded scans and degrade to Unknown / AtLeast answers.

Valuations are certified, not sampled:
  * infinite p-valuation holds iff the minimal monic integer annihilator of
    the level-1 height vector under the incidence matrix reduces to a pure
    power of t mod p (then each annihilator degree worth of levels gains a
    factor p; conversely a unit factor mod p pins the valuation),
  * for p coprime to det(A) the valuation equals v_p of gcd(heights(1)),
  * remaining finite valuations come from exhausting divides_unit on
    successive powers of p, which the annihilator test has certified to
    terminate.

Trace images.  A primitive stationary diagram has a unique normalized
trace; the image of the dimension group is either (1/q)Z[1/lambda] for an
integer eigenvalue lambda (q coprime to lambda), or, for an irrational
Perron root, the increasing union of lambda^-m copies of the lattice
spanned by the level-1 tower traces inside Q(lambda).  Both forms admit
exact membership and exact unital-order-isomorphism comparison (subgroups
of the reals containing 1 are unitally order isomorphic iff they are equal
as sets, order isomorphisms being multiplications by a positive scalar).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Union

from .bratteli import CapabilityError, OrderedBratteliDiagram, heights, incidence
from .dimgroup import DimGroup

__all__ = [
    "AtLeast",
    "InfiniteValuation",
    "SupernaturalTruncation",
    "DividesUnitResult",
    "SpectraComparison",
    "TraceImageGroup",
    "TraceIsoResult",
    "divides_unit",
    "periodic_spectrum",
    "spectra_equal",
    "trace_image_group",
    "trace_images_isomorphic",
    "check_divides_certificate",
    "check_infinity_certificate",
    "DEFAULT_PRIME_CUTOFF",
    "DEFAULT_DEPTH",
]

DEFAULT_PRIME_CUTOFF = 97
DEFAULT_DEPTH = 40

_STEP_CAP = 1_000_000  # residue-trajectory guard; larger moduli are not desk scale
_VALUATION_CAP = 4096  # defense in depth: certified-finite loops must stop long before
_FIELD_DEGREE_CAP = 8


# ---------------------------------------------------------------------------
# divisor set membership


@dataclass(frozen=True)
class DividesUnitResult:
    """Answer to "does n divide the unit", with its witness or refutation."""

    verdict: str  # "yes" | "no" | "unknown"
    level: Optional[int]
    certificate: Optional[dict]
    depth: int


def divides_unit(dg: OrderedBratteliDiagram, n: int, depth: int = DEFAULT_DEPTH) -> DividesUnitResult:
    """Decide whether n*e = u for some positive e, i.e. n | heights(m) for some m.

    Stationary diagrams are decided exactly: the height residues mod n live
    in a finite state space, so the walk either hits the zero vector (Yes,
    witness level) or closes a cycle that a verifier can replay (No).
    Explicit diagrams scan at most min(depth, last level) levels.
    """
    if n < 1:
        raise ValueError("modulus must be a positive integer")
    if n == 1:
        return DividesUnitResult("yes", 0, None, depth)
    if dg.kind == "stationary":
        table = dg.table(1)
        state = tuple(x % n for x in heights(dg, 1))
        seen: dict = {}
        states = []
        level = 1
        while True:
            if all(x == 0 for x in state):
                return DividesUnitResult("yes", level, None, depth)
            if state in seen:
                cert = {
                    "modulus": n,
                    "start_level": 1,
                    "states": [list(s) for s in states],
                    "cycle_start": seen[state],
                }
                return DividesUnitResult("no", None, cert, depth)
            seen[state] = len(states)
            states.append(state)
            state = tuple(sum(state[s] for s in row) % n for row in table)
            level += 1
            if level > _STEP_CAP:
                raise CapabilityError("residue trajectory exceeded the supported step budget")
    cap = min(depth, dg.max_level())
    for m in range(1, cap + 1):
        if all(x % n == 0 for x in heights(dg, m)):
            return DividesUnitResult("yes", m, None, cap)
    return DividesUnitResult("unknown", None, None, cap)


def check_divides_certificate(dg: OrderedBratteliDiagram, n: int, result: DividesUnitResult) -> bool:
    """Replay a divides_unit answer against the diagram it talks about."""
    if result.verdict == "yes":
        if result.level == 0:
            return n == 1
        try:
            return all(x % n == 0 for x in heights(dg, result.level))
        except Exception:
            return False
    if result.verdict != "no" or dg.kind != "stationary" or result.certificate is None:
        return False
    cert = result.certificate
    if cert.get("modulus") != n:
        return False
    states = [tuple(s) for s in cert.get("states", ())]
    if not states:
        return False
    table = dg.table(1)
    state = tuple(x % n for x in heights(dg, 1))
    for expected in states:
        if state != expected or all(x == 0 for x in state):
            return False
        state = tuple(sum(state[s] for s in row) % n for row in table)
    k = cert.get("cycle_start")
    return isinstance(k, int) and 0 <= k < len(states) and state == states[k]


# ---------------------------------------------------------------------------
# exact linear algebra helpers (small dense rational systems)


def _solve_lin(vectors, target):
    """Rational x with sum x_i vectors[i] = target, or None."""
    m = len(target)
    ncols = len(vectors)
    aug = [[Fraction(vectors[j][i]) for j in range(ncols)] + [Fraction(target[i])] for i in range(m)]
    pivots = []
    row = 0
    for col in range(ncols):
        sel = next((r for r in range(row, m) if aug[r][col] != 0), None)
        if sel is None:
            continue
        aug[row], aug[sel] = aug[sel], aug[row]
        pv = aug[row][col]
        aug[row] = [x / pv for x in aug[row]]
        for r in range(m):
            if r != row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if aug[r][ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for r, col in enumerate(pivots):
        x[col] = aug[r][ncols]
    return x


def _int_det(mat):
    n = len(mat)
    a = [[Fraction(x) for x in row] for row in mat]
    det = Fraction(1)
    for col in range(n):
        sel = next((r for r in range(col, n) if a[r][col] != 0), None)
        if sel is None:
            return 0
        if sel != col:
            a[col], a[sel] = a[sel], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    assert det.denominator == 1
    return int(det)


def _minimal_annihilator(mat, vec):
    """Least-degree monic integer polynomial g with g(mat) vec = 0, constant first."""
    iterates = [tuple(vec)]
    while True:
        sol = _solve_lin(iterates[:-1], iterates[-1])
        if sol is not None:
            coeffs = []
            for x in sol:
                assert x.denominator == 1  # monic divisor of an integer polynomial
                coeffs.append(-int(x))
            return tuple(coeffs) + (1,)
        nxt = tuple(sum(mat[i][j] * iterates[-1][j] for j in range(len(vec))) for i in range(len(vec)))
        iterates.append(nxt)


def _valuation(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _prime_factors(n):
    from sympy import factorint

    if n in (0, 1):
        return set()
    return set(factorint(abs(n)).keys())


# ---------------------------------------------------------------------------
# periodic spectrum


@dataclass(frozen=True)
class AtLeast:
    """Lower bound on a valuation, used where the scan had to stop."""

    bound: int


@dataclass(frozen=True)
class InfiniteValuation:
    """Infinite valuation with an annihilator certificate.

    The certificate stores the minimal monic integer annihilator of the
    level-1 height vector; all coefficients below the leading one being
    divisible by p forces every block of deg(annihilator) levels to gain
    another factor of p in the height gcd.
    """

    certificate: dict


Valuation = Union[int, AtLeast, InfiniteValuation]


@dataclass(frozen=True)
class SupernaturalTruncation:
    """Prime-by-prime description of the divisor set up to stated cutoffs."""

    entries: tuple  # ((prime, Valuation), ...) with primes strictly increasing
    prime_cutoff: int
    level_cutoff: int

    def valuation(self, p: int) -> Valuation:
        for q, v in self.entries:
            if q == p:
                return v
        return 0

    def to_json(self) -> dict:
        out = []
        for p, v in self.entries:
            if isinstance(v, InfiniteValuation):
                out.append({"p": p, "v": "inf", "cert": v.certificate})
            elif isinstance(v, AtLeast):
                out.append({"p": p, "v": {"at_least": v.bound}})
            else:
                out.append({"p": p, "v": v})
        return {"prime_cutoff": self.prime_cutoff, "level_cutoff": self.level_cutoff, "entries": out}


def _infinity_certificate(p, annihilator):
    return {"p": p, "annihilator": list(annihilator), "vector_level": 1}


def check_infinity_certificate(dg: OrderedBratteliDiagram, p: int, cert: dict) -> bool:
    """Re-verify an infinite-valuation claim: the stored polynomial must be a
    monic annihilator of heights(1) that is a power of t mod p."""
    if dg.kind != "stationary" or cert.get("p") != p:
        return False
    mu = cert.get("annihilator")
    if not mu or mu[-1] != 1:
        return False
    if any(c % p for c in mu[:-1]):
        return False
    mat = incidence(dg, 1)
    vec = [Fraction(x) for x in heights(dg, 1)]
    acc = [Fraction(0)] * len(vec)
    for c in reversed(mu):
        acc = [sum(mat[i][j] * acc[j] for j in range(len(vec))) for i in range(len(vec))]
        acc = [a + c * x for a, x in zip(acc, vec)]
    return all(a == 0 for a in acc)


def _stationary_valuation(dg, p, mu, det, g1, valuation_cutoff):
    if all(c % p == 0 for c in mu[:-1]):
        return InfiniteValuation(_infinity_certificate(p, mu))
    if det % p != 0:
        # invertible mod every power of p: divisibility at any level pulls
        # back to level 1, so the valuation is frozen at v_p(gcd heights(1))
        return _valuation(g1, p)
    v = 0
    while True:
        if valuation_cutoff is not None and v >= valuation_cutoff:
            return AtLeast(valuation_cutoff)
        if v >= _VALUATION_CAP:
            raise CapabilityError("finite valuation exceeded the supported bound")
        if divides_unit(dg, p ** (v + 1)).verdict != "yes":
            return v
        v += 1


def periodic_spectrum(
    dg: OrderedBratteliDiagram,
    prime_cutoff: int = DEFAULT_PRIME_CUTOFF,
    valuation_cutoff: Optional[int] = None,
    depth: int = DEFAULT_DEPTH,
) -> SupernaturalTruncation:
    """Valuation of the divisor set at every prime up to prime_cutoff.

    Stationary diagrams get certified answers at every listed prime: an
    exact natural number or Infinity with a replayable certificate (see the
    module docstring for the criterion).  Explicit diagrams report AtLeast
    lower bounds from the levels available within depth.  Primes without an
    entry have valuation 0 for stationary input and are simply unobserved
    for explicit input.
    """
    from sympy import primerange

    if dg.kind == "stationary":
        mat = incidence(dg, 1)
        h1 = heights(dg, 1)
        mu = _minimal_annihilator(mat, h1)
        det = _int_det(mat)
        g1 = 0
        for x in h1:
            g1 = gcd(g1, x)
        entries = []
        for p in primerange(2, prime_cutoff + 1):
            v = _stationary_valuation(dg, p, mu, det, g1, valuation_cutoff)
            if v != 0:
                entries.append((p, v))
        return SupernaturalTruncation(tuple(entries), prime_cutoff, depth)
    cap = min(depth, dg.max_level())
    primes = list(primerange(2, prime_cutoff + 1))
    best = {p: 0 for p in primes}
    for m in range(1, cap + 1):
        g = 0
        for x in heights(dg, m):
            g = gcd(g, x)
        for p in primes:
            v = _valuation(g, p)
            if v > best[p]:
                best[p] = v
    entries = tuple((p, AtLeast(v)) for p, v in sorted(best.items()) if v >= 1)
    return SupernaturalTruncation(entries, prime_cutoff, cap)


# ---------------------------------------------------------------------------
# spectra comparison


@dataclass(frozen=True)
class SpectraComparison:
    verdict: str  # "equal" | "distinct" | "unknown"
    witness: Optional[int]
    certificate: Optional[dict]


def _candidate_primes(dg):
    """Every prime with positive valuation divides one of these numbers.

    Writing mu = t^s q(t) for the minimal annihilator of heights(1) with
    q(0) != 0: a prime entering the divisor set either divides the gcd of
    one of the first s+1 height iterates, or kills q(0) mod p (the residue
    trajectory can only reach zero when t divides the annihilator mod p).
    """
    mat = incidence(dg, 1)
    vec = heights(dg, 1)
    mu = _minimal_annihilator(mat, vec)
    s = 0
    while mu[s] == 0:
        s += 1
    cands = _prime_factors(mu[s])
    for _ in range(s + 1):
        g = 0
        for x in vec:
            g = gcd(g, x)
        cands |= _prime_factors(g)
        vec = tuple(sum(mat[i][j] * vec[j] for j in range(len(vec))) for i in range(len(vec)))
    return cands


_INF = float("inf")


def _bounds_of(val, stationary_side):
    # (lower, upper) with upper None when unknown
    if isinstance(val, InfiniteValuation):
        return (_INF, _INF)
    if isinstance(val, AtLeast):
        return (val.bound, None)
    return (val, val if stationary_side else None)


def spectra_equal(
    dgA: OrderedBratteliDiagram,
    dgB: OrderedBratteliDiagram,
    prime_cutoff: int = DEFAULT_PRIME_CUTOFF,
    depth: int = DEFAULT_DEPTH,
) -> SpectraComparison:
    """Compare divisor sets; exact for stationary pairs.

    Stationary pairs are compared over every prime that could possibly
    carry a nonzero valuation on either side (a finite, computed set), so
    Equal is a full certificate and Distinct returns the least natural
    number lying in exactly one divisor set.  When an explicit diagram is
    involved only certified differences are reported; otherwise Unknown.
    """
    both_stationary = dgA.kind == "stationary" and dgB.kind == "stationary"
    if both_stationary:
        matA, matB = incidence(dgA, 1), incidence(dgB, 1)
        h1A, h1B = heights(dgA, 1), heights(dgB, 1)
        muA, muB = _minimal_annihilator(matA, h1A), _minimal_annihilator(matB, h1B)
        detA, detB = _int_det(matA), _int_det(matB)
        g1A = 0
        for x in h1A:
            g1A = gcd(g1A, x)
        g1B = 0
        for x in h1B:
            g1B = gcd(g1B, x)
        primes = sorted(_candidate_primes(dgA) | _candidate_primes(dgB))
        rows = []
        witnesses = []
        for p in primes:
            vA = _stationary_valuation(dgA, p, muA, detA, g1A, None)
            vB = _stationary_valuation(dgB, p, muB, detB, g1B, None)
            a = _INF if isinstance(vA, InfiniteValuation) else vA
            b = _INF if isinstance(vB, InfiniteValuation) else vB
            rows.append([p, "inf" if a == _INF else a, "inf" if b == _INF else b])
            if a != b:
                witnesses.append(p ** (int(min(a, b)) + 1))
        cert = {"compared_primes": primes, "valuations": rows}
        if witnesses:
            return SpectraComparison("distinct", min(witnesses), cert)
        return SpectraComparison("equal", None, cert)

    trA = periodic_spectrum(dgA, prime_cutoff=prime_cutoff, depth=depth)
    trB = periodic_spectrum(dgB, prime_cutoff=prime_cutoff, depth=depth)
    statA = dgA.kind == "stationary"
    statB = dgB.kind == "stationary"
    witnesses = []
    from sympy import primerange

    for p in primerange(2, prime_cutoff + 1):
        loA, hiA = _bounds_of(trA.valuation(p), statA)
        loB, hiB = _bounds_of(trB.valuation(p), statB)
        if hiB is not None and hiB != _INF and loA > hiB:
            witnesses.append(p ** (int(hiB) + 1))
        if hiA is not None and hiA != _INF and loB > hiA:
            witnesses.append(p ** (int(hiA) + 1))
    if witnesses:
        cert = {"prime_cutoff": prime_cutoff, "depth": depth}
        return SpectraComparison("distinct", min(witnesses), cert)
    return SpectraComparison("unknown", None, None)


# ---------------------------------------------------------------------------
# trace images


@dataclass(frozen=True)
class TraceImageGroup:
    """Image of the dimension group under the unique normalized trace.

    kind "cyclic": the subgroup (1/denominator) Z[1/ratio] of the rationals
    (denominator coprime to ratio).  kind "field": the increasing union of
    lambda^-m copies of the lattice spanned by `generators` (coordinate
    tuples over the power basis of Q[t]/(minpoly)); `stabilized` marks the
    union collapsing to the lattice itself, which happens exactly when the
    ratio acts with unit determinant.  Membership tests are exact in both
    kinds; `depth` records how far sample unrollings go in reports, not any
    bound on the arithmetic.  kind "undetermined" carries only float
    approximations of the generators.
    """

    kind: str
    ratio: Optional[int] = None
    denominator: Optional[int] = None
    minpoly: Optional[tuple] = None
    generators: Optional[tuple] = None
    stabilized: Optional[bool] = None
    depth: int = 0
    approximations: Optional[tuple] = None

    def contains(self, x) -> bool:
        """Exact membership; x is a Fraction (cyclic) or coordinate tuple (field)."""
        if self.kind == "cyclic":
            q = Fraction(x) * self.denominator
            d = q.denominator
            g = gcd(d, self.ratio)
            while g > 1:
                while d % g == 0:
                    d //= g
                g = gcd(d, self.ratio)
            return d == 1
        if self.kind == "field":
            deg = len(self.minpoly) - 1
            if isinstance(x, Fraction) or isinstance(x, int):
                x = (Fraction(x),) + (Fraction(0),) * (deg - 1)
            basis, scale, tmat = _field_lattice(self)
            coeffs = _solve_lin(basis, [Fraction(c) * scale for c in x])
            if coeffs is None:
                return False
            return _eventually_integral(coeffs, tmat) is not None
        raise ValueError("membership is undefined for an undetermined image")


def _mul_by_t(vec, minpoly):
    # multiply a power-basis coordinate vector by t, reducing mod minpoly
    deg = len(minpoly) - 1
    lead = vec[deg - 1]
    out = [Fraction(0)] + list(vec[: deg - 1])
    return [a - lead * minpoly[i] for i, a in enumerate(out)]


def _hnf_rows(rows):
    """Row Hermite form (echelon, positive pivots) of an integer row span."""
    mat = [list(r) for r in rows]
    m = len(mat)
    ncols = len(mat[0]) if m else 0
    top = 0
    for col in range(ncols):
        while True:
            nz = [i for i in range(top, m) if mat[i][col] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda i: abs(mat[i][col]))
            p = nz[0]
            for i in nz[1:]:
                q = mat[i][col] // mat[p][col]
                mat[i] = [a - q * b for a, b in zip(mat[i], mat[p])]
        nz = [i for i in range(top, m) if mat[i][col] != 0]
        if not nz:
            continue
        mat[top], mat[nz[0]] = mat[nz[0]], mat[top]
        if mat[top][col] < 0:
            mat[top] = [-a for a in mat[top]]
        for i in range(top):
            q = mat[i][col] // mat[top][col]
            if q:
                mat[i] = [a - q * b for a, b in zip(mat[i], mat[top])]
        top += 1
    return [tuple(r) for r in mat[:top]]


def _field_lattice(g: TraceImageGroup):
    """(integer HNF basis, scale, action of t): lattice = basis / scale."""
    scale = 1
    for vec in g.generators:
        for c in vec:
            scale = scale * c.denominator // gcd(scale, c.denominator)
    rows = [[int(c * scale) for c in vec] for vec in g.generators]
    basis = _hnf_rows(rows)
    deg = len(g.minpoly) - 1
    assert len(basis) == deg  # generators span the field over Q
    tmat = []
    for row in basis:
        shifted = _mul_by_t([Fraction(c) for c in row], g.minpoly)
        coeffs = _solve_lin(basis, shifted)
        assert coeffs is not None and all(c.denominator == 1 for c in coeffs)
        tmat.append([int(c) for c in coeffs])
    return basis, scale, tmat


def _eventually_integral(coeffs, tmat):
    """Least j with coeffs * tmat^j integral, or None if the cycle avoids 0."""
    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    if den == 1:
        return 0
    state = tuple(int(c * den) % den for c in coeffs)
    seen = set()
    j = 0
    while True:
        if all(x == 0 for x in state):
            return j
        if state in seen:
            return None
        seen.add(state)
        state = tuple(sum(state[i] * tmat[i][k] for i in range(len(state))) % den for k in range(len(state)))
        j += 1
        if j > _STEP_CAP:
            raise CapabilityError("denominator trajectory exceeded the supported step budget")


def trace_image_group(dg: OrderedBratteliDiagram) -> TraceImageGroup:
    """Image of the dimension group under the normalized trace (exact form)."""
    grp = DimGroup(dg)
    data = grp.perron  # raises ValueError unless primitive stationary
    deg = len(data.minpoly) - 1
    k = dg.num_vertices(1)
    taus = []
    for i in range(k):
        vec = tuple(1 if j == i else 0 for j in range(k))
        taus.append(grp.trace_value(grp.element(1, vec)).element)
    if deg > _FIELD_DEGREE_CAP:
        return TraceImageGroup("undetermined", approximations=tuple(t.approx() for t in taus))
    if deg == 1:
        lam = -data.minpoly[0]
        fracs = [t.as_rational() for t in taus]
        den = 1
        for f in fracs:
            den = den * f.denominator // gcd(den, f.denominator)
        num = 0
        for f in fracs:
            num = gcd(num, int(f * den))
        span = Fraction(num, den)
        q = span.denominator
        g = gcd(q, lam)
        while g > 1:
            while q % g == 0:
                q //= g
            g = gcd(q, lam)
        out = TraceImageGroup("cyclic", ratio=lam, denominator=q)
        assert out.contains(Fraction(1))  # the unit always maps to 1
        return out
    one = (Fraction(1),) + (Fraction(0),) * (deg - 1)
    gens = (one,) + tuple(tuple(t.coeffs) for t in taus)
    probe = TraceImageGroup("field", minpoly=data.minpoly, generators=gens)
    basis, _, tmat = _field_lattice(probe)
    stab = abs(_int_det(tmat)) == 1
    return TraceImageGroup("field", minpoly=data.minpoly, generators=gens, stabilized=stab)


# ---------------------------------------------------------------------------
# unital order isomorphism of trace images


@dataclass(frozen=True)
class TraceIsoResult:
    value: Optional[bool]
    reason: str
    certificate: Optional[dict] = None


def _cyclic_radical(g):
    return frozenset(_prime_factors(g.ratio))


def _field_included(a: TraceImageGroup, b: TraceImageGroup):
    """Is the group of a contained in the group of b (same minimal polynomial)?

    Reduces to finitely many lattice questions: each generator of a must
    land in some lambda^-j copy of b's lattice, and the needed j is found
    (or refuted) by the denominator trajectory under the integer action of
    lambda on b's basis.
    """
    basis, scale, tmat = _field_lattice(b)
    shifts = []
    for vec in a.generators:
        target = [Fraction(c) * scale for c in vec]
        coeffs = _solve_lin(basis, target)
        if coeffs is None:
            return None, vec
        j = _eventually_integral(coeffs, tmat)
        if j is None:
            return None, vec
        shifts.append(j)
    return max(shifts, default=0), None


def trace_images_isomorphic(a: TraceImageGroup, b: TraceImageGroup) -> TraceIsoResult:
    """Decide unital order isomorphism (equivalently set equality) of images."""
    if a.kind == "undetermined" or b.kind == "undetermined":
        return TraceIsoResult(None, "an image was only determined numerically")
    if a.kind == "cyclic" and b.kind == "cyclic":
        ra, rb = _cyclic_radical(a), _cyclic_radical(b)
        if ra != rb:
            p = min(ra ^ rb)
            return TraceIsoResult(False, "divisible primes differ at %d" % p)
        if a.denominator != b.denominator:
            return TraceIsoResult(
                False,
                "global denominators differ: %d vs %d" % (a.denominator, b.denominator),
            )
        return TraceIsoResult(
            True,
            "identical rational subgroups",
            {"radical": sorted(ra), "denominator": a.denominator},
        )
    if a.kind != b.kind:
        return TraceIsoResult(False, "one image is rational, the other spans a real number field")
    if a.minpoly != b.minpoly:
        return TraceIsoResult(None, "images lie in fields with distinct minimal polynomials")
    ab, bad_a = _field_included(a, b)
    if ab is None:
        return TraceIsoResult(False, "a generator of the first image escapes the second", {"generator": [str(c) for c in bad_a]})
    ba, bad_b = _field_included(b, a)
    if ba is None:
        return TraceIsoResult(False, "a generator of the second image escapes the first", {"generator": [str(c) for c in bad_b]})
    return TraceIsoResult(True, "identical subgroups of the trace field", {"shift_ab": ab, "shift_ba": ba})
