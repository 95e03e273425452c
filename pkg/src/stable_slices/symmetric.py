"""Symmetric polynomials in the elementary-symmetric basis.

Everything here evaluates through the e-vector: a symmetric polynomial is
stored as a sparse polynomial g with f(X) = g(e_1(X), ..., e_n(X)).  On
top of that sit the Grace-Walsh-Szego solver (collapse a multiaffine
symmetric polynomial to a diagonal point), the coincidence reduction for
forms factoring through few linear functionals of the e_i, a Young-block
version of the solver, the variety multistart search used by the
double-degree principle, and the half-degree objective optimizer.
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import DimensionMismatch, NoRootInRegion
from .polynomials import BOUNDARY_SCALE, Poly, cluster_roots, find_roots, vieta_from_roots
from .regions import HalfPlane
from .slices import CompressionReport, CompressOptions, Slice, compactness_bounds, compress

GWS_RESIDUAL_SCALE = 1e-8
_SEARCH_STREAM = 11
_UNBOUNDED_FLOOR = -1e12


def thread_count(requested: int | None = None) -> int:
    """Resolve a worker count; STABLE_SLICE_THREADS applies when unset, 0 = auto."""
    value = requested
    if value is None:
        raw = os.environ.get("STABLE_SLICE_THREADS", "1")
        try:
            value = int(raw)
        except ValueError:
            value = 1
    if value == 0:
        value = os.cpu_count() or 1
    return max(1, value)


def _canonical_terms(terms, width: int):
    canon = {}
    for key, coeff in (terms.items() if hasattr(terms, "items") else terms):
        exps = tuple(int(e) for e in key)
        if len(exps) > width:
            if any(exps[width:]):
                raise DimensionMismatch("exponent tuple longer than variable count")
            exps = exps[:width]
        exps = exps + (0,) * (width - len(exps))
        if any(e < 0 for e in exps):
            raise ValueError("negative exponent")
        coeff = complex(coeff)
        if coeff != 0:
            canon[exps] = canon.get(exps, 0.0 + 0.0j) + coeff
    return tuple(sorted((k, v) for k, v in canon.items() if v != 0))


@dataclasses.dataclass(frozen=True)
class SymmetricPoly:
    """Sparse polynomial g in Z_1..Z_n representing f = g(e_1, ..., e_n).

    ``degree`` is the declared total degree of f in the underlying X
    variables; validation rejects terms using Z_i with i > degree or with
    weighted degree sum(i * exponent_i) above it.
    """

    n: int
    terms: tuple[tuple[tuple[int, ...], complex], ...]
    degree: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("need at least one variable")
        if not 0 <= self.degree <= self.n:
            raise ValueError("declared degree must lie in [0, n]")
        for exps, _ in self.terms:
            weighted = sum((i + 1) * e for i, e in enumerate(exps))
            if weighted > self.degree:
                raise ValueError(
                    f"term {exps} has weighted degree {weighted} > declared {self.degree}")

    @classmethod
    def from_terms(cls, n: int, terms, degree: int) -> "SymmetricPoly":
        return cls(n=n, terms=_canonical_terms(terms, n), degree=degree)

    @property
    def is_multiaffine(self) -> bool:
        return all(sum(exps) <= 1 for exps, _ in self.terms)

    def affine_coefficients(self) -> np.ndarray:
        """(c_0, c_1, ..., c_n) for f = c_0 + sum c_i e_i; requires multiaffine."""
        if not self.is_multiaffine:
            raise ValueError("polynomial is not affine-linear in the e basis")
        c = np.zeros(self.n + 1, dtype=complex)
        for exps, coeff in self.terms:
            if sum(exps) == 0:
                c[0] += coeff
            else:
                c[exps.index(1) + 1] += coeff
        return c

    def eval_at_e(self, e) -> complex:
        ev = np.asarray(e, dtype=complex)
        total = 0.0 + 0.0j
        for exps, coeff in self.terms:
            term = coeff
            for i, p in enumerate(exps):
                if p:
                    term *= ev[i] ** p
            total += term
        return complex(total)

    def abs_eval_at_e(self, e) -> float:
        ev = np.abs(np.asarray(e, dtype=complex))
        total = 0.0
        for exps, coeff in self.terms:
            term = abs(coeff)
            for i, p in enumerate(exps):
                if p:
                    term *= ev[i] ** p
            total += term
        return float(total)


@dataclasses.dataclass(frozen=True)
class SufficientForm:
    """Symmetric polynomial factored as gk(l_1(e), ..., l_k(e)).

    ``matrix`` holds the linear forms row-wise (k x n); ``gk`` is a sparse
    polynomial in the k intermediate variables.
    """

    matrix: tuple[tuple[complex, ...], ...]
    gk: tuple[tuple[tuple[int, ...], complex], ...]

    @classmethod
    def from_data(cls, matrix, gk_terms) -> "SufficientForm":
        m = np.atleast_2d(np.asarray(matrix, dtype=complex))
        rows = tuple(tuple(complex(v) for v in row) for row in m)
        return cls(matrix=rows, gk=_canonical_terms(gk_terms, len(rows)))

    @property
    def k(self) -> int:
        return len(self.matrix)

    @property
    def n(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    def eval_at_e(self, e) -> complex:
        w = np.asarray(self.matrix, dtype=complex) @ np.asarray(e, dtype=complex)
        total = 0.0 + 0.0j
        for exps, coeff in self.gk:
            term = coeff
            for i, p in enumerate(exps):
                if p:
                    term *= w[i] ** p
            total += term
        return complex(total)

    def abs_eval_at_e(self, e) -> float:
        w = np.abs(np.asarray(self.matrix, dtype=complex) @ np.asarray(e, dtype=complex))
        total = 0.0
        for exps, coeff in self.gk:
            term = abs(coeff)
            for i, p in enumerate(exps):
                if p:
                    term *= w[i] ** p
            total += term
        return float(total)


@dataclasses.dataclass(frozen=True)
class CoordinateProfile:
    """Distinct-boundary / interior counts of a coordinate tuple."""

    boundary_distinct: int
    interior_count: int
    outside_count: int = 0

    def within(self, k: int, m: int) -> bool:
        return self.outside_count == 0 and self.boundary_distinct <= k \
            and self.interior_count <= m


def elementary_symmetrics(x) -> tuple[complex, ...]:
    return vieta_from_roots(tuple(x)).z


def eval_symmetric(f, x) -> complex:
    xs = tuple(x)
    if isinstance(f, SymmetricPoly) and len(xs) != f.n:
        raise DimensionMismatch(f"expected {f.n} coordinates, got {len(xs)}")
    if isinstance(f, SufficientForm) and len(xs) != f.n:
        raise DimensionMismatch(f"expected {f.n} coordinates, got {len(xs)}")
    return f.eval_at_e(elementary_symmetrics(xs))


def coordinate_profile(x, halfplane: HalfPlane | None = None, *,
                       radius: float | None = None,
                       boundary_tol: float | None = None) -> CoordinateProfile:
    H = halfplane if halfplane is not None else HalfPlane.upper()
    profile = cluster_roots(tuple(x), H, radius=radius, boundary_tol=boundary_tol)
    return CoordinateProfile(boundary_distinct=profile.boundary_distinct,
                             interior_count=profile.interior_total,
                             outside_count=profile.outside_total)


def _gws_core(coeffs, x, halfplane: HalfPlane) -> complex:
    """Solve c_0 + sum c_d e_d(y*1) = c_0 + sum c_d e_d(x) for y in the half-plane."""
    c = np.asarray(coeffs, dtype=complex)
    n = c.size - 1
    xs = tuple(x)
    e = vieta_from_roots(xs).z
    target = c[0] + sum(c[d] * e[d - 1] for d in range(1, n + 1))
    # u(Y) = c_0 + sum c_d C(n, d) Y^d - target
    u = np.zeros(n + 1, dtype=complex)
    u[0] = c[0] - target
    for d in range(1, n + 1):
        u[d] = c[d] * math.comb(n, d)
    deg = n
    while deg > 0 and abs(u[deg]) <= 1e-14 * (1.0 + float(np.max(np.abs(u)))):
        deg -= 1
    if deg == 0:
        # constant problem: any point works, x_1 is the deterministic pick
        return complex(xs[0])
    raw = (u[:deg + 1] / u[deg])[::-1]
    roots = find_roots(Poly.from_raw(tuple(raw)))
    scale = 1.0 + max(abs(r) for r in roots)
    btol = BOUNDARY_SCALE * scale
    inside = [r for r in roots if halfplane.signed_distance(r) >= -btol]
    if not inside:
        worst = min(abs(halfplane.signed_distance(r)) for r in roots)
        raise NoRootInRegion(
            f"no admissible root for the diagonal equation (closest margin {worst:.3e})")
    y = min(inside, key=lambda r: (abs(r), r.real, r.imag))
    return complex(y)


def gws_solve(f: SymmetricPoly, x, halfplane: HalfPlane | None = None) -> complex:
    """Diagonal point y with f(y, ..., y) = f(x), y inside the half-plane.

    Requires f affine-linear in the e basis (multiaffine symmetric).  The
    admissible root of smallest modulus is returned, ties broken by
    lexicographic (Re, Im).
    """
    H = halfplane if halfplane is not None else HalfPlane.upper()
    xs = tuple(x)
    if len(xs) != f.n:
        raise DimensionMismatch(f"expected {f.n} coordinates, got {len(xs)}")
    coeffs = f.affine_coefficients()
    return _gws_core(coeffs, xs, H)


def coincide(form: SufficientForm, x, halfplane: HalfPlane | None = None,
             options: CompressOptions | None = None):
    """Value-preserving reduction to a point with few distinct coordinates.

    Compresses e(x) inside the slice {l_j(z) = l_j(e(x))}; since the form
    only reads the l_j, the value survives, while the compressed root
    multiset has few interior and few distinct boundary coordinates.
    Returns (x_tilde, CompressionReport).
    """
    H = halfplane if halfplane is not None else HalfPlane.upper()
    xs = tuple(x)
    if len(xs) != form.n:
        raise DimensionMismatch(f"expected {form.n} coordinates, got {len(xs)}")
    e = np.asarray(elementary_symmetrics(xs), dtype=complex)
    A = np.asarray(form.matrix, dtype=complex)
    S = Slice.from_arrays(A, A @ e)
    report = compress(Poly(tuple(e)), S, H, options)
    x_tilde = find_roots(report.final_z)
    return tuple(x_tilde), report


def young_blocks_from_x_expansion(blocks, monomials) -> dict:
    """Convert a multiaffine X-expansion to per-block e-basis coefficients.

    ``monomials`` maps 0/1 tuples (length n) to coefficients.  Invariance
    under the product of block symmetric groups is validated: monomials
    with the same per-block weight must share a coefficient.
    """
    n = sum(blocks)
    offsets = np.cumsum((0,) + tuple(blocks))
    out: dict[tuple[int, ...], complex] = {}
    for key, coeff in (monomials.items() if hasattr(monomials, "items") else monomials):
        mask = tuple(int(v) for v in key)
        if len(mask) != n or any(v not in (0, 1) for v in mask):
            raise DimensionMismatch("X-expansion keys must be 0/1 tuples of length n")
        weight = tuple(sum(mask[offsets[j]:offsets[j + 1]]) for j in range(len(blocks)))
        coeff = complex(coeff)
        if weight in out:
            if abs(out[weight] - coeff) > 1e-10 * (1.0 + abs(coeff)):
                raise ValueError(f"expansion not block-invariant at weight {weight}")
        else:
            out[weight] = coeff
    return out


def young_gws(blocks, f, x, halfplane: HalfPlane | None = None) -> tuple[complex, ...]:
    """Per-block diagonal point (y_1, ..., y_kappa) preserving a block-invariant value.

    ``f`` may be a multiaffine SymmetricPoly, a dict of per-block e-basis
    coefficients keyed by (d_1, ..., d_kappa), or a multiaffine
    X-expansion dict keyed by 0/1 tuples.  Solved block by block: later
    blocks stay frozen at their x coordinates, earlier blocks at the
    already-found diagonal values.
    """
    H = halfplane if halfplane is not None else HalfPlane.upper()
    sizes = tuple(int(b) for b in blocks)
    if any(b < 1 for b in sizes):
        raise ValueError("block sizes must be positive")
    n = sum(sizes)
    xs = tuple(x)
    if len(xs) != n:
        raise DimensionMismatch(f"expected {n} coordinates, got {len(xs)}")
    kappa = len(sizes)

    if isinstance(f, SymmetricPoly):
        # e_m of the full variable set splits as a convolution over blocks,
        # so an affine f = sum c_m e_m has block coefficient c_{d_1+...+d_k}.
        c = f.affine_coefficients()
        terms = {}
        for weight in np.ndindex(*[b + 1 for b in sizes]):
            total = sum(weight)
            if 0 < total <= n and c[total] != 0:
                terms[tuple(int(w) for w in weight)] = complex(c[total])
        const = complex(c[0])
    else:
        raw = f if hasattr(f, "items") else dict(f)
        sample = next(iter(raw), None)
        if sample is not None and len(sample) == n and kappa != n:
            raw = young_blocks_from_x_expansion(sizes, raw)
        terms = {}
        const = 0.0 + 0.0j
        for key, coeff in raw.items():
            weight = tuple(int(v) for v in key)
            if len(weight) != kappa:
                raise DimensionMismatch("block coefficient keys must have one entry per block")
            if any(not 0 <= w <= sizes[j] for j, w in enumerate(weight)):
                raise ValueError(f"block weight {weight} exceeds block sizes")
            if sum(weight) == 0:
                const += complex(coeff)
            else:
                terms[weight] = terms.get(weight, 0.0 + 0.0j) + complex(coeff)

    offsets = np.cumsum((0,) + sizes)
    coords = [list(xs[offsets[j]:offsets[j + 1]]) for j in range(kappa)]
    # e_d tables per block, refreshed as blocks collapse to diagonal values
    etab = []
    for j in range(kappa):
        ev = vieta_from_roots(tuple(coords[j])).z
        etab.append([1.0 + 0.0j] + list(ev))

    def total_value() -> complex:
        val = const
        for weight, coeff in terms.items():
            term = coeff
            for j, w in enumerate(weight):
                term *= etab[j][w]
            val += term
        return complex(val)

    reference = total_value()
    ys = []
    for j in range(kappa):
        coeffs = np.zeros(sizes[j] + 1, dtype=complex)
        for weight, coeff in terms.items():
            outer = coeff
            for l, w in enumerate(weight):
                if l != j:
                    outer *= etab[l][w]
            coeffs[weight[j]] += outer
        y = _gws_core(coeffs, tuple(coords[j]), H)
        ys.append(y)
        coords[j] = [y] * sizes[j]
        etab[j] = [1.0 + 0.0j] + [math.comb(sizes[j], d) * y ** d
                                  for d in range(1, sizes[j] + 1)]
    final = total_value()
    scale = 1.0 + abs(reference)
    if abs(final - reference) > 1e-6 * scale:
        raise NoRootInRegion(
            f"block recursion drifted: |delta| = {abs(final - reference):.3e}")
    return tuple(ys)


# ---------------------------------------------------------------------------
# pattern machinery shared by the variety search and the half-degree optimizer


@dataclasses.dataclass(frozen=True)
class _Pattern:
    multiplicities: tuple[int, ...]
    interior: int
    boundary_real: bool

    @property
    def params(self) -> int:
        return len(self.multiplicities) * (1 if self.boundary_real else 2) \
            + 2 * self.interior

    def describe(self) -> str:
        kind = "boundary" if self.boundary_real else "value"
        return f"{kind} multiplicities {self.multiplicities}, interior {self.interior}"


def _partitions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(total - parts + 1, 0, -1):
        for rest in _partitions(total - first, parts - 1):
            if not rest or rest[0] <= first:
                yield (first,) + rest


def _budget_patterns(n: int, budget: int):
    for r in range(1, min(budget, n) + 1):
        for part in _partitions(n, r):
            yield _Pattern(multiplicities=part, interior=0, boundary_real=False)


def _km_patterns(n: int, k_boundary: int, m_interior: int):
    out = []
    for t in range(0, min(m_interior, n) + 1):
        rest = n - t
        if rest == 0:
            out.append(_Pattern(multiplicities=(), interior=t, boundary_real=True))
            continue
        for r in range(1, min(k_boundary, rest) + 1):
            for part in _partitions(rest, r):
                out.append(_Pattern(multiplicities=part, interior=t, boundary_real=True))
    out.sort(key=lambda p: (len(p.multiplicities) + p.interior, p.interior,
                            tuple(-m for m in p.multiplicities)))
    return out


def _pattern_point(pattern: _Pattern, theta: np.ndarray, halfplane: HalfPlane) -> np.ndarray:
    rot = np.exp(1j * halfplane.theta)
    vals = []
    idx = 0
    for _ in pattern.multiplicities:
        if pattern.boundary_real:
            vals.append(halfplane.base + rot * theta[idx])
            idx += 1
        else:
            vals.append(halfplane.base + rot * (theta[idx] + 1j * theta[idx + 1]))
            idx += 2
    x = []
    for value, mult in zip(vals, pattern.multiplicities):
        x.extend([value] * mult)
    for _ in range(pattern.interior):
        x.append(halfplane.base + rot * (theta[idx] + 1j * theta[idx + 1]))
        idx += 2
    return np.asarray(x, dtype=complex)


def _project_theta(pattern: _Pattern, theta: np.ndarray) -> np.ndarray:
    out = theta.copy()
    idx = 0
    for _ in pattern.multiplicities:
        if pattern.boundary_real:
            idx += 1
        else:
            out[idx + 1] = max(out[idx + 1], 0.0)
            idx += 2
    for _ in range(pattern.interior):
        out[idx + 1] = max(out[idx + 1], 0.0)
        idx += 2
    return out


def _start_theta(pattern: _Pattern, rng, box) -> np.ndarray:
    re_lo, re_hi, im_hi = box
    theta = []
    for _ in pattern.multiplicities:
        theta.append(rng.uniform(re_lo, re_hi))
        if not pattern.boundary_real:
            theta.append(rng.uniform(0.0, im_hi))
    for _ in range(pattern.interior):
        theta.append(rng.uniform(re_lo, re_hi))
        theta.append(rng.uniform(0.0, im_hi))
    return np.asarray(theta, dtype=float)


@dataclasses.dataclass(frozen=True)
class FoundPoint:
    x: tuple[complex, ...]
    residuals: tuple[float, ...]
    pattern: str
    starts_used: int


@dataclasses.dataclass(frozen=True)
class NoneFound:
    patterns_tried: int
    starts: int
    best_residual: float
    best_x: tuple[complex, ...] | None
    note: str = "numeric multistart search; finding nothing certifies nothing"


def _detect_pinned(polys) -> dict[int, complex]:
    pinned: dict[int, complex] = {}
    for f in polys:
        const = 0.0 + 0.0j
        linear: dict[int, complex] = {}
        ok = True
        for exps, coeff in f.terms:
            total = sum(exps)
            if total == 0:
                const += coeff
            elif total == 1:
                linear[exps.index(1)] = linear.get(exps.index(1), 0) + coeff
            else:
                ok = False
        if ok and len(linear) == 1:
            i, c = next(iter(linear.items()))
            if c != 0:
                pinned[i] = -const / c
    return pinned


def variety_search(polys, halfplane: HalfPlane | None = None, *,
                   pattern=None, budget: int = 200, seed: int = 0,
                   box: tuple[float, float, float] | None = None,
                   threads: int | None = None,
                   newton_iterations: int = 60):
    """Search the common zero set for a point inside the closed half-plane.

    ``pattern`` is either an integer distinct-value budget or a pair
    (k_boundary, m_interior); ``budget`` counts Newton starts per pattern.
    Returns FoundPoint on the first independently verified hit, else
    NoneFound with search statistics; a NoneFound is never a certificate
    of emptiness.
    """
    H = halfplane if halfplane is not None else HalfPlane.upper()
    polys = list(polys)
    if not polys:
        raise ValueError("need at least one polynomial")
    n = polys[0].n
    if any(f.n != n for f in polys):
        raise DimensionMismatch("all polynomials must share the variable count")

    if pattern is None:
        pattern = n
    if isinstance(pattern, int):
        patterns = list(_budget_patterns(n, pattern))
    else:
        k_b, m_i = pattern
        patterns = _km_patterns(n, int(k_b), int(m_i))

    if box is None:
        pinned = _detect_pinned(polys)
        if 0 in pinned and 1 in pinned:
            bounds = compactness_bounds(pinned[0], pinned[1], n)
            if bounds is None:
                return NoneFound(patterns_tried=0, starts=0, best_residual=float("inf"),
                                 best_x=None,
                                 note="pinned leading symmetrics admit no stable point")
            half = math.sqrt(bounds.re_sq_bound) + 1.0
            box = (-half, half, bounds.im_hi + 1.0)
        else:
            box = (-5.0, 5.0, 5.0)

    def residual_vec(x: np.ndarray) -> np.ndarray:
        e = vieta_from_roots(tuple(x)).z
        vals = [f.eval_at_e(e) for f in polys]
        return np.concatenate([np.real(vals), np.imag(vals)])

    def verify(x: np.ndarray):
        e = vieta_from_roots(tuple(x)).z
        res = []
        for f in polys:
            scale = 1.0 + f.abs_eval_at_e(e)
            val = abs(f.eval_at_e(e))
            if val > GWS_RESIDUAL_SCALE * scale:
                return None
            res.append(val)
        btol = BOUNDARY_SCALE * (1.0 + float(np.max(np.abs(x))))
        if any(H.signed_distance(v) < -btol for v in x):
            return None
        return tuple(float(v) for v in res)

    def run_start(p_idx: int, pattern_obj: _Pattern, s_idx: int):
        rng = np.random.default_rng([_SEARCH_STREAM, seed, p_idx, s_idx])
        theta = _start_theta(pattern_obj, rng, box)
        if theta.size == 0:
            x = _pattern_point(pattern_obj, theta, H)
            res = verify(x)
            return (res, x, float(np.linalg.norm(residual_vec(x))))
        best_norm = float("inf")
        for _ in range(newton_iterations):
            F = residual_vec(_pattern_point(pattern_obj, theta, H))
            norm = float(np.linalg.norm(F))
            best_norm = min(best_norm, norm)
            if norm <= 1e-12:
                break
            J = np.zeros((F.size, theta.size))
            for q in range(theta.size):
                h = 1e-6 * (1.0 + abs(theta[q]))
                tp = theta.copy()
                tp[q] += h
                J[:, q] = (residual_vec(_pattern_point(pattern_obj, tp, H)) - F) / h
            delta, *_ = np.linalg.lstsq(J, -F, rcond=None)
            step = 1.0
            moved = False
            for _ in range(25):
                cand = _project_theta(pattern_obj, theta + step * delta)
                if float(np.linalg.norm(residual_vec(_pattern_point(pattern_obj, cand, H)))) < norm:
                    theta = cand
                    moved = True
                    break
                step *= 0.5
            if not moved:
                break
        x = _pattern_point(pattern_obj, theta, H)
        res = verify(x)
        return (res, x, best_norm)

    workers = thread_count(threads)
    total_starts = 0
    best_residual = float("inf")
    best_x = None
    for p_idx, pattern_obj in enumerate(patterns):
        indices = list(range(budget))
        if workers > 1 and len(indices) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(
                    lambda s: run_start(p_idx, pattern_obj, s), indices))
        else:
            outcomes = []
            for s in indices:
                outcome = run_start(p_idx, pattern_obj, s)
                outcomes.append(outcome)
                if outcome[0] is not None:
                    break
        total_starts += len(outcomes)
        for s_idx, (res, x, norm) in enumerate(outcomes):
            if norm < best_residual:
                best_residual = norm
                best_x = tuple(sorted((complex(v) for v in x),
                                      key=lambda v: (v.real, v.imag)))
            if res is not None:
                xs = tuple(sorted((complex(v) for v in x),
                                  key=lambda v: (v.real, v.imag)))
                return FoundPoint(x=xs, residuals=res,
                                  pattern=pattern_obj.describe(),
                                  starts_used=total_starts - len(outcomes) + s_idx + 1)
    return NoneFound(patterns_tried=len(patterns), starts=total_starts,
                     best_residual=best_residual, best_x=best_x)


@dataclasses.dataclass(frozen=True)
class HalfDegreeResult:
    inf_full: float
    full_unbounded: bool
    witness_full: tuple[complex, ...]
    inf_restricted: float
    restricted_unbounded: bool
    witness_restricted: tuple[complex, ...]
    k: int


def _descend(objective, pattern_obj: _Pattern, theta0: np.ndarray, iterations: int):
    theta = _project_theta(pattern_obj, theta0)
    value = objective(theta)
    for _ in range(iterations):
        if value < _UNBOUNDED_FLOOR:
            break
        grad = np.zeros(theta.size)
        for q in range(theta.size):
            h = 1e-6 * (1.0 + abs(theta[q]))
            tp = theta.copy()
            tp[q] += h
            grad[q] = (objective(tp) - value) / h
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= 1e-12 * (1.0 + abs(value)):
            break
        step = max(1.0, abs(value) / (gnorm * gnorm + 1e-300))
        improved = False
        for _ in range(40):
            cand = _project_theta(pattern_obj, theta - step * grad)
            cv = objective(cand)
            if cv < value - 1e-14 * (1.0 + abs(value)):
                theta, value = cand, cv
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return value, theta


def halfdeg_optimize(f: SymmetricPoly, lam: float, mu: float, *,
                     budget: int = 20, seed: int = 0,
                     box: tuple[float, float, float] | None = None,
                     iterations: int = 300) -> HalfDegreeResult:
    """Estimate inf of lam*Re(f) + mu*Im(f) over the closed upper power set
    and over its few-distinct-coordinates subset.

    The restricted space uses k = max(floor(d/2), 2): at most k distinct
    real coordinates (with multiplicities) plus at most k interior ones.
    Unboundedness is reported when descent dives under the floor and the
    doubled witness at least doubles the objective's drop.
    """
    H = HalfPlane.upper()
    n = f.n
    k = max(f.degree // 2, 2)
    if box is None:
        box = (-3.0, 3.0, 3.0)

    def objective_for(pattern_obj: _Pattern):
        def objective(theta: np.ndarray) -> float:
            x = _pattern_point(pattern_obj, theta, H)
            val = f.eval_at_e(vieta_from_roots(tuple(x)).z)
            return lam * val.real + mu * val.imag
        return objective

    def optimize(patterns, tag: int):
        best = float("inf")
        witness = None
        unbounded = False
        for p_idx, pattern_obj in enumerate(patterns):
            objective = objective_for(pattern_obj)
            for s_idx in range(budget):
                rng = np.random.default_rng([_SEARCH_STREAM, seed, tag, p_idx, s_idx])
                theta0 = _start_theta(pattern_obj, rng, box)
                value, theta = _descend(objective, pattern_obj, theta0, iterations)
                if value < best:
                    best = value
                    witness = _pattern_point(pattern_obj, theta, H)
                if value < _UNBOUNDED_FLOOR:
                    doubled = objective(2.0 * theta)
                    if doubled <= 2.0 * value:
                        unbounded = True
                        witness = _pattern_point(pattern_obj, theta, H)
                        return float("-inf"), unbounded, witness
        return best, unbounded, witness

    full_patterns = [_Pattern(multiplicities=(), interior=n, boundary_real=True)]
    restricted_patterns = _km_patterns(n, k, k)
    inf_full, unb_full, wit_full = optimize(full_patterns, 0)
    inf_res, unb_res, wit_res = optimize(restricted_patterns, 1)
    return HalfDegreeResult(
        inf_full=inf_full,
        full_unbounded=unb_full,
        witness_full=tuple(complex(v) for v in (wit_full if wit_full is not None else ())),
        inf_restricted=inf_res,
        restricted_unbounded=unb_res,
        witness_restricted=tuple(complex(v) for v in (wit_res if wit_res is not None else ())),
        k=k,
    )
