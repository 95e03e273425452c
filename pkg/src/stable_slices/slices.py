"""Linear slices of stable polynomials and the compression descent.

A slice is the set of stable monic degree-n polynomials whose coefficient
vector z satisfies L z = a.  This module provides membership, the
compactness bounds for slices pinning z1 and z2, kernel perturbation
directions (the convolution map chi), the maximal stable step along a
direction, and ``compress``, which walks a slice member down to a
representative with few distinct roots while preserving membership.

Directions returned by the kernel operations have the form c = chi(b),
the coefficient vector of h(T) * cofactor(T) for h built from b.  Because
z-coordinates are Vieta-signed, the cofactor handed to ``kernel_direction``
must be expanded from the *negated* roots of the frozen factor; see
``alternated_cofactor``.
"""

from __future__ import annotations

import dataclasses
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NonConvergence, NonRealInput
from .polynomials import (
    BOUNDARY_SCALE,
    CLUSTER_SCALE,
    Poly,
    RootProfile,
    cluster_roots,
    find_roots,
    vieta_from_roots,
)
from .regions import HalfPlane, upper_chart
from .stability import is_stable

NULLSPACE_SCALE = 1e-10
MEMBERSHIP_SCALE = 1e-9
# Fraction of boundary_tol left as headroom when the line search stops at
# a stability event; landed roots must not poke past the boundary band.
STEP_MARGIN = 0.5
# terminal bisection width; a fold crossed at parameter distance d leaves
# the colliding pair split by about sqrt(d * curvature), so the landing
# has to be resolved far below the clustering radius squared
STEP_REL_WIDTH = 1e-15
_EVENT_RADIUS_FACTOR = 1e3
_PHI_STREAM = 7
# micro-step allowance for the boundary position walk across all merges
_WALK_BUDGET = 20000


def membership_tolerance(target: np.ndarray) -> float:
    a = np.asarray(target, dtype=complex)
    top = float(np.max(np.abs(a))) if a.size else 0.0
    return MEMBERSHIP_SCALE * (1.0 + top)


@dataclasses.dataclass(frozen=True)
class Slice:
    """Linear constraint L z = a on Vieta coefficient vectors.

    ``rows`` is the k x n matrix L stored row-wise, ``target`` the vector a.
    ``field`` is "complex" for upper-half-plane slices and "real" for the
    Hurwitz case, where every entry must be real.
    """

    rows: tuple[tuple[complex, ...], ...]
    target: tuple[complex, ...]
    field: str = "complex"

    def __post_init__(self) -> None:
        if self.field not in ("complex", "real"):
            raise ValueError(f"unknown field tag {self.field!r}")
        if len(self.rows) != len(self.target):
            raise DimensionMismatch("row count does not match target length")
        widths = {len(row) for row in self.rows}
        if len(widths) > 1:
            raise DimensionMismatch("ragged constraint matrix")
        entries = [v for row in self.rows for v in row] + list(self.target)
        if entries and not np.all(np.isfinite(np.asarray(entries, dtype=complex).view(float))):
            raise ValueError("constraint entries must be finite")
        if self.field == "real" and entries:
            worst = max(abs(v.imag) for v in np.asarray(entries, dtype=complex))
            if worst > 1e-12 * (1.0 + max(abs(v) for v in np.asarray(entries, dtype=complex))):
                raise NonRealInput("real slice with non-real entries")

    @classmethod
    def from_arrays(cls, matrix, target, field: str = "complex") -> "Slice":
        m = np.atleast_2d(np.asarray(matrix, dtype=complex))
        a = np.asarray(target, dtype=complex).ravel()
        if m.size == 0:
            m = m.reshape(0, m.shape[-1] if m.ndim == 2 and m.shape[-1] else 0)
        rows = tuple(tuple(complex(v) for v in row) for row in m)
        return cls(rows=rows, target=tuple(complex(v) for v in a), field=field)

    @property
    def k(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @cached_property
    def matrix(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, 0), dtype=complex)
        return np.asarray(self.rows, dtype=complex)

    @cached_property
    def target_vector(self) -> np.ndarray:
        return np.asarray(self.target, dtype=complex)

    @cached_property
    def rank(self) -> int:
        if self.k == 0 or self.n == 0:
            return 0
        s = np.linalg.svd(self.matrix, compute_uv=False)
        return int(np.sum(s > NULLSPACE_SCALE * s[0])) if s.size else 0

    @cached_property
    def pseudoinverse(self) -> np.ndarray:
        return np.linalg.pinv(self.matrix)

    def residual(self, z) -> float:
        if self.k == 0:
            return 0.0
        zv = _coeff_vector(z, self.n)
        return float(np.max(np.abs(self.matrix @ zv - self.target_vector)))


def _coeff_vector(z, n: int | None = None) -> np.ndarray:
    if isinstance(z, Poly):
        v = np.asarray(z.z, dtype=complex)
    else:
        v = np.asarray(z, dtype=complex).ravel()
    if n is not None and v.size != n:
        raise DimensionMismatch(f"expected length {n}, got {v.size}")
    return v


def slice_contains(S: Slice, p: Poly, halfplane: HalfPlane | None = None,
                   tol: float | None = None) -> bool:
    """Membership test: linear residual within tol and all roots in H."""
    if S.k and p.degree != S.n:
        raise DimensionMismatch("polynomial degree does not match slice dimension")
    if tol is None:
        tol = membership_tolerance(S.target_vector)
    if S.residual(p) > tol:
        return False
    return is_stable(p, halfplane).stable


@dataclasses.dataclass(frozen=True)
class Bounds:
    """A-priori root bounds for slices pinning z1 and z2.

    Imaginary parts of all roots lie in [im_lo, im_hi]; the sum of squared
    real parts is at most re_sq_bound.
    """

    im_hi: float
    re_sq_bound: float
    im_lo: float = 0.0


def compactness_bounds(a1: complex, a2: complex, n: int) -> Bounds | None:
    """Root box for the slice {z1 = a1, z2 = a2}; None when it is empty.

    Both bounds come from expanding power sums of the roots: the z1 row
    caps each imaginary part by Im(a1), and Re(p2) = Re(a1^2 - 2 a2)
    dominates the real-part square sum once the imaginary slack n*Im(a1)^2
    is added back.  A negative value on either side leaves no room for a
    sum of nonnegative terms, so no stable polynomial fits.

    For n = 2 the two pins determine the polynomial outright, so emptiness
    is decided exactly from the quadratic formula instead of the window
    heuristics.
    """
    if n < 2:
        raise ValueError("bounds need degree at least 2")
    a1 = complex(a1)
    a2 = complex(a2)
    im_hi = a1.imag
    re_sq = (a1 * a1 - 2.0 * a2).real + n * a1.imag ** 2
    if im_hi < 0.0 or re_sq < 0.0:
        return None
    if n == 2:
        disc = np.sqrt(complex(a1 * a1 - 4.0 * a2))
        margin = min(((a1 + disc) / 2.0).imag, ((a1 - disc) / 2.0).imag)
        if margin < -1e-12 * (1.0 + abs(a1) + abs(a2)):
            return None
    return Bounds(im_hi=im_hi, re_sq_bound=re_sq)


def _row_in_span(matrix: np.ndarray, row: np.ndarray) -> bool:
    if matrix.shape[0] == 0:
        return False
    stacked = np.vstack([matrix, row])
    s_old = np.linalg.svd(matrix, compute_uv=False)
    s_new = np.linalg.svd(stacked, compute_uv=False)
    rank_old = int(np.sum(s_old > NULLSPACE_SCALE * s_old[0])) if s_old.size else 0
    rank_new = int(np.sum(s_new > NULLSPACE_SCALE * s_new[0])) if s_new.size else 0
    return rank_new == rank_old


def augment(S: Slice, z0) -> Slice:
    """Pin z1 and z2 to their current values unless already determined.

    The extra rows make every slice segment bounded (see
    ``compactness_bounds``), which is what lets the line searches in
    ``compress`` terminate.  Unit rows already in the row span of L are
    skipped.
    """
    z = _coeff_vector(z0, S.n if S.k else None)
    n = S.n if S.k else z.size
    rows = list(S.rows)
    target = list(S.target)
    matrix = S.matrix if S.k else np.zeros((0, n), dtype=complex)
    real_ok = S.field == "real"
    for j in range(min(2, n)):
        unit = np.zeros(n, dtype=complex)
        unit[j] = 1.0
        if _row_in_span(matrix, unit):
            continue
        rows.append(tuple(unit))
        target.append(complex(z[j]))
        matrix = np.vstack([matrix, unit])
        if abs(z[j].imag) > 1e-12 * (1.0 + abs(z[j])):
            real_ok = False
    field = "real" if real_ok else "complex"
    return Slice(rows=tuple(rows), target=tuple(target), field=field)


def alternated_cofactor(roots: Sequence[complex]) -> np.ndarray:
    """Raw coefficients of prod (T + x) over the given roots.

    Multiplying a direction through the chi map happens on raw
    coefficients, where the Vieta signs alternate; negating the frozen
    roots here is exactly what cancels that alternation, so the resulting
    direction c perturbs f by h_alt * prod (T - x).
    """
    out = np.ones(1, dtype=complex)
    for x in roots:
        out = np.convolve(out, np.array([1.0, complex(x)], dtype=complex))
    return out


def _convolution_matrix(cofactor: np.ndarray, m: int) -> np.ndarray:
    cof = np.asarray(cofactor, dtype=complex).ravel()
    n = cof.size - 1 + m
    X = np.zeros((n, m), dtype=complex)
    for j in range(m):
        X[j:j + cof.size, j] = cof
    return X


@dataclasses.dataclass(frozen=True)
class KernelDirection:
    b: tuple[complex, ...]
    c: tuple[complex, ...]


def _nullspace_vector(A: np.ndarray, m: int) -> np.ndarray | None:
    if A.shape[0] == 0:
        b = np.zeros(m)
        b[m - 1] = 1.0
        return b
    _, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s > NULLSPACE_SCALE * s[0])) if s.size and s[0] > 0 else 0
    if rank >= m:
        return None
    # svd returns V conjugate-transposed; the nullspace vector is a column
    # of V, so the last row must be conjugated back
    return np.conj(vh[-1])


def _canonical(b: np.ndarray) -> np.ndarray:
    idx = int(np.argmax(np.abs(b)))
    return b / b[idx]


def kernel_direction(S: Slice, cofactor, m: int, mode: str = "complex") -> KernelDirection | None:
    """Nonzero b with L(chi(b)) = 0, where chi(b) = coefficients of h * cofactor.

    h is the degree m-1 polynomial with coefficient vector b.  In mode
    "real" the k complex rows act as 2k real rows and b is real.  Returns
    None when the constraint matrix has full column rank, i.e. no kernel.
    """
    if mode not in ("complex", "real"):
        raise ValueError(f"unknown mode {mode!r}")
    cof = np.asarray(cofactor, dtype=complex).ravel()
    if m < 1:
        raise DimensionMismatch("mover count must be positive")
    n = cof.size - 1 + m
    if S.k and S.n != n:
        raise DimensionMismatch("cofactor degree does not match slice dimension")
    X = _convolution_matrix(cof, m)
    A = S.matrix @ X if S.k else np.zeros((0, m), dtype=complex)
    if mode == "real":
        A = np.vstack([A.real, A.imag])
    b = _nullspace_vector(A, m)
    if b is None:
        return None
    b = _canonical(b.astype(complex))
    if mode == "real":
        b = b.real.astype(complex)
    c = X @ b
    if S.k:
        lead = float(np.max(np.abs(S.matrix))) if S.matrix.size else 0.0
        limit = NULLSPACE_SCALE * max(1.0, lead) * max(float(np.max(np.abs(c))), 1e-300)
        if float(np.max(np.abs(S.matrix @ c))) > 10.0 * limit:
            return None
    return KernelDirection(b=tuple(b), c=tuple(c))


def hurwitz_kernel_direction(S: Slice, cofactor, m: int) -> KernelDirection | None:
    """Real kernel direction with the odd-position entries of b forced to zero.

    For b of length m the constrained positions are b1, b3, ...,
    b_{2*floor(m/2)-1}; the free ones are the even positions plus b_m when
    m is odd.  Needed for Hurwitz slices, where perturbations must keep
    the even/odd coefficient interlacing of real stable polynomials.
    """
    if S.field != "real":
        raise NonRealInput("hurwitz directions require a real slice")
    cof = np.asarray(cofactor, dtype=complex).ravel()
    if float(np.max(np.abs(cof.imag))) > 1e-10 * (1.0 + float(np.max(np.abs(cof)))):
        raise NonRealInput("hurwitz cofactor must be real")
    if m < 1:
        raise DimensionMismatch("mover count must be positive")
    n = cof.size - 1 + m
    if S.k and S.n != n:
        raise DimensionMismatch("cofactor degree does not match slice dimension")
    X = _convolution_matrix(cof.real.astype(complex), m)
    free = [j for j in range(m) if j % 2 == 1 or (j == m - 1 and m % 2 == 1)]
    A = S.matrix.real @ X.real if S.k else np.zeros((0, m))
    b_free = _nullspace_vector(A[:, free], len(free))
    if b_free is None:
        return None
    b = np.zeros(m, dtype=complex)
    b[free] = b_free
    b = _canonical(b)
    c = X @ b
    if S.k:
        lead = float(np.max(np.abs(S.matrix))) if S.matrix.size else 0.0
        limit = NULLSPACE_SCALE * max(1.0, lead) * max(float(np.max(np.abs(c))), 1e-300)
        if float(np.max(np.abs(S.matrix @ c))) > 10.0 * limit:
            return None
    return KernelDirection(b=tuple(b), c=tuple(c))


@dataclasses.dataclass(frozen=True)
class StepResult:
    epsilon: float
    event: str
    roots: tuple[complex, ...] = ()


@dataclasses.dataclass(frozen=True)
class StepFactorization:
    """Exact product structure of a step direction.

    When c comes from a kernel construction the polynomial factors as
    (moving part) * (frozen part) for every epsilon, with the moving
    factor's coefficient vector equal to vieta(movers) + epsilon*b.  The
    step search then only tracks the moving roots; the frozen ones do not
    drift and, crucially, a frozen multiple root never has to be
    re-derived from the full coefficient vector, which simple-root
    iterations cannot do to full accuracy.

    b must correspond to the same direction c handed to the step search,
    including its sign.
    """

    movers: tuple[complex, ...]
    b: tuple[complex, ...]
    frozen: tuple[complex, ...] = ()


def _min_distance(roots, halfplane: HalfPlane) -> float:
    return min(halfplane.signed_distance(x) for x in roots)


def _min_gap(roots) -> float:
    arr = np.asarray(roots, dtype=complex)
    if arr.size < 2:
        return float("inf")
    diff = np.abs(arr[:, None] - arr[None, :])
    np.fill_diagonal(diff, np.inf)
    return float(diff.min())


def max_stable_step(z, c, S: Slice | None = None, halfplane: HalfPlane | None = None,
                    cap: float = 1e9, *, boundary_tol: float | None = None,
                    cluster_radius: float | None = None, base_roots=None,
                    factor: StepFactorization | None = None) -> StepResult:
    """Largest epsilon in [0, cap] with z + epsilon*c stable, by doubling + bisection.

    The acceptance predicate allows roots a hair past the boundary
    (STEP_MARGIN of boundary_tol) so that the landed configuration stays
    stable under the full tolerance.  The event reports what limited the
    step: an interior root reaching the boundary, two boundary roots
    merging, or no event up to cap.

    With a factorization the search runs on the moving factor alone and
    the frozen roots are appended unchanged to every reported
    configuration.
    """
    zv = _coeff_vector(z)
    cv = _coeff_vector(c, zv.size)
    H = halfplane if halfplane is not None else HalfPlane.upper()
    if S is not None and S.k:
        drift = float(np.max(np.abs(S.matrix @ cv)))
        norm = float(np.max(np.abs(S.matrix))) * (1.0 + float(np.max(np.abs(cv))))
        if drift > 1e-6 * max(norm, 1.0):
            raise ValueError("direction leaves the slice constraint")
    if base_roots is None:
        base_roots = find_roots(Poly(tuple(zv)))
    roots0 = tuple(base_roots)
    scale = 1.0 + max(abs(x) for x in roots0)
    btol = boundary_tol if boundary_tol is not None else BOUNDARY_SCALE * scale
    radius = cluster_radius if cluster_radius is not None else CLUSTER_SCALE * scale
    min0 = _min_distance(roots0, H)
    if min0 < -btol:
        raise ValueError("base point is not stable")
    cut = STEP_MARGIN * btol
    if min0 < 0.0:
        cut = max(cut, -min0 + 0.05 * btol)

    frozen: tuple[complex, ...] = ()
    if factor is not None:
        m = len(factor.movers)
        if len(factor.b) != m or m + len(factor.frozen) != zv.size:
            raise DimensionMismatch("factorization does not match the polynomial degree")
        frozen = tuple(complex(x) for x in factor.frozen)
        move_z = np.asarray(vieta_from_roots(factor.movers).z, dtype=complex)
        move_b = _coeff_vector(factor.b, m)
        base_move = tuple(complex(x) for x in factor.movers)
    else:
        move_z, move_b, base_move = zv, cv, roots0

    def probe_at(eps: float, warm):
        # raw iterates: near a collision the snapped double would report
        # "on the boundary" even from the unstable side, so the search
        # must see the unvarnished configuration
        return find_roots(Poly(tuple(move_z + eps * move_b)), initial=warm, raw=True)

    def settle_at(eps: float, warm):
        q = Poly(tuple(move_z + eps * move_b))
        try:
            settled = find_roots(q, initial=warm)
        except NonConvergence:
            settled = find_roots(q)
        return tuple(settled) + frozen

    def admissible(roots) -> bool:
        return _min_distance(roots, H) >= -cut

    eps0 = min(cap, 1e-8 * (1.0 + float(np.max(np.abs(zv)))) / (1.0 + float(np.max(np.abs(cv)))))
    lo, roots_lo = 0.0, base_move
    hi = None
    probe = probe_at(eps0, base_move)
    if admissible(probe):
        lo, roots_lo = eps0, probe
        while lo < cap:
            trial = min(cap, lo * 2.0)
            rt = probe_at(trial, roots_lo)
            if admissible(rt):
                lo, roots_lo = trial, rt
                if trial >= cap:
                    break
            else:
                hi = trial
                break
        if hi is None:
            final = settle_at(cap, roots_lo)
            return StepResult(epsilon=cap, event="direction-unbounded", roots=tuple(final))
    else:
        hi = eps0
    while hi - lo > STEP_REL_WIDTH * (1.0 + hi):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        rt = probe_at(mid, roots_lo)
        if admissible(rt):
            lo, roots_lo = mid, rt
        else:
            hi = mid

    final = settle_at(lo, roots_lo) if lo > 0.0 else roots0
    relaxed = radius * _EVENT_RADIUS_FACTOR
    before = cluster_roots(roots0, H, radius=relaxed, boundary_tol=btol)
    after = cluster_roots(final, H, radius=relaxed, boundary_tol=btol)
    if after.interior_total < before.interior_total:
        event = "root-hit-boundary"
    elif after.boundary_distinct < before.boundary_distinct:
        event = "real-roots-merged"
    elif _min_gap(final) < relaxed <= _min_gap(roots0):
        event = "real-roots-merged"
    else:
        event = "root-hit-boundary"
    return StepResult(epsilon=float(lo), event=event, roots=tuple(final))


@dataclasses.dataclass(frozen=True)
class CompressOptions:
    max_steps: int | None = None
    step_cap: float = 1e9
    functional_seed: int = 0
    cluster_radius: float | None = None
    boundary_tol: float | None = None
    membership_tol: float | None = None


@dataclasses.dataclass(frozen=True)
class CompressionStep:
    mode: str
    direction: tuple[complex, ...]
    step_size: float
    event: str
    measure_after: tuple[int, int]
    membership_residual: float
    stable: bool


@dataclasses.dataclass(frozen=True)
class CompressionReport:
    initial_profile: RootProfile
    final_profile: RootProfile
    final_z: Poly
    steps: tuple[CompressionStep, ...]
    iterations: int
    rank: int
    sharpened: bool
    targets: tuple[int, int]
    cap_reached: bool
    stalled: bool
    checkpoints: tuple[tuple[int, int], ...]
    origin_boundary_clusters: int

    @property
    def measure(self) -> tuple[int, int]:
        return self.final_profile.measure()


def _is_coordinate_prefix(matrix: np.ndarray, rank: int) -> bool:
    # Sharpened bounds apply only when the row space is exactly the span of
    # the first `rank` coordinate directions.
    if matrix.shape[0] == 0 or rank == 0:
        return False
    if rank >= matrix.shape[1]:
        return False
    tail = matrix[:, rank:]
    top = float(np.max(np.abs(matrix)))
    return float(np.max(np.abs(tail))) <= NULLSPACE_SCALE * (1.0 + top)


def _state_roots(x: np.ndarray, mu: np.ndarray, frozen: np.ndarray) -> np.ndarray:
    moving = np.repeat(x.astype(complex), mu)
    return np.concatenate([moving, frozen]) if frozen.size else moving


def _deflate_raw(w: np.ndarray, r: complex) -> np.ndarray:
    # synthetic division of the monic raw vector by (T - r); the remainder
    # is dropped because r is an exact root of the represented product
    q = np.empty(w.size - 1, dtype=complex)
    acc = w[0]
    q[0] = acc
    for j in range(1, w.size - 1):
        acc = w[j] + r * acc
        q[j] = acc
    return q


def _position_tangents(x: np.ndarray, mu: np.ndarray, frozen: np.ndarray) -> np.ndarray:
    """Columns d z / d x_i for a root multiset parametrized by positions.

    Moving the whole multiplicity-mu_i stack at x_i perturbs the product
    by -mu_i * f / (T - x_i); the Vieta signs turn the raw coefficients of
    that quotient into the z-perturbation.
    """
    roots = _state_roots(x, mu, frozen)
    n = roots.size
    w = np.asarray(vieta_from_roots(roots).raw_coefficients(), dtype=complex)
    signs = np.array([(-1.0) ** t for t in range(1, n + 1)])
    cols = np.empty((n, x.size), dtype=complex)
    for i in range(x.size):
        q = _deflate_raw(w, complex(x[i]))
        cols[:, i] = signs * (-float(mu[i])) * q
    return cols


def _fiber_correct(x: np.ndarray, mu: np.ndarray, frozen: np.ndarray,
                   S2: Slice, tol: float) -> tuple[np.ndarray, np.ndarray, bool]:
    """Newton-project a walk state onto {L z(x) = a}, multiplicities fixed.

    Real positions move along the axis; the interior roots are free to
    absorb the complex part of the residual, which the axis-bound
    positions alone cannot reach, but they are weighted to move only when
    the positions cannot do the job.  Unlike a least-squares correction
    of the coefficient vector, moving positions can never split a stack,
    so the multiplicity structure survives the projection exactly.
    """
    nx, nfr, err = _fiber_correct_mixed(
        x, mu, frozen, np.ones(frozen.size, dtype=int), S2, tol,
        xc_weight=1e-3)
    ok = err <= tol
    if ok and nfr.size and float(np.min(nfr.imag)) <= 0.0:
        ok = False
    return nx, nfr, ok


def _fiber_correct_mixed(xr: np.ndarray, mur: np.ndarray,
                         xc: np.ndarray, muc: np.ndarray,
                         S2: Slice, tol: float,
                         xc_weight: float = 1.0) -> tuple[np.ndarray, np.ndarray, float]:
    """Newton-project a mixed root state onto {L z(x) = a}.

    Real positions get one degree of freedom along the axis, complex ones
    two; multiplicities never change, so stacks survive the projection.
    A small xc_weight makes the complex positions expensive, so they only
    move when the real positions cannot reach the residual.  Returns the
    best positions found and the residual they achieve.
    """
    nr, nc = xr.size, xc.size
    pos = np.concatenate([xr.astype(complex), xc])
    mu = np.concatenate([mur, muc]).astype(int)
    empty = np.zeros(0, dtype=complex)
    best, best_err = pos.copy(), np.inf
    prev = np.inf
    for _ in range(16):
        zc = np.asarray(vieta_from_roots(_state_roots(pos, mu, empty)).z, dtype=complex)
        res = S2.matrix @ zc - S2.target_vector
        err = float(np.max(np.abs(res))) if res.size else 0.0
        if err < best_err:
            best, best_err = pos.copy(), err
        if err <= 0.01 * tol or err > 0.9 * prev:
            break
        prev = err
        Jc = S2.matrix @ _position_tangents(pos, mu, empty)
        A = np.empty((2 * Jc.shape[0], nr + 2 * nc))
        A[:, :nr] = np.vstack([Jc[:, :nr].real, Jc[:, :nr].imag])
        A[:, nr::2] = np.vstack([Jc[:, nr:].real, Jc[:, nr:].imag])
        # the imaginary degree of freedom moves z along i times the column
        A[:, nr + 1::2] = np.vstack([-Jc[:, nr:].imag, Jc[:, nr:].real])
        A[:, nr:] *= xc_weight
        rhs = np.concatenate([res.real, res.imag])
        delta, *_ = np.linalg.lstsq(A, -rhs, rcond=None)
        if not np.all(np.isfinite(delta)):
            break
        delta[nr:] *= xc_weight
        pos = pos.copy()
        pos[:nr] += delta[:nr]
        pos[nr:] += delta[nr::2] + 1j * delta[nr + 1::2]
    return best[:nr].real, best[nr:], best_err


def _kernel_basis_real(A: np.ndarray, m: int) -> np.ndarray:
    if A.shape[0] == 0:
        return np.eye(m)
    _, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s > NULLSPACE_SCALE * s[0])) if s.size and s[0] > 0 else 0
    return vh[rank:].T


def _boundary_walk(x, mu, frozen, S2, functionals, t_bd, interior_count, *,
                   micro_budget: int):
    """Merge boundary root positions until at most t_bd remain.

    The state is the exact root multiset: real positions x with
    multiplicities mu plus interior roots that move only as much as the
    constraint projection demands.  Every micro step moves the positions
    along the steepest-descent direction of the fixed linear functional
    Re<u, z> inside the tangent kernel of the slice constraints, then
    Newton-projects back onto the constraint fiber.
    Stacks travel as units, so the distinct-value count only ever changes
    at collisions, where two positions merge and their multiplicities
    add.  The functional decreases throughout, which rules out cycles; a
    vanishing projected gradient under both functionals means the walk
    sits at a critical point and is reported as stalled.
    """
    x = np.asarray(x, dtype=float).copy()
    mu = np.asarray(mu, dtype=int).copy()
    frozen = np.asarray(frozen, dtype=complex).copy()
    records: list[CompressionStep] = []
    stalled = False
    exhausted = False
    ctol = 1e-12 * (1.0 + float(np.max(np.abs(S2.target_vector))) if S2.k else 1.0)
    seg_dir: np.ndarray | None = None
    seg_len = 0.0
    # per-segment search state: which descent mode is active, the step cap
    # (shrunk whenever the direction flips across a critical point), and
    # the previous direction for detecting those flips
    mode_idx = 0
    h_cap: float | None = None
    v_prev: np.ndarray | None = None

    x, frozen, ok = _fiber_correct(x, mu, frozen, S2, ctol)
    if not ok:
        return x, mu, frozen, records, True, False

    while x.size > t_bd:
        if micro_budget <= 0:
            exhausted = True
            break
        span = float(np.max(x) - np.min(x)) if x.size > 1 else 0.0
        merge_tol = 1e-7 * (1.0 + span)
        order = np.argsort(x)
        gaps = np.diff(x[order])
        if gaps.size and float(gaps.min()) <= merge_tol:
            j = int(np.argmin(gaps))
            i1, i2 = int(order[j]), int(order[j + 1])
            w1, w2 = float(mu[i1]), float(mu[i2])
            center = (w1 * x[i1] + w2 * x[i2]) / (w1 + w2)
            keep = [t for t in range(x.size) if t not in (i1, i2)]
            x = np.append(x[keep], center)
            mu = np.append(mu[keep], mu[i1] + mu[i2])
            x, frozen, ok = _fiber_correct(x, mu, frozen, S2, ctol)
            if not ok:
                stalled = True
                break
            zc = np.asarray(vieta_from_roots(_state_roots(x, mu, frozen)).z, dtype=complex)
            records.append(CompressionStep(
                mode="boundary",
                direction=tuple(seg_dir) if seg_dir is not None else (0.0,) * S2.n,
                step_size=seg_len,
                event="real-roots-merged",
                measure_after=(interior_count, int(x.size)),
                membership_residual=S2.residual(zc),
                stable=True,
            ))
            seg_dir = None
            seg_len = 0.0
            mode_idx = 0
            h_cap = None
            v_prev = None
            continue

        cols = _position_tangents(x, mu, frozen)
        J = S2.matrix @ cols
        V = _kernel_basis_real(np.vstack([J.real, J.imag]), x.size)
        if V.shape[1] == 0:
            stalled = True
            break
        h0 = 0.05 * (1.0 + span)
        h_floor = 1e-9 * (1.0 + span)
        if h_cap is None:
            h_cap = h0
        # Descent modes, tried in order and persisting across micro steps:
        # steepest descent of the reference functionals first, then, once
        # those sit at critical points, directions that close the k-th
        # smallest adjacent gap.  Gap closing makes the chosen gap
        # strictly monotone, so each mode either reaches a collision or
        # pins at a tangency and hands over to the next.
        total_modes = len(functionals) + max(x.size - 1, 0)
        moved = False
        while mode_idx < total_modes:
            if mode_idx < len(functionals):
                grad = np.real(functionals[mode_idx] @ cols)
            else:
                k = mode_idx - len(functionals)
                ranks = np.argsort(gaps)
                j = int(ranks[k])
                grad = np.zeros(x.size)
                grad[int(order[j + 1])] = 1.0
                grad[int(order[j])] = -1.0
            w = V @ (V.T @ grad)
            norm = float(np.linalg.norm(w))
            if norm <= 1e-10 * (1.0 + float(np.linalg.norm(grad))):
                mode_idx += 1
                h_cap = h0
                v_prev = None
                continue
            v = -w / norm
            if v_prev is not None and float(v @ v_prev) < 0.0:
                # stepped across a critical point of this mode; bisect into
                # it and give up on the mode once the cap hits the floor
                h_cap *= 0.5
                if h_cap < h_floor:
                    mode_idx += 1
                    h_cap = h0
                    v_prev = None
                    continue
            # step to the first collision the direction produces, if any
            # lies within reach: landing just inside the merge tolerance
            # turns collisions into aimed events instead of lucky ones
            h = h_cap
            if gaps.size:
                closing = -(v[order][1:] - v[order][:-1])
                ahead = closing > 0
                if np.any(ahead):
                    times = (gaps[ahead] - 0.5 * merge_tol) / closing[ahead]
                    h = min(h_cap, max(float(times.min()), 0.0))
            ok = False
            for _ in range(8):
                trial, tfrozen, ok = _fiber_correct(x + h * v, mu, frozen, S2, ctol)
                if ok:
                    break
                h *= 0.25
            if not ok:
                mode_idx += 1
                h_cap = h0
                v_prev = None
                continue
            if seg_dir is None:
                tangent = cols @ v
                top = float(np.max(np.abs(tangent)))
                seg_dir = tangent / top if top > 0 else tangent
            x = trial
            frozen = tfrozen
            seg_len += h
            v_prev = v
            micro_budget -= 1
            moved = True
            break
        if not moved:
            stalled = True
            break

    return x, mu, frozen, records, stalled, exhausted


def compress(z, S: Slice, halfplane: HalfPlane | None = None,
             options: CompressOptions | None = None) -> CompressionReport:
    """Descend to a slice member with few interior roots and few distinct
    boundary roots.

    After augmentation (rank r) the targets are interior_total <= r and
    boundary_distinct <= r when the augmented constraints form a
    coordinate prefix, else <= 2r.  Interior roots are removed first: each
    step freezes the boundary factor, takes a complex kernel direction
    that only stirs the interior roots, and walks to the stability
    boundary, where one of them lands on the boundary line.  The
    remaining boundary roots are then treated as real positions with
    multiplicities and flow along the constraint fiber until positions
    collide and their stacks merge, until at most the target number of
    distinct values remains.  Both phases move downhill for one fixed
    random linear functional, so the descent cannot revisit a state, and
    every recorded step strictly decreases the lexicographic measure
    (interior_total, boundary_distinct).
    """
    opts = options if options is not None else CompressOptions()
    H = halfplane if halfplane is not None else HalfPlane.upper()
    p0 = z if isinstance(z, Poly) else Poly(tuple(_coeff_vector(z)))
    n = p0.degree
    if S.k and S.n != n:
        raise DimensionMismatch("slice dimension does not match polynomial degree")

    initial_roots = find_roots(p0)
    initial_profile = cluster_roots(initial_roots, H,
                                    radius=opts.cluster_radius,
                                    boundary_tol=opts.boundary_tol)
    if initial_profile.outside_total:
        raise ValueError("starting point is not stable in the given half-plane")
    if S.residual(p0) > max(membership_tolerance(S.target_vector),
                            opts.membership_tol or 0.0) * 1e3:
        raise ValueError("starting point does not satisfy the slice constraints")

    chart = None
    if H.is_upper():
        zc = np.asarray(p0.z, dtype=complex)
        S_work = S
    else:
        A, shift = upper_chart(H, n)
        zc = A @ np.asarray(p0.z, dtype=complex) + shift
        L2 = np.linalg.solve(A.T, S.matrix.T).T if S.k else np.zeros((0, n), dtype=complex)
        a2 = S.target_vector + L2 @ shift if S.k else np.zeros(0, dtype=complex)
        S_work = Slice.from_arrays(L2, a2) if S.k else Slice(rows=(), target=())
        chart = (A, shift)
    upper = HalfPlane.upper()

    S2 = augment(S_work if S_work.k else Slice(rows=(), target=()), zc)
    r = S2.rank
    sharpened = _is_coordinate_prefix(S2.matrix, r)
    t_int = r
    t_bd = r if sharpened else 2 * r
    max_steps = opts.max_steps if opts.max_steps is not None else max(4 * n, 64)
    mem_tol = opts.membership_tol if opts.membership_tol is not None \
        else membership_tolerance(S2.target_vector)

    rng = np.random.default_rng([_PHI_STREAM, opts.functional_seed])
    u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    u /= np.linalg.norm(u)
    u2 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    u2 /= np.linalg.norm(u2)

    roots = find_roots(Poly(tuple(zc))) if chart is not None else initial_roots
    resid0 = S2.residual(zc)
    steps: list[CompressionStep] = []
    checkpoints: list[tuple[int, int]] = []
    cap_reached = False
    stalled = False
    iterations = 0

    while True:
        scale = 1.0 + max(abs(x) for x in roots)
        btol = opts.boundary_tol if opts.boundary_tol is not None else BOUNDARY_SCALE * scale
        radius = opts.cluster_radius if opts.cluster_radius is not None else CLUSTER_SCALE * scale
        profile = cluster_roots(roots, upper, radius=radius, boundary_tol=btol)
        measure = profile.measure()
        if not checkpoints or measure < checkpoints[-1]:
            checkpoints.append(measure)
        if profile.interior_total <= t_int and profile.boundary_distinct <= t_bd:
            break
        if iterations >= max_steps:
            cap_reached = True
            steps.append(CompressionStep(mode="none", direction=(0.0,) * n,
                                         step_size=0.0, event="cap-reached",
                                         measure_after=measure,
                                         membership_residual=S2.residual(zc),
                                         stable=True))
            break

        interior = [cl for cl in profile.clusters if cl.side == "interior"]
        boundary = [cl for cl in profile.clusters if cl.side == "boundary"]
        if profile.interior_total > t_int:
            movers = [x for cl in interior for x in cl.members]
            frozen = [x for cl in boundary for x in cl.members]
            cof = alternated_cofactor(frozen)
            kern = kernel_direction(S2, cof, len(movers), mode="complex")
            if kern is None:
                stalled = True
                break
            c = np.asarray(kern.c, dtype=complex)
            b = np.asarray(kern.b, dtype=complex)
            norm = float(np.max(np.abs(c)))
            c /= norm
            b /= norm
            # any unit phase keeps c in the kernel; the one that points the
            # reference functional downhill makes phi decrease on interior
            # steps too, so phi is a Lyapunov function for the whole walk
            pairing = complex(np.sum(u * c))
            if abs(pairing) > 1e-12:
                phase = -np.conj(pairing) / abs(pairing)
                c = phase * c
                b = phase * b
            eps_min = 1e-11 * (1.0 + float(np.max(np.abs(zc))))
            fact = StepFactorization(movers=tuple(complex(x) for x in movers),
                                     b=tuple(b),
                                     frozen=tuple(complex(x) for x in frozen))
            st = max_stable_step(zc, c, S2, upper, cap=opts.step_cap,
                                 boundary_tol=btol, cluster_radius=radius,
                                 base_roots=roots, factor=fact)
            if st.event == "direction-unbounded":
                cap_reached = True
                steps.append(CompressionStep(
                    mode="interior", direction=tuple(c), step_size=float(st.epsilon),
                    event="direction-unbounded", measure_after=measure,
                    membership_residual=S2.residual(zc), stable=True))
                break
            if st.epsilon <= eps_min:
                stalled = True
                break
            # The settled roots are the state; re-expanding them keeps the
            # coefficient vector at rounding distance from the exact
            # product, which is what lets multiple roots survive
            # re-examination.  The residual this leaves on the constraints
            # is repaired in position space: a coefficient correction of
            # size d would split an m-fold root by d**(1/m), while moving
            # positions keeps every stack intact.
            roots = np.asarray(st.roots, dtype=complex)
            after = cluster_roots(roots, upper, radius=radius, boundary_tol=btol)
            if S2.k:
                bd = [cl for cl in after.clusters if cl.side == "boundary"]
                nb = [cl for cl in after.clusters if cl.side != "boundary"]
                xr = np.array([cl.center.real for cl in bd], dtype=float)
                mur = np.array([cl.multiplicity for cl in bd], dtype=int)
                xcp = np.array([cl.center for cl in nb], dtype=complex)
                muc = np.array([cl.multiplicity for cl in nb], dtype=int)
                raw_err = S2.residual(np.asarray(vieta_from_roots(roots).z, dtype=complex))
                nxr, nxc, err = _fiber_correct_mixed(xr, mur, xcp, muc, S2, 0.1 * mem_tol)
                if err < raw_err:
                    roots = np.concatenate([np.repeat(nxr.astype(complex), mur),
                                            np.repeat(nxc, muc)])
                    after = cluster_roots(roots, upper, radius=radius, boundary_tol=btol)
            zc = np.asarray(vieta_from_roots(roots).z, dtype=complex)
            iterations += 1
            steps.append(CompressionStep(
                mode="interior",
                direction=tuple(c),
                step_size=float(st.epsilon),
                event=st.event,
                measure_after=after.measure(),
                membership_residual=S2.residual(zc),
                stable=after.outside_total == 0,
            ))
            roots = tuple(roots)
        else:
            xb = np.array([cl.center.real for cl in boundary], dtype=float)
            mub = np.array([cl.multiplicity for cl in boundary], dtype=int)
            fr = np.array([x for cl in interior for x in cl.members], dtype=complex)
            xb, mub, fr, walk_steps, walk_stalled, walk_exhausted = _boundary_walk(
                xb, mub, fr, S2, (u, u2), t_bd, profile.interior_total,
                micro_budget=_WALK_BUDGET)
            roots = tuple(_state_roots(xb, mub, fr))
            zc = np.asarray(vieta_from_roots(roots).z, dtype=complex)
            for rec in walk_steps:
                steps.append(rec)
                iterations += 1
                if not checkpoints or rec.measure_after < checkpoints[-1]:
                    checkpoints.append(rec.measure_after)
            if walk_stalled:
                stalled = True
                break
            if walk_exhausted:
                cap_reached = True
                steps.append(CompressionStep(
                    mode="none", direction=(0.0,) * n, step_size=0.0,
                    event="cap-reached",
                    measure_after=(profile.interior_total, int(xb.size)),
                    membership_residual=S2.residual(zc), stable=True))
                break

    if S2.k and iterations:
        drifted = S2.residual(zc)
        if drifted > resid0 + mem_tol:
            raise NonConvergence(
                f"slice membership residual grew to {drifted:.3e} during descent"
            )

    if chart is not None:
        A, shift = chart
        z_final = np.linalg.solve(A, zc - shift)
        final_poly = Poly(tuple(z_final))
        final_roots = find_roots(final_poly)
    else:
        z_final = np.asarray(zc, dtype=complex)
        final_poly = Poly(tuple(z_final))
        # the descent state is the exact root multiset of z_final; seeding
        # the verification pass with it keeps high-multiplicity stacks
        # findable where a cold start loses them to conditioning
        try:
            final_roots = find_roots(final_poly, initial=tuple(roots))
        except NonConvergence:
            # a double root is only determined to about the square root of
            # the coefficient noise, so the re-finder can sit above its
            # residual gate on tight clusters even when the state is exact
            final_roots = tuple(complex(r) for r in roots)
    final_profile = cluster_roots(final_roots, H,
                                  radius=opts.cluster_radius,
                                  boundary_tol=opts.boundary_tol)
    fscale = 1.0 + max(abs(x) for x in final_roots)
    fbtol = opts.boundary_tol if opts.boundary_tol is not None else BOUNDARY_SCALE * fscale
    origin = sum(1 for cl in final_profile.clusters
                 if cl.side == "boundary" and abs(cl.center) <= 10.0 * fbtol)
    return CompressionReport(
        initial_profile=initial_profile,
        final_profile=final_profile,
        final_z=final_poly,
        steps=tuple(steps),
        iterations=iterations,
        rank=r,
        sharpened=sharpened,
        targets=(t_int, t_bd),
        cap_reached=cap_reached,
        stalled=stalled,
        checkpoints=tuple(checkpoints),
        origin_boundary_clusters=origin,
    )


@dataclasses.dataclass(frozen=True)
class SectionGrid:
    xs: tuple[float, ...]
    ys: tuple[float, ...]
    members: tuple[tuple[bool, ...], ...]


def sample_slice_section(S: Slice, halfplane: HalfPlane | None, free_axes: tuple[int, int],
                         window: tuple[float, float, float, float],
                         resolution: tuple[int, int]) -> SectionGrid:
    """Membership grid over a 2-plane of the real coefficient chart.

    Axis 2k is Re(z_{k+1}), axis 2k+1 is Im(z_{k+1}); both free axes must
    be annihilated by L so the sampled plane stays inside the affine
    constraint set.  Rows of the grid follow the y coordinate.
    """
    H = halfplane if halfplane is not None else HalfPlane.upper()
    n = S.n if S.k else (max(free_axes) // 2 + 1)
    ax_i, ax_j = free_axes
    if ax_i == ax_j or not (0 <= ax_i < 2 * n and 0 <= ax_j < 2 * n):
        raise DimensionMismatch("free axes must be two distinct chart coordinates")
    w, h = resolution
    if w < 1 or h < 1:
        raise ValueError("resolution must be positive")

    def axis_vector(axis: int) -> np.ndarray:
        v = np.zeros(n, dtype=complex)
        v[axis // 2] = 1.0 if axis % 2 == 0 else 1.0j
        return v

    vi, vj = axis_vector(ax_i), axis_vector(ax_j)
    if S.k:
        top = 1.0 + float(np.max(np.abs(S.matrix)))
        for v in (vi, vj):
            if float(np.max(np.abs(S.matrix @ v))) > MEMBERSHIP_SCALE * top:
                raise DimensionMismatch("free axis is not in the kernel of the slice map")
        base, *_ = np.linalg.lstsq(S.matrix, S.target_vector, rcond=None)
        linear_ok = S.residual(base) <= membership_tolerance(S.target_vector)
    else:
        base = np.zeros(n, dtype=complex)
        linear_ok = True
    for axis in (ax_i, ax_j):
        idx = axis // 2
        base[idx] = 1j * base[idx].imag if axis % 2 == 0 else base[idx].real

    x0, x1, y0, y1 = window
    xs = np.linspace(x0, x1, w)
    ys = np.linspace(y0, y1, h)
    rows = []
    warm = None
    for y in ys:
        row = []
        for x in xs:
            if not linear_ok:
                row.append(False)
                continue
            zv = base + x * vi + y * vj
            try:
                roots = find_roots(Poly(tuple(zv)), initial=warm)
            except NonConvergence:
                try:
                    roots = find_roots(Poly(tuple(zv)))
                except NonConvergence:
                    row.append(False)
                    warm = None
                    continue
            warm = roots
            profile = cluster_roots(roots, H)
            row.append(profile.outside_total == 0)
        rows.append(tuple(row))
    return SectionGrid(xs=tuple(float(v) for v in xs),
                       ys=tuple(float(v) for v in ys),
                       members=tuple(rows))
