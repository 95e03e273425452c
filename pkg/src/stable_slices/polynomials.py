"""Monic complex polynomials in root and signed-coefficient form.

A degree-n polynomial is stored through the vector z with

    f_z(T) = T^n - z_1 T^(n-1) + z_2 T^(n-2) - ... + (-1)^n z_n,

so z_i is exactly the i-th elementary symmetric function of the roots and
no sign bookkeeping leaks into callers.  Raw (unsigned, descending)
coefficient lists appear only at the edges: convolution products,
Moebius images and the conversion helpers below.
"""

from __future__ import annotations

import cmath
import dataclasses
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, NonConvergence

if TYPE_CHECKING:  # pragma: no cover - typing only, avoids an import cycle
    from .regions import HalfPlane

# Scale factors behind the default tolerances.  Each is multiplied by
# (1 + magnitude of the data it guards).
RESIDUAL_SCALE = 1e-10
CLUSTER_SCALE = 1e-6
BOUNDARY_SCALE = 1e-8

_ABERTH_MAX_ITERATIONS = 400
_POLISH_STEPS = 2


def _as_complex_tuple(values: Iterable[complex], what: str) -> tuple[complex, ...]:
    out = tuple(complex(v) for v in values)
    for v in out:
        if not (cmath.isfinite(v)):
            raise ValueError(f"{what} must be finite, got {v!r}")
    return out


@dataclasses.dataclass(frozen=True)
class Poly:
    """Monic polynomial keyed by its elementary-symmetric coefficient vector."""

    z: tuple[complex, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", _as_complex_tuple(self.z, "coefficient"))
        if not self.z:
            raise ValueError("a polynomial needs degree >= 1")

    @property
    def degree(self) -> int:
        return len(self.z)

    def raw_coefficients(self) -> np.ndarray:
        """Descending unsigned coefficients [1, -z_1, +z_2, ...]."""
        n = self.degree
        signs = (-1.0) ** np.arange(1, n + 1)
        return np.concatenate(([1.0 + 0.0j], signs * np.asarray(self.z, dtype=complex)))

    @classmethod
    def from_raw(cls, coefficients: Sequence[complex]) -> "Poly":
        """Build from descending raw coefficients; the leading one must be 1."""
        w = np.asarray(list(coefficients), dtype=complex)
        if w.size < 2:
            raise ValueError("need at least degree 1")
        lead = w[0]
        if lead == 0:
            raise ValueError("leading coefficient must be nonzero")
        w = w / lead
        n = w.size - 1
        signs = (-1.0) ** np.arange(1, n + 1)
        return cls(tuple(signs * w[1:]))

    def scale(self) -> float:
        return 1.0 + float(max(abs(v) for v in self.z))


def eval_poly(p: Poly, t: complex) -> complex:
    """Horner evaluation of f_z at t."""
    acc = 1.0 + 0.0j
    sign = 1.0
    for z_i in p.z:
        sign = -sign
        acc = acc * t + sign * z_i
    return acc


def multiply(a: Sequence[complex], b: Sequence[complex]) -> tuple[complex, ...]:
    """Raw convolution of two descending coefficient lists.

    Operates on unsigned coefficients, not on z-vectors; it is the oracle
    against which factor constructions elsewhere are checked.
    """
    av = np.asarray(list(a), dtype=complex)
    bv = np.asarray(list(b), dtype=complex)
    if av.size == 0 or bv.size == 0:
        raise DimensionMismatch("empty coefficient list")
    return tuple(np.convolve(av, bv))


def vieta_from_roots(roots: Sequence[complex]) -> Poly:
    """Expand prod (T - x_j) and return the Poly carrying e_i(roots)."""
    xs = _as_complex_tuple(roots, "root")
    if not xs:
        raise ValueError("need at least one root")
    raw = np.array([1.0 + 0.0j])
    for x in xs:
        raw = np.convolve(raw, np.array([1.0 + 0.0j, -x]))
    return Poly.from_raw(raw)


def _aberth(w: np.ndarray, x: np.ndarray, max_iterations: int) -> np.ndarray:
    n = x.size
    dw = w[:-1] * np.arange(n, 0, -1)
    for _ in range(max_iterations):
        pv = np.polyval(w, x)
        dpv = np.polyval(dw, x)
        dpv = np.where(np.abs(dpv) < 1e-300, 1e-300, dpv)
        newton = pv / dpv
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, np.inf)
        tiny = 1e-14 * (1.0 + float(np.max(np.abs(x))))
        diff = np.where(np.abs(diff) < tiny, tiny, diff)
        repulsion = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - newton * repulsion
        denom = np.where(np.abs(denom) < 1e-300, 1.0, denom)
        step = newton / denom
        x = x - step
        if np.max(np.abs(step)) <= 1e-14 * (1.0 + np.max(np.abs(x))):
            break
    return x


def _nth_derivative(w: np.ndarray, order: int) -> np.ndarray:
    out = w
    for _ in range(order):
        out = out[:-1] * np.arange(out.size - 1, 0, -1)
    return out


def _deflate(w: np.ndarray, r: complex) -> np.ndarray:
    # synthetic division by (T - r); the remainder is discarded because r
    # is used as an exact root of the represented factor
    q = np.empty(w.size - 1, dtype=complex)
    acc = w[0]
    for i in range(w.size - 1):
        q[i] = acc
        acc = acc * r + w[i + 1]
    return q


def _collapse_refine(w: np.ndarray, z: np.ndarray, x: np.ndarray):
    """Snap near-coincident roots to polished multiple roots.

    Simple-root iterations smear an m-fold root over a cluster of width
    about eps^(1/m); the cluster mean recovers most of the lost accuracy
    and Newton on the (m-1)-th derivative recovers the rest.  Tried over a
    ladder of radii; the re-expansion residual picks the winner, so a
    wrong merge can only lose the comparison, never corrupt the result.
    """
    scale = 1.0 + float(np.max(np.abs(x)))
    best = None
    for factor in (1.0, 1e1, 1e2, 1e3, 1e4):
        groups = _single_linkage(x, CLUSTER_SCALE * scale * factor)
        if all(len(g) == 1 for g in groups):
            continue
        stacks: list[tuple[complex, int]] = []
        singles: list[complex] = []
        for g in groups:
            mu = complex(np.mean(x[g]))
            m = len(g)
            if m > 1:
                dw = _nth_derivative(w, m - 1)
                ddw = dw[:-1] * np.arange(dw.size - 1, 0, -1)
                for _ in range(3):
                    dpv = np.polyval(ddw, mu)
                    if abs(dpv) < 1e-200:
                        break
                    mu = mu - np.polyval(dw, mu) / dpv
                stacks.append((mu, m))
            else:
                singles.append(mu)
        # The surviving simple roots set the re-expansion floor once the
        # stacks are snapped, and evaluating w there is cancellation
        # limited.  Dividing the snapped stacks out first leaves a
        # quotient that is well conditioned at the companions.
        if singles:
            q = w
            for mu, m in stacks:
                for _ in range(m):
                    q = _deflate(q, mu)
            dq = q[:-1] * np.arange(q.size - 1, 0, -1)
            for i, mu in enumerate(singles):
                for _ in range(3):
                    dv = np.polyval(dq, mu)
                    if abs(dv) < 1e-200:
                        break
                    mu = mu - np.polyval(q, mu) / dv
                singles[i] = mu
        trial: list[complex] = []
        for mu, m in stacks:
            trial.extend([mu] * m)
        trial.extend(singles)
        arr = np.asarray(trial, dtype=complex)
        err = float(np.max(np.abs(np.asarray(vieta_from_roots(arr).z) - z)))
        if best is None or err < best[1]:
            best = (arr, err)
    return best


def find_roots(
    p: Poly,
    *,
    max_iterations: int = _ABERTH_MAX_ITERATIONS,
    residual_tol: float | None = None,
    initial: Sequence[complex] | None = None,
    raw: bool = False,
) -> tuple[complex, ...]:
    """All roots with multiplicity via simultaneous (Aberth) iteration.

    Deterministic: fixed initial configuration on a circle of radius
    1 + max |coefficient| unless warm-start values are supplied.  The
    result is accepted only if re-expanding the computed roots reproduces
    the coefficient vector within the residual tolerance.

    With raw=True the single-pass iterates are returned as-is: no
    multiple-root snapping, no retry, no residual check.  Near a root
    collision the snapped representation can hide which side of the
    collision the polynomial is on, so step-size searches probe in raw
    mode and only the landed point gets the full treatment.
    """
    n = p.degree
    if n == 1:
        return (p.z[0],)
    w = p.raw_coefficients()
    if initial is not None:
        x = np.asarray(list(initial), dtype=complex)
        if x.size != n:
            raise DimensionMismatch("warm start must supply one value per root")
        # split coincident warm values so pairwise repulsion stays finite
        groups = _single_linkage(x, 1e-12 * (1.0 + float(np.max(np.abs(x)))))
        for g in groups:
            if len(g) > 1:
                spread = 1e-7 * (1.0 + abs(x[g[0]]))
                for t, idx in enumerate(g):
                    x[idx] += spread * np.exp(2j * np.pi * (t + 0.3) / len(g))
        # An all-real or conjugate-symmetric iterate set is invariant under
        # the iteration when the coefficients are real, which strands warm
        # starts on the wrong side of a root collision; a fixed asymmetric
        # nudge keeps every configuration reachable.
        k = np.arange(x.size)
        x = x + 1e-9 * (1.0 + np.abs(x)) * np.exp(1j * (0.6 + 1.7 * k))
    else:
        radius = 1.0 + float(np.max(np.abs(w)))
        k = np.arange(n)
        angles = 2.0 * np.pi * k / n + 0.4
        radii = radius * (1.0 + 1e-3 * (k + 1) / n)
        x = radii * np.exp(1j * angles)
    x = _aberth(w, x, max_iterations)

    dw = w[:-1] * np.arange(n, 0, -1)
    for _ in range(_POLISH_STEPS):
        pv = np.polyval(w, x)
        dpv = np.polyval(dw, x)
        safe = np.abs(dpv) > 1e-200
        x = np.where(safe, x - pv / np.where(safe, dpv, 1.0), x)

    if raw:
        order = np.lexsort((x.imag, x.real))
        return tuple(complex(v) for v in x[order])

    tol = residual_tol if residual_tol is not None else RESIDUAL_SCALE * p.scale()
    target = np.asarray(p.z)
    err = float(np.max(np.abs(np.asarray(vieta_from_roots(x).z) - target)))
    # Collapsing near-coincident iterates onto an exact multiple root wins
    # whenever the polynomial really has one; re-expansion error arbitrates.
    fixed = _collapse_refine(w, target, x)
    if fixed is not None and fixed[1] < err:
        x, err = fixed
    if err > tol and initial is None:
        # One retry with a rotated start often rescues stiff clusters.
        radius = 1.0 + float(np.max(np.abs(w)))
        k = np.arange(n)
        alt = radius * 1.3 * np.exp(1j * (2.0 * np.pi * k / n + 1.1))
        x = _aberth(w, alt, 2 * max_iterations)
        err = float(np.max(np.abs(np.asarray(vieta_from_roots(x).z) - target)))
        if err > tol:
            fixed = _collapse_refine(w, target, x)
            if fixed is not None and fixed[1] < err:
                x, err = fixed
    if err > tol:
        raise NonConvergence(
            f"root iteration residual {err:.3e} above tolerance {tol:.3e}"
        )
    order = np.lexsort((x.imag, x.real))
    return tuple(complex(v) for v in x[order])


@dataclasses.dataclass(frozen=True)
class Cluster:
    """A group of numerically coincident roots with its region verdict."""

    center: complex
    multiplicity: int
    members: tuple[complex, ...]
    side: str  # "interior" | "boundary" | "outside"
    signed_distance: float


@dataclasses.dataclass(frozen=True)
class RootProfile:
    """Clustered root picture of a polynomial relative to a half-plane."""

    clusters: tuple[Cluster, ...]
    cluster_radius: float
    boundary_tol: float

    @property
    def interior_total(self) -> int:
        return sum(c.multiplicity for c in self.clusters if c.side == "interior")

    @property
    def boundary_distinct(self) -> int:
        return sum(1 for c in self.clusters if c.side == "boundary")

    @property
    def outside_total(self) -> int:
        return sum(c.multiplicity for c in self.clusters if c.side == "outside")

    @property
    def total_multiplicity(self) -> int:
        return sum(c.multiplicity for c in self.clusters)

    def measure(self) -> tuple[int, int]:
        """Lexicographic (interior_total, boundary_distinct)."""
        return (self.interior_total, self.boundary_distinct)

    def min_signed_distance(self) -> float:
        return min(c.signed_distance for c in self.clusters)


def _single_linkage(points: np.ndarray, radius: float) -> list[list[int]]:
    n = points.size
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(points[i] - points[j]) <= radius:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [groups[k] for k in sorted(groups)]


def cluster_roots(
    roots: Sequence[complex],
    halfplane: "HalfPlane",
    *,
    radius: float | None = None,
    boundary_tol: float | None = None,
) -> RootProfile:
    """Single-linkage clustering plus interior/boundary/outside labels.

    Cluster centers are multiplicity-weighted means.  After linkage,
    clusters whose centers still fall within the radius are merged again
    so that surviving centers are pairwise separated by more than the
    radius.
    """
    xs = np.asarray(list(roots), dtype=complex)
    if xs.size == 0:
        raise ValueError("need at least one root")
    scale = 1.0 + float(np.max(np.abs(xs)))
    r = radius if radius is not None else CLUSTER_SCALE * scale
    btol = boundary_tol if boundary_tol is not None else BOUNDARY_SCALE * scale

    groups = _single_linkage(xs, r)
    centers = [complex(np.mean(xs[g])) for g in groups]
    # Chained 2-d clusters can leave centers closer than the radius; merge
    # until the separation invariant holds.
    changed = True
    while changed and len(groups) > 1:
        changed = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                if abs(centers[i] - centers[j]) <= r:
                    groups[i] = groups[i] + groups[j]
                    del groups[j]
                    centers = [complex(np.mean(xs[g])) for g in groups]
                    changed = True
                    break
            if changed:
                break

    clusters = []
    for g in groups:
        members = tuple(complex(xs[i]) for i in sorted(g))
        center = complex(np.mean(xs[list(g)]))
        dist = halfplane.signed_distance(center)
        if abs(dist) <= btol:
            side = "boundary"
        elif dist > btol:
            side = "interior"
        else:
            side = "outside"
        clusters.append(Cluster(center, len(members), members, side, dist))
    clusters.sort(key=lambda c: (c.center.real, c.center.imag))
    return RootProfile(tuple(clusters), r, btol)
