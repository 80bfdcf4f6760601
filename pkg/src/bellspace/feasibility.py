"""Local-correlation-polytope membership with Bell-inequality certificates.

A target m x n matrix P of correlations on finite setting grids is
reproducible by bounded hidden-variable responses (|xi_i| <= 1, |eta_j| <= 1
with P_ij = E[xi_i eta_j]) exactly when P lies in the local correlation
polytope

    L = conv{ s t^T : s in {-1,+1}^m, t in {-1,+1}^n }.

Why the bounded-response problem reduces to the polytope: for each lambda
the rank-one matrix xi(lambda) eta(lambda)^T has its factors inside the unit
cubes, and every point of a cube is a convex combination of the cube's sign
vertices; bilinearity then writes xi eta^T as a convex combination of sign
outer products, so the lambda-average P stays in L.  Conversely any weight
vector on sign pairs *is* a discrete hidden-variable model.  Membership of P
in L is therefore decided exactly by a linear-program feasibility check over
vertex weights, and the LP dual of an infeasible instance is a separating
Bell-type inequality.

The decision is run as a phase-1 LP (minimize the l1 constraint violation);
its optimum is zero iff P is in L.  Verification never trusts the solver:
:func:`verify_certificate` recomputes the classical bound of a certificate
by exhaustive enumeration of all 2^(m+n) sign pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .spin import as_angle

#: Hard cap on m + n; vertex enumeration is 2^(m+n).
MAX_GRID_SIZE = 24
#: Feasibility threshold on the phase-1 optimum and certificate margins.
FEASIBILITY_TOL = 1e-9

_MAX_LP_ENTRIES = 250_000_000  # dense constraint-matrix guard (~2 GB of floats)

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"


class FeasibilitySolverError(RuntimeError):
    """The LP backend failed or the instance exceeds the dense-matrix budget."""


@dataclass(frozen=True)
class CorrelationTarget:
    """Target correlations P_ij on finite Alice/Bob angle grids.

    Angles are wrapped into [0, 2*pi); the matrix has shape (len(alphas),
    len(betas)) with entries in [-1, 1], and m + n is capped at
    :data:`MAX_GRID_SIZE` to keep vertex enumeration tractable.
    """

    alphas: tuple[float, ...]
    betas: tuple[float, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        alphas = tuple(as_angle(a) for a in self.alphas)
        betas = tuple(as_angle(b) for b in self.betas)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)
        m, n = len(alphas), len(betas)
        if m < 1 or n < 1:
            raise ValueError("need at least one setting per wing")
        if m + n > MAX_GRID_SIZE:
            raise ValueError(
                f"grid too large: m + n = {m + n} exceeds the cap {MAX_GRID_SIZE}"
            )
        matrix = np.array(self.matrix, dtype=float)
        if matrix.shape != (m, n):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match grids ({m}, {n})"
            )
        if not np.all(np.isfinite(matrix)):
            raise ValueError("matrix entries must be finite")
        if np.max(np.abs(matrix)) > 1.0 + 1e-9:
            raise ValueError("correlation entries must lie in [-1, 1]")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CorrelationTarget):
            return NotImplemented
        return (
            self.alphas == other.alphas
            and self.betas == other.betas
            and np.array_equal(self.matrix, other.matrix)
        )

    def scaled(self, factor: float) -> "CorrelationTarget":
        return CorrelationTarget(self.alphas, self.betas, factor * self.matrix)


def cosine_target(
    alphas: Sequence[float], betas: Sequence[float], g: float = 1.0
) -> CorrelationTarget:
    """The singlet-type target g*cos(alpha_i - beta_j) on the given grids."""
    a = np.array([as_angle(x) for x in alphas])
    b = np.array([as_angle(x) for x in betas])
    return CorrelationTarget(tuple(a), tuple(b), g * np.cos(a[:, None] - b[None, :]))


def canonical_cosine_target(g: float = 1.0) -> CorrelationTarget:
    """2x2 cosine target at the maximal-violation angles (pi/2, 0) x (pi/4, -pi/4)."""
    return cosine_target((math.pi / 2, 0.0), (math.pi / 4, -math.pi / 4), g)


@dataclass(frozen=True)
class BellCertificate:
    """A separating inequality: sum c_ij P_ij <= bound for every local P."""

    coefficients: np.ndarray
    bound: float

    def __post_init__(self) -> None:
        coeff = np.array(self.coefficients, dtype=float)
        if coeff.ndim != 2 or not np.all(np.isfinite(coeff)):
            raise ValueError("coefficients must be a finite 2-d matrix")
        coeff.setflags(write=False)
        object.__setattr__(self, "coefficients", coeff)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BellCertificate):
            return NotImplemented
        return self.bound == other.bound and np.array_equal(
            self.coefficients, other.coefficients
        )

    def value_at(self, target: CorrelationTarget) -> float:
        return float(np.sum(self.coefficients * target.matrix))


def chsh_certificate() -> BellCertificate:
    """The CHSH inequality as a 2x2 certificate: c = [[1,-1],[1,1]], bound 2."""
    return BellCertificate(np.array([[1.0, -1.0], [1.0, 1.0]]), 2.0)


@dataclass(frozen=True)
class StrategyWeight:
    """One mixture component: sign vectors for both wings plus its weight."""

    s: tuple[int, ...]
    t: tuple[int, ...]
    weight: float


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of a membership test: a representing mixture or a certificate.

    ``residual`` is the largest reconstruction error of the mixture when
    feasible, and the phase-1 violation (the separation margin implied by the
    dual) when infeasible.
    """

    status: str
    residual: float
    weights: tuple[StrategyWeight, ...] | None = None
    certificate: BellCertificate | None = None

    @property
    def is_feasible(self) -> bool:
        return self.status == FEASIBLE


def _sign_matrix(k: int) -> np.ndarray:
    """All vectors of {-1,+1}^k as rows (first coordinate = most significant bit)."""
    if k == 0:
        return np.ones((1, 0))
    bits = (np.arange(2**k)[:, None] >> np.arange(k - 1, -1, -1)) & 1
    return (2.0 * bits - 1.0).astype(float)


def _half_sign_matrix(m: int) -> np.ndarray:
    """Sign vectors with the first coordinate pinned to +1.

    The outer products s t^T and (-s)(-t)^T coincide, so restricting Alice's
    first sign to +1 enumerates every polytope vertex exactly once.
    """
    rest = _sign_matrix(m - 1)
    return np.hstack([np.ones((rest.shape[0], 1)), rest])


def local_polytope_membership(
    target: CorrelationTarget, feas_tol: float = FEASIBILITY_TOL
) -> FeasibilityResult:
    """Decide membership of the target in the local correlation polytope.

    Feasible verdicts return a sparse representing mixture over sign-strategy
    pairs; infeasible verdicts return a separating Bell certificate read off
    the LP dual.  Solver breakdowns raise :class:`FeasibilitySolverError`
    with the solver's message and residual information.
    """
    m, n = target.matrix.shape
    strategies_a = _half_sign_matrix(m)
    strategies_b = _sign_matrix(n)
    n_cols = strategies_a.shape[0] * strategies_b.shape[0]
    if m * n * n_cols > _MAX_LP_ENTRIES:
        raise FeasibilitySolverError(
            f"dense LP for a {m}x{n} grid needs {m * n * n_cols} matrix entries, "
            f"over the {_MAX_LP_ENTRIES} budget"
        )

    # Column (k, l): the outer product of strategy pair (s_k, t_l), flattened
    # row-major to match target.matrix.ravel().
    columns = np.einsum("ki,lj->ijkl", strategies_a, strategies_b).reshape(m * n, n_cols)
    p = target.matrix.ravel()

    # Phase-1 LP: minimize sum(u+ + u-) s.t. columns @ w + u+ - u- = p,
    # sum(w) = 1, all variables >= 0.  Optimum 0 <=> membership.
    n_eq = m * n
    eye = np.eye(n_eq)
    a_eq = np.zeros((n_eq + 1, n_cols + 2 * n_eq))
    a_eq[:n_eq, :n_cols] = columns
    a_eq[:n_eq, n_cols : n_cols + n_eq] = eye
    a_eq[:n_eq, n_cols + n_eq :] = -eye
    a_eq[n_eq, :n_cols] = 1.0
    b_eq = np.concatenate([p, [1.0]])
    cost = np.concatenate([np.zeros(n_cols), np.ones(2 * n_eq)])

    result = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if result.status != 0:
        raise FeasibilitySolverError(
            f"LP solver failed (status {result.status}): {result.message}"
        )
    violation = float(result.fun)

    if violation <= feas_tol:
        w = result.x[:n_cols]
        residual = float(np.max(np.abs(columns @ w - p)))
        keep = np.flatnonzero(w > 1e-12)
        weights = tuple(
            StrategyWeight(
                s=tuple(int(v) for v in strategies_a[k // strategies_b.shape[0]]),
                t=tuple(int(v) for v in strategies_b[k % strategies_b.shape[0]]),
                weight=float(w[k]),
            )
            for k in keep
        )
        return FeasibilityResult(FEASIBLE, residual=residual, weights=weights)

    dual = np.asarray(result.eqlin.marginals, dtype=float)
    # Orient the dual so that dual . b_eq equals the (positive) optimum.
    if float(dual @ b_eq) < 0.0:
        dual = -dual
    coefficients = dual[:n_eq].reshape(m, n)
    bound = -float(dual[n_eq])
    margin = float(np.sum(coefficients * target.matrix)) - bound
    if margin <= feas_tol:
        raise FeasibilitySolverError(
            f"dual certificate margin {margin!r} inconsistent with phase-1 "
            f"violation {violation!r}"
        )
    return FeasibilityResult(
        INFEASIBLE,
        residual=violation,
        certificate=BellCertificate(coefficients, bound),
    )


def verify_certificate(
    certificate: BellCertificate,
    target: CorrelationTarget,
    margin_tol: float = FEASIBILITY_TOL,
) -> bool:
    """Independently confirm that a certificate separates the target.

    Recomputes the classical bound max over all 2^(m+n) sign pairs of
    sum c_ij s_i t_j by exhaustive enumeration (chunked over Alice
    strategies) and checks the separation margin exceeds ``margin_tol``.
    """
    coeff = certificate.coefficients
    m, n = coeff.shape
    if target.matrix.shape != (m, n):
        raise ValueError("certificate shape does not match the target")
    strategies_a = _sign_matrix(m)
    strategies_b = _sign_matrix(n)
    chunk = max(1, 4_000_000 // strategies_b.shape[0])
    best = -math.inf
    for start in range(0, strategies_a.shape[0], chunk):
        block = strategies_a[start : start + chunk] @ coeff @ strategies_b.T
        best = max(best, float(np.max(block)))
    achieved = certificate.value_at(target)
    return achieved - best > margin_tol


def max_feasible_scale(target: CorrelationTarget, tol: float) -> float:
    """Largest scaling g in [0, 1] keeping g*P inside the local polytope.

    Bisection over membership tests, returning the largest tested feasible
    value; the true threshold lies within ``tol`` above it.  An identically
    zero target is in the polytope at any scale, so the answer is 1.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not np.any(target.matrix):
        return 1.0
    if local_polytope_membership(target).is_feasible:
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if local_polytope_membership(target.scaled(mid)).is_feasible:
            lo = mid
        else:
            hi = mid
    return lo


# --- JSON (de)serialization -------------------------------------------------


def target_to_dict(target: CorrelationTarget) -> dict:
    return {
        "alphas": list(target.alphas),
        "betas": list(target.betas),
        "matrix": [list(row) for row in target.matrix],
    }


def target_from_dict(data: dict) -> CorrelationTarget:
    unknown = set(data) - {"alphas", "betas", "matrix"}
    if unknown:
        raise ValueError(f"unknown correlation-target keys: {sorted(unknown)}")
    try:
        alphas = tuple(float(a) for a in data["alphas"])
        betas = tuple(float(b) for b in data["betas"])
        matrix = np.array(data["matrix"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed correlation target: {exc}") from exc
    return CorrelationTarget(alphas, betas, matrix)


def result_to_dict(result: FeasibilityResult) -> dict:
    payload: dict = {"status": result.status, "residual": result.residual}
    if result.weights is not None:
        payload["weights"] = [
            {"s": list(w.s), "t": list(w.t), "weight": w.weight}
            for w in result.weights
        ]
    if result.certificate is not None:
        payload["certificate"] = {
            "coefficients": [list(row) for row in result.certificate.coefficients],
            "bound": result.certificate.bound,
        }
    return payload


def result_from_dict(data: dict) -> FeasibilityResult:
    unknown = set(data) - {"status", "residual", "weights", "certificate"}
    if unknown:
        raise ValueError(f"unknown feasibility-result keys: {sorted(unknown)}")
    weights = None
    if "weights" in data:
        weights = tuple(
            StrategyWeight(
                s=tuple(int(v) for v in w["s"]),
                t=tuple(int(v) for v in w["t"]),
                weight=float(w["weight"]),
            )
            for w in data["weights"]
        )
    certificate = None
    if "certificate" in data:
        certificate = BellCertificate(
            np.array(data["certificate"]["coefficients"], dtype=float),
            float(data["certificate"]["bound"]),
        )
    return FeasibilityResult(
        status=str(data["status"]),
        residual=float(data["residual"]),
        weights=weights,
        certificate=certificate,
    )
