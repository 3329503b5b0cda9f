"""Synthetic panels with known causal structure.

Two families:

* three unidirectionally coupled logistic maps (nonlinear, chaotic chain
  x1 -> x2 -> x3), and
* a linear multivariate Ornstein-Uhlenbeck network driven by a random
  sparse connectivity matrix.

Each generator returns the panel together with its true signed causal
graph, so recovery methods can be scored exactly.

Randomness streams: stream 0 = logistic initial-condition jitter,
stream 1 = connectivity sampling, stream 2 = diffusion noise.  Distinct
streams keep the three draws independent even under a shared seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import CausalGraph, Edge
from .series import MultiSeries, Seed, generator

_LOGISTIC_STREAM = 0
_CONNECTIVITY_STREAM = 1
_DIFFUSION_STREAM = 2

# Resampled connectivity must put every eigenvalue's real part below this
# margin; at the margin itself the process mixes too slowly to reach
# stationarity within the simulated horizon.
_STABILITY_MARGIN = -0.05
_MAX_RESAMPLES = 100


def node_names(n: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n))


@dataclass(frozen=True)
class LogisticSpec:
    """Three coupled logistic maps: x1 drives x2, x2 drives x3.

    ``noise_halfwidth`` jitters only the initial conditions; the dynamics
    themselves are deterministic.
    """

    alpha: float
    n: int = 100
    r: float = 3.8
    seed: Seed = 0
    base_inits: tuple[float, float, float] = (0.1, 0.2, 0.3)
    noise_halfwidth: float = 0.01

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 points, got n={self.n}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"coupling alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 < self.r <= 4.0:
            raise ValueError(f"growth coefficient r must lie in (0, 4], got {self.r}")
        if self.noise_halfwidth < 0.0:
            raise ValueError("noise_halfwidth must be non-negative")


def gen_logistic(spec: LogisticSpec) -> tuple[MultiSeries, CausalGraph]:
    """Simulate the coupled chain and return (panel, truth graph).

    Each variable follows x_t = r * x_{t-1} * (1 - x_{t-1}), with the
    driven variables adding alpha times their driver's previous value.
    The additive coupling can push a state outside the logistic map's
    domain, where iteration diverges, so every state is clamped back to
    [0, 1] after each update.
    """
    rng = generator(spec.seed, _LOGISTIC_STREAM)
    if spec.noise_halfwidth > 0.0:
        eps = rng.uniform(-spec.noise_halfwidth, spec.noise_halfwidth, 3)
    else:
        eps = np.zeros(3)
    state = np.clip(np.asarray(spec.base_inits, dtype=float) + eps, 0.0, 1.0)

    data = np.empty((spec.n, 3))
    data[0] = state
    for t in range(1, spec.n):
        prev = data[t - 1]
        logistic = spec.r * prev * (1.0 - prev)
        new = logistic.copy()
        new[1] += spec.alpha * prev[0]
        new[2] += spec.alpha * prev[1]
        data[t] = np.clip(new, 0.0, 1.0)

    names = node_names(3)
    if spec.alpha > 0.0:
        edges = frozenset({Edge("x1", "x2", 1), Edge("x2", "x3", 1)})
    else:
        edges = frozenset()
    return MultiSeries(names, data), CausalGraph(names, edges)


@dataclass(frozen=True)
class MouSpec:
    """Multivariate Ornstein-Uhlenbeck network dX = C X dt + sqrt(sigma2) dW."""

    n_nodes: int = 10
    density: float = 0.5
    sigma2: float = 0.2
    t_points: int = 100
    dt: float = 0.1
    burn_in: int = 200
    seed: Seed = 0
    leak: float | None = -1.0

    def __post_init__(self):
        if self.n_nodes < 2:
            raise ValueError(f"need at least 2 nodes, got {self.n_nodes}")
        if not 0.0 < self.density < 1.0:
            raise ValueError(f"density must lie in (0, 1), got {self.density}")
        if self.sigma2 <= 0.0:
            raise ValueError(f"noise variance must be positive, got {self.sigma2}")
        if self.dt <= 0.0:
            raise ValueError(f"integration step must be positive, got {self.dt}")
        if self.t_points < 2:
            raise ValueError(f"need at least 2 recorded points, got {self.t_points}")
        if self.burn_in < 0:
            raise ValueError("burn_in must be non-negative")


def gen_mou_connectivity(
    n_nodes: int,
    density: float,
    seed: Seed,
    leak: float | None = -1.0,
) -> tuple[np.ndarray, CausalGraph]:
    """Sample a stable sparse connectivity matrix and its edge graph.

    Off-diagonal support is i.i.d. Bernoulli(density) per ordered pair,
    with present entries uniform on [-1/(N*density), 1/(N*density)].  The
    diagonal is a fixed leak (default -1); ``leak=None`` leaves it at zero,
    which makes stability essentially unreachable and exists only to probe
    the resampling error path.  The whole matrix is resampled until its
    spectral abscissa clears the stability margin.
    """
    if not 0.0 < density < 1.0:
        raise ValueError(f"density must lie in (0, 1), got {density}")
    if n_nodes < 2:
        raise ValueError(f"need at least 2 nodes, got {n_nodes}")
    rng = generator(seed, _CONNECTIVITY_STREAM)
    bound = 1.0 / (n_nodes * density)
    for _ in range(_MAX_RESAMPLES):
        support = rng.random((n_nodes, n_nodes)) < density
        np.fill_diagonal(support, False)
        weights = rng.uniform(-bound, bound, (n_nodes, n_nodes))
        c = np.where(support, weights, 0.0)
        if leak is not None:
            np.fill_diagonal(c, leak)
        abscissa = float(np.max(np.linalg.eigvals(c).real))
        if abscissa < _STABILITY_MARGIN:
            break
    else:
        raise RuntimeError(
            f"no stable connectivity found in {_MAX_RESAMPLES} resamples "
            f"(N={n_nodes}, density={density}, leak={leak})"
        )

    names = node_names(n_nodes)
    edges = set()
    for i in range(n_nodes):
        for j in range(n_nodes):
            if i != j and c[i, j] != 0.0:
                edges.add(Edge(names[j], names[i], 1 if c[i, j] > 0 else -1))
    c.flags.writeable = False
    return c, CausalGraph(names, frozenset(edges))


def simulate_mou(
    c: np.ndarray,
    sigma2: float,
    dt: float,
    t_points: int,
    burn_in: int,
    seed: Seed,
) -> MultiSeries:
    """Euler-Maruyama integration of dX = C X dt + sqrt(sigma2) dW from X = 0.

    The first ``burn_in`` post-initial states are discarded, then exactly
    ``t_points`` states are recorded.  ``sigma2 = 0`` is allowed here (the
    deterministic flow is useful as an oracle) even though generated
    experiment panels always use positive noise.
    """
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"connectivity must be square, got shape {c.shape}")
    if sigma2 < 0.0:
        raise ValueError(f"noise variance must be non-negative, got {sigma2}")
    if dt <= 0.0 or t_points < 1 or burn_in < 0:
        raise ValueError("require dt > 0, t_points >= 1, burn_in >= 0")
    n = c.shape[0]
    rng = generator(seed, _DIFFUSION_STREAM)
    noise_scale = np.sqrt(sigma2 * dt)

    x = np.zeros(n)
    out = np.empty((t_points, n))
    total = burn_in + t_points
    for k in range(total):
        x = x + (c @ x) * dt + noise_scale * rng.standard_normal(n)
        if np.any(np.abs(x) > 1e6):
            raise RuntimeError(
                f"simulation diverged at step {k + 1}: |state| exceeded 1e6 "
                "(connectivity is not stable enough for this step size)"
            )
        if k >= burn_in:
            out[k - burn_in] = x
    return MultiSeries(node_names(n), out)


def gen_mou(spec: MouSpec) -> tuple[MultiSeries, CausalGraph, np.ndarray]:
    """Sample connectivity and simulate one panel; returns (panel, truth, C)."""
    c, truth = gen_mou_connectivity(spec.n_nodes, spec.density, spec.seed, spec.leak)
    panel = simulate_mou(c, spec.sigma2, spec.dt, spec.t_points, spec.burn_in, spec.seed)
    return panel, truth, c


def lyapunov_stationary_cov(c: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Solve C S + S C' + Sigma = 0 for the stationary covariance S.

    Vectorized linear solve: (I (x) C + C (x) I) vec(S) = -vec(Sigma) with
    column-major vec.  Valid for stable C; a singular system (eigenvalue
    pair summing to zero) raises.
    """
    c = np.asarray(c, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if c.shape != sigma.shape or c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError("connectivity and noise covariance must be square and same shape")
    n = c.shape[0]
    eye = np.eye(n)
    a = np.kron(eye, c) + np.kron(c, eye)
    try:
        vec_s = np.linalg.solve(a, -sigma.flatten(order="F"))
    except np.linalg.LinAlgError:
        raise ValueError("Lyapunov system is singular; connectivity is not stable") from None
    s = vec_s.reshape((n, n), order="F")
    return (s + s.T) / 2.0
