"""Sampling and density evaluation for the priors every test induces.

Each prior family is specified on its own coordinates (rates for IB,
log odds for LT, difference/mean for the dependent variant), but all of
them induce distributions on every other quantity of interest.  This
module evaluates those induced densities on grids (figure data) and
draws seeded samples from them (Monte Carlo checks).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import expit

from .dep_ib import sample_prior_depib
from .model import (
    DepIBPrior,
    DomainError,
    Hypothesis,
    IBPrior,
    LTPrior,
    PriorConfig,
    UnsupportedFeatureError,
)
from .special import (
    eta_density_ib,
    log_density_beta,
    log_density_gaussian,
    psi_density_ib_a1,
)
from .lt import _log_prior_beta

__all__ = [
    "ParamSamples",
    "DensityGrid",
    "sample_prior",
    "conditional_theta2_density",
    "marginal_density",
    "joint_density_grid",
    "prior_correlation",
]


@dataclass(frozen=True)
class ParamSamples:
    """Draws of (theta1, theta2) with derived coordinates, as parallel arrays.

    ``beta`` and ``psi`` are NaN wherever a rate sits exactly on the
    boundary (possible under the clamped dependent prior), since the log
    odds are infinite there.
    """

    theta1: np.ndarray
    theta2: np.ndarray
    eta: np.ndarray
    zeta: np.ndarray
    beta: np.ndarray
    psi: np.ndarray

    def __len__(self):
        return self.theta1.size

    @classmethod
    def from_rates(cls, theta1: np.ndarray, theta2: np.ndarray) -> "ParamSamples":
        theta1 = np.asarray(theta1, dtype=float)
        theta2 = np.asarray(theta2, dtype=float)
        interior = (theta1 > 0) & (theta1 < 1) & (theta2 > 0) & (theta2 < 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            l1 = np.where(interior, np.log(theta1) - np.log1p(-theta1), np.nan)
            l2 = np.where(interior, np.log(theta2) - np.log1p(-theta2), np.nan)
        return cls(
            theta1=theta1,
            theta2=theta2,
            eta=theta2 - theta1,
            zeta=0.5 * (theta1 + theta2),
            beta=0.5 * (l1 + l2),
            psi=l2 - l1,
        )


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Density values tabulated on a 1D axis or a 2D product grid.

    ``normalization`` records the trapezoid-rule integral of the stored
    values over the grid.  ``contains_point_mass`` flags priors whose
    mass is not entirely absolutely continuous over the grid (the
    clamped dependent prior); ``mc_estimate`` flags values estimated by
    Monte Carlo rather than evaluated from a formula or quadrature.
    """

    x_axis: np.ndarray
    values: np.ndarray
    y_axis: np.ndarray | None = None
    normalization: float = field(default=float("nan"))
    contains_point_mass: bool = False
    mc_estimate: bool = False

    @staticmethod
    def trapezoid(x_axis, values, y_axis=None) -> float:
        if y_axis is None:
            return float(np.trapezoid(values, x_axis))
        return float(np.trapezoid(np.trapezoid(values, y_axis, axis=1), x_axis))

    @classmethod
    def build(cls, x_axis, values, y_axis=None, **flags) -> "DensityGrid":
        x_axis = np.asarray(x_axis, dtype=float)
        values = np.asarray(values, dtype=float)
        norm = cls.trapezoid(x_axis, values, y_axis)
        return cls(
            x_axis=x_axis,
            values=values,
            y_axis=None if y_axis is None else np.asarray(y_axis, dtype=float),
            normalization=norm,
            **flags,
        )


# --------------------------------------------------------------------------
# Sampling
# --------------------------------------------------------------------------


def sample_prior(
    cfg: PriorConfig, hypothesis: Hypothesis, n_draws: int, seed: int
) -> ParamSamples:
    """Seeded i.i.d. draws from the prior of the given model.

    Under H0 the IB and dependent variants share a single rate and the
    LT variant pins psi = 0.
    """
    if n_draws < 1:
        raise ValueError("n_draws must be >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    if isinstance(cfg, IBPrior):
        t1 = rng.beta(cfg.a, cfg.a, n_draws)
        t2 = t1 if hypothesis is Hypothesis.H0 else rng.beta(cfg.a, cfg.a, n_draws)
        return ParamSamples.from_rates(t1, t2)
    if isinstance(cfg, LTPrior):
        if cfg.beta_prior.value == "gaussian":
            beta = rng.normal(0.0, cfg.sigma_beta, n_draws)
        else:
            beta = rng.logistic(0.0, cfg.sigma_beta, n_draws)
        psi = (
            np.zeros(n_draws)
            if hypothesis is Hypothesis.H0
            else rng.normal(0.0, cfg.sigma_psi, n_draws)
        )
        return ParamSamples.from_rates(expit(beta - 0.5 * psi), expit(beta + 0.5 * psi))
    if isinstance(cfg, DepIBPrior):
        t1, t2 = sample_prior_depib(
            cfg, n_draws, seed, hypothesis_null=hypothesis is Hypothesis.H0
        )
        return ParamSamples.from_rates(t1, t2)
    raise UnsupportedFeatureError(f"unknown prior config {cfg!r}")


def prior_correlation(cfg: PriorConfig, n_draws: int = 1_000_000, seed: int = 0) -> float:
    """Monte Carlo Pearson correlation of (theta1, theta2) under H1."""
    if n_draws < 10**6:
        raise ValueError(f"n_draws must be at least 1e6, got {n_draws}")
    s = sample_prior(cfg, Hypothesis.H1, n_draws, seed)
    return float(np.corrcoef(s.theta1, s.theta2)[0, 1])


# --------------------------------------------------------------------------
# Joint density kernels
# --------------------------------------------------------------------------


def _lt_log_joint_rates(t1, t2, cfg: LTPrior):
    """Log density of (theta1, theta2) under the LT prior (interior rates).

    Change of variables from (beta, psi); the Jacobian is
    1 / [t1 (1-t1) t2 (1-t2)].
    """
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    l1 = np.log(t1) - np.log1p(-t1)
    l2 = np.log(t2) - np.log1p(-t2)
    beta = 0.5 * (l1 + l2)
    psi = l2 - l1
    return (
        _log_prior_beta(beta, cfg.sigma_beta, cfg.beta_prior)
        + log_density_gaussian(psi, cfg.sigma_psi)
        - np.log(t1)
        - np.log1p(-t1)
        - np.log(t2)
        - np.log1p(-t2)
    )


def _ib_log_joint_rates(t1, t2, cfg: IBPrior):
    return log_density_beta(t1, cfg.a) + log_density_beta(t2, cfg.a)


def _require_interior(theta1: float):
    if not 0.0 < theta1 < 1.0:
        raise DomainError(f"theta1 must be interior to (0, 1), got {theta1!r}")


# --------------------------------------------------------------------------
# Density grids
# --------------------------------------------------------------------------


def conditional_theta2_density(
    cfg: PriorConfig, theta1: float, grid: np.ndarray
) -> DensityGrid:
    """Density of theta2 given theta1 under the H1 prior, normalized on the grid.

    Under independent Beta priors conditioning changes nothing and the
    unconditional Beta(a, a) density is returned; under the LT prior the
    joint is evaluated along the slice and renormalized.
    """
    grid = np.asarray(grid, dtype=float)
    if isinstance(cfg, IBPrior):
        vals = np.exp(log_density_beta(grid, cfg.a))
        return DensityGrid.build(grid, vals)
    if isinstance(cfg, LTPrior):
        _require_interior(theta1)
        interior = (grid > 0) & (grid < 1)
        vals = np.zeros_like(grid)
        with np.errstate(divide="ignore"):
            vals[interior] = np.exp(
                _lt_log_joint_rates(np.full(interior.sum(), theta1), grid[interior], cfg)
            )
        total = float(np.trapezoid(vals, grid))
        return DensityGrid.build(grid, vals / total)
    raise UnsupportedFeatureError(
        f"conditional rate density is not available for {type(cfg).__name__}"
    )


def _lt_theta_marginal(t: float, cfg: LTPrior, which: int) -> float:
    # integrate the (theta, psi) joint over psi; `which` = +1 for theta1
    # (beta = logit t + psi/2), -1 for theta2
    lt_ = math.log(t) - math.log1p(-t)

    def f(psi):
        beta = lt_ + which * 0.5 * psi
        return np.exp(
            _log_prior_beta(beta, cfg.sigma_beta, cfg.beta_prior)
            + log_density_gaussian(psi, cfg.sigma_psi)
        )

    lim = 12.0 * cfg.sigma_psi
    val, _ = integrate.quad(f, -lim, lim, epsabs=1e-13, epsrel=1e-10, limit=200)
    return val / (t * (1.0 - t))


def _lt_eta_marginal(e: float, cfg: LTPrior) -> float:
    lo = max(0.0, -e)
    hi = min(1.0, 1.0 - e)
    if not lo < hi:
        return 0.0

    def f(t1):
        return np.exp(_lt_log_joint_rates(t1, t1 + e, cfg))

    val, _ = integrate.quad(f, lo, hi, epsabs=1e-13, epsrel=1e-9, limit=200)
    return val


def marginal_density(
    cfg: PriorConfig,
    quantity: str,
    grid: np.ndarray,
    n_draws: int = 1_000_000,
    seed: int = 0,
) -> DensityGrid:
    """Marginal prior density of ``quantity`` in {"eta", "psi", "theta"}.

    Closed forms are used where they exist (all IB eta densities; the
    IB psi density at a = 1; the LT psi prior, which is simply Gaussian);
    LT rate and eta marginals are pushforwards computed by quadrature
    over the complementary coordinate.  The IB psi marginal for a != 1
    has no closed form and is served by a seeded Monte Carlo histogram,
    flagged as such.  ``theta2`` and ``theta1`` are accepted as aliases
    of ``theta`` for symmetry checks.
    """
    grid = np.asarray(grid, dtype=float)
    if isinstance(cfg, IBPrior):
        if quantity == "eta":
            vals = np.array([eta_density_ib(float(e), cfg.a).value for e in grid])
            return DensityGrid.build(grid, vals)
        if quantity == "psi":
            if cfg.a == 1.0:
                vals = np.array([psi_density_ib_a1(float(p)).value for p in grid])
                return DensityGrid.build(grid, vals)
            s = sample_prior(cfg, Hypothesis.H1, n_draws, seed)
            lo, hi = grid.min() - 1.0, grid.max() + 1.0
            counts, edges = np.histogram(s.psi, bins=10_000, range=(lo, hi))
            dens = counts / (s.psi.size * (edges[1] - edges[0]))
            centers = 0.5 * (edges[:-1] + edges[1:])
            vals = np.interp(grid, centers, dens)
            return DensityGrid.build(grid, vals, mc_estimate=True)
        if quantity in ("theta", "theta1", "theta2"):
            vals = np.exp(log_density_beta(grid, cfg.a))
            return DensityGrid.build(grid, vals)
        raise UnsupportedFeatureError(f"unknown quantity {quantity!r}")
    if isinstance(cfg, LTPrior):
        if quantity == "psi":
            vals = np.exp(log_density_gaussian(grid, cfg.sigma_psi))
            return DensityGrid.build(grid, vals)
        if quantity == "eta":
            vals = np.array([_lt_eta_marginal(float(e), cfg) for e in grid])
            return DensityGrid.build(grid, vals)
        if quantity in ("theta", "theta1", "theta2"):
            which = -1 if quantity == "theta2" else +1
            vals = np.array([_lt_theta_marginal(float(t), cfg, which) for t in grid])
            return DensityGrid.build(grid, vals)
        raise UnsupportedFeatureError(f"unknown quantity {quantity!r}")
    raise UnsupportedFeatureError(
        f"marginal densities are not available for {type(cfg).__name__}: "
        "its clamped prior is not absolutely continuous"
    )


def _half_open_axis(lo: float, hi: float, resolution: int) -> np.ndarray:
    # half-cell inset keeps grids off boundary singularities
    step = (hi - lo) / resolution
    return lo + step * (np.arange(resolution) + 0.5)


def joint_density_grid(
    cfg: PriorConfig, coords: str, resolution: int = 128
) -> DensityGrid:
    """Joint prior density on a 2D grid.

    ``coords`` is one of "theta1_theta2", "theta1_eta", "theta1_psi".
    Grid axes exclude exact boundaries by a half cell; rate/eta axes span
    their natural supports, the psi axis spans +/- 12 (IB) or +/- 6
    prior standard deviations (LT).
    """
    if resolution < 64:
        raise ValueError(f"resolution must be >= 64 per axis, got {resolution}")
    if not isinstance(cfg, (IBPrior, LTPrior)):
        raise UnsupportedFeatureError(
            f"joint density grids are not available for {type(cfg).__name__}"
        )
    t_axis = _half_open_axis(0.0, 1.0, resolution)

    if coords == "theta1_theta2":
        y_axis = t_axis
        tt1, tt2 = np.meshgrid(t_axis, y_axis, indexing="ij")
        logj = (
            _ib_log_joint_rates(tt1, tt2, cfg)
            if isinstance(cfg, IBPrior)
            else _lt_log_joint_rates(tt1, tt2, cfg)
        )
        return DensityGrid.build(t_axis, np.exp(logj), y_axis)

    if coords == "theta1_eta":
        y_axis = _half_open_axis(-1.0, 1.0, resolution)
        tt1, ee = np.meshgrid(t_axis, y_axis, indexing="ij")
        tt2 = tt1 + ee
        valid = (tt2 > 0.0) & (tt2 < 1.0)
        vals = np.zeros_like(tt1)
        logj = (
            _ib_log_joint_rates(tt1, np.where(valid, tt2, 0.5), cfg)
            if isinstance(cfg, IBPrior)
            else _lt_log_joint_rates(tt1, np.where(valid, tt2, 0.5), cfg)
        )
        vals[valid] = np.exp(logj[valid])
        return DensityGrid.build(t_axis, vals, y_axis)

    if coords == "theta1_psi":
        half = 12.0 if isinstance(cfg, IBPrior) else 6.0 * cfg.sigma_psi
        y_axis = _half_open_axis(-half, half, resolution)
        tt1, pp = np.meshgrid(t_axis, y_axis, indexing="ij")
        l1 = np.log(tt1) - np.log1p(-tt1)
        if isinstance(cfg, IBPrior):
            tt2 = expit(l1 + pp)
            vals = np.exp(
                log_density_beta(tt1, cfg.a)
                + log_density_beta(tt2, cfg.a)
                + np.log(tt2)
                + np.log1p(-tt2)
            )
        else:
            beta = l1 + 0.5 * pp
            vals = np.exp(
                _log_prior_beta(beta, cfg.sigma_beta, cfg.beta_prior)
                + log_density_gaussian(pp, cfg.sigma_psi)
                - np.log(tt1)
                - np.log1p(-tt1)
            )
        return DensityGrid.build(t_axis, vals, y_axis)

    raise UnsupportedFeatureError(f"unknown coordinate pair {coords!r}")
