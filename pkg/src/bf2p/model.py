"""Core data types for two-group binomial experiments.

Everything downstream works with the types defined here: observed counts,
the three parameter coordinate systems (raw rates, rate difference/grand
mean, log-odds grand mean/log odds ratio), prior configurations, and the
``EvidenceResult`` record that every Bayes factor routine returns.

All types are immutable value objects and safe to share across threads.
Marginal likelihoods and Bayes factors are carried in natural-log space
throughout; conversion to the linear scale happens only at serialization
or display time.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass


class ValidationError(ValueError):
    """Observed counts or a hyperparameter value violate an invariant."""


class ConfigError(ValueError):
    """Inconsistent or mismatched prior/model configuration."""


class DomainError(ValueError):
    """A function was evaluated outside its mathematical domain."""


class UnsupportedFeatureError(NotImplementedError):
    """Requested combination has no implemented (closed-form or numeric) route."""


class NumericalError(RuntimeError):
    """An iterative numerical procedure failed to converge.

    ``last_iterate`` carries whatever state the procedure reached, for
    diagnosis; it is not a usable result.
    """

    def __init__(self, message: str, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class WidePriorWarning(UserWarning):
    """A prior scale outside the recommended range was accepted."""


class Hypothesis(enum.Enum):
    H0 = "h0"
    H1 = "h1"


class Method(enum.Enum):
    """How a marginal likelihood was computed."""

    ANALYTIC = "analytic"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"


def _sigmoid(x: float) -> float:
    # 1/(1+exp(-x)) branch form; no overflow for |x| up to ~745
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _is_integer_scalar(v) -> bool:
    """True for numpy integer scalars and other exact-int duck types."""
    if isinstance(v, bool) or isinstance(v, float):
        return False
    try:
        return int(v) == v
    except (TypeError, ValueError):
        return False


@dataclass(frozen=True)
class TwoByTwoData:
    """Counts (y1, n1, y2, n2) of a two-group binomial experiment."""

    y1: int
    n1: int
    y2: int
    n2: int

    def __post_init__(self):
        # normalize numpy integer scalars so downstream arithmetic stays
        # in plain Python ints
        for name in ("y1", "n1", "y2", "n2"):
            v = getattr(self, name)
            if not isinstance(v, int) and _is_integer_scalar(v):
                object.__setattr__(self, name, int(v))
        validate_data(self)

    @property
    def pooled(self) -> tuple[int, int]:
        """(y1+y2, n1+n2), the counts under a shared-rate model."""
        return self.y1 + self.y2, self.n1 + self.n2

    def swapped(self) -> "TwoByTwoData":
        return TwoByTwoData(self.y2, self.n2, self.y1, self.n1)


def validate_data(d: TwoByTwoData) -> TwoByTwoData:
    """Check count invariants, returning ``d`` unchanged if they hold.

    Raises ``ValidationError`` naming the offending field otherwise.
    """
    for name in ("y1", "n1", "y2", "n2"):
        v = getattr(d, name)
        if not isinstance(v, (int,)) or isinstance(v, bool):
            raise ValidationError(f"{name} must be an integer, got {v!r}")
    if d.n1 < 1:
        raise ValidationError(f"n1 must be >= 1, got n1={d.n1}")
    if d.n2 < 1:
        raise ValidationError(f"n2 must be >= 1, got n2={d.n2}")
    if not 0 <= d.y1 <= d.n1:
        raise ValidationError(f"need 0 <= y1 <= n1, got y1={d.y1}, n1={d.n1}")
    if not 0 <= d.y2 <= d.n2:
        raise ValidationError(f"need 0 <= y2 <= n2, got y2={d.y2}, n2={d.n2}")
    return d


@dataclass(frozen=True)
class ProportionPair:
    """Event rates (theta1, theta2), both in [0, 1]."""

    theta1: float
    theta2: float

    def __post_init__(self):
        for name in ("theta1", "theta2"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValidationError(f"{name} must lie in [0, 1], got {v!r}")


@dataclass(frozen=True)
class LogitCoords:
    """Log-odds coordinates: grand mean ``beta`` and log odds ratio ``psi``.

    logit(theta1) = beta - psi/2 and logit(theta2) = beta + psi/2, so psi
    is the group-2-minus-group-1 difference in log odds.
    """

    beta: float
    psi: float

    def __post_init__(self):
        if not (math.isfinite(self.beta) and math.isfinite(self.psi)):
            raise ValidationError("beta and psi must be finite")


@dataclass(frozen=True)
class DiffCoords:
    """Rate difference ``eta`` = theta2 - theta1 and grand mean ``zeta``."""

    eta: float
    zeta: float

    def __post_init__(self):
        if not abs(self.eta) <= 1.0:
            raise ValidationError(f"|eta| must be <= 1, got {self.eta!r}")
        if not 0.0 <= self.zeta <= 1.0:
            raise ValidationError(f"zeta must lie in [0, 1], got {self.zeta!r}")


def logit_to_proportions(c: LogitCoords) -> ProportionPair:
    """Map (beta, psi) to (theta1, theta2). Total on finite inputs."""
    return ProportionPair(
        _sigmoid(c.beta - 0.5 * c.psi),
        _sigmoid(c.beta + 0.5 * c.psi),
    )


def proportions_to_logit(p: ProportionPair) -> LogitCoords:
    """Inverse of :func:`logit_to_proportions`; rates must be interior."""
    for name, t in (("theta1", p.theta1), ("theta2", p.theta2)):
        if not 0.0 < t < 1.0:
            raise DomainError(f"{name}={t!r} has infinite log odds")
    l1 = math.log(p.theta1) - math.log1p(-p.theta1)
    l2 = math.log(p.theta2) - math.log1p(-p.theta2)
    return LogitCoords(beta=0.5 * (l1 + l2), psi=l2 - l1)


def proportions_to_diff(p: ProportionPair) -> DiffCoords:
    return DiffCoords(eta=p.theta2 - p.theta1, zeta=0.5 * (p.theta1 + p.theta2))


def diff_to_proportions(c: DiffCoords) -> ProportionPair:
    """Inverse of :func:`proportions_to_diff` where it lands inside the square."""
    return ProportionPair(c.zeta - 0.5 * c.eta, c.zeta + 0.5 * c.eta)


# --------------------------------------------------------------------------
# Prior configurations
# --------------------------------------------------------------------------

#: Prior scales above this value induce anti-correlated rates and are
#: accepted only with a warning.
PSI_SCALE_WARN_THRESHOLD = 2.0


@dataclass(frozen=True)
class IBPrior:
    """Independent Beta(a, a) priors assigned directly to each rate.

    ``a < 1`` is rejected: it puts an undefined prior density at rate 0
    or 1, which breaks model selection when a rate is truly extreme.
    """

    a: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a >= 1.0):
            raise ValidationError(f"IB prior requires a >= 1, got a={self.a!r}")


class BetaPriorKind(enum.Enum):
    GAUSSIAN = "gaussian"
    LOGISTIC = "logistic"


@dataclass(frozen=True)
class LTPrior:
    """Gaussian priors on the log-odds coordinates (beta, psi).

    ``beta_prior`` selects the nuisance prior on beta: the default
    zero-mean Gaussian with scale ``sigma_beta``, or a logistic
    distribution with that scale (with scale 1 the induced prior on a
    single rate is then uniform, matching the IB setup with a = 1 under
    the null).
    """

    sigma_beta: float = 1.0
    sigma_psi: float = 1.0
    beta_prior: BetaPriorKind = BetaPriorKind.GAUSSIAN

    def __post_init__(self):
        if not (math.isfinite(self.sigma_beta) and self.sigma_beta > 0):
            raise ValidationError(f"sigma_beta must be > 0, got {self.sigma_beta!r}")
        if not (math.isfinite(self.sigma_psi) and self.sigma_psi > 0):
            raise ValidationError(f"sigma_psi must be > 0, got {self.sigma_psi!r}")
        if not isinstance(self.beta_prior, BetaPriorKind):
            object.__setattr__(self, "beta_prior", BetaPriorKind(self.beta_prior))
        if self.sigma_psi > PSI_SCALE_WARN_THRESHOLD:
            warnings.warn(
                f"sigma_psi={self.sigma_psi} > {PSI_SCALE_WARN_THRESHOLD} makes the "
                "two rates a priori anti-correlated",
                WidePriorWarning,
                stacklevel=3,
            )


@dataclass(frozen=True)
class DepIBPrior:
    """Truncated-Gaussian priors on (eta, zeta) with clamped rate mapping.

    ``eta`` ~ N(0, sigma_eta) truncated to (-1, 1); ``zeta`` ~
    N(zeta_center, sigma_zeta) truncated to (0, 1).  The rates are
    theta1 = clamp(zeta - eta/2), theta2 = clamp(zeta + eta/2), which can
    place prior point mass exactly at 0 and 1.

    ``zeta_center`` defaults to 1/2 (zeta prior centered in the unit
    interval); 0.0 selects the alternative reading where the zeta kernel
    is centered at zero before truncation.
    """

    sigma_eta: float = 0.2
    sigma_zeta: float = 0.5
    zeta_center: float = 0.5

    def __post_init__(self):
        if not (math.isfinite(self.sigma_eta) and self.sigma_eta > 0):
            raise ValidationError(f"sigma_eta must be > 0, got {self.sigma_eta!r}")
        if not (math.isfinite(self.sigma_zeta) and self.sigma_zeta > 0):
            raise ValidationError(f"sigma_zeta must be > 0, got {self.sigma_zeta!r}")
        if not 0.0 <= self.zeta_center <= 1.0:
            raise ValidationError(f"zeta_center must lie in [0, 1], got {self.zeta_center!r}")


PriorConfig = IBPrior | LTPrior | DepIBPrior


# --------------------------------------------------------------------------
# Evidence
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EvidenceResult:
    """Log marginal likelihoods under H0/H1 and the implied log Bayes factor.

    ``log_bf01`` is constrained to equal ``log_ml_h0 - log_ml_h1``
    exactly; construct via :meth:`from_log_marginals` to get that for
    free.  ``abs_error_estimate`` bounds the numerical error of the log
    Bayes factor and is exactly 0 for analytic results.
    """

    log_ml_h0: float
    log_ml_h1: float
    log_bf01: float
    abs_error_estimate: float
    method_tag: Method

    def __post_init__(self):
        if not isinstance(self.method_tag, Method):
            object.__setattr__(self, "method_tag", Method(self.method_tag))
        if self.log_bf01 != self.log_ml_h0 - self.log_ml_h1:
            raise ValidationError("log_bf01 must equal log_ml_h0 - log_ml_h1 exactly")
        if not self.abs_error_estimate >= 0.0:
            raise ValidationError("abs_error_estimate must be >= 0")
        if self.method_tag is Method.ANALYTIC and self.abs_error_estimate != 0.0:
            raise ValidationError("analytic results must carry a zero error estimate")

    @classmethod
    def from_log_marginals(
        cls,
        log_ml_h0: float,
        log_ml_h1: float,
        abs_error_estimate: float,
        method_tag: Method,
    ) -> "EvidenceResult":
        return cls(
            log_ml_h0=log_ml_h0,
            log_ml_h1=log_ml_h1,
            log_bf01=log_ml_h0 - log_ml_h1,
            abs_error_estimate=abs_error_estimate,
            method_tag=method_tag,
        )

    @property
    def bf01(self) -> float:
        return math.exp(self.log_bf01)

    @property
    def bf10(self) -> float:
        return math.exp(-self.log_bf01)

    @property
    def log_bf10(self) -> float:
        return -self.log_bf01


def evidence_label(bf01: float) -> str:
    """Verbal category for a Bayes factor, directed at the favored hypothesis.

    Conventional reading: 1-3 weak, 3-10 moderate, above 10 strong.  The
    label is interpretive shorthand; the Bayes factor itself is the
    continuous quantity of interest.
    """
    if not bf01 > 0.0 or math.isnan(bf01):
        raise DomainError(f"Bayes factor must be positive, got {bf01!r}")
    favored = "H0" if bf01 >= 1.0 else "H1"
    b = bf01 if bf01 >= 1.0 else 1.0 / bf01
    if b <= 3.0:
        strength = "weak"
    elif b <= 10.0:
        strength = "moderate"
    else:
        strength = "strong"
    return f"{strength} evidence for {favored}"
