"""Service-time distribution catalog for the infinite-server queue model.

Every member exposes the same analytic surface: CDF, mean, raw moments,
integrated tail I(t) = int_0^t [1 - G(v)] dv, the residual tail
alpha - I(t) = int_t^inf [1 - G(v)] dv in a cancellation-free form, and an
inverse-transform quantile used for sampling.  Values are immutable after
construction and safe for concurrent reads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate as _integrate
from scipy import optimize as _optimize
from scipy import special as _special

from .errors import ArrivalRateMismatchError, DomainError, UnsupportedMomentError

__all__ = [
    "ServiceDistribution",
    "QueueParameters",
    "exponential",
    "deterministic",
    "special_a",
    "special_b",
    "power_function",
    "uniform01",
    "scale",
    "from_spec",
    "make_distribution",
    "integrated_tail",
    "residual_tail",
    "sample",
    "scv",
]

# Tags a distribution may carry; bounds are keyed on these.
NBUE = "NBUE"
NWUE = "NWUE"
DFR = "DFR"
IMRL = "IMRL"
KNOWN_TAGS = frozenset({NBUE, NWUE, DFR, IMRL})


@dataclass(frozen=True)
class ServiceDistribution:
    """A service-time law together with the analytic pieces the queue
    computations need.

    ``integrated_tail_fn`` and ``residual_tail_fn`` accept scalars or numpy
    arrays and satisfy I(t) + residual(t) = mean for all t >= 0.
    ``quantile_fn`` is the generalized inverse of the CDF, also vectorized.
    Atoms (point masses) are listed explicitly so quadrature and sampling
    can treat them exactly.
    """

    name: str
    mean: float
    moment2: Optional[float]
    moment3: Optional[float]
    cdf: Callable
    integrated_tail_fn: Callable
    residual_tail_fn: Callable
    quantile_fn: Callable
    class_tags: frozenset = frozenset()
    atoms: tuple = ()
    support_end: float = math.inf
    embedded_arrival_rate: Optional[float] = None
    spec: dict = field(default_factory=dict)

    @property
    def scv(self) -> float:
        """Squared coefficient of variation (mu2 - mean^2) / mean^2."""
        if self.moment2 is None:
            raise UnsupportedMomentError(
                f"{self.name}: second moment unavailable, cannot form SCV"
            )
        if self.mean == 0.0:
            raise UnsupportedMomentError("SCV undefined for a zero-mean service")
        return (self.moment2 - self.mean**2) / self.mean**2

    def sample(self, rng: np.random.Generator) -> float:
        """Draw one service duration by inverse transform."""
        return float(self.quantile_fn(rng.random()))

    def __repr__(self) -> str:  # keep reprs short and informative
        return f"ServiceDistribution({self.name})"


@dataclass(frozen=True)
class QueueParameters:
    """Arrival rate plus service law; the traffic intensity is always derived."""

    arrival_rate: float
    service: ServiceDistribution

    def __post_init__(self):
        if not (self.arrival_rate > 0.0) or not math.isfinite(self.arrival_rate):
            raise DomainError(f"arrival_rate must be positive, got {self.arrival_rate}")
        lam = self.service.embedded_arrival_rate
        if lam is not None and lam != self.arrival_rate:
            raise ArrivalRateMismatchError(
                f"service law was built for arrival rate {lam}, "
                f"queue uses {self.arrival_rate}"
            )

    @property
    def traffic_intensity(self) -> float:
        return self.arrival_rate * self.service.mean


# ---------------------------------------------------------------------------
# catalog constructors
# ---------------------------------------------------------------------------

def exponential(mean: float) -> ServiceDistribution:
    """Exponential service with the given mean."""
    if not (mean > 0.0):
        raise DomainError(f"exponential mean must be positive, got {mean}")
    a = float(mean)

    def cdf(t):
        t = np.asarray(t, dtype=float)
        return np.where(t < 0.0, 0.0, -np.expm1(-np.maximum(t, 0.0) / a))

    def itail(t):
        return a * (-np.expm1(-np.asarray(t, dtype=float) / a))

    def rtail(t):
        return a * np.exp(-np.asarray(t, dtype=float) / a)

    def quantile(u):
        return -a * np.log1p(-np.asarray(u, dtype=float))

    return ServiceDistribution(
        name=f"exponential(mean={a:g})",
        mean=a,
        moment2=2.0 * a * a,
        moment3=6.0 * a**3,
        cdf=cdf,
        integrated_tail_fn=itail,
        residual_tail_fn=rtail,
        quantile_fn=quantile,
        class_tags=frozenset({NBUE, NWUE, DFR, IMRL}),
        spec={"type": "exponential", "mean": a},
    )


def deterministic(mean: float) -> ServiceDistribution:
    """Unit mass at ``mean``.  mean == 0 gives the idle-only limit in which
    every service takes no time (rho = 0)."""
    if mean < 0.0:
        raise DomainError(f"deterministic mean must be >= 0, got {mean}")
    a = float(mean)

    def cdf(t):
        t = np.asarray(t, dtype=float)
        return np.where(t < a, 0.0, 1.0)

    def itail(t):
        return np.clip(np.asarray(t, dtype=float), 0.0, a)

    def rtail(t):
        return np.maximum(a - np.asarray(t, dtype=float), 0.0)

    def quantile(u):
        u = np.asarray(u, dtype=float)
        return np.full(u.shape, a) if u.shape else a

    return ServiceDistribution(
        name=f"deterministic(mean={a:g})",
        mean=a,
        moment2=a * a,
        moment3=None,
        cdf=cdf,
        integrated_tail_fn=itail,
        residual_tail_fn=rtail,
        quantile_fn=quantile,
        class_tags=frozenset({NBUE}) if a > 0.0 else frozenset(),
        atoms=((a, 1.0),),
        support_end=a,
        spec={"type": "deterministic", "mean": a},
    )


def special_a(arrival_rate: float, rho: float) -> ServiceDistribution:
    """First logistic-form member: G(t) = e^-rho / (e^-rho + (1-e^-rho)e^(-lam t)).

    Carries an atom of mass e^-rho at zero and has mean rho/lam.  Its busy
    cycle is exponentially distributed, which makes the cycle age/excess
    mean equal to the mean cycle length.
    """
    lam = float(arrival_rate)
    rho = float(rho)
    if not (lam > 0.0):
        raise DomainError(f"arrival_rate must be positive, got {lam}")
    if not (rho > 0.0):
        raise DomainError(f"rho must be positive, got {rho}")
    em = math.exp(-rho)          # atom mass at zero
    grow = math.expm1(rho)       # e^rho - 1

    def cdf(t):
        t = np.asarray(t, dtype=float)
        tt = np.maximum(t, 0.0)
        val = em / (em + (1.0 - em) * np.exp(-lam * tt))
        return np.where(t < 0.0, 0.0, val)

    def itail(t):
        t = np.asarray(t, dtype=float)
        return -np.log1p((1.0 - em) * np.expm1(-lam * t)) / lam

    def rtail(t):
        t = np.asarray(t, dtype=float)
        return np.log1p(grow * np.exp(-lam * t)) / lam

    def quantile(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.log((1.0 - em) * u / (em * (1.0 - u))) / lam
        return np.where(u <= em, 0.0, t)

    mu2 = -2.0 * _special.spence(math.exp(rho)) / lam**2

    return ServiceDistribution(
        name=f"special_a(lam={lam:g}, rho={rho:g})",
        mean=rho / lam,
        moment2=mu2,
        moment3=None,
        cdf=cdf,
        integrated_tail_fn=itail,
        residual_tail_fn=rtail,
        quantile_fn=quantile,
        atoms=((0.0, em),),
        embedded_arrival_rate=lam,
        spec={"type": "special_a", "rho": rho},
    )


def special_b(arrival_rate: float, rho: float) -> ServiceDistribution:
    """Second logistic-form member:
    G(t) = 1 - 1 / (1 + e^-rho (e^(k t) - 1)) with k = lam / (1 - e^-rho).

    Continuous, mean rho/lam; its busy period is exponentially distributed
    with mean (e^rho - 1)/lam, which pins the cycle age/excess mean at
    (e^rho + e^-rho - 1)/lam.
    """
    lam = float(arrival_rate)
    rho = float(rho)
    if not (lam > 0.0):
        raise DomainError(f"arrival_rate must be positive, got {lam}")
    if not (rho > 0.0):
        raise DomainError(f"rho must be positive, got {rho}")
    em = math.exp(-rho)
    grow = math.expm1(rho)
    k = lam / (1.0 - em)

    def cdf(t):
        t = np.asarray(t, dtype=float)
        tt = np.maximum(t, 0.0)
        tail = np.exp(-k * tt) / (em + (1.0 - em) * np.exp(-k * tt))
        return np.where(t < 0.0, 0.0, 1.0 - tail)

    def itail(t):
        t = np.asarray(t, dtype=float)
        return -np.log1p((1.0 - em) * np.expm1(-k * t)) / lam

    def rtail(t):
        t = np.asarray(t, dtype=float)
        return np.log1p(grow * np.exp(-k * t)) / lam

    def quantile(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            t = np.log1p(math.exp(rho) * u / (1.0 - u)) / k
        return np.where(u <= 0.0, 0.0, t)

    mu2 = -2.0 * (1.0 - em) * _special.spence(math.exp(rho)) / lam**2

    return ServiceDistribution(
        name=f"special_b(lam={lam:g}, rho={rho:g})",
        mean=rho / lam,
        moment2=mu2,
        moment3=None,
        cdf=cdf,
        integrated_tail_fn=itail,
        residual_tail_fn=rtail,
        quantile_fn=quantile,
        embedded_arrival_rate=lam,
        spec={"type": "special_b", "rho": rho},
    )


def power_function(c: float) -> ServiceDistribution:
    """Power-function service on [0, 1]: G(t) = t^c, mean c/(c+1)."""
    c = float(c)
    if not (c > 0.0):
        raise DomainError(f"power parameter c must be positive, got {c}")
    a = c / (c + 1.0)

    def cdf(t):
        t = np.asarray(t, dtype=float)
        return np.where(t < 0.0, 0.0, np.clip(t, 0.0, 1.0) ** c)

    def itail(t):
        t = np.asarray(t, dtype=float)
        tc = np.clip(t, 0.0, 1.0)
        return np.where(t >= 1.0, a, tc - tc ** (c + 1.0) / (c + 1.0))

    def rtail(t):
        # alpha - I(t) = u + expm1((c+1) log1p(-u))/(c+1) with u = 1 - t,
        # evaluated at min(t, 1); exact 0 at t >= 1 and cancellation-free
        # near the support edge.  At t = 0, log1p(-1) = -inf feeds expm1
        # and lands exactly on alpha.
        t = np.asarray(t, dtype=float)
        u = 1.0 - np.clip(t, 0.0, 1.0)
        with np.errstate(divide="ignore"):
            return u + np.expm1((c + 1.0) * np.log1p(-u)) / (c + 1.0)

    def quantile(u):
        return np.asarray(u, dtype=float) ** (1.0 / c)

    kind = "uniform01" if c == 1.0 else "power"
    specd = {"type": "uniform01"} if c == 1.0 else {"type": "power", "c": c}
    return ServiceDistribution(
        name=f"{kind}(c={c:g})" if c != 1.0 else "uniform01",
        mean=a,
        moment2=c / (c + 2.0),
        moment3=None,
        cdf=cdf,
        integrated_tail_fn=itail,
        residual_tail_fn=rtail,
        quantile_fn=quantile,
        support_end=1.0,
        spec=specd,
    )


def uniform01() -> ServiceDistribution:
    """Uniform service on [0, 1] (power function with c = 1)."""
    return power_function(1.0)


def scale(dist: ServiceDistribution, factor: float) -> ServiceDistribution:
    """Service times multiplied by ``factor`` (> 0).

    Class tags survive scaling.  The two logistic-form members rescale onto
    themselves with the arrival rate divided by ``factor``.
    """
    if not (factor > 0.0):
        raise DomainError(f"scale factor must be positive, got {factor}")
    k = float(factor)
    if dist.spec.get("type") == "exponential":
        return exponential(dist.mean * k)
    if dist.spec.get("type") == "deterministic":
        return deterministic(dist.mean * k)
    if dist.spec.get("type") == "special_a":
        return special_a(dist.embedded_arrival_rate / k, dist.spec["rho"])
    if dist.spec.get("type") == "special_b":
        return special_b(dist.embedded_arrival_rate / k, dist.spec["rho"])

    base = dist

    def cdf(t):
        return base.cdf(np.asarray(t, dtype=float) / k)

    def itail(t):
        return k * base.integrated_tail_fn(np.asarray(t, dtype=float) / k)

    def rtail(t):
        return k * base.residual_tail_fn(np.asarray(t, dtype=float) / k)

    def quantile(u):
        return k * base.quantile_fn(u)

    return ServiceDistribution(
        name=f"scaled({base.name}, k={k:g})",
        mean=k * base.mean,
        moment2=None if base.moment2 is None else k * k * base.moment2,
        moment3=None if base.moment3 is None else k**3 * base.moment3,
        cdf=cdf,
        integrated_tail_fn=itail,
        residual_tail_fn=rtail,
        quantile_fn=quantile,
        class_tags=base.class_tags,
        atoms=tuple((k * loc, mass) for loc, mass in base.atoms),
        support_end=k * base.support_end,
        embedded_arrival_rate=None,
        spec={"type": "scaled", "base": dict(base.spec), "factor": k},
    )


def make_distribution(
    cdf: Callable,
    mean: float,
    moment2: Optional[float] = None,
    moment3: Optional[float] = None,
    name: str = "user",
    support_end: float = math.inf,
    class_tags=frozenset(),
) -> ServiceDistribution:
    """Wrap a user-supplied CDF in the common contract.

    The integrated tail falls back to numeric integration and the quantile
    to bisection, so this is slower than catalog members.  No reliability
    class is assumed; pass ``class_tags`` only for properties you can
    actually establish.
    """
    if not (mean > 0.0):
        raise DomainError(f"mean must be positive, got {mean}")
    tags = frozenset(class_tags)
    if not tags <= KNOWN_TAGS:
        raise DomainError(f"unknown class tags: {sorted(tags - KNOWN_TAGS)}")

    def _itail_scalar(t):
        if t <= 0.0:
            return 0.0
        hi = min(t, support_end)
        val, _ = _integrate.quad(
            lambda v: 1.0 - float(cdf(v)), 0.0, hi, limit=200
        )
        return val

    itail_vec = np.vectorize(_itail_scalar, otypes=[float])

    def itail(t):
        return itail_vec(np.asarray(t, dtype=float))

    def rtail(t):
        return np.maximum(mean - itail(t), 0.0)

    def _quantile_scalar(u):
        if u <= 0.0:
            return 0.0
        hi = 2.0 * mean if math.isinf(support_end) else support_end
        while float(cdf(hi)) < u and hi < 1e308:
            hi *= 2.0
        return _optimize.brentq(lambda t: float(cdf(t)) - u, 0.0, hi, xtol=1e-14)

    qvec = np.vectorize(_quantile_scalar, otypes=[float])

    return ServiceDistribution(
        name=name,
        mean=float(mean),
        moment2=moment2,
        moment3=moment3,
        cdf=lambda t: np.asarray(cdf(np.asarray(t, dtype=float)), dtype=float),
        integrated_tail_fn=itail,
        residual_tail_fn=rtail,
        quantile_fn=lambda u: qvec(np.asarray(u, dtype=float)),
        class_tags=tags,
        support_end=support_end,
        spec={"type": "user", "name": name},
    )


# ---------------------------------------------------------------------------
# textual distribution format (shared with the CLI / config files)
# ---------------------------------------------------------------------------

def from_spec(spec: dict, arrival_rate: Optional[float] = None) -> ServiceDistribution:
    """Build a catalog member from its key-value form.

    Supported forms: {"type":"exponential","mean":m}, {"type":"deterministic",
    "mean":m}, {"type":"special_a","rho":r}, {"type":"special_b","rho":r},
    {"type":"power","c":c}, {"type":"uniform01"}.  The two special forms
    inherit the queue-level arrival rate.
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise DomainError(f"distribution spec must be a dict with a 'type': {spec!r}")
    kind = spec["type"]
    if kind == "exponential":
        return exponential(_req(spec, "mean"))
    if kind == "deterministic":
        return deterministic(_req(spec, "mean"))
    if kind == "special_a":
        if arrival_rate is None:
            raise DomainError("special_a needs the queue arrival rate")
        return special_a(arrival_rate, _req(spec, "rho"))
    if kind == "special_b":
        if arrival_rate is None:
            raise DomainError("special_b needs the queue arrival rate")
        return special_b(arrival_rate, _req(spec, "rho"))
    if kind == "power":
        return power_function(_req(spec, "c"))
    if kind == "uniform01":
        return uniform01()
    raise DomainError(f"unknown distribution type {kind!r}")


def _req(spec: dict, key: str) -> float:
    if key not in spec:
        raise DomainError(f"distribution spec {spec!r} is missing {key!r}")
    return float(spec[key])


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------

def integrated_tail(dist: ServiceDistribution, t):
    """I(t) = int_0^t [1 - G(v)] dv for t >= 0."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError(f"integrated tail needs t >= 0, got {t}")
    out = dist.integrated_tail_fn(arr)
    return float(out) if arr.shape == () else out


def residual_tail(dist: ServiceDistribution, t):
    """mean - I(t) = int_t^inf [1 - G(v)] dv, computed without cancellation."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError(f"residual tail needs t >= 0, got {t}")
    out = dist.residual_tail_fn(arr)
    return float(out) if arr.shape == () else out


def sample(dist: ServiceDistribution, rng: np.random.Generator) -> float:
    """One service duration with law G, by inverse transform."""
    return dist.sample(rng)


def scv(dist: ServiceDistribution) -> float:
    """Squared coefficient of variation of the service time."""
    return dist.scv
