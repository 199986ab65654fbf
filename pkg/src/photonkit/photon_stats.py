"""Photon-number statistics driven by probability generating functions.

The central object is :class:`PhotonModel`, a small immutable value
describing a photon-number distribution through its probability
generating function (PGF) G(z) = sum_k P(k) z^k.  Four kinds are
supported:

``compound_poisson``
    Gamma-mixed Poisson light with mean ``mu`` and clusterization
    parameter ``a > 0``; G(z) = (1 + mu (1 - z) / a)^(-a).  The number
    distribution is negative binomial; ``a = 1`` is thermal light and
    ``a -> inf`` approaches Poissonian light.
``poisson``
    Coherent light, G(z) = exp(-mu (1 - z)).
``binomial_fock``
    The analytic continuation of the compound-Poisson family to
    negative integer ``a = -n``: a binomial number distribution over
    ``n`` modes with success probability ``mu / n`` (sub-Poissonian,
    Fock-like light; ``mu = n`` is the n-photon Fock state).
``hierarchy``
    Nested compound-Poisson light G_r(z) = exp(-mu L_r) with
    L_0 = 1 - z and L_{j+1} = b_{j+1} ln(1 + L_j / b_{j+1}); the
    cluster parameters are a_j = mu * b_j.  With a single level this
    coincides with ``compound_poisson`` at a = mu * b_1.

All number distributions here are classical mixtures over Fock states,
so every operation reduces to PGF manipulation: probabilities are
Taylor coefficients at z = 0, factorial moments are derivatives at
z = 1, and normalized autocorrelation functions are
g^(m) = G^(m)(1) / mu^m.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import stats

from ._series import series_exp, series_log
from .errors import (
    DomainError,
    OrderRangeError,
    TruncationError,
)

#: Tail mass excluded when the Fock space is truncated.
TAIL_MASS = 1e-10

#: Hard ceiling on the truncated Fock dimension.
MAX_FOCK_CUTOFF = 4096

#: Largest supported autocorrelation order.
MAX_ORDER = 20


class ModelKind(str, Enum):
    COMPOUND_POISSON = "compound_poisson"
    POISSON = "poisson"
    BINOMIAL_FOCK = "binomial_fock"
    HIERARCHY = "hierarchy"


@dataclass(frozen=True)
class PhotonModel:
    """Immutable photon-number distribution.

    Use the classmethod constructors (:meth:`compound_poisson`,
    :meth:`poisson`, :meth:`binomial_fock`, :meth:`hierarchy`) rather
    than spelling out the fields.  ``a`` is only set for the
    compound-Poisson family (negative integer for ``binomial_fock``),
    ``levels`` holds the hierarchy scale parameters b_j.
    """

    kind: ModelKind
    mu: float
    a: float | None = None
    levels: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        object.__setattr__(self, "mu", float(self.mu))
        if not math.isfinite(self.mu) or self.mu <= 0.0:
            raise DomainError(f"mean photon number must be positive, got {self.mu}")
        if self.kind is ModelKind.COMPOUND_POISSON:
            if self.a is None:
                raise DomainError("compound_poisson requires a clusterization parameter a")
            object.__setattr__(self, "a", float(self.a))
            if not math.isfinite(self.a) or self.a <= 0.0:
                raise DomainError(f"clusterization parameter a must be positive, got {self.a}")
            if self.levels is not None:
                raise DomainError("levels is only meaningful for hierarchy models")
        elif self.kind is ModelKind.POISSON:
            if self.a is not None or self.levels is not None:
                raise DomainError("poisson models take no extra parameters")
        elif self.kind is ModelKind.BINOMIAL_FOCK:
            if self.a is None:
                raise DomainError("binomial_fock requires a = -n")
            object.__setattr__(self, "a", float(self.a))
            if self.a >= 0.0 or self.a != round(self.a):
                raise DomainError(
                    f"binomial_fock requires a negative integer a = -n, got {self.a}"
                )
            if self.levels is not None:
                raise DomainError("levels is only meaningful for hierarchy models")
            if self.mu > -self.a:
                raise DomainError(
                    f"binomial_fock requires mu <= n, got mu={self.mu}, n={-self.a:g}"
                )
        elif self.kind is ModelKind.HIERARCHY:
            if self.levels is None or len(self.levels) == 0:
                raise DomainError("hierarchy requires at least one level parameter")
            if self.a is not None:
                raise DomainError("hierarchy models use levels, not a")
            lv = tuple(float(b) for b in self.levels)
            if any(not math.isfinite(b) or b <= 0.0 for b in lv):
                raise DomainError(f"hierarchy level parameters must be positive, got {lv}")
            object.__setattr__(self, "levels", lv)

    # -- constructors ------------------------------------------------

    @classmethod
    def compound_poisson(cls, mu: float, a: float) -> "PhotonModel":
        return cls(ModelKind.COMPOUND_POISSON, mu, a=a)

    @classmethod
    def poisson(cls, mu: float) -> "PhotonModel":
        return cls(ModelKind.POISSON, mu)

    @classmethod
    def binomial_fock(cls, n: int, mu: float) -> "PhotonModel":
        if n != int(n) or n < 1:
            raise DomainError(f"binomial_fock requires a positive integer n, got {n}")
        return cls(ModelKind.BINOMIAL_FOCK, mu, a=-int(n))

    @classmethod
    def hierarchy(cls, mu: float, levels) -> "PhotonModel":
        return cls(ModelKind.HIERARCHY, mu, levels=tuple(levels))

    # -- convenience -------------------------------------------------

    @property
    def n(self) -> int:
        """Mode number n for ``binomial_fock`` models."""
        if self.kind is not ModelKind.BINOMIAL_FOCK:
            raise DomainError("n is only defined for binomial_fock models")
        return int(-self.a)

    @property
    def cluster_parameters(self) -> tuple[float, ...]:
        """Per-level a_j = mu * b_j for ``hierarchy`` models."""
        if self.kind is not ModelKind.HIERARCHY:
            raise DomainError("cluster_parameters is only defined for hierarchy models")
        return tuple(self.mu * b for b in self.levels)

    # -- serialization -----------------------------------------------

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "mu": self.mu}
        if self.a is not None:
            out["a"] = self.a
        if self.levels is not None:
            out["levels"] = list(self.levels)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "PhotonModel":
        if not isinstance(data, dict):
            raise DomainError("photon model JSON must be an object")
        allowed = {"kind", "mu", "a", "levels"}
        unknown = set(data) - allowed
        if unknown:
            raise DomainError(f"unknown photon model fields: {sorted(unknown)}")
        if "kind" not in data or "mu" not in data:
            raise DomainError("photon model JSON requires 'kind' and 'mu'")
        try:
            kind = ModelKind(data["kind"])
        except ValueError:
            raise DomainError(f"unknown model kind {data['kind']!r}") from None
        levels = data.get("levels")
        if levels is not None:
            levels = tuple(levels)
        return cls(kind, data["mu"], a=data.get("a"), levels=levels)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PhotonModel":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"malformed photon model JSON: {exc}") from None
        return cls.from_dict(data)


@dataclass(frozen=True)
class CorrelationReport:
    """Normalized autocorrelation values g^(m) for a range of orders."""

    orders: tuple[int, ...]
    g_values: tuple[float, ...]
    log_g_values: tuple[float, ...]
    sigma_log_g: tuple[float, ...]

    def __post_init__(self):
        sizes = {len(self.orders), len(self.g_values), len(self.log_g_values),
                 len(self.sigma_log_g)}
        if sizes != {len(self.orders)}:
            raise DomainError("correlation report fields must have equal length")
        if any(g <= 0.0 for g in self.g_values):
            raise DomainError("autocorrelation values must be positive")

    def to_dict(self) -> dict:
        return {
            "orders": list(self.orders),
            "g_values": list(self.g_values),
            "log_g_values": list(self.log_g_values),
            "sigma_log_g": list(self.sigma_log_g),
        }


# ---------------------------------------------------------------------------
# internal helpers


def _scipy_dist(model: PhotonModel):
    """Frozen scipy distribution for the closed-form kinds."""
    if model.kind is ModelKind.COMPOUND_POISSON:
        return stats.nbinom(model.a, model.a / (model.a + model.mu))
    if model.kind is ModelKind.POISSON:
        return stats.poisson(model.mu)
    if model.kind is ModelKind.BINOMIAL_FOCK:
        return stats.binom(model.n, model.mu / model.n)
    raise AssertionError("no scipy distribution for hierarchy models")


@lru_cache(maxsize=256)
def _hierarchy_taylor(model: PhotonModel, count: int, center: float) -> np.ndarray:
    """First ``count`` Taylor coefficients of the hierarchy PGF about ``center``.

    Built by composing the level maps on truncated power series; exact
    at the working order up to float rounding.
    """
    c = np.zeros(count)
    c[0] = 1.0 - center
    if count > 1:
        c[1] = -1.0
    for b in model.levels:
        base = c / b
        base[0] += 1.0
        c = b * series_log(base)
    coeffs = series_exp(-model.mu * c)
    coeffs.setflags(write=False)
    return coeffs


def _hierarchy_pgf_at(model: PhotonModel, z: float) -> float:
    """Hierarchy PGF at real z; +inf outside the radius of convergence."""
    length = 1.0 - z
    for b in model.levels:
        ratio = length / b
        if ratio <= -1.0:
            return math.inf
        length = b * math.log1p(ratio)
    try:
        return math.exp(-model.mu * length)
    except OverflowError:
        return math.inf


@lru_cache(maxsize=1024)
def _hierarchy_cutoff(model: PhotonModel) -> int:
    """Smallest k (bounded) with tail mass P(X > k) below TAIL_MASS.

    Partial sums of the extracted series cannot resolve 1e-10 tails:
    rounding in the O(k^2) composition recurrences saturates the
    computed mass near that level.  A Chernoff bound on the PGF itself,
    P(X > K) <= G(z) / z^(K+1) for z > 1, needs no cancellation; the
    tightest K over a small grid of z inside the radius of convergence
    is returned (a modest overestimate of the minimal cutoff).
    """
    log_tail = math.log(TAIL_MASS)
    best = None
    for t in (0.5, 0.25, 0.125, 0.0625, 0.03125):
        g = _hierarchy_pgf_at(model, 1.0 + t)
        if not math.isfinite(g):
            continue
        k = math.ceil((math.log(g) - log_tail) / math.log1p(t))
        if best is None or k < best:
            best = k
    if best is None or best > MAX_FOCK_CUTOFF:
        raise TruncationError(
            f"hierarchy Fock cutoff exceeds the ceiling {MAX_FOCK_CUTOFF}"
        )
    return max(int(best), 1)


def _rising_ratio(a: float, m: int) -> float:
    """(a)_m / a^m as an exact product of ratios (a + i) / a."""
    out = 1.0
    for i in range(m):
        out *= (a + i) / a
    return out


# ---------------------------------------------------------------------------
# operations


def fock_cutoff(model: PhotonModel) -> int:
    """Smallest k whose excluded tail mass P(X > k) is below ``TAIL_MASS``.

    Raises :class:`TruncationError` when no such k exists under the
    ceiling ``MAX_FOCK_CUTOFF``.
    """
    if model.kind is ModelKind.BINOMIAL_FOCK:
        return model.n
    if model.kind is ModelKind.HIERARCHY:
        return _hierarchy_cutoff(model)
    dist = _scipy_dist(model)
    guess = dist.isf(TAIL_MASS)
    if not math.isfinite(guess):
        raise TruncationError("tail quantile not finite for these parameters")
    k = max(int(guess), 0)
    while dist.sf(k) >= TAIL_MASS:
        k += 1
        if k > MAX_FOCK_CUTOFF:
            raise TruncationError(
                f"Fock cutoff exceeds the ceiling {MAX_FOCK_CUTOFF} "
                f"for mu={model.mu:g}"
            )
    while k > 0 and dist.sf(k - 1) < TAIL_MASS:
        k -= 1
    if k > MAX_FOCK_CUTOFF:
        raise TruncationError(
            f"Fock cutoff {k} exceeds the ceiling {MAX_FOCK_CUTOFF}"
        )
    return k


def pmf_values(model: PhotonModel, count: int | None = None) -> np.ndarray:
    """Number distribution P(0), ..., P(count - 1).

    With ``count`` omitted the truncation rule chooses the length so the
    excluded tail is below ``TAIL_MASS``.
    """
    if count is None:
        count = fock_cutoff(model) + 1
    if count < 1:
        raise DomainError("count must be positive")
    if model.kind is ModelKind.HIERARCHY:
        if count > MAX_FOCK_CUTOFF + 1:
            raise TruncationError(
                f"requested {count} coefficients, ceiling is {MAX_FOCK_CUTOFF + 1}"
            )
        coeffs = _hierarchy_taylor(model, count, 0.0)
        # Rounding can leave coefficients a hair below zero deep in the tail.
        return np.clip(coeffs, 0.0, None)
    dist = _scipy_dist(model)
    return dist.pmf(np.arange(count))


def pmf(model: PhotonModel, k: int) -> float:
    """Probability of observing exactly ``k`` photons."""
    if k != int(k) or k < 0:
        raise DomainError(f"photon number must be a nonnegative integer, got {k}")
    k = int(k)
    if model.kind is ModelKind.HIERARCHY:
        if k > MAX_FOCK_CUTOFF:
            raise TruncationError(
                f"k={k} lies beyond the Fock ceiling {MAX_FOCK_CUTOFF} for "
                "hierarchy models"
            )
        coeffs = _hierarchy_taylor(model, k + 1, 0.0)
        return float(max(coeffs[k], 0.0))
    return float(_scipy_dist(model).pmf(k))


def pgf_eval(model: PhotonModel, z: float) -> float:
    """Probability generating function G(z) on the real interval [-1, 1]."""
    z = float(z)
    if not math.isfinite(z) or abs(z) > 1.0:
        raise DomainError(f"PGF argument must satisfy |z| <= 1, got {z}")
    if model.kind is ModelKind.COMPOUND_POISSON:
        return math.exp(-model.a * math.log1p(model.mu * (1.0 - z) / model.a))
    if model.kind is ModelKind.POISSON:
        return math.exp(-model.mu * (1.0 - z))
    if model.kind is ModelKind.BINOMIAL_FOCK:
        theta = model.mu / model.n
        return (1.0 - theta * (1.0 - z)) ** model.n
    length = 1.0 - z
    for b in model.levels:
        length = b * math.log1p(length / b)
    return math.exp(-model.mu * length)


def pgf_derivative(model: PhotonModel, order: int, z: float) -> float:
    """m-th derivative G^(m)(z) for m >= 1 and |z| <= 1.

    Closed forms cover the compound-Poisson family (including its
    binomial continuation) and Poisson light; hierarchy derivatives are
    read off a Taylor expansion about ``z``.  Raises
    :class:`OrderRangeError` when the result overflows double precision.
    """
    if order != int(order) or order < 1:
        raise DomainError(f"derivative order must be a positive integer, got {order}")
    order = int(order)
    z = float(z)
    if not math.isfinite(z) or abs(z) > 1.0:
        raise DomainError(f"PGF argument must satisfy |z| <= 1, got {z}")
    if model.kind is ModelKind.COMPOUND_POISSON:
        mu, a = model.mu, model.a
        log_val = (
            math.lgamma(a + order) - math.lgamma(a)
            + order * math.log(mu / a)
            - (a + order) * math.log1p(mu * (1.0 - z) / a)
        )
        if log_val > 709.0:
            raise OrderRangeError(
                f"G^({order})({z:g}) overflows double precision"
            )
        return math.exp(log_val)
    if model.kind is ModelKind.POISSON:
        log_val = order * math.log(model.mu) - model.mu * (1.0 - z)
        if log_val > 709.0:
            raise OrderRangeError(f"G^({order})({z:g}) overflows double precision")
        return math.exp(log_val)
    if model.kind is ModelKind.BINOMIAL_FOCK:
        n = model.n
        if order > n:
            return 0.0
        theta = model.mu / n
        coef = 1.0
        for i in range(order):
            coef *= (n - i) * theta
        value = coef * (1.0 - theta * (1.0 - z)) ** (n - order)
        if math.isinf(value):
            raise OrderRangeError(f"G^({order})({z:g}) overflows double precision")
        return value
    coeffs = _hierarchy_taylor(model, order + 1, z)
    try:
        factorial = float(math.factorial(order))
    except OverflowError:
        raise OrderRangeError(f"derivative order {order} overflows") from None
    value = coeffs[order] * factorial
    if math.isinf(value):
        raise OrderRangeError(f"G^({order})({z:g}) overflows double precision")
    return float(value)


def autocorrelation(model: PhotonModel, m: int) -> float:
    """Normalized m-th order autocorrelation g^(m) = G^(m)(1) / mu^m.

    For the compound-Poisson family this is the ratio form of the rising
    factorial, (a)_m / a^m, evaluated as an exact product of the ratios
    (a + i) / a; thermal light (a = 1) therefore gives g^(2) == 2.0
    without rounding.  Orders above ``MAX_ORDER`` raise
    :class:`OrderRangeError`.
    """
    if m != int(m) or m < 2:
        raise DomainError(f"autocorrelation order must be an integer >= 2, got {m}")
    m = int(m)
    if m > MAX_ORDER:
        raise OrderRangeError(
            f"autocorrelation order {m} exceeds the supported maximum {MAX_ORDER}"
        )
    if model.kind is ModelKind.COMPOUND_POISSON:
        return _rising_ratio(model.a, m)
    if model.kind is ModelKind.POISSON:
        return 1.0
    if model.kind is ModelKind.BINOMIAL_FOCK:
        n = model.n
        if m > n:
            return 0.0
        out = 1.0
        for i in range(m):
            out *= (n - i) / n
        return out
    return pgf_derivative(model, m, 1.0) / model.mu**m


def apply_loss(model: PhotonModel, t: float) -> PhotonModel:
    """Attenuate by transmission ``t`` in (0, 1]: G(z) -> G(1 - t(1 - z)).

    Every kind closes under loss with mu -> mu * t and all cluster
    parameters unchanged (hierarchy scale parameters rescale as b / t so
    that a_j = mu * b_j stays fixed); in particular every g^(m) is
    loss-invariant.
    """
    t = float(t)
    if not (0.0 < t <= 1.0):
        raise DomainError(f"transmission must lie in (0, 1], got {t}")
    if model.kind is ModelKind.HIERARCHY:
        return PhotonModel.hierarchy(model.mu * t, tuple(b / t for b in model.levels))
    return PhotonModel(model.kind, model.mu * t, a=model.a)


def moments(model: PhotonModel) -> tuple[float, float]:
    """Mean and variance of the photon number."""
    mu = model.mu
    if model.kind is ModelKind.COMPOUND_POISSON:
        return mu, mu * (1.0 + mu / model.a)
    if model.kind is ModelKind.POISSON:
        return mu, mu
    if model.kind is ModelKind.BINOMIAL_FOCK:
        return mu, mu * (1.0 - mu / model.n)
    # var = G''(1) + mu - mu^2 with G''(1) = mu^2 + mu * sum(1 / b_j)
    return mu, mu * (1.0 + sum(1.0 / b for b in model.levels))
