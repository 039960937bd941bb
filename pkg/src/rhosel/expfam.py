"""One-parameter exponential families and their parametrizations.

A family is described in natural coordinates by its log-partition ``A``,
sufficient statistic ``T`` and base density ``a``::

    p_theta(y) = exp(theta * T(y) - A(theta)) * a(y)

Users work with a parameter ``gamma`` living in an interval ``I``; a
:class:`Parametrization` maps it into the natural domain through a
continuous strictly monotone ``u``. The density *without* the base term,

    r_gamma(y) = exp(u(gamma) T(y) - A(u(gamma))),

is what the selection statistics compare; ``log a(y)`` cancels in every
likelihood ratio and is exposed separately by :meth:`ExponentialFamily.log_base`.

Built-in families: Gaussian with known variance, Poisson, Bernoulli and
exponential (multiplicative regression). Custom families plug in through
:class:`CustomFamily`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, interpolate, optimize, special


class DomainError(ValueError):
    """An argument falls outside the support or parameter domain."""


class NumericalError(ArithmeticError):
    """A quadrature or root-finding step failed."""


class ExponentialFamily:
    """Base class for one-parameter exponential families in natural form.

    Subclasses define ``name``, ``natural_domain`` (open interval, possibly
    infinite ends) and implement the log-partition with its first three
    derivatives, the sufficient statistic, the log base density, a support
    test and a sampler.
    """

    name: str = "family"
    natural_domain: tuple[float, float] = (-np.inf, np.inf)
    support: str = "real"

    # -- log-partition and derivatives (vectorised) --
    def log_partition(self, theta):
        raise NotImplementedError

    def dlog_partition(self, theta):
        raise NotImplementedError

    def d2log_partition(self, theta):
        raise NotImplementedError

    def d3log_partition(self, theta):
        h = 1e-5
        return (self.d2log_partition(theta + h) - self.d2log_partition(theta - h)) / (2 * h)

    def suff_stat(self, y):
        raise NotImplementedError

    def log_base(self, y):
        raise NotImplementedError

    def in_support(self, y) -> np.ndarray:
        raise NotImplementedError

    def sample_natural(self, theta, rng: np.random.Generator):
        raise NotImplementedError

    # -- mean map, used by the "mean" parametrization --
    def mean_to_natural(self, mean):
        raise NotImplementedError

    def natural_to_mean(self, theta):
        return self.dlog_partition(theta)

    mean_domain: tuple[float, float] = (-np.inf, np.inf)

    def contains_natural(self, theta) -> np.ndarray:
        lo, hi = self.natural_domain
        theta = np.asarray(theta, dtype=float)
        return (theta > lo) & (theta < hi)

    def check_support(self, y):
        y = np.asarray(y, dtype=float)
        if not np.all(self.in_support(y)):
            raise DomainError(f"observation outside the support of {self.name}")
        return y

    def hellinger_sq(self, theta1, theta2):
        """Squared Hellinger distance between two members, in natural coordinates.

        Uses the affinity identity
        ``1 - h^2 = exp(A((t1+t2)/2) - (A(t1)+A(t2))/2)``.
        """
        theta1 = np.asarray(theta1, dtype=float)
        theta2 = np.asarray(theta2, dtype=float)
        mid = 0.5 * (theta1 + theta2)
        if not (np.all(self.contains_natural(theta1)) and np.all(self.contains_natural(theta2))):
            raise DomainError("natural parameter outside the natural domain")
        if not np.all(self.contains_natural(mid)):
            raise DomainError("midpoint outside the natural domain")
        gap = self.log_partition(mid) - 0.5 * (self.log_partition(theta1) + self.log_partition(theta2))
        # gap <= 0 by convexity; clip rounding noise so identical inputs give exactly 0
        gap = np.minimum(gap, 0.0)
        out = -np.expm1(gap)
        return np.where(theta1 == theta2, 0.0, out)

    def __repr__(self):
        return f"{type(self).__name__}()"


class Gaussian(ExponentialFamily):
    """Gaussian with known standard deviation ``sigma``.

    Natural parameter is the mean ``theta = mu`` with ``T(y) = y / sigma^2``
    and ``A(theta) = theta^2 / (2 sigma^2)``.
    """

    support = "real"
    natural_domain = (-np.inf, np.inf)
    mean_domain = (-np.inf, np.inf)

    def __init__(self, sigma: float = 1.0):
        if not sigma > 0:
            raise ValueError("sigma must be positive")
        self.sigma = float(sigma)
        self.name = f"gaussian(sigma={self.sigma:g})"

    def log_partition(self, theta):
        return np.asarray(theta, dtype=float) ** 2 / (2 * self.sigma**2)

    def dlog_partition(self, theta):
        return np.asarray(theta, dtype=float) / self.sigma**2

    def d2log_partition(self, theta):
        return np.full(np.shape(theta), 1.0 / self.sigma**2)

    def d3log_partition(self, theta):
        return np.zeros(np.shape(theta))

    def suff_stat(self, y):
        return np.asarray(y, dtype=float) / self.sigma**2

    def log_base(self, y):
        y = np.asarray(y, dtype=float)
        return -(y**2) / (2 * self.sigma**2) - 0.5 * math.log(2 * math.pi * self.sigma**2)

    def in_support(self, y):
        return np.isfinite(np.asarray(y, dtype=float))

    def sample_natural(self, theta, rng):
        theta = np.asarray(theta, dtype=float)
        return rng.normal(theta, self.sigma, size=theta.shape)

    def mean_to_natural(self, mean):
        return np.asarray(mean, dtype=float)

    def natural_to_mean(self, theta):
        return np.asarray(theta, dtype=float)

    def __repr__(self):
        return f"Gaussian(sigma={self.sigma:g})"


class Poisson(ExponentialFamily):
    """Poisson with ``theta = log(lambda)``, ``T(y) = y`` and ``a(y) = 1/y!``."""

    name = "poisson"
    support = "integers"
    natural_domain = (-np.inf, np.inf)
    mean_domain = (0.0, np.inf)

    def log_partition(self, theta):
        return np.exp(np.asarray(theta, dtype=float))

    dlog_partition = log_partition
    d2log_partition = log_partition
    d3log_partition = log_partition

    def suff_stat(self, y):
        return np.asarray(y, dtype=float)

    def log_base(self, y):
        return -special.gammaln(np.asarray(y, dtype=float) + 1.0)

    def in_support(self, y):
        y = np.asarray(y, dtype=float)
        return (y >= 0) & (y == np.floor(y)) & np.isfinite(y)

    def sample_natural(self, theta, rng):
        return rng.poisson(np.exp(np.asarray(theta, dtype=float))).astype(float)

    def mean_to_natural(self, mean):
        return np.log(np.asarray(mean, dtype=float))


class Bernoulli(ExponentialFamily):
    """Bernoulli with ``theta = logit(p)`` and ``A(theta) = log(1 + e^theta)``."""

    name = "bernoulli"
    support = "binary"
    natural_domain = (-np.inf, np.inf)
    mean_domain = (0.0, 1.0)

    def log_partition(self, theta):
        return np.logaddexp(0.0, np.asarray(theta, dtype=float))

    def dlog_partition(self, theta):
        return special.expit(np.asarray(theta, dtype=float))

    def d2log_partition(self, theta):
        p = special.expit(np.asarray(theta, dtype=float))
        return p * (1 - p)

    def d3log_partition(self, theta):
        p = special.expit(np.asarray(theta, dtype=float))
        return p * (1 - p) * (1 - 2 * p)

    def suff_stat(self, y):
        return np.asarray(y, dtype=float)

    def log_base(self, y):
        return np.zeros(np.shape(y))

    def in_support(self, y):
        y = np.asarray(y, dtype=float)
        return (y == 0) | (y == 1)

    def sample_natural(self, theta, rng):
        p = special.expit(np.asarray(theta, dtype=float))
        return (rng.random(p.shape) < p).astype(float)

    def mean_to_natural(self, mean):
        return special.logit(np.asarray(mean, dtype=float))


class Exponential(ExponentialFamily):
    """Exponential law with rate ``lambda = -theta`` (theta < 0), ``T(y) = y``.

    Used for multiplicative regression ``Y = m(W) * E`` with ``E ~ Exp(1)``.
    """

    name = "exponential"
    support = "positive"
    natural_domain = (-np.inf, 0.0)
    mean_domain = (0.0, np.inf)

    def log_partition(self, theta):
        return -np.log(-np.asarray(theta, dtype=float))

    def dlog_partition(self, theta):
        return -1.0 / np.asarray(theta, dtype=float)

    def d2log_partition(self, theta):
        return 1.0 / np.asarray(theta, dtype=float) ** 2

    def d3log_partition(self, theta):
        return -2.0 / np.asarray(theta, dtype=float) ** 3

    def suff_stat(self, y):
        return np.asarray(y, dtype=float)

    def log_base(self, y):
        return np.zeros(np.shape(y))

    def in_support(self, y):
        y = np.asarray(y, dtype=float)
        return (y >= 0) & np.isfinite(y)

    def sample_natural(self, theta, rng):
        theta = np.asarray(theta, dtype=float)
        return rng.exponential(-1.0 / theta, size=theta.shape)

    def mean_to_natural(self, mean):
        return -1.0 / np.asarray(mean, dtype=float)


class CustomFamily(ExponentialFamily):
    """Family assembled from user callables.

    Only ``log_partition``, ``suff_stat``, ``log_base``, ``in_support`` and a
    sampler are required; missing derivatives fall back to central
    differences.
    """

    def __init__(
        self,
        name: str,
        log_partition: Callable,
        suff_stat: Callable,
        log_base: Callable,
        in_support: Callable,
        sampler: Callable,
        natural_domain=(-np.inf, np.inf),
        support: str = "real",
        dlog_partition: Optional[Callable] = None,
        d2log_partition: Optional[Callable] = None,
        mean_to_natural: Optional[Callable] = None,
    ):
        self.name = name
        self._A = log_partition
        self._T = suff_stat
        self._log_a = log_base
        self._in_support = in_support
        self._sampler = sampler
        self.natural_domain = tuple(natural_domain)
        self.support = support
        self._dA = dlog_partition
        self._d2A = d2log_partition
        self._mean_to_natural = mean_to_natural

    def log_partition(self, theta):
        return np.asarray(self._A(np.asarray(theta, dtype=float)), dtype=float)

    def dlog_partition(self, theta):
        if self._dA is not None:
            return np.asarray(self._dA(np.asarray(theta, dtype=float)), dtype=float)
        h = 1e-6
        return (self.log_partition(theta + h) - self.log_partition(theta - h)) / (2 * h)

    def d2log_partition(self, theta):
        if self._d2A is not None:
            return np.asarray(self._d2A(np.asarray(theta, dtype=float)), dtype=float)
        h = 1e-4
        theta = np.asarray(theta, dtype=float)
        return (self.log_partition(theta + h) - 2 * self.log_partition(theta) + self.log_partition(theta - h)) / h**2

    def suff_stat(self, y):
        return np.asarray(self._T(np.asarray(y, dtype=float)), dtype=float)

    def log_base(self, y):
        return np.asarray(self._log_a(np.asarray(y, dtype=float)), dtype=float)

    def in_support(self, y):
        return np.asarray(self._in_support(np.asarray(y, dtype=float)), dtype=bool)

    def sample_natural(self, theta, rng):
        return np.asarray(self._sampler(np.asarray(theta, dtype=float), rng), dtype=float)

    def mean_to_natural(self, mean):
        if self._mean_to_natural is not None:
            return self._mean_to_natural(np.asarray(mean, dtype=float))
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        lo, hi = self.natural_domain
        lo = -50.0 if not np.isfinite(lo) else lo + 1e-9
        hi = 50.0 if not np.isfinite(hi) else hi - 1e-9
        out = [optimize.brentq(lambda t: float(self.dlog_partition(t)) - m, lo, hi) for m in mean]
        return np.asarray(out)

    def __repr__(self):
        return f"CustomFamily({self.name!r})"


# ---------------------------------------------------------------------------
# Parametrizations
# ---------------------------------------------------------------------------

PARAMETRIZATION_KINDS = ("natural", "mean", "variance_stabilized", "custom")


@dataclass(frozen=True)
class Parametrization:
    """Map ``u`` from a user interval ``I`` into the natural domain.

    Attributes
    ----------
    family : ExponentialFamily
    interval : (float, float)
        Closed interval ``I``; ends may be infinite for the natural
        parametrization.
    to_natural, from_natural : callable
        ``u`` and its inverse, vectorised.
    du : callable
        Derivative of ``u``; drives Fisher scoring in the fitting code.
    kind : str
        One of ``natural``, ``mean``, ``variance_stabilized``, ``custom``.
    kappa : float
        Lipschitz constant of ``gamma -> R_gamma`` for the Hellinger
        distance; 0 when unknown.
    """

    family: ExponentialFamily
    interval: tuple[float, float]
    to_natural: Callable = field(repr=False)
    from_natural: Callable = field(repr=False)
    du: Callable = field(repr=False)
    kind: str = "custom"
    kappa: float = 0.0
    anchor: Optional[float] = None

    def __post_init__(self):
        lo, hi = self.interval
        if not lo < hi:
            raise ValueError("parametrization interval must be nontrivial")
        if self.kind not in PARAMETRIZATION_KINDS:
            raise ValueError(f"unknown parametrization kind {self.kind!r}")
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")

    def contains(self, gamma) -> np.ndarray:
        lo, hi = self.interval
        gamma = np.asarray(gamma, dtype=float)
        return (gamma >= lo) & (gamma <= hi) & ~np.isnan(gamma)

    def check(self, gamma):
        gamma = np.asarray(gamma, dtype=float)
        if not np.all(self.contains(gamma)):
            raise DomainError(f"parameter outside I={self.interval}")
        return gamma

    def natural(self, gamma):
        """``u(gamma)`` after checking ``gamma`` lies in ``I``."""
        return self.to_natural(self.check(gamma))

    def hellinger_sq(self, gamma1, gamma2):
        return self.family.hellinger_sq(self.natural(gamma1), self.natural(gamma2))

    def hellinger(self, gamma1, gamma2):
        return np.sqrt(self.hellinger_sq(gamma1, gamma2))

    def log_r(self, gamma, y):
        """Vectorised ``log r_gamma(y) = u(gamma) T(y) - A(u(gamma))``."""
        theta = self.natural(gamma)
        return theta * self.family.suff_stat(y) - self.family.log_partition(theta)

    def sample(self, gamma, rng: np.random.Generator):
        return self.family.sample_natural(self.natural(gamma), rng)


def natural_parametrization(family: ExponentialFamily, interval=None) -> Parametrization:
    lo, hi = family.natural_domain
    if interval is None:
        interval = (lo, hi)
    ident = lambda g: np.asarray(g, dtype=float)  # noqa: E731
    return Parametrization(
        family=family,
        interval=tuple(float(v) for v in interval),
        to_natural=ident,
        from_natural=ident,
        du=lambda g: np.ones(np.shape(g)),
        kind="natural",
    )


def mean_parametrization(family: ExponentialFamily, interval=None) -> Parametrization:
    if interval is None:
        interval = family.mean_domain
    return Parametrization(
        family=family,
        interval=tuple(float(v) for v in interval),
        to_natural=family.mean_to_natural,
        from_natural=family.natural_to_mean,
        du=lambda g: 1.0 / family.d2log_partition(family.mean_to_natural(g)),
        kind="mean",
    )


def _closed_form_vst(family: ExponentialFamily):
    """(upsilon, upsilon_inverse) pairs with upsilon' = sqrt(A''/8), or None."""
    if isinstance(family, Gaussian):
        c = 2 * math.sqrt(2) * family.sigma
        return (lambda t: np.asarray(t, dtype=float) / c, lambda g: np.asarray(g, dtype=float) * c)
    if isinstance(family, Poisson):
        # upsilon(theta) = exp(theta/2)/sqrt(2) = sqrt(lambda/2)
        return (
            lambda t: np.exp(np.asarray(t, dtype=float) / 2) / math.sqrt(2),
            lambda g: 2 * np.log(math.sqrt(2) * np.asarray(g, dtype=float)),
        )
    if isinstance(family, Bernoulli):
        # upsilon(theta) = arcsin(sqrt(p))/sqrt(2)
        return (
            lambda t: np.arcsin(np.sqrt(special.expit(np.asarray(t, dtype=float)))) / math.sqrt(2),
            lambda g: special.logit(np.sin(math.sqrt(2) * np.asarray(g, dtype=float)) ** 2),
        )
    return None


class _QuadratureVST:
    """Numerical upsilon on ``[lo, hi]`` with its inverse.

    Node values come from adaptive quadrature of ``sqrt(A''/8)``; intervals
    are bisected until the cubic Hermite spline (built on the exact
    derivative) reproduces the quadrature value at each midpoint to
    ``tol``. The inverse is the Hermite spline of the swapped table,
    polished by Newton steps on the forward spline.
    """

    def __init__(self, family, lo, hi, anchor, epsabs=1e-10, tol=1e-11, max_nodes=20000):
        self.family = family
        self.lo, self.hi = float(lo), float(hi)
        nodes = [self.lo, float(anchor), self.hi] if lo < anchor < hi else [self.lo, self.hi]
        for t in nodes:
            self._check_speed(t)
        # integrate outward from the anchor so that upsilon(anchor) = 0 exactly
        stack = [(a, b) for a, b in zip(nodes[:-1], nodes[1:])]
        pieces = {}
        while stack:
            a, b = stack.pop()
            m = 0.5 * (a + b)
            left, right = self._quad(a, m), self._quad(m, b)
            sa, sb = self._check_speed(a), self._check_speed(b)
            # Hermite prediction of the midpoint value from the endpoints
            h = b - a
            total = left + right
            pred = 0.5 * total + h * (sa - sb) / 8.0
            if abs(pred - left) > tol and len(pieces) < max_nodes and h > 1e-12 * max(1.0, abs(m)):
                stack.append((a, m))
                stack.append((m, b))
            else:
                pieces[(a, b)] = total
        edges = sorted(pieces)
        xs = np.array([edges[0][0]] + [e[1] for e in edges])
        cum = np.concatenate([[0.0], np.cumsum([pieces[e] for e in edges])])
        cum -= cum[int(np.argmin(np.abs(xs - anchor)))]
        speed = self.speed(xs)
        self.nodes, self.values, self.speeds = xs, cum, speed
        self.forward_spline = interpolate.CubicHermiteSpline(xs, cum, speed)
        self.inverse_spline = interpolate.CubicHermiteSpline(cum, xs, 1.0 / speed)

    def _check_speed(self, t):
        s = float(self.speed(t))
        if not np.isfinite(s) or s <= 0:
            raise NumericalError("A'' is not positive on the requested range")
        return s

    def _quad(self, a, b):
        val, err = integrate.quad(self._speed_scalar, a, b, epsabs=1e-10, epsrel=1e-12, limit=200)
        if not np.isfinite(val) or err > 1e-8:
            raise NumericalError("quadrature of sqrt(A''/8) failed")
        return val

    def speed(self, theta):
        return np.sqrt(self.family.d2log_partition(np.asarray(theta, dtype=float)) / 8.0)

    def _speed_scalar(self, t):
        return float(np.sqrt(self.family.d2log_partition(np.array(t)) / 8.0))

    def forward(self, theta):
        return self.forward_spline(np.asarray(theta, dtype=float))

    def inverse(self, gamma):
        gamma = np.asarray(gamma, dtype=float)
        theta = self.inverse_spline(gamma)
        for _ in range(3):
            theta = theta - (self.forward_spline(theta) - gamma) / self.speed(theta)
            theta = np.clip(theta, self.lo, self.hi)
        return theta


def variance_stabilize(family: ExponentialFamily, anchor: float, theta_range, closed_form: bool = True) -> Parametrization:
    """Variance-stabilizing parametrization ``gamma = upsilon(theta)``.

    ``upsilon' = sqrt(A''/8)`` and ``upsilon(anchor) = 0``. The resulting map
    is 1-Lipschitz for the Hellinger distance, so ``kappa = 1``.

    Parameters
    ----------
    family : ExponentialFamily
    anchor : float
        Natural parameter sent to ``gamma = 0``.
    theta_range : (float, float)
        Closed natural-parameter range ``[theta_lo, theta_hi]`` inside the
        natural domain; it fixes the interval ``I``.
    closed_form : bool
        Use the analytic map for Gaussian, Poisson and Bernoulli. Other
        families, or ``closed_form=False``, go through adaptive quadrature.

    Raises
    ------
    DomainError
        If the range is not inside the natural domain or misses the anchor.
    NumericalError
        If quadrature fails or ``A''`` is not positive.
    """
    lo, hi = (float(v) for v in theta_range)
    if not lo < hi:
        raise DomainError("theta_range must be a nontrivial interval")
    if not (family.contains_natural(lo) and family.contains_natural(hi)):
        raise DomainError("theta_range must lie inside the natural domain")
    if not lo <= anchor <= hi:
        raise DomainError("anchor must lie in theta_range")

    closed = _closed_form_vst(family) if closed_form else None
    if closed is not None:
        ups, ups_inv = closed
        shift = float(ups(anchor))
        forward = lambda t: ups(t) - shift  # noqa: E731
        inverse = lambda g: ups_inv(np.asarray(g, dtype=float) + shift)  # noqa: E731
    else:
        table = _QuadratureVST(family, lo, hi, anchor)
        forward, inverse = table.forward, table.inverse

    g_lo, g_hi = float(forward(lo)), float(forward(hi))

    def du(g):
        theta = inverse(g)
        return np.sqrt(8.0 / family.d2log_partition(theta))

    return Parametrization(
        family=family,
        interval=(g_lo, g_hi),
        to_natural=inverse,
        from_natural=forward,
        du=du,
        kind="variance_stabilized",
        kappa=1.0,
        anchor=float(anchor),
    )


@dataclass(frozen=True)
class ConditionalLaw:
    """The member ``R_gamma`` of a parametrized family."""

    parametrization: Parametrization
    gamma: float

    def __post_init__(self):
        if not bool(self.parametrization.contains(self.gamma)):
            raise DomainError(f"gamma={self.gamma} outside I={self.parametrization.interval}")
        theta = self.parametrization.to_natural(self.gamma)
        if not bool(self.family.contains_natural(theta)):
            raise DomainError("u(gamma) outside the natural domain")

    @property
    def family(self) -> ExponentialFamily:
        return self.parametrization.family

    @property
    def theta(self) -> float:
        return float(self.parametrization.to_natural(self.gamma))


def log_density(law: ConditionalLaw, y):
    """``log r_gamma(y) = u(gamma) T(y) - A(u(gamma))``, base density excluded.

    The log-density against the dominating measure is this value plus
    ``law.family.log_base(y)``.
    """
    y = law.family.check_support(y)
    theta = law.theta
    out = theta * law.family.suff_stat(y) - law.family.log_partition(theta)
    return float(out) if np.ndim(out) == 0 else out


def hellinger(family: ExponentialFamily, theta1, theta2):
    """Hellinger distance between two members given by natural parameters."""
    out = np.sqrt(family.hellinger_sq(theta1, theta2))
    return float(out) if np.ndim(out) == 0 else out


def sample(law: ConditionalLaw, seed, size=None):
    """Draw from ``R_gamma``; deterministic given ``seed``."""
    rng = np.random.default_rng(seed)
    theta = np.full(() if size is None else size, law.theta)
    out = law.family.sample_natural(theta, rng)
    return float(out) if size is None else out


# ---------------------------------------------------------------------------
# String identifiers used in scenario configs
# ---------------------------------------------------------------------------

_FAMILY_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def parse_family(text: str) -> ExponentialFamily:
    """Build a family from ``"gaussian(sigma=2)"``, ``"poisson"``, ``"bernoulli"``
    or ``"exponential"``."""
    m = _FAMILY_RE.match(text.lower())
    if not m:
        raise ValueError(f"cannot parse family {text!r}")
    name, args = m.group(1), m.group(2)
    kwargs = {}
    if args:
        for part in args.split(","):
            key, _, val = part.partition("=")
            kwargs[key.strip()] = float(val)
    if name in ("gaussian", "normal"):
        return Gaussian(**kwargs)
    if kwargs:
        raise ValueError(f"family {name!r} takes no arguments")
    if name == "poisson":
        return Poisson()
    if name == "bernoulli":
        return Bernoulli()
    if name == "exponential":
        return Exponential()
    raise ValueError(f"unknown family {name!r}")


def default_vst_range(family: ExponentialFamily):
    """Default ``(theta_range, anchor)`` for the ``vst`` config identifier."""
    if isinstance(family, Gaussian):
        return (-50.0 * family.sigma, 50.0 * family.sigma), 0.0
    if isinstance(family, Poisson):
        return (-10.0, 10.0), 0.0
    if isinstance(family, Bernoulli):
        return (-15.0, 15.0), 0.0
    if isinstance(family, Exponential):
        return (-1e3, -1e-3), -1.0
    raise ValueError("no default vst range for custom families; pass theta_range")


def parse_parametrization(family: ExponentialFamily, kind: str, interval=None, anchor=None, theta_range=None) -> Parametrization:
    """Build ``natural`` | ``mean`` | ``vst`` parametrizations from config values.

    ``interval`` restricts ``I`` for the natural and mean maps. For ``vst`` the
    natural-scale ``theta_range`` and ``anchor`` default per family.
    """
    kind = kind.lower()
    if kind == "natural":
        return natural_parametrization(family, interval)
    if kind == "mean":
        return mean_parametrization(family, interval)
    if kind in ("vst", "variance_stabilized"):
        if theta_range is None:
            theta_range, default_anchor = default_vst_range(family)
            anchor = default_anchor if anchor is None else anchor
        lo, hi = theta_range
        if anchor is None:
            anchor = 0.5 * (lo + hi)
        return variance_stabilize(family, float(anchor), (float(lo), float(hi)))
    raise ValueError(f"unknown parametrization {kind!r}")
