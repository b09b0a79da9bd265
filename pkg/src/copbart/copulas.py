"""Bivariate copula families used as the observation model.

Five one-parameter families are supported: Gaussian, Student-t (fixed degrees
of freedom), Clayton, Gumbel and Frank.  Each family comes with a link
function mapping the real line onto its parameter support, so that a sum of
regression trees can drive the copula parameter.

All density/CDF/sampling routines are vectorised over ``theta`` so that a
different parameter can be supplied for every observation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special, stats

__all__ = [
    "CopulaDomainError",
    "CopulaModel",
    "Family",
    "PreparedPairs",
    "PseudoSample",
    "cdf",
    "link_apply",
    "log_density",
    "pseudo_observations",
    "sample_pair",
    "tau_from_theta",
    "theta_from_tau",
]

_FRANK_TAYLOR = 1e-5
_TINY = np.finfo(float).tiny
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


class CopulaDomainError(ValueError):
    """Raised when an argument lies outside a copula family's domain."""


class Family(str, enum.Enum):
    GAUSSIAN = "gaussian"
    STUDENT_T = "student_t"
    CLAYTON = "clayton"
    GUMBEL = "gumbel"
    FRANK = "frank"

    @classmethod
    def parse(cls, name: str | "Family") -> "Family":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "_")
        aliases = {"t": "student_t", "studentt": "student_t", "student": "student_t", "normal": "gaussian"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise CopulaDomainError(f"unknown copula family {name!r}") from None


@dataclass(frozen=True)
class CopulaModel:
    """A copula family together with its fixed shape parameters.

    ``df`` is only used by the Student-t family; it is a fixed shape and is
    never inferred.
    """

    family: Family
    df: float = 4.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        if self.family is Family.STUDENT_T and not (self.df > 2 and math.isfinite(self.df)):
            raise CopulaDomainError(f"Student-t degrees of freedom must be finite and > 2, got {self.df}")

    # -- link and support -------------------------------------------------

    @property
    def is_elliptical(self) -> bool:
        return self.family in (Family.GAUSSIAN, Family.STUDENT_T)

    def link(self, x):
        """Map real sum-of-trees output to the family's parameter support.

        Values that floating point rounding would put exactly on a support
        boundary are nudged inside by one ulp.
        """
        x = np.asarray(x, dtype=float)
        fam = self.family
        if fam is Family.FRANK:
            return x.copy() if x.ndim else float(x)
        if self.is_elliptical:
            out = np.tanh(0.5 * x)  # == (e^x - 1) / (e^x + 1)
            out = np.clip(out, -np.nextafter(1.0, 0.0), np.nextafter(1.0, 0.0))
        elif fam is Family.CLAYTON:
            out = np.maximum(np.exp(x), _TINY)
        else:  # Gumbel
            out = np.maximum(np.exp(x) + 1.0, np.nextafter(1.0, 2.0))
        return out if out.ndim else float(out)

    def link_inverse(self, theta):
        theta = np.asarray(theta, dtype=float)
        fam = self.family
        if fam is Family.FRANK:
            out = theta.copy()
        elif self.is_elliptical:
            out = 2.0 * np.arctanh(theta)
        elif fam is Family.CLAYTON:
            out = np.log(theta)
        else:
            out = np.log(theta - 1.0)
        return out if out.ndim else float(out)

    def check_theta(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if not np.all(np.isfinite(theta)):
            raise CopulaDomainError("copula parameter must be finite")
        fam = self.family
        if self.is_elliptical:
            bad = np.abs(theta) >= 1.0
        elif fam is Family.CLAYTON:
            bad = theta <= 0.0
        elif fam is Family.GUMBEL:
            bad = theta < 1.0
        else:
            bad = np.zeros(theta.shape, dtype=bool)
        if np.any(bad):
            raise CopulaDomainError(f"parameter outside the {fam.value} support: {theta[bad].ravel()[:3]}")
        return theta

    def tau_range(self) -> tuple[float, float]:
        """Closed interval hull of Kendall's tau values attainable by the family."""
        if self.family in (Family.CLAYTON, Family.GUMBEL):
            return (0.0, 1.0)
        return (-1.0, 1.0)

    # -- densities --------------------------------------------------------

    def prepare(self, u1, u2) -> "PreparedPairs":
        return PreparedPairs(self, u1, u2)

    def log_density(self, u1, u2, theta):
        theta = self.check_theta(theta)
        prep = self.prepare(u1, u2)
        out = prep.logpdf(np.broadcast_to(theta, prep.u1.shape))
        return out if np.ndim(u1) or np.ndim(u2) or np.ndim(theta) else float(out[0])

    def density(self, u1, u2, theta):
        return np.exp(self.log_density(u1, u2, theta))

    def h(self, u_cond, u_given, theta):
        """Conditional CDF P(U1 <= u_cond | U2 = u_given)."""
        u_cond = _check_unit(u_cond, closed=True)
        u_given = _check_unit(u_given)
        theta = self.check_theta(theta)
        fam = self.family
        if fam is Family.GAUSSIAN:
            z1, z2 = special.ndtri(u_cond), special.ndtri(u_given)
            return special.ndtr((z1 - theta * z2) / np.sqrt(1.0 - theta**2))
        if fam is Family.STUDENT_T:
            nu = self.df
            x1, x2 = stats.t.ppf(u_cond, nu), stats.t.ppf(u_given, nu)
            scale = np.sqrt((nu + x2**2) * (1.0 - theta**2) / (nu + 1.0))
            return stats.t.cdf((x1 - theta * x2) / scale, nu + 1.0)
        # Archimedean families: dC/du2 from the closed-form CDF.
        if fam is Family.CLAYTON:
            with np.errstate(divide="ignore"):
                L = _clayton_log_sum(theta, np.log(u_cond), np.log(u_given))
            return np.exp(-(1.0 + theta) * np.log(u_given) - (1.0 + 1.0 / theta) * L)
        if fam is Family.GUMBEL:
            x, y = -np.log(u_cond), -np.log(u_given)
            with np.errstate(divide="ignore"):
                log_s = np.logaddexp(theta * np.log(x), theta * np.log(y))
            A = np.exp(log_s / theta)
            return np.exp(-A + (1.0 / theta - 1.0) * log_s + (theta - 1.0) * np.log(y) + y)
        # Frank
        theta = np.asarray(theta, dtype=float)
        small = np.abs(theta) < _FRANK_TAYLOR
        t = np.where(small, 1.0, theta)
        num = np.expm1(-t * u_cond) * np.exp(-t * u_given)
        den = np.expm1(-t) + np.expm1(-t * u_cond) * np.expm1(-t * u_given)
        exact = num / den
        approx = u_cond + theta * u_cond * (1.0 - u_cond) * (1.0 - 2.0 * u_given) / 2.0
        return np.where(small, approx, exact)

    def cdf(self, u1, u2, theta):
        """Copula CDF C(u1, u2 | theta), defined on the closed unit square."""
        u1 = _check_unit(u1, closed=True)
        u2 = _check_unit(u2, closed=True)
        theta = self.check_theta(theta)
        u1, u2, theta = np.broadcast_arrays(u1, u2, theta)
        out = np.empty(u1.shape)
        edge = (u1 <= 0) | (u2 <= 0) | (u1 >= 1) | (u2 >= 1)
        out[edge] = np.minimum(u1[edge], u2[edge])  # C(u,1)=u, C(0,.)=0
        inner = ~edge
        if np.any(inner):
            out[inner] = self._cdf_interior(u1[inner], u2[inner], theta[inner])
        out = np.clip(out, 0.0, 1.0)
        return out if out.ndim else float(out)

    def _cdf_interior(self, u1, u2, theta):
        fam = self.family
        if fam is Family.CLAYTON:
            L = _clayton_log_sum(theta, np.log(u1), np.log(u2))
            return np.exp(-L / theta)
        if fam is Family.GUMBEL:
            log_s = np.logaddexp(theta * np.log(-np.log(u1)), theta * np.log(-np.log(u2)))
            return np.exp(-np.exp(log_s / theta))
        if fam is Family.FRANK:
            small = np.abs(theta) < _FRANK_TAYLOR
            t = np.where(small, 1.0, theta)
            exact = _frank_cdf(u1, u2, t)
            p, q = u1 * (1.0 - u1), u2 * (1.0 - u2)
            approx = u1 * u2 + theta * p * q / 2.0 + theta**2 * p * q * (1 - 2 * u1) * (1 - 2 * u2) / 12.0
            return np.where(small, approx, exact)
        out = np.empty(u1.shape)
        for i, (a, b, r) in enumerate(zip(u1, u2, theta)):
            out[i] = self._elliptical_cdf(float(a), float(b), float(r))
        return out

    def _elliptical_cdf(self, a: float, b: float, r: float) -> float:
        # Radial symmetry and exchangeability move the point into [0, 1/2]^2:
        # C(a, b; r) = a - C(a, 1 - b; -r) = C(b, a; r).
        if b > 0.5:
            return a - self._elliptical_cdf(a, 1.0 - b, -r)
        if a > 0.5:
            return b - self._elliptical_cdf(1.0 - a, b, -r)
        a, b = max(a, b), min(a, b)
        # integrate the conditional CDF against the latent density of the smaller margin
        if self.family is Family.GAUSSIAN:
            za, zb, s = special.ndtri(a), special.ndtri(b), math.sqrt(1.0 - r * r)

            def f(z):
                return special.ndtr((za - r * z) / s) * math.exp(-0.5 * z * z - _HALF_LOG_2PI)
        else:
            nu = self.df
            xa, zb = special.stdtrit(nu, a), special.stdtrit(nu, b)
            k = (1.0 - r * r) / (nu + 1.0)
            log_c = special.gammaln(0.5 * (nu + 1.0)) - special.gammaln(0.5 * nu) - 0.5 * math.log(nu * math.pi)

            def f(x):
                return special.stdtr(nu + 1.0, (xa - r * x) / math.sqrt((nu + x * x) * k)) * math.exp(
                    log_c - 0.5 * (nu + 1.0) * math.log1p(x * x / nu))

        val = integrate.quad(f, -np.inf, zb, epsabs=1e-13 * b, epsrel=1e-11, limit=200)[0]
        return min(max(val, 0.0), b)

    # -- Kendall's tau ----------------------------------------------------

    def tau(self, theta):
        theta = self.check_theta(theta)
        fam = self.family
        if self.is_elliptical:
            out = 2.0 / np.pi * np.arcsin(theta)
        elif fam is Family.CLAYTON:
            out = theta / (theta + 2.0)
        elif fam is Family.GUMBEL:
            out = 1.0 - 1.0 / theta
        else:
            out = _frank_tau_vec(theta)
        return out if out.ndim else float(out)

    def theta(self, tau):
        tau = np.asarray(tau, dtype=float)
        if not np.all(np.isfinite(tau)):
            raise CopulaDomainError("Kendall's tau must be finite")
        fam = self.family
        lo, hi = self.tau_range()
        if fam in (Family.CLAYTON, Family.GUMBEL):
            bad = (tau <= lo) | (tau >= hi) if fam is Family.CLAYTON else (tau < lo) | (tau >= hi)
        else:
            bad = (tau <= lo) | (tau >= hi)
        if np.any(bad):
            raise CopulaDomainError(f"Kendall's tau {tau[bad].ravel()[:3]} not attainable by the {fam.value} copula")
        if self.is_elliptical:
            out = np.sin(0.5 * np.pi * tau)
        elif fam is Family.CLAYTON:
            out = 2.0 * tau / (1.0 - tau)
        elif fam is Family.GUMBEL:
            out = 1.0 / (1.0 - tau)
        else:
            out = np.vectorize(_frank_theta, otypes=[float])(tau)
        return out if out.ndim else float(out)

    # -- simulation -------------------------------------------------------

    def sample(self, theta, rng: np.random.Generator, size=None):
        """Draw pairs (u1, u2); ``theta`` broadcasts against ``size``."""
        theta = self.check_theta(theta)
        shape = theta.shape if size is None else np.broadcast_shapes(theta.shape, tuple(np.atleast_1d(size)))
        theta = np.broadcast_to(theta, shape)
        fam = self.family
        if self.is_elliptical:
            z1 = rng.standard_normal(shape)
            z2 = theta * z1 + np.sqrt(1.0 - theta**2) * rng.standard_normal(shape)
            if fam is Family.GAUSSIAN:
                u1, u2 = special.ndtr(z1), special.ndtr(z2)
            else:
                w = np.sqrt(rng.chisquare(self.df, shape) / self.df)
                u1, u2 = stats.t.cdf(z1 / w, self.df), stats.t.cdf(z2 / w, self.df)
        elif fam is Family.CLAYTON:
            u1, w = rng.uniform(size=shape), rng.uniform(size=shape)
            # conditional inverse: ((w^{-t/(1+t)} - 1) u^{-t} + 1)^{-1/t}
            a = np.expm1(-theta / (1.0 + theta) * np.log(w))
            u2 = np.exp(-np.log1p(a * np.exp(-theta * np.log(u1))) / theta)
        elif fam is Family.GUMBEL:
            # Marshall-Olkin with a positive stable frailty (Kanter's representation).
            alpha = 1.0 / theta
            v = rng.uniform(0.0, np.pi, shape)
            e0 = rng.standard_exponential(shape)
            with np.errstate(divide="ignore", invalid="ignore"):
                s = (np.sin(alpha * v) / np.sin(v) ** (1.0 / alpha)) * (
                    np.sin((1.0 - alpha) * v) / e0
                ) ** ((1.0 - alpha) / alpha)
            s = np.where(alpha >= 1.0, 1.0, s)
            e1, e2 = rng.standard_exponential(shape), rng.standard_exponential(shape)
            u1 = np.exp(-((e1 / s) ** alpha))
            u2 = np.exp(-((e2 / s) ** alpha))
        else:
            u1, w = rng.uniform(size=shape), rng.uniform(size=shape)
            small = np.abs(theta) < _FRANK_TAYLOR
            t = np.where(small, 1.0, theta)
            with np.errstate(over="ignore", invalid="ignore"):
                ratio = w * np.expm1(-t) / (w + (1.0 - w) * np.exp(-t * u1))
                u2 = np.where(small, w, -np.log1p(ratio) / t)
        lo, hi = _TINY, np.nextafter(1.0, 0.0)
        return np.clip(u1, lo, hi), np.clip(u2, lo, hi)


class PreparedPairs:
    """Pseudo-observations with the per-point transforms a family needs.

    Re-evaluating the log-density at many parameter values (as an MCMC
    sampler does) only pays for the parameter-dependent part.
    """

    def __init__(self, model: CopulaModel, u1, u2):
        u1 = _check_unit(np.atleast_1d(np.asarray(u1, dtype=float)))
        u2 = _check_unit(np.atleast_1d(np.asarray(u2, dtype=float)))
        u1, u2 = np.broadcast_arrays(u1, u2)
        self.model = model
        self.u1, self.u2 = np.ascontiguousarray(u1), np.ascontiguousarray(u2)
        fam = model.family
        if fam is Family.GAUSSIAN:
            z1, z2 = special.ndtri(self.u1), special.ndtri(self.u2)
            self._a = z1**2 + z2**2
            self._b = z1 * z2
        elif fam is Family.STUDENT_T:
            nu = model.df
            x1, x2 = stats.t.ppf(self.u1, nu), stats.t.ppf(self.u2, nu)
            self._a = x1**2 + x2**2
            self._b = x1 * x2
            self._c = 0.5 * (nu + 1.0) * (np.log1p(x1**2 / nu) + np.log1p(x2**2 / nu))
            self._const = special.gammaln((nu + 2) / 2) + special.gammaln(nu / 2) - 2 * special.gammaln((nu + 1) / 2)
        elif fam is Family.CLAYTON:
            self._lu, self._lv = np.log(self.u1), np.log(self.u2)
            self._s = self._lu + self._lv
        elif fam is Family.GUMBEL:
            x, y = -np.log(self.u1), -np.log(self.u2)
            self._lx, self._ly = np.log(x), np.log(y)
            self._s = np.log(self.u1) + np.log(self.u2)
            self._t = self._lx + self._ly
        else:
            self._uv = self.u1 + self.u2
            self._w = self.u1 + (1.0 - self.u2)
            self._p = (1.0 - 6.0 * self.u1 * (1.0 - self.u1)) * (1.0 - 6.0 * self.u2 * (1.0 - self.u2))
            self._q = (1.0 - 2.0 * self.u1) * (1.0 - 2.0 * self.u2)

    def __len__(self):
        return self.u1.shape[0]

    def logpdf(self, theta, idx=None):
        """Log-density at ``theta`` (same length as ``idx`` or the full sample).

        No support checks are made; non-finite results are mapped to -inf.
        """
        theta = np.asarray(theta, dtype=float)
        sel = slice(None) if idx is None else idx
        fam = self.model.family
        with np.errstate(all="ignore"):
            if fam is Family.GAUSSIAN:
                r2 = theta * theta
                om = 1.0 - r2
                out = -0.5 * np.log(om) - (r2 * self._a[sel] - 2.0 * theta * self._b[sel]) / (2.0 * om)
            elif fam is Family.STUDENT_T:
                nu = self.model.df
                om = 1.0 - theta * theta
                q = (self._a[sel] - 2.0 * theta * self._b[sel]) / (nu * om)
                out = self._const - 0.5 * np.log(om) - 0.5 * (nu + 2.0) * np.log1p(q) + self._c[sel]
            elif fam is Family.CLAYTON:
                lu, lv = self._lu[sel], self._lv[sel]
                L = _clayton_log_sum(theta, lu, lv)
                out = np.log1p(theta) - (1.0 + theta) * self._s[sel] - (2.0 + 1.0 / theta) * L
            elif fam is Family.GUMBEL:
                lx, ly = self._lx[sel], self._ly[sel]
                log_s = np.logaddexp(theta * lx, theta * ly)
                A = np.exp(log_s / theta)
                out = (-A - self._s[sel] + (theta - 1.0) * self._t[sel]
                       + (1.0 / theta - 2.0) * log_s + np.log(A + theta - 1.0))
            else:
                out = self._frank(theta, sel)
        out = np.asarray(out, dtype=float)
        return np.where(np.isnan(out), -np.inf, out)

    def _frank(self, theta, sel):
        u = self.u1[sel]
        neg = theta < 0
        # c(u, v; -t) = c(u, 1 - v; t)
        v = np.where(neg, 1.0 - self.u2[sel], self.u2[sel])
        t = np.abs(theta)
        small = t < _FRANK_TAYLOR
        ts = np.where(small, 1.0, t)
        log_d = _frank_log_denominator(u, v, ts)
        exact = np.log(ts) + np.log(-np.expm1(-ts)) - ts * (u + v) - 2.0 * log_d
        approx = np.log1p(theta * self._q[sel] / 2.0 + theta**2 * self._p[sel] / 12.0)
        return np.where(small, approx, exact)

    def loglik(self, theta, idx=None) -> float:
        return float(np.sum(self.logpdf(theta, idx)))


@dataclass(frozen=True)
class PseudoSample:
    u1: np.ndarray
    u2: np.ndarray

    def __len__(self):
        return len(self.u1)


# -- helpers -----------------------------------------------------------------


def _check_unit(u, closed=False):
    u = np.asarray(u, dtype=float)
    if closed:
        ok = (u >= 0.0) & (u <= 1.0)
    else:
        ok = (u > 0.0) & (u < 1.0)
    if not np.all(ok):
        where = "[0, 1]" if closed else "(0, 1)"
        raise CopulaDomainError(f"copula arguments must lie in {where}")
    return u


def _clayton_log_sum(theta, lu, lv):
    """log(u^-t + v^-t - 1) without overflow or cancellation."""
    a, b = -theta * lu, -theta * lv
    m = np.maximum(a, b)
    with np.errstate(over="ignore", invalid="ignore"):
        small = np.log1p(np.expm1(a) + np.expm1(b))
        large = m + np.log(np.exp(a - m) + np.exp(b - m) - np.exp(-m))
    return np.where(m < 1.0, small, large)


def _frank_log_denominator(u, v, t):
    """log(e^{-tu} + e^{-tv} - e^{-t(u+v)} - e^{-t}) for t > 0, as a sum of two positive terms."""
    return np.logaddexp(-t * u + np.log(-np.expm1(-t * v)), -t * v + np.log(-np.expm1(-t * (1.0 - v))))


def _frank_cdf(u, v, t):
    # C(u, v; -t) = u - C(u, 1 - v; t)
    neg = t < 0
    a = np.abs(t)
    w = np.where(neg, 1.0 - v, v)
    c = -(_frank_log_denominator(u, w, a) - np.log(-np.expm1(-a))) / a
    return np.where(neg, u - c, c)


def _debye1(x: float) -> float:
    if x == 0.0:
        return 1.0
    val, _ = integrate.quad(lambda t: t / math.expm1(t) if t != 0 else 1.0, 0.0, abs(x), epsabs=1e-14, epsrel=1e-12, limit=200)
    d = val / abs(x)
    return d if x > 0 else d + abs(x) / 2.0


_B2K = special.bernoulli(40)[2::2]  # B_2, B_4, ..., B_40
_SERIES_K = np.arange(1, _B2K.shape[0] + 1)
_SERIES_COEF = _B2K / ((2 * _SERIES_K + 1) * special.factorial(2 * _SERIES_K))
_EXP_K = np.arange(1, 61, dtype=float)


def _debye1_fast(x) -> np.ndarray:
    """Vectorised first Debye function for x >= 0.

    Bernoulli series below 2, exponential series
    ``pi^2/6 - sum_k exp(-k x) (x/k + 1/k^2)`` above.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 2.0
    xs = x[small]
    out[small] = 1.0 - xs / 4.0 + (xs[:, None] ** (2 * _SERIES_K) * _SERIES_COEF).sum(axis=1)
    xl = x[~small][:, None]
    tail = (np.exp(-_EXP_K * xl) * (xl / _EXP_K + 1.0 / _EXP_K**2)).sum(axis=1)
    out[~small] = (np.pi**2 / 6.0 - tail) / xl[:, 0]
    return out


def _frank_tau_vec(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    a = np.abs(theta)
    tiny = a < 1e-4
    safe = np.where(tiny, 1.0, a)
    tau = 1.0 - 4.0 / safe * (1.0 - _debye1_fast(safe))
    tau = np.where(tiny, a / 9.0 - a**3 / 900.0, tau)
    return np.sign(theta) * tau


def _frank_tau(theta: float) -> float:
    if abs(theta) < 1e-4:
        return theta / 9.0 - theta**3 / 900.0
    return 1.0 - 4.0 / theta * (1.0 - _debye1(theta))


def _frank_theta(tau: float) -> float:
    if tau == 0.0:
        return 0.0
    sign = 1.0 if tau > 0 else -1.0
    target = abs(tau)
    hi = 1.0
    while _frank_tau(hi) < target:
        hi *= 2.0
        if hi > 1e6:
            raise CopulaDomainError(f"Kendall's tau {tau} too extreme for the Frank copula")
    root = optimize.brentq(lambda t: _frank_tau(t) - target, 0.0, hi, xtol=1e-14, rtol=1e-15, maxiter=500)
    return sign * root


# -- functional interface ------------------------------------------------------


def _model(model) -> CopulaModel:
    return model if isinstance(model, CopulaModel) else CopulaModel(Family.parse(model))


def link_apply(model, x):
    """Map a sum-of-trees value to the copula parameter."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise CopulaDomainError("link input must be finite")
    return _model(model).link(x)


def log_density(model, u1, u2, theta):
    return _model(model).log_density(u1, u2, theta)


def cdf(model, u1, u2, theta):
    return _model(model).cdf(u1, u2, theta)


def tau_from_theta(model, theta):
    return _model(model).tau(theta)


def theta_from_tau(model, tau):
    return _model(model).theta(tau)


def sample_pair(model, theta, rng: np.random.Generator, size=None):
    return _model(model).sample(theta, rng, size)


def pseudo_observations(y1, y2) -> PseudoSample:
    """Rank-transform raw pairs to (0, 1) using average ranks over n + 1."""
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    if y1.ndim != 1 or y1.shape != y2.shape:
        raise ValueError("y1 and y2 must be one-dimensional and of equal length")
    n = y1.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 observations, got {n}")
    if not (np.all(np.isfinite(y1)) and np.all(np.isfinite(y2))):
        raise ValueError("observations must be finite")
    return PseudoSample(stats.rankdata(y1) / (n + 1.0), stats.rankdata(y2) / (n + 1.0))
