"""Typical / exceptional frequency scales and the choice of alpha."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .._numeric import decimal_fraction
from ..errors import BelowFirstScale, ConstraintViolated, DomainError, ThresholdExceeded
from .scheme import CantorScheme, growth_schedule

TAU_THRESHOLD = (math.sqrt(73) - 3) / 8
ALPHA0_NOMINAL = (116 - 13 * math.sqrt(73)) / 144
# the constant at which both sides of the alpha-window meet when tau = TAU_THRESHOLD
ALPHA0_THRESHOLD = (10 - math.sqrt(73)) / 9


@dataclass(frozen=True)
class ScaleModel:
    """What the scale classification needs: ``p sigma``, eps, tau and n_k.

    ``rule`` extends the realised schedule: ``"desk"`` (``n_k = step k``),
    ``"growth"`` (growth condition) or ``"finite"`` (no insertion after the
    last one, i.e. ``n_{K+1} = infinity``).
    """

    p_sigma: float
    eps: float
    tau: float
    schedule: tuple[int, ...]
    rule: str = "finite"
    step: int | None = None

    def __post_init__(self):
        if self.p_sigma <= 0:
            raise DomainError("p sigma must be positive")
        if not self.schedule:
            raise DomainError("schedule must not be empty")
        if self.rule not in ("finite", "desk", "growth"):
            raise DomainError(f"unknown schedule rule {self.rule!r}")
        object.__setattr__(self, "_ext", list(self.schedule))

    @classmethod
    def from_scheme(cls, scheme: CantorScheme) -> "ScaleModel":
        rule = "desk" if scheme.step else "growth" if scheme.mode == "growth" else "finite"
        return cls(scheme.p_sigma(), float(scheme.good.eps), float(scheme.tau), scheme.schedule,
                   rule, scheme.step)

    def n(self, k: int) -> float:
        """``n_k`` for ``k >= 1``; ``inf`` past the end of a finite schedule."""
        ext = self._ext
        while len(ext) < k:
            if self.rule == "finite":
                return math.inf
            if self.rule == "desk":
                ext.append(self.step * (len(ext) + 1))
            else:
                ext[:] = list(growth_schedule(ext[0], len(ext) + 1, decimal_fraction(self.eps),
                                             decimal_fraction(self.tau)))
        return ext[k - 1]


@dataclass(frozen=True)
class Typical:
    k: int
    n_zeta: int
    log_zeta: float


@dataclass(frozen=True)
class Exceptional:
    k: int
    log_zeta: float


def _model(obj) -> ScaleModel:
    return obj if isinstance(obj, ScaleModel) else ScaleModel.from_scheme(obj)


def classify_log_scale(model, log_zeta: float):
    """Classify ``zeta`` given ``log zeta`` directly."""
    m = _model(model)
    ps, e, t = m.p_sigma, m.eps, m.tau
    if log_zeta <= (1 - 4 * e) * m.n(1) * ps:
        raise BelowFirstScale(f"log zeta = {log_zeta} is below the first scale")
    k = 1
    while True:
        nk, nk1 = m.n(k), m.n(k + 1)
        a = (1 - 4 * e) * nk * ps
        b = (t + 1 + 4 * e) * nk * ps
        upper = (1 - 4 * e) * nk1 * ps if math.isfinite(nk1) else math.inf
        if a < log_zeta < b:
            return Exceptional(k, log_zeta)
        if b <= log_zeta <= upper:
            return Typical(k, math.floor((log_zeta - t * nk * ps) / ps), log_zeta)
        k += 1


def log_abs(xi) -> float:
    if isinstance(xi, int):
        return _log_int(abs(xi))
    v = abs(mpmath.mpf(xi)) if not isinstance(xi, float) else abs(xi)
    if v <= 1:
        raise DomainError("need |xi| > 1")
    return float(mpmath.log(v))


def _log_int(n: int) -> float:
    if n <= 1:
        raise DomainError("need |xi| > 1")
    if n.bit_length() < 1000:
        return math.log(n)
    shift = n.bit_length() - 60
    return math.log(n >> shift) + shift * math.log(2)


def classify_scale(model, xi, alpha: float):
    """Classify ``zeta = |xi|^alpha``."""
    if not 0 < alpha:
        raise DomainError("alpha must be positive")
    return classify_log_scale(model, alpha * log_abs(xi))


def choose_window(tau: float) -> tuple[float, float]:
    """Open interval ``((tau^2+tau)/(tau+2)^2, (2-tau)/(3(tau+2)))``."""
    return (tau * tau + tau) / (tau + 2) ** 2, (2 - tau) / (3 * (tau + 2))


def case2_inequalities(alpha: float, tau: float) -> dict:
    return {
        "1-2a>0": 1 - 2 * alpha > 0,
        "(1-2a)(3a-1)/2<0": (1 - 2 * alpha) * (3 * alpha - 1) / 2 < 0,
        "2a-1-a(t+2)/(t+1)<0": 2 * alpha - 1 - alpha * (tau + 2) / (tau + 1) < 0,
    }


def alpha0_value(tau: float, alpha0="midpoint") -> float:
    if alpha0 == "nominal":
        return ALPHA0_NOMINAL
    if alpha0 == "threshold":
        return ALPHA0_THRESHOLD
    if alpha0 == "midpoint":
        lo, hi = choose_window(tau)
        return (lo + hi) / 2
    return float(alpha0)


@dataclass(frozen=True)
class AlphaChoice:
    alpha: float
    alpha0: float
    branch: str
    scale: object
    checks: dict
    alpha_scale: object = None


def select_alpha(tau, eps, xi, scheme, alpha0="midpoint") -> AlphaChoice:
    """``alpha0`` if ``|xi|^alpha0`` is typical, else ``alpha0 (tau + 1 + 10 eps)``.

    ``alpha0`` may be ``"midpoint"`` (centre of the admissible window at this
    tau), ``"threshold"``, ``"nominal"`` or a number.
    """
    tau, eps = float(tau), float(eps)
    if not 0 < tau < TAU_THRESHOLD:
        raise ThresholdExceeded(f"tau = {tau} is not below {TAU_THRESHOLD:.6f}")
    a0 = alpha0_value(tau, alpha0)
    model = _model(scheme)
    cls = classify_scale(model, xi, a0)
    if isinstance(cls, Typical):
        lo, hi = choose_window(tau)
        checks = {"window_lower": lo < a0, "window_upper": a0 < hi}
        if not all(checks.values()):
            raise ConstraintViolated(f"alpha0 = {a0:.6g} is outside ({lo:.6g}, {hi:.6g})")
        return AlphaChoice(a0, a0, "typical", cls, checks)
    alpha = a0 * (tau + 1 + 10 * eps)
    checks = case2_inequalities(alpha, tau)
    if not all(checks.values()):
        raise ConstraintViolated(f"alpha = {alpha:.6g} fails the exceptional-branch inequalities")
    try:
        follow = classify_scale(model, xi, alpha)
    except BelowFirstScale:
        follow = None
    return AlphaChoice(alpha, a0, "exceptional", cls, checks, follow)
