"""Explicit constants of the Moser / De Giorgi level-set chain.

Every function is pure.  ``c`` is the unnamed absolute constant shared by all
formulas (default 1).  Quantities that underflow any float format
(``beta_2``, ``beta_0``, ``hat beta_2``) are only ever handled through their
logarithms, and small radii are carried as ``lnln = ln ln(1/R)`` so that
thresholds far below ``1e-308`` remain representable.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Optional

import numpy as np

from ..criterion import GaugeParams
from ..errors import DomainError, PreconditionError

R_CAP = 1.0 / 6.0
LNLN_CAP = math.log(math.log(6.0))   # lnln of the cap 1/6
_LOG2_6 = math.log2(6.0)
_LN6 = math.log(6.0)
# bisection stays inside this lnln range; above it a threshold is reported as unrepresentable
_LNLN_MAX = 1e300
_BISECT_STEPS = 200


def _positive(**kw):
    for name, v in kw.items():
        if not v > 0:
            raise DomainError(f"{name} must be positive, got {v}")


# ---------------------------------------------------------------------------
# closed-form constants


def const_c1(tau1, tau, gamma1, gamma, M2R=0.0, c=1.0) -> float:
    """Prefactor of the sup bound for ``(k - pi)_+`` over ``Q^{tau1,gamma1}(R)``.

    ``c / (tau-tau1)^(16/3) * (1 + (tau-tau1)/sqrt(gamma-gamma1)
    + (gamma1 tau1^3)^(-1/10) M(2R))^3``.
    """
    if not 0 < tau1 < tau < 2:
        raise DomainError(f"need 0 < tau1 < tau < 2, got tau1={tau1}, tau={tau}")
    if not 0 < gamma1 < gamma < 4:
        raise DomainError(f"need 0 < gamma1 < gamma < 4, got gamma1={gamma1}, gamma={gamma}")
    if M2R < 0:
        raise DomainError("M(2R) must be nonnegative")
    _positive(c=c)
    gap = tau - tau1
    inner = 1 + gap / math.sqrt(gamma - gamma1) + (1.0 / (gamma1 * tau1**3)) ** 0.1 * M2R
    return c / gap ** (16.0 / 3.0) * inner**3


def const_c1_prime(lam, theta, M2R=0.0, c=1.0) -> float:
    """Variant without time cut-off: ``c/(1-lam)^(16/3) (1 + (theta lam^3)^(-1/10) M(2R))^3``."""
    if not 0 < lam < 1:
        raise DomainError(f"need 0 < lam < 1, got {lam}")
    if not 0 < theta <= 1:
        raise DomainError(f"need 0 < theta <= 1, got {theta}")
    if M2R < 0:
        raise DomainError("M(2R) must be nonnegative")
    _positive(c=c)
    return c / (1 - lam) ** (16.0 / 3.0) * (1 + (1.0 / (theta * lam**3)) ** 0.1 * M2R) ** 3


def const_mu_star(c1) -> float:
    """``mu* = (2 c1)^(-10/3)``."""
    _positive(c1=c1)
    return (2.0 * c1) ** (-10.0 / 3.0)


def const_theta0(delta0, f2R, c=1.0) -> float:
    """``min(1, (c delta0^6 / (1 + delta0^2 f(2R)))^(4/3))``."""
    if not 0 < delta0 <= 1:
        raise DomainError(f"need 0 < delta0 <= 1, got {delta0}")
    if f2R < 0:
        raise DomainError("f(2R) must be nonnegative")
    _positive(c=c)
    return min(1.0, (c * delta0**6 / (1 + delta0**2 * f2R)) ** (4.0 / 3.0))


def _is_exact(*xs) -> bool:
    return all(isinstance(x, Rational) for x in xs)


def const_s(delta1, mu1, theta1, f2R, c=1) -> int:
    """``s = floor(c (1 + f(2R)) / (delta1^2 mu1^2 theta1)) + 1``.

    Rational inputs (``int``/``Fraction``) are evaluated exactly.  On the
    float path a value within ``1e-12`` relative of an integer is taken to
    be that integer, so ``1/3``, ``0.1`` and friends do not drop a unit
    through representation error.
    """
    _positive(delta1=delta1, mu1=mu1, theta1=theta1, c=c)
    if f2R < 0:
        raise DomainError("f(2R) must be nonnegative")
    if _is_exact(delta1, mu1, theta1, f2R, c):
        v = Fraction(c) * (1 + Fraction(f2R)) / (Fraction(delta1) ** 2 * Fraction(mu1) ** 2
                                                  * Fraction(theta1))
        return math.floor(v) + 1
    v = c * (1 + f2R) / (delta1**2 * mu1**2 * theta1)
    if not math.isfinite(v):
        raise DomainError("s overflows")
    near = round(v)
    if abs(v - near) <= 1e-12 * max(1.0, abs(v)):
        return int(near) + 1
    return math.floor(v) + 1


@dataclass(frozen=True)
class Log2Beta:
    """``log2(beta) = exponent + offset``, kept split so the large exponent stays exact."""

    exponent: float
    offset: float

    @property
    def log2(self) -> float:
        return float(self.exponent) + self.offset

    @property
    def ln(self) -> float:
        return self.log2 * math.log(2.0)


def const_beta2_log2(sigma_frac, g2R, c=1) -> Log2Beta:
    """``log2 beta_2 = -c (1-sigma)^-40 sigma^-6 g(2R)^25 - log2 6``.

    Rational inputs give an exact (integer or ``Fraction``) exponent.
    """
    if not 0 < sigma_frac < 1:
        raise DomainError(f"need 0 < sigma < 1, got {sigma_frac}")
    if g2R < 1:
        raise DomainError(f"g(2R) must be >= 1, got {g2R}")
    if c < 0:
        raise DomainError("c must be nonnegative")
    if _is_exact(sigma_frac, g2R, c):
        s = Fraction(sigma_frac)
        e = -Fraction(c) * (1 - s) ** -40 * s**-6 * Fraction(g2R) ** 25
        e = int(e) if e.denominator == 1 else e
    else:
        e = -c * (1 - sigma_frac) ** -40.0 * sigma_frac**-6.0 * float(g2R) ** 25
    return Log2Beta(e, -_LOG2_6)


def const_kappa0_delta0(f2R, M0, c=1.0) -> tuple[float, float]:
    """``kappa0 = c/(1+f(2R))`` and ``delta0 = (c/(M0 (1+f(2R))))^(9/4)``."""
    if M0 < 1:
        raise DomainError(f"need M0 >= 1, got {M0}")
    if f2R < 0:
        raise DomainError("f(2R) must be nonnegative")
    _positive(c=c)
    return c / (1 + f2R), (c / (M0 * (1 + f2R))) ** 2.25


# ---------------------------------------------------------------------------
# double-log radius arithmetic


def lnln_of(R: float) -> float:
    """``ln ln(1/R)`` for ``0 < R < 1``."""
    if not 0 < R < 1:
        raise DomainError(f"need 0 < R < 1, got {R}")
    return math.log(-math.log(R))


def radius_of(lnln: float) -> float:
    """Inverse of :func:`lnln_of`; 0.0 once the radius underflows."""
    try:
        return math.exp(-math.exp(lnln))
    except OverflowError:
        return 0.0


def scale_lnln(lnln: float, k: float) -> float:
    """``lnln`` of the radius ``k * R`` given ``lnln`` of ``R``."""
    base = math.exp(lnln) if lnln < 700 else math.inf
    shift = math.log(k)
    if base - shift <= 0:
        raise DomainError("scaled radius leaves (0, 1)")
    if math.isinf(base):
        return lnln
    return lnln + math.log1p(-shift / base)


def gauge_from_lnln(lnln: float, gauge: GaugeParams) -> float:
    """``g(R)`` written in terms of ``lnln = ln ln(1/R)``; its inner log is ``lnln/2``."""
    L = 0.5 * lnln
    if L <= 0:
        return 1.0
    return max(1.0, gauge.c_star * L**gauge.alpha)


# ---------------------------------------------------------------------------
# thresholds


@dataclass(frozen=True)
class Threshold:
    """Largest radius (capped at 1/6) below which a defining inequality holds.

    ``lnln`` is ``ln ln(1/R*)``.  ``radius`` is 0.0 when ``R*`` underflows
    a double; ``exists`` is False when no radius at all satisfies the
    inequality within the representable double-log range.
    """

    name: str
    lnln: float
    exists: bool = True
    note: str = ""

    @property
    def radius(self) -> float:
        return radius_of(self.lnln) if self.exists else 0.0

    def admits(self, lnln: float) -> bool:
        """Whether the radius with double log ``lnln`` lies at or below the threshold."""
        return self.exists and lnln >= self.lnln * (1 - 1e-12)

    def to_dict(self) -> dict:
        return {"name": self.name, "lnln": self.lnln, "radius": self.radius,
                "exists": self.exists, "note": self.note}


def _threshold(name: str, holds, lo: float = LNLN_CAP) -> Threshold:
    """Smallest ``lnln >= lo`` from which ``holds`` stays true (monotone predicate)."""
    if holds(lo):
        return Threshold(name, lo, True, "cap 1/6 applies" if lo == LNLN_CAP else "")
    a, b = math.log(lo), math.log(lo)
    top = math.log(_LNLN_MAX)
    # bracket in log(lnln)
    while not holds(math.exp(b)):
        a = b
        b = b + max(1.0, abs(b))
        if b > top:
            if holds(_LNLN_MAX):
                b = top
                break
            return Threshold(name, math.inf, False,
                             f"threshold below representable scale (needs ln ln(1/R) > {_LNLN_MAX:g})")
    for _ in range(_BISECT_STEPS):
        m = 0.5 * (a + b)
        if m in (a, b):
            break
        if holds(math.exp(m)):
            b = m
        else:
            a = m
    lnln = math.exp(b)
    note = "" if radius_of(lnln) > 0 else f"R* underflows a double; ln ln(1/R*) = {lnln:.6g}"
    return Threshold(name, lnln, True, note)


def beta0_prefactor(gauge: GaugeParams, c=1.0) -> float:
    """``c1(c_*)`` of the final ``ln beta_0 >= -c1 L^(239 alpha/3)`` display.

    Uses ``N <= a_N g^(4/3)`` with ``a_N = (9/8) c^(-4/3) + 1`` (valid for
    ``|t_bar| <= R^2``) and ``g <= C L^alpha`` with ``C = max(1, c_*)``.
    """
    a_n = 9.0 / 8.0 * c ** (-4.0 / 3.0) + 1
    C = max(1.0, gauge.c_star)
    return (a_n * _LN6 + 2 * c * C**25 * a_n**41) * C ** (164.0 / 3.0)


def const_thresholds(gauge: GaugeParams, theta=1.0, M0=2.0, c=1.0) -> dict[str, Threshold]:
    """Radius thresholds ``R*_1 .. R*_5`` found by bisection in ``ln ln(1/R)``.

    * ``R*_1``: ``(1/(c g(2r)))^(4/3) <= theta`` for all ``r <= R*_1``;
    * ``R*_3``: ``ln ln^(1/2)(1/(2R)) >= 1`` (the gauge's inner log at ``2R``
      dominates the per-step corrections in the ``beta_0`` chain);
    * ``R*_4``: ``c1(c_*) L^(239 alpha/3 - 1) <= 1`` with ``L = ln ln^(1/2)(1/R)``;
    * ``R*_2 = min(R*_1, R*_3, R*_4)``;
    * ``R*_5``: ``2 c_M L^(224 alpha - 1) <= 1`` and ``c_M L^(224 alpha) >= alpha ln L``
      with ``c_M = c M0 max(1, c_*)^224``, and ``R*_5 <= R*_2``.
    """
    if not 0 < theta <= 1:
        raise DomainError(f"need 0 < theta <= 1, got {theta}")
    if M0 < 1:
        raise DomainError("need M0 >= 1")
    _positive(c=c)
    alpha = gauge.alpha

    def t1(ll):
        return (1.0 / (c * gauge_from_lnln(scale_lnln(ll, 2.0), gauge))) ** (4.0 / 3.0) <= theta

    def t3(ll):
        return 0.5 * scale_lnln(ll, 2.0) >= 1.0

    c1 = beta0_prefactor(gauge, c)
    e4 = 239.0 * alpha / 3.0 - 1.0

    def t4(ll):
        L = 0.5 * ll
        return L > 0 and math.log(c1) + e4 * math.log(L) <= 0

    r1 = _threshold("R*1", t1)
    r3 = _threshold("R*3", t3)
    r4 = _threshold("R*4", t4)
    parts = [r1, r3, r4]
    if all(p.exists for p in parts):
        worst = max(parts, key=lambda p: p.lnln)
        r2 = Threshold("R*2", worst.lnln, True, f"min of R*1, R*3, R*4 attained by {worst.name}")
    else:
        r2 = Threshold("R*2", math.inf, False, "a constituent threshold does not exist")

    cM = c * M0 * max(1.0, gauge.c_star) ** 224
    e5 = 224.0 * alpha - 1.0
    if e5 >= 0 and 2 * cM > 1:
        r5 = Threshold("R*5", math.inf, False,
                       f"224*alpha - 1 = {e5:g} >= 0 and 2*c(M0, c_*) = {2 * cM:g} > 1: "
                       "the first defining inequality fails at every radius")
    else:
        beta = 224.0 * alpha
        # c_M L^beta - alpha ln L has its minimum at L_min; it only increases past it
        L_min = (alpha / (cM * beta)) ** (1.0 / beta)
        h_min = cM * L_min**beta - alpha * math.log(L_min)

        def t5(ll):
            L = 0.5 * ll
            if L <= 0:
                return False
            first = math.log(2 * cM) + e5 * math.log(L) <= 0
            second = h_min >= 0 or (L >= L_min and cM * L**beta >= alpha * math.log(L))
            return first and second

        r5 = _threshold("R*5", t5)
        if r5.exists and r2.exists and r5.lnln < r2.lnln:
            r5 = Threshold("R*5", r2.lnln, True, "capped by R*2")
        elif r5.exists and not r2.exists:
            r5 = Threshold("R*5", math.inf, False, "R*2 does not exist")
    return {"R*1": r1, "R*2": r2, "R*3": r3, "R*4": r4, "R*5": r5}


# ---------------------------------------------------------------------------
# beta_0 chain


@dataclass(frozen=True)
class Beta0Bound:
    N: int
    theta_tilde: float
    ln_beta0: float          # term-by-term sum of the chain
    ln_bound_n41: float      # -N ln 6 - 2 c C^25 N^41 L(2R)^(25 alpha)
    ln_bound_final: float    # -c1(c_*) L^(239 alpha/3)
    ln_target: float         # -(1/2) ln ln(1/R)
    holds: bool              # ln_beta0 >= ln_target

    def to_dict(self) -> dict:
        return asdict(self)


def const_beta0_log(R: Optional[float], t_bar: Optional[float], theta: float,
                    gauge: GaugeParams, c: float = 1.0, *, lnln: Optional[float] = None,
                    tbar_ratio: Optional[float] = None, thresholds=None,
                    enforce: bool = True) -> Beta0Bound:
    """``N`` and the chained lower bound for ``ln beta_0``.

    ``N = floor((9/8) |t_bar| / (theta~ R^2)) + 1`` with
    ``theta~ = (c / g(4R/3))^(4/3)`` and
    ``ln beta_0 = sum_{i<N} (-ln 6 - c N^40 g^25(2 (1 - i/(3N)) R))``.
    Tiny radii may be passed as ``lnln = ln ln(1/R)`` with
    ``tbar_ratio = t_bar / R^2``.  With ``enforce`` the radius must lie at
    or below ``R*_2``; otherwise :class:`PreconditionError` names the
    violated threshold.
    """
    if lnln is None:
        lnln = lnln_of(R)
        if t_bar is None:
            raise DomainError("t_bar is required")
        tbar_ratio = t_bar / (R * R)
    elif tbar_ratio is None:
        raise DomainError("tbar_ratio is required with lnln")
    _positive(c=c)
    if not 0 < theta <= 1:
        raise DomainError(f"need 0 < theta <= 1, got {theta}")
    if not (-1 - 1e-12 <= tbar_ratio <= -theta + 1e-12):
        raise DomainError(f"need -R^2 <= t_bar <= -theta R^2, got t_bar/R^2 = {tbar_ratio}")
    if enforce:
        th = thresholds or const_thresholds(gauge, theta, c=c)
        for name in ("R*1", "R*3", "R*4"):
            if not th[name].admits(lnln):
                t = th[name]
                where = f"ln ln(1/R*) = {t.lnln:.6g}" if t.exists else "threshold does not exist"
                raise PreconditionError(
                    f"R above threshold {name} (R*2 = min of R*1, R*3, R*4): "
                    f"ln ln(1/R) = {lnln:.6g}, {where}")
    g43 = gauge_from_lnln(scale_lnln(lnln, 4.0 / 3.0), gauge)
    theta_t = (c / g43) ** (4.0 / 3.0)
    N = math.floor(9.0 / 8.0 * abs(tbar_ratio) / theta_t) + 1
    i = np.arange(N)
    radii_ll = np.array([scale_lnln(lnln, 2 * (1 - k / (3 * N))) for k in i])
    g25 = np.array([gauge_from_lnln(x, gauge) for x in radii_ll]) ** 25
    ln_beta0 = float(np.sum(-_LN6 - c * float(N) ** 40 * g25))
    C = max(1.0, gauge.c_star)
    L2 = 0.5 * scale_lnln(lnln, 2.0)
    Lr = 0.5 * lnln
    n41 = -N * _LN6 - 2 * c * C**25 * float(N) ** 41 * max(L2, 1.0) ** (25 * gauge.alpha)
    final = -beta0_prefactor(gauge, c) * max(Lr, 1.0) ** (239.0 * gauge.alpha / 3.0)
    target = -0.5 * lnln
    return Beta0Bound(int(N), theta_t, ln_beta0, n41, final, target, ln_beta0 >= target)


# ---------------------------------------------------------------------------
# hat beta_2


@dataclass(frozen=True)
class HatBeta2Bound:
    """``(ln 1/R)^(-1/2) ln ln^alpha sqrt(ln 1/R)`` with its logarithm."""

    value: float
    ln_value: float          # -inf when the bound is 0, NaN when it is negative
    degenerate: bool         # bound is 0 (alpha = 0 or L = 1)


def const_hatbeta2_bound(R: Optional[float], alpha: float, *, lnln: Optional[float] = None,
                         r5: Optional[Threshold] = None) -> HatBeta2Bound:
    """Lower bound for ``hat beta_2``; ``L = ln sqrt(ln 1/R)`` must be positive.

    Passing ``r5`` enforces ``R <= R*_5``.
    """
    if lnln is None:
        lnln = lnln_of(R)
    if alpha < 0:
        raise DomainError("alpha must be nonnegative")
    L = 0.5 * lnln
    if L <= 0:
        raise DomainError(f"ln sqrt(ln 1/R) = {L:.6g} is not positive")
    if r5 is not None and not r5.admits(lnln):
        raise PreconditionError(f"R above threshold R*5 ({r5.note or r5.lnln})")
    inner = alpha * math.log(L)
    ln_pref = -0.5 * lnln
    if inner == 0:
        return HatBeta2Bound(0.0, -math.inf, True)
    if inner < 0:
        return HatBeta2Bound(-math.exp(ln_pref) * -inner, math.nan, False)
    ln_value = ln_pref + math.log(inner)
    return HatBeta2Bound(math.exp(ln_value), ln_value, False)


# ---------------------------------------------------------------------------
# ledger


@dataclass(frozen=True)
class MoserInputs:
    tau1: float = 0.5
    tau: float = 1.0
    gamma1: float = 0.5
    gamma: float = 1.0
    theta: float = 1.0
    sigma_frac: float = 0.5
    delta0: float = 1.0
    delta1: float = 1.0 / 3.0
    mu1: float = 0.1
    M0: float = 2.0
    k_R: float = 1.0
    f2R: float = 0.0
    M2R: float = 0.0
    g2R: float = 1.0
    R: float = R_CAP
    c: float = 1.0
    gauge: GaugeParams = field(default_factory=GaugeParams)


@dataclass(frozen=True)
class MoserConstants:
    inputs: MoserInputs
    c1: float
    c1_prime: float
    mu_star: float
    kappa0: float
    delta0_out: float
    theta0: float
    s: int
    beta2_log2: float
    beta0_log: Optional[float]
    N: Optional[int]
    hatbeta2_ln: Optional[float]
    thresholds: dict
    notes: tuple = ()

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("c1", "c1_prime", "mu_star", "kappa0", "delta0_out",
                                            "theta0", "s", "beta2_log2", "beta0_log", "N",
                                            "hatbeta2_ln")}
        inp = asdict(self.inputs)
        d["inputs"] = inp
        d["thresholds"] = {k: t.to_dict() for k, t in self.thresholds.items()}
        d["notes"] = list(self.notes)
        d["log_space"] = ["beta2_log2", "beta0_log", "hatbeta2_ln"]
        return d


def moser_constants(inp: MoserInputs) -> MoserConstants:
    """Evaluate the whole ledger at one parameter tuple.

    ``beta0_log`` and ``hatbeta2_ln`` are ``None`` when ``R`` lies above the
    threshold their formulas need; the reason goes to ``notes``.
    """
    notes = []
    c1 = const_c1(inp.tau1, inp.tau, inp.gamma1, inp.gamma, inp.M2R, inp.c)
    c1p = const_c1_prime(inp.sigma_frac, inp.theta, inp.M2R, inp.c)
    mu = const_mu_star(c1)
    kappa0, delta0 = const_kappa0_delta0(inp.f2R, inp.M0, inp.c)
    theta0 = const_theta0(inp.delta0, inp.f2R, inp.c)
    s = const_s(inp.delta1, inp.mu1, theta0, inp.f2R, inp.c)
    b2 = const_beta2_log2(inp.sigma_frac, inp.g2R, inp.c).log2
    th = const_thresholds(inp.gauge, inp.theta, inp.M0, inp.c)
    b0 = N = None
    try:
        res = const_beta0_log(inp.R, -inp.R**2, inp.theta, inp.gauge, inp.c, thresholds=th)
        b0, N = res.ln_beta0, res.N
    except (PreconditionError, DomainError) as exc:
        notes.append(f"beta0: {exc}")
    hb = None
    try:
        hb = const_hatbeta2_bound(inp.R, inp.gauge.alpha, r5=th["R*5"]).ln_value
    except (PreconditionError, DomainError) as exc:
        notes.append(f"hatbeta2: {exc}")
    return MoserConstants(inp, c1, c1p, mu, kappa0, delta0, theta0, s, b2, b0, N, hb, th,
                          tuple(notes))
