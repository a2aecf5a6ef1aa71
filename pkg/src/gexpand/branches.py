"""The three closed-form branches of G'' + lambda G' + mu G = 0 and the
assembly of traveling-wave solutions u = c1 + sum a_k (G'/G)^k.

All evaluation is numeric (float64) and vectorized over arrays of xi.
Derivatives in xi come from :mod:`gexpand.jets`; partial derivatives in
x, y, t follow from the chain rule because xi is linear in them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import jets
from .jets import Jet

ZERO_BAND = 1e-12   # |Delta| at or below this selects the rational branch
POLE_TOL = 1e-10    # |den| / (|num| + |den|) below this counts as a pole

PROFILE_FOR_CASE = {"positive": "f", "negative": "g", "zero": "r"}
EXPECTED_DEGREE = {"burgers": 1, "kdv": 2, "kp": 2}


class PoleError(ArithmeticError):
    """Evaluation hit (or came within ``POLE_TOL`` of) a zero of G."""

    def __init__(self, message: str, den: float, location=None):
        super().__init__(message)
        self.den = den
        self.location = location


def _call(name: str, z):
    if isinstance(z, Jet):
        return getattr(jets, name)(z)
    return getattr(np, name)(z)


@dataclass(frozen=True)
class GBranch:
    lam: float
    mu: float
    k1: float
    k2: float

    def __post_init__(self):
        vals = (self.lam, self.mu, self.k1, self.k2)
        if not all(math.isfinite(float(v)) for v in vals):
            raise ValueError("GBranch parameters must be finite")
        if self.k1 == 0 and self.k2 == 0:
            raise ValueError("k1 and k2 cannot both vanish (G would be identically zero)")

    @property
    def delta(self) -> float:
        return self.lam * self.lam - 4.0 * self.mu

    @property
    def case(self) -> str:
        d = self.delta
        if abs(d) <= ZERO_BAND:
            return "zero"
        return "positive" if d > 0 else "negative"

    @property
    def theta(self) -> float:
        """Half the square root of |Delta| (0 in the rational case)."""
        return 0.0 if self.case == "zero" else math.sqrt(abs(self.delta)) / 2.0

    @property
    def profile(self) -> str:
        return PROFILE_FOR_CASE[self.case]

    def poles(self, lo: float, hi: float) -> np.ndarray:
        """Zeros of G (poles of G'/G) with lo <= xi <= hi, ascending."""
        k1, k2, th = self.k1, self.k2, self.theta
        case = self.case
        if case == "positive":
            if abs(k2) <= abs(k1):
                return np.empty(0)
            xs = np.array([math.atanh(-k1 / k2) / th])
        elif case == "zero":
            if k1 == 0:
                return np.empty(0)
            xs = np.array([-k2 / k1])
        else:
            base = math.pi / 2 if k2 == 0 else math.atan(-k1 / k2)
            n_lo = math.floor((lo * th - base) / math.pi)
            n_hi = math.ceil((hi * th - base) / math.pi)
            xs = (base + math.pi * np.arange(n_lo, n_hi + 1)) / th
        return xs[(xs >= lo) & (xs <= hi)]


def _profile(g: GBranch, kind: str, xi):
    """Profile ``kind`` at ``xi`` (array or Jet) plus normalized denominator values."""
    case = g.case
    if kind != "w" and kind != PROFILE_FOR_CASE[case]:
        raise ValueError(f"profile {kind!r} does not exist for the {case} discriminant case")
    k1, k2, th = g.k1, g.k2, g.theta
    if case == "positive" and abs(k1) == abs(k2):
        # G is a pure exponential and f is the constant k2/k1.
        num, den = k2 / k1 + 0.0 * xi, 1.0 + 0.0 * xi
    elif case == "positive":
        # (k1 sinh z + k2 cosh z)/(k1 cosh z + k2 sinh z) rewritten with
        # E = exp(-2|z|) <= 1, which avoids the 1 + tanh z cancellation.
        z = xi * th
        pos = np.asarray(_value(z)) >= 0
        E = _call("exp", z * np.where(pos, -2.0, 2.0))
        num = E * np.where(pos, k2 - k1, k1 + k2) + np.where(pos, k1 + k2, k2 - k1)
        den = E * np.where(pos, k1 - k2, k1 + k2) + np.where(pos, k1 + k2, k1 - k2)
    elif case == "negative":
        c, s = _call("cos", xi * th), _call("sin", xi * th)
        num, den = -k1 * s + k2 * c, k1 * c + k2 * s
    else:
        num, den = k1 + 0.0 * xi, k1 * xi + k2
    num_value = np.asarray(_value(num), dtype=float)
    den_value = np.asarray(_value(den), dtype=float)
    # Relative to the numerator, so a G that merely decays (k1 = k2) is not
    # mistaken for a zero of G.
    den_norm = den_value / (np.abs(num_value) + np.abs(den_value))
    den_norm = np.broadcast_to(den_norm, np.shape(_value(xi)))
    near = np.abs(den_norm) < POLE_TOL
    if np.any(near):
        # Keep the arithmetic finite; callers mask these points out.
        den = den + np.where(near, 1.0, 0.0)
    prof = num / den
    if kind == "w":
        prof = (prof * th if case != "zero" else prof) + (-g.lam / 2.0)
    return prof, den_norm


def _value(z):
    return z.value if isinstance(z, Jet) else z


def profile_jet(g: GBranch, kind: str, xi, order: int) -> tuple[Jet, np.ndarray]:
    """Jet of profile ``kind`` (w, f, g or r) at each xi plus normalized denominators.

    Points whose |den| is below ``POLE_TOL`` carry meaningless jets; use the
    returned denominators to mask them.
    """
    z = Jet.variable(np.asarray(xi, dtype=float), order)
    return _profile(g, kind, z)


def profile_value(g: GBranch, kind: str, xi) -> tuple[np.ndarray, np.ndarray]:
    """Plain numpy values of a profile; same masking convention as :func:`profile_jet`."""
    vals, den = _profile(g, kind, np.asarray(xi, dtype=float))
    return np.asarray(vals, dtype=float), den


def eval_w_jet(g: GBranch, xi: float, order: int) -> Jet:
    """Taylor jet of w = G'/G at a single point; raises PoleError at a pole."""
    xi = float(xi)
    jet, den = profile_jet(g, "w", xi, order)
    if abs(float(den)) < POLE_TOL:
        raise PoleError(f"G vanishes at xi={xi!r}", float(den), location=(xi,))
    return jet


def eval_G(g: GBranch, xi):
    k1, k2, th, lam = g.k1, g.k2, g.theta, g.lam
    xi = np.asarray(xi, dtype=float)
    damp = np.exp(-lam / 2.0 * xi)
    if g.case == "positive":
        out = damp * (k1 * np.cosh(th * xi) + k2 * np.sinh(th * xi))
    elif g.case == "negative":
        out = damp * (k1 * np.cos(th * xi) + k2 * np.sin(th * xi))
    else:
        out = damp * (k1 * xi + k2)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class AssembledSolution:
    """u = sum coeffs[k] * P(xi)^k with xi = cx*x + cy*y + ct*t.

    ``profile`` names the variable P: ``"w"`` for G'/G itself, or one of the
    printed building blocks f, g, r.  For ``"w"``, ``coeffs`` are a0..am and
    ``c1`` is added to the constant term.
    """

    equation: str
    coeffs: tuple[float, ...]
    gbranch: GBranch
    wave: tuple[float, float, float]
    c1: float = 0.0
    profile: str = "w"
    label: str = ""

    def __post_init__(self):
        m = EXPECTED_DEGREE.get(self.equation)
        if m is None:
            raise ValueError(f"unknown equation {self.equation!r}")
        if len(self.coeffs) != m + 1:
            raise ValueError(f"{self.equation} solutions have degree {m}, got {len(self.coeffs) - 1}")
        if len(self.wave) != 3:
            raise ValueError("wave must be (cx, cy, ct)")

    @property
    def poly(self) -> tuple[float, ...]:
        c = list(self.coeffs)
        c[0] = c[0] + self.c1
        return tuple(c)


@dataclass(frozen=True)
class SolutionMap:
    """Evaluable form of an :class:`AssembledSolution`."""

    family: AssembledSolution
    _poly: tuple = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_poly", self.family.poly)

    @property
    def wave(self) -> tuple[float, float, float]:
        return self.family.wave

    def xi(self, x, t, y=0.0):
        cx, cy, ct = self.family.wave
        return cx * np.asarray(x, dtype=float) + cy * np.asarray(y, dtype=float) + ct * np.asarray(t, dtype=float)

    def xi_jet(self, xi, order: int) -> tuple[Jet, np.ndarray]:
        """Jet of u in xi at each point plus a boolean mask of valid (non-pole) points."""
        prof, den = profile_jet(self.family.gbranch, self.family.profile, xi, order)
        u = Jet.constant(self._poly[-1], order, np.shape(xi))
        for c in reversed(self._poly[:-1]):
            u = u * prof + c
        return u, np.abs(den) >= POLE_TOL

    def values(self, x, t, y=0.0) -> tuple[np.ndarray, np.ndarray]:
        xi = self.xi(x, t, y)
        prof, den = profile_value(self.family.gbranch, self.family.profile, xi)
        u = np.zeros_like(prof) + self._poly[-1]
        for c in reversed(self._poly[:-1]):
            u = u * prof + c
        return u, np.abs(den) >= POLE_TOL

    def partial(self, x, t, y=0.0, nx: int = 0, ny: int = 0, nt: int = 0):
        """Mixed partial d^(nx+ny+nt) u / dx^nx dy^ny dt^nt and the validity mask."""
        if max(nx, ny, nt) > 4:
            raise ValueError("partials are supported up to order 4 in each coordinate")
        n = nx + ny + nt
        cx, cy, ct = self.family.wave
        u, ok = self.xi_jet(self.xi(x, t, y), n)
        return (cx ** nx) * (cy ** ny) * (ct ** nt) * u.derivative(n), ok

    def __call__(self, x: float, t: float, y: float = 0.0) -> float:
        u, ok = self.values(x, t, y)
        if not bool(ok):
            xi = float(self.xi(x, t, y))
            _, den = profile_value(self.family.gbranch, self.family.profile, xi)
            loc = (x, t) if self.family.equation != "kp" else (x, y, t)
            raise PoleError(f"pole of the solution at {loc} (xi={xi:.6g})", float(den), location=loc)
        return float(u)


def assemble_u(family: AssembledSolution) -> SolutionMap:
    return SolutionMap(family)
