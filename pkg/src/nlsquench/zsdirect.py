"""Numerical direct scattering for the 2x2 auxiliary problem

    Psi_x = (-i k sigma3 + W(x)) Psi,   W = c [[0, q], [q*, 0]].

The transfer matrix is integrated in the frame of the left asymptotic
solution, so the oscillating factors e^{+-2i mu x} sit inside the coupling
terms and fixed-step RK4 stays accurate.  The same machinery provides the
analytic continuation of a(k) into the upper half-plane (as a determinant
of the two decaying Jost columns) and an argument-principle search for its
zeros.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import (
    Coupling,
    DiscreteEigenvalue,
    FieldProfile,
    FiniteDensity,
    KGrid,
    NlsQuenchError,
    ScatteringData,
    Schwartz,
    trapezoid_weights,
)


class BranchPoint(NlsQuenchError):
    pass


class IntegratorDiverged(NlsQuenchError):
    pass


class DeterminantDrift(NlsQuenchError):
    pass


class ContourThroughZero(NlsQuenchError):
    pass


class NewtonStalled(NlsQuenchError):
    pass


class DivisionByZeroA(NlsQuenchError):
    pass


class UnsupportedAsymptotics(NlsQuenchError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings.

    step=None integrates on the profile grid itself; otherwise step must
    divide the profile spacing evenly and the samples are refined by cubic
    interpolation.  refinement_factor is used by self-convergence checks.
    """

    scheme: str = "rk4"
    step: Optional[float] = None
    refinement_factor: int = 2
    det_guard: float = 1e-4

    def __post_init__(self):
        if self.scheme != "rk4":
            raise NlsQuenchError("only the fixed-step rk4 scheme is implemented")
        if self.refinement_factor < 2:
            raise NlsQuenchError("refinement_factor must be >= 2")

    def substeps(self, h: float) -> int:
        if self.step is None:
            return 1
        m = h / self.step
        mi = int(round(m))
        if mi < 1 or abs(m - mi) > 1e-9:
            raise NlsQuenchError(
                f"integrator step {self.step} must divide the grid spacing {h}"
            )
        return mi


DEFAULT_INTEGRATOR = IntegratorConfig()


# ---------------------------------------------------------------------------
# cubic resampling (4-point Lagrange, ends padded with the asymptotic value)

def _cubic_refine(values: np.ndarray, m: int, left_pad: complex, right_pad: complex) -> np.ndarray:
    """Values on the m-fold refined grid, (n-1)*m + 1 points."""
    if m == 1:
        return np.asarray(values, dtype=np.complex128)
    v = np.empty(len(values) + 2, dtype=np.complex128)
    v[1:-1] = values
    v[0] = left_pad
    v[-1] = right_pad
    n = len(values)
    out = np.empty((n - 1) * m + 1, dtype=np.complex128)
    out[::m] = values
    f0 = v[:-3]  # node i-1
    f1 = v[1:-2]  # node i
    f2 = v[2:-1]  # node i+1
    f3 = v[3:]  # node i+2
    for j in range(1, m):
        t = j / m
        w0 = -t * (t - 1.0) * (t - 2.0) / 6.0
        w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0
        w2 = -(t + 1.0) * t * (t - 2.0) / 2.0
        w3 = (t + 1.0) * t * (t - 1.0) / 6.0
        out[j::m] = w0 * f0 + w1 * f1 + w2 * f2 + w3 * f3
    return out


def _working_samples(p: FieldProfile, cfg: IntegratorConfig):
    """(x nodes, node values, midpoint values, spacing) for the integrator."""
    m = cfg.substeps(p.h)
    left, right = p.edge_values()
    fine = _cubic_refine(p.values, 2 * m, left, right)
    nodes = fine[::2]
    mids = fine[1::2]
    h = p.h / m
    xs = p.x[0] + h * np.arange(len(nodes))
    return xs, nodes, mids, h


def _support_bounds(p: FieldProfile, rel_tol: float = 1e-14):
    """Node indices (lo, hi) outside of which the field sits on its
    asymptotic background to within rel_tol of the overall deviation; the
    transfer matrix is constant there, so integration may skip the tails."""
    left, right = p.edge_values()
    dev_l = np.abs(p.values - left)
    dev_r = np.abs(p.values - right)
    scale = max(float(dev_l.max()), float(dev_r.max()), 1e-300)
    inside_l = np.nonzero(dev_l > rel_tol * scale)[0]
    inside_r = np.nonzero(dev_r > rel_tol * scale)[0]
    if len(inside_l) == 0 and len(inside_r) == 0:
        mid = len(p.values) // 2
        return mid, mid
    lo = int(inside_l[0]) if len(inside_l) else int(inside_r[0])
    hi = int(inside_r[-1]) if len(inside_r) else int(inside_l[-1])
    lo = max(0, min(lo, hi) - 2)
    hi = min(len(p.values) - 1, max(lo, hi) + 2)
    return lo, hi


# ---------------------------------------------------------------------------
# asymptotic frames

@dataclass(frozen=True)
class AsymptoticFrame:
    """Diagonalisation of the constant-background problem at one k:
    E_pm(x) = P_pm exp(-i mu x sigma3) solves E_x + (i k sigma3 - W_pm) E = 0."""

    k: complex
    mu: complex
    p_plus: np.ndarray
    p_minus: np.ndarray

    @property
    def lam_plus(self) -> np.ndarray:
        return np.diag([self.mu, -self.mu])

    @property
    def lam_minus(self) -> np.ndarray:
        return self.lam_plus

    def E(self, x: float, side: str) -> np.ndarray:
        p = self.p_plus if side == "+" else self.p_minus
        return p @ np.diag([np.exp(-1j * self.mu * x), np.exp(1j * self.mu * x)])

    def ode_residual(self, x: float, side: str, c: Coupling, asym) -> float:
        """max |E_x + (ik sigma3 - W_pm) E| via an exact derivative."""
        p = self.p_plus if side == "+" else self.p_minus
        d = np.diag([np.exp(-1j * self.mu * x), np.exp(1j * self.mu * x)])
        e = p @ d
        ex = p @ (np.diag([-1j * self.mu, 1j * self.mu]) @ d)
        w = _background_w(c, asym, side)
        res = ex + (1j * self.k * np.diag([1.0, -1.0]) - w) @ e
        return float(np.max(np.abs(res)))


def _background_w(c: Coupling, asym, side: str) -> np.ndarray:
    if isinstance(asym, Schwartz):
        return np.zeros((2, 2), dtype=np.complex128)
    rho, theta = asym.rho, asym.theta
    edge = rho * np.exp(1j * theta) if side == "+" else rho
    return c.value * np.array([[0.0, edge], [np.conj(edge), 0.0]])


def _mu_branch(c: Coupling, asym, k):
    """mu with mu^2 = k^2 - c^2 rho^2, cut along the segment joining the
    branch points +-c rho; on the allowed real rays mu ~ k at +-infinity in
    the gapped case and mu = +sqrt(k^2 + |c|^2 rho^2) in the focusing one."""
    k = np.asarray(k, dtype=np.complex128)
    if isinstance(asym, Schwartz):
        return k.copy()
    s = c.value * asym.rho
    return np.sqrt(k - s) * np.sqrt(k + s)


def asymptotic_frame(c: Coupling, asymptotics, k: complex,
                     branch_tol: float = 1e-9) -> AsymptoticFrame:
    """Frame matrices at one spectral point (complex k allowed)."""
    k = complex(k)
    if isinstance(asymptotics, Schwartz):
        eye = np.eye(2, dtype=np.complex128)
        return AsymptoticFrame(k=k, mu=k, p_plus=eye, p_minus=eye)
    mu = complex(_mu_branch(c, asymptotics, k))
    if abs(mu) < branch_tol * (1.0 + abs(k)):
        raise BranchPoint(f"k = {k} sits at a branch point of mu")
    rho, theta = asymptotics.rho, asymptotics.theta
    beta = 1j * (mu - k) / (c.value * rho)
    p_minus = np.array([[1.0, beta], [-beta, 1.0]], dtype=np.complex128)
    p_plus = np.diag([np.exp(1j * theta / 2), np.exp(-1j * theta / 2)]) @ p_minus
    return AsymptoticFrame(k=k, mu=mu, p_plus=p_plus, p_minus=p_minus)


def _frame_arrays(c: Coupling, asym, k: np.ndarray):
    """Vectorised frame pieces: mu (nk,), P-, P-^{-1}, P-^{-1} P+ (nk,2,2)."""
    nk = len(k)
    mu = _mu_branch(c, asym, k)
    if isinstance(asym, Schwartz):
        eye = np.broadcast_to(np.eye(2, dtype=np.complex128), (nk, 2, 2))
        return mu, eye, eye, eye
    if np.any(np.abs(mu) < 1e-9 * (1.0 + np.abs(k))):
        raise BranchPoint("spectral sample at a branch point of mu")
    rho, theta = asym.rho, asym.theta
    beta = 1j * (mu - k) / (c.value * rho)
    det = 1.0 + beta ** 2
    pm = np.zeros((nk, 2, 2), dtype=np.complex128)
    pm[:, 0, 0] = 1.0
    pm[:, 0, 1] = beta
    pm[:, 1, 0] = -beta
    pm[:, 1, 1] = 1.0
    pmi = np.zeros_like(pm)
    pmi[:, 0, 0] = 1.0 / det
    pmi[:, 0, 1] = -beta / det
    pmi[:, 1, 0] = beta / det
    pmi[:, 1, 1] = 1.0 / det
    phase = np.exp(1j * theta / 2)
    pp = pm.copy()
    pp[:, 0, :] *= phase
    pp[:, 1, :] *= np.conj(phase)
    return mu, pm, pmi, pmi @ pp


# ---------------------------------------------------------------------------
# transfer-matrix pass

def _transfer_pass(p: FieldProfile, c: Coupling, k: np.ndarray,
                   cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
                   collect: bool = False):
    """Integrate Y' = G(x) Y from the right end down to the left end, where
    Y = E_-^{-1} Psi+ and G = E_-^{-1} (W - W_-) E_-.

    Returns (S, trajectory) with S = Y(left end) of shape (nk, 2, 2);
    trajectory is Psi+ on the working grid when collect=True.
    """
    k = np.atleast_1d(np.asarray(k, dtype=np.complex128))
    nk = len(k)
    xs, q_nodes, q_mids, h = _working_samples(p, cfg)
    mu, pm, pmi, seed_core = _frame_arrays(c, p.asymptotics, k)

    q_left, q_right = p.edge_values()
    d1_nodes = c.value * (q_nodes - q_left)
    d2_nodes = c.value * (np.conj(q_nodes) - np.conj(q_left))
    d1_mids = c.value * (q_mids - q_left)
    d2_mids = c.value * (np.conj(q_mids) - np.conj(q_left))

    # A = P^{-1} [[0,1],[0,0]] P, B = P^{-1} [[0,0],[1,0]] P (per k)
    e12 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)
    e21 = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=np.complex128)
    A = pmi @ e12 @ pm
    B = pmi @ e21 @ pm

    # oscillation factors at nodes and midpoints
    x_all = np.empty(2 * len(xs) - 1)
    x_all[::2] = xs
    x_all[1::2] = 0.5 * (xs[:-1] + xs[1:])
    ph = np.exp(2j * np.outer(x_all, mu))  # e^{+2 i mu x}
    phm = np.exp(-2j * np.outer(x_all, mu))

    def gmat(d1, d2, idx):
        g = d1 * A + d2 * B
        g[:, 0, 1] *= ph[idx]
        g[:, 1, 0] *= phm[idx]
        return g

    def seed_at(node):
        # on the right tail Psi+ equals its frame, so Y = E_-^{-1} E_+ there
        y0 = seed_core.copy()
        y0[:, 0, 1] *= ph[2 * node]
        y0[:, 1, 0] *= phm[2 * node]
        return y0

    n = len(xs)
    m = cfg.substeps(p.h)
    if collect:
        j_hi, j_lo = n - 1, 0
    else:
        lo, hi = _support_bounds(p)
        j_lo, j_hi = lo * m, hi * m
    y = seed_at(j_hi)

    traj = None
    if collect:
        traj = np.empty((n, nk, 2, 2), dtype=np.complex128)
        traj[n - 1] = y

    s = -h
    for j in range(j_hi, j_lo, -1):
        g_hi = gmat(d1_nodes[j], d2_nodes[j], 2 * j)
        g_md = gmat(d1_mids[j - 1], d2_mids[j - 1], 2 * j - 1)
        g_lo = gmat(d1_nodes[j - 1], d2_nodes[j - 1], 2 * (j - 1))
        k1 = g_hi @ y
        k2 = g_md @ (y + (0.5 * s) * k1)
        k3 = g_md @ (y + (0.5 * s) * k2)
        k4 = g_lo @ (y + s * k3)
        y = y + (s / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if collect:
            traj[j - 1] = y
    if not np.isfinite(y).all():
        raise IntegratorDiverged("transfer-matrix pass produced non-finite values")

    if collect:
        # Psi+ = E_-(x) Y(x) = P_- diag(e^{-i mu x}, e^{i mu x}) Y(x)
        em = np.exp(-1j * np.outer(xs, mu))  # (n, nk)
        psi = np.empty_like(traj)
        psi[:, :, 0, :] = em[:, :, None] * traj[:, :, 0, :]
        psi[:, :, 1, :] = (1.0 / em)[:, :, None] * traj[:, :, 1, :]
        psi = pm[None, :, :, :] @ psi
        return y, (xs, psi)
    return y, None


@dataclass(frozen=True)
class JostSolution:
    """Psi+(x, k) sampled on the integrator grid."""

    x: np.ndarray
    samples: np.ndarray  # (n, 2, 2)
    k: complex
    side: str = "+"

    def det_drift(self) -> float:
        det = (self.samples[:, 0, 0] * self.samples[:, 1, 1]
               - self.samples[:, 0, 1] * self.samples[:, 1, 0])
        return float(np.max(np.abs(det - det[0])))


def jost_plus(p: FieldProfile, c: Coupling, k: float,
              cfg: IntegratorConfig = DEFAULT_INTEGRATOR) -> JostSolution:
    """Jost solution normalised to the right asymptotic frame, integrated
    down to the left end of the grid."""
    _, out = _transfer_pass(p, c, np.array([k]), cfg, collect=True)
    xs, psi = out
    return JostSolution(x=xs, samples=psi[:, 0], k=complex(k))


def scattering_matrix(p: FieldProfile, c: Coupling, k: float,
                      cfg: IntegratorConfig = DEFAULT_INTEGRATOR) -> np.ndarray:
    """S(k) = lim_{x -> left end} E_-^{-1}(x) Psi+(x); det S = 1 up to
    integrator drift (trace-free generator)."""
    s, _ = _transfer_pass(p, c, np.array([k]), cfg)
    s = s[0]
    drift = abs(s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0] - 1.0)
    if drift > cfg.det_guard:
        raise DeterminantDrift(f"det S drifted by {drift:.3e}")
    return s


def scattering_batch(p: FieldProfile, c: Coupling, k: Sequence[float],
                     cfg: IntegratorConfig = DEFAULT_INTEGRATOR) -> np.ndarray:
    """Vectorised scattering matrices, shape (nk, 2, 2)."""
    s, _ = _transfer_pass(p, c, np.asarray(k, dtype=float), cfg)
    det = s[:, 0, 0] * s[:, 1, 1] - s[:, 0, 1] * s[:, 1, 0]
    drift = float(np.max(np.abs(det - 1.0)))
    if drift > cfg.det_guard:
        raise DeterminantDrift(f"det S drifted by {drift:.3e}")
    return s


# ---------------------------------------------------------------------------
# analytic continuation and the discrete spectrum (rapidly decreasing case)

def _require_schwartz(p: FieldProfile, what: str):
    if not isinstance(p.asymptotics, Schwartz):
        raise UnsupportedAsymptotics(
            f"{what} is implemented for rapidly decreasing profiles only"
        )


def _columns_meet(p: FieldProfile, c: Coupling, k: np.ndarray,
                  cfg: IntegratorConfig = DEFAULT_INTEGRATOR):
    """Gauge-removed Jost columns R (from the left) and L (from the right),
    each integrated in its decaying direction, met at the central node.

    R solves R1' = d1 R2, R2' = 2ik R2 + d2 R1 with R(-L) = (1, 0);
    L solves L1' = -2ik L1 + d1 L2, L2' = d2 L1 with L(+L) = (0, 1).
    """
    k = np.atleast_1d(np.asarray(k, dtype=np.complex128))
    xs, q_nodes, q_mids, h = _working_samples(p, cfg)
    n = len(xs)
    imeet = n // 2
    m = cfg.substeps(p.h)
    lo, hi = _support_bounds(p)
    j_lo = min(lo * m, imeet)
    j_hi = max(hi * m, imeet)
    d1n = c.value * q_nodes
    d2n = c.value * np.conj(q_nodes)
    d1m = c.value * q_mids
    d2m = c.value * np.conj(q_mids)
    tik = 2j * k

    # the columns sit on their plane-wave seeds until the field switches on
    r1 = np.ones_like(k)
    r2 = np.zeros_like(k)

    def r_rhs(x, a1, a2, u1, u2):
        return a1 * u2, tik * u2 + a2 * u1

    def l_rhs(x, a1, a2, u1, u2):
        return -tik * u1 + a1 * u2, a2 * u1

    # overflow is diagnosed by the isfinite check below, not by numpy noise
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(j_lo, imeet):
            xj = xs[j]
            f11, f12 = r_rhs(xj, d1n[j], d2n[j], r1, r2)
            f21, f22 = r_rhs(xj + h / 2, d1m[j], d2m[j], r1 + h / 2 * f11, r2 + h / 2 * f12)
            f31, f32 = r_rhs(xj + h / 2, d1m[j], d2m[j], r1 + h / 2 * f21, r2 + h / 2 * f22)
            f41, f42 = r_rhs(xj + h, d1n[j + 1], d2n[j + 1], r1 + h * f31, r2 + h * f32)
            r1 = r1 + h / 6 * (f11 + 2 * f21 + 2 * f31 + f41)
            r2 = r2 + h / 6 * (f12 + 2 * f22 + 2 * f32 + f42)

        l1 = np.zeros_like(k)
        l2 = np.ones_like(k)

        for j in range(j_hi, imeet, -1):
            xj = xs[j]
            f11, f12 = l_rhs(xj, d1n[j], d2n[j], l1, l2)
            f21, f22 = l_rhs(xj - h / 2, d1m[j - 1], d2m[j - 1], l1 - h / 2 * f11, l2 - h / 2 * f12)
            f31, f32 = l_rhs(xj - h / 2, d1m[j - 1], d2m[j - 1], l1 - h / 2 * f21, l2 - h / 2 * f22)
            f41, f42 = l_rhs(xj - h, d1n[j - 1], d2n[j - 1], l1 - h * f31, l2 - h * f32)
            l1 = l1 - h / 6 * (f11 + 2 * f21 + 2 * f31 + f41)
            l2 = l2 - h / 6 * (f12 + 2 * f22 + 2 * f32 + f42)

    if not (np.isfinite(r1).all() and np.isfinite(l1).all()
            and np.isfinite(r2).all() and np.isfinite(l2).all()):
        raise IntegratorDiverged("Jost column integration produced non-finite values")
    return (r1, r2), (l1, l2)


def analytic_continue_a(p: FieldProfile, c: Coupling, k,
                        cfg: IntegratorConfig = DEFAULT_INTEGRATOR):
    """a(k) = det(R, L) for Im k >= 0, from the two Jost columns that stay
    bounded in the upper half-plane (scalar in, scalar out; arrays pass
    through vectorised)."""
    _require_schwartz(p, "analytic continuation of a")
    scalar = np.isscalar(k) or np.ndim(k) == 0
    (r1, r2), (l1, l2) = _columns_meet(p, c, k, cfg)
    a = r1 * l2 - r2 * l1
    return complex(a[0]) if scalar else a


def norming_constant(p: FieldProfile, c: Coupling, k0: complex,
                     cfg: IntegratorConfig = DEFAULT_INTEGRATOR) -> complex:
    """Proportionality b0 between the two bounded columns at a zero of a,
    evaluated at the central node (L = b0 R there)."""
    _require_schwartz(p, "norming constant extraction")
    (r1, r2), (l1, l2) = _columns_meet(p, c, np.array([k0]), cfg)
    if abs(r1[0]) >= abs(r2[0]):
        return complex(l1[0] / r1[0])
    return complex(l2[0] / r2[0])


def _wrap_phase(d):
    return (d + np.pi) % (2.0 * np.pi) - np.pi


def _contour_winding(p, c, rect, cfg, n0=24, max_refine=7):
    """Winding number of a(k) along the rectangle boundary."""
    x0, x1, y0, y1 = rect
    corners = [x0 + 1j * y0, x1 + 1j * y0, x1 + 1j * y1, x0 + 1j * y1, x0 + 1j * y0]
    pts: List[complex] = []
    for a_, b_ in zip(corners[:-1], corners[1:]):
        seg = a_ + (b_ - a_) * np.arange(n0) / n0
        pts.extend(seg.tolist())
    pts.append(corners[0])
    pts = np.asarray(pts, dtype=complex)
    vals = analytic_continue_a(p, c, pts, cfg)

    for _ in range(max_refine):
        scale = np.median(np.abs(vals))
        if np.min(np.abs(vals)) < max(1e-13, 1e-6 * scale):
            raise ContourThroughZero("a(k) vanishes on the contour")
        dph = _wrap_phase(np.diff(np.angle(vals)))
        bad = np.abs(dph) > 0.75 * np.pi
        if not bad.any():
            total = float(np.sum(dph))
            w = int(round(total / (2.0 * np.pi)))
            if abs(total / (2.0 * np.pi) - w) > 0.2:
                raise ContourThroughZero("winding number did not settle")
            return w
        idx = np.nonzero(bad)[0]
        new_pts = 0.5 * (pts[idx] + pts[idx + 1])
        new_vals = analytic_continue_a(p, c, new_pts, cfg)
        pts = np.insert(pts, idx + 1, new_pts)
        vals = np.insert(vals, idx + 1, new_vals)
    raise ContourThroughZero("contour refinement limit reached")


def _winding_with_retry(p, c, rect, cfg, tries=4):
    x0, x1, y0, y1 = rect
    for t in range(tries):
        try:
            return _contour_winding(p, c, (x0, x1, y0, y1), cfg), (x0, x1, y0, y1)
        except ContourThroughZero:
            # nudge the box; keep it in the open upper half-plane
            dx = 7.3e-3 * (t + 1) * max(x1 - x0, 1e-3)
            dy = 5.1e-3 * (t + 1) * max(y1 - y0, 1e-3)
            x0, x1 = x0 - dx, x1 + dx
            y0, y1 = max(y0 - dy, 0.3 * y0 + 1e-6), y1 + dy
    raise ContourThroughZero(f"could not place a clean contour around {rect}")


def _newton_zero(p, c, k_init, cfg, tol=1e-11, max_iter=60):
    k = complex(k_init)
    for _ in range(max_iter):
        d = 1e-5 * (1.0 + abs(k))
        a0, ap, am = analytic_continue_a(p, c, np.array([k, k + d, k - d]), cfg)
        da = (ap - am) / (2.0 * d)
        if abs(da) < 1e-14:
            raise NewtonStalled(f"flat derivative of a near k = {k}")
        step = a0 / da
        k = k - step
        if k.imag <= 0:
            k = complex(k.real, max(1e-8, -0.1 * k.imag))
        if abs(step) < tol * (1.0 + abs(k)):
            return k
    raise NewtonStalled(f"Newton did not converge from {k_init}")


def _decimated(p: FieldProfile, target_h: float = 0.045) -> FieldProfile:
    """Coarsened copy for winding-number passes (phase tracking only needs
    a few digits of a(k); Newton polishing runs on the full profile)."""
    best = 1
    for m in (6, 5, 4, 3, 2):
        if (p.n - 1) % m == 0 and p.h * m <= target_h:
            best = m
            break
    if best == 1:
        return p
    return FieldProfile(L=p.L, h=p.h * best, values=p.values[::best],
                        asymptotics=p.asymptotics, boundary_tol=p.boundary_tol)


def find_zeros(p: FieldProfile, c: Coupling,
               region: Tuple[float, float, float, float],
               cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
               with_norming: bool = True,
               _box_size: float = 0.05) -> List[DiscreteEigenvalue]:
    """Zeros of a(k) inside a rectangle strictly above the real axis.

    The count comes from the argument principle on recursively subdivided
    rectangles; positions are polished by Newton iteration with a central
    finite-difference derivative, and the reported order is the winding
    count of the isolating box.
    """
    _require_schwartz(p, "zero search")
    x0, x1, y0, y1 = region
    if not (y0 > 0 and y1 > y0 and x1 > x0):
        raise NlsQuenchError("region must be a rectangle strictly inside Im k > 0")

    found: List[Tuple[complex, int]] = []
    p_wind = _decimated(p)
    wind_cfg = DEFAULT_INTEGRATOR

    def recurse(rect, depth):
        w, rect = _winding_with_retry(p_wind, c, rect, wind_cfg)
        if w == 0:
            return
        rx0, rx1, ry0, ry1 = rect
        if max(rx1 - rx0, ry1 - ry0) < _box_size or depth > 40:
            k_star = _newton_zero(p, c, complex(0.5 * (rx0 + rx1), 0.5 * (ry0 + ry1)), cfg)
            found.append((k_star, w))
            return
        if (rx1 - rx0) >= (ry1 - ry0):
            xm = 0.5 * (rx0 + rx1)
            recurse((rx0, xm, ry0, ry1), depth + 1)
            recurse((xm, rx1, ry0, ry1), depth + 1)
        else:
            ym = 0.5 * (ry0 + ry1)
            recurse((rx0, rx1, ry0, ym), depth + 1)
            recurse((rx0, rx1, ym, ry1), depth + 1)

    recurse((x0, x1, y0, y1), 0)

    # merge duplicates (Newton can land on the same root from two boxes)
    merged: List[Tuple[complex, int]] = []
    for k_star, w in sorted(found, key=lambda t: (t[0].real, t[0].imag)):
        for i, (k_old, w_old) in enumerate(merged):
            if abs(k_star - k_old) < 1e-7 * (1.0 + abs(k_star)):
                merged[i] = (k_old, max(w_old, w))
                break
        else:
            merged.append((k_star, w))

    out = []
    for k_star, order in merged:
        if k_star.imag < 1e-4:
            warnings.warn(f"zero at {k_star} lies within 1e-4 of the real axis")
        norm = norming_constant(p, c, k_star, cfg) if with_norming else None
        out.append(DiscreteEigenvalue(position=k_star, order=order, norming=norm))
    return out


# ---------------------------------------------------------------------------
# batch driver

def default_zero_region(p: FieldProfile, c: Coupling, kgrid: KGrid,
                        axis_floor: float = 1e-2) -> Tuple[float, float, float, float]:
    """Search box covering every possible bound state: eigenvalue heights
    are bounded by the sup of the potential, Im k0 <= |c| max|q|."""
    kmax = float(np.max(np.abs(kgrid.samples)))
    bound = abs(c.value) * float(np.max(np.abs(p.values)))
    return (-kmax, kmax, axis_floor, 1.05 * bound + 0.1)


def scatter_grid(p: FieldProfile, c: Coupling, kgrid: KGrid,
                 cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
                 find_discrete: Optional[bool] = None,
                 zero_region: Optional[Tuple[float, float, float, float]] = None,
                 ) -> ScatteringData:
    """a(k), b(k) on the grid plus the discrete spectrum.

    The zero search runs by default only where bound states can exist
    (focusing coupling, rapidly decreasing profile); pass find_discrete to
    override.
    """
    p.validate()
    s = scattering_batch(p, c, kgrid.samples, cfg)
    a = s[:, 1, 1]
    b = s[:, 0, 1]
    if find_discrete is None:
        find_discrete = (c.regime == "focusing") and isinstance(p.asymptotics, Schwartz)
    zeros: List[DiscreteEigenvalue] = []
    if find_discrete:
        region = zero_region or default_zero_region(p, c, kgrid)
        zeros = find_zeros(p, c, region, cfg)
    return ScatteringData(kgrid=kgrid, a=a, b=b, discrete=tuple(zeros), coupling=c)


def reflection(sd: ScatteringData, k: float) -> complex:
    """rho(k) = b(k)/a(k), linear interpolation between grid nodes."""
    ks = sd.kgrid.samples
    if k < ks[0] or k > ks[-1]:
        raise NlsQuenchError(f"k = {k} is outside the sampled spectral window")
    i = int(np.searchsorted(ks, k))
    if i < len(ks) and ks[i] == k:
        lo = hi = i
        t = 0.0
    else:
        hi = i
        lo = i - 1
        t = (k - ks[lo]) / (ks[hi] - ks[lo])
    for j in (lo, hi):
        if abs(sd.a[j]) < 1e-13:
            raise DivisionByZeroA(f"a vanishes at grid node k = {ks[j]}")
    rho = sd.b / sd.a
    return complex((1.0 - t) * rho[lo] + t * rho[hi])


def radiative_weights(kgrid: KGrid) -> np.ndarray:
    """Trapezoid weights respecting a gapped grid."""
    return trapezoid_weights(kgrid.samples)
