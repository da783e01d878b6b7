"""Quench map on scattering data, time evolution of the data, post-quench
classification, and the higher-level factorisation check.

The quench map is evaluated extensionally: scatter the same field at both
couplings.  The factorisation Theta_-^dag(x) S Theta_+(x) = S' is verified
against an independently computed S', never used to construct it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    Coupling,
    FieldProfile,
    KGrid,
    NlsQuenchError,
    QuenchReport,
    ScatteringData,
    Schwartz,
)
from .closedforms import predicted_zero_count
from .zsdirect import (
    DEFAULT_INTEGRATOR,
    IntegratorConfig,
    IntegratorDiverged,
    _working_samples,
    scatter_grid,
    scattering_batch,
)

PURE_MULTISOLITON = "pure-multisoliton"
SOLITON_RADIATION = "soliton+radiation"
PURE_RADIATION = "pure-radiation"


def quench_map(p: FieldProfile, c: Coupling, c_new: Coupling, kgrid: KGrid,
               cfg: IntegratorConfig = DEFAULT_INTEGRATOR, **scatter_kwargs) -> QuenchReport:
    """Scattering data of one field at the old and new coupling."""
    pre = scatter_grid(p, c, kgrid, cfg, **scatter_kwargs)
    post = scatter_grid(p, c_new, kgrid, cfg, **scatter_kwargs)
    return QuenchReport(pre=pre, post=post)


def evolve_data(sd: ScatteringData, t: float) -> ScatteringData:
    """Push scattering data forward in time: a is frozen and b picks up the
    phase e^{-4ik^2 t} (the phase measured when the evolved field is
    re-scattered; norming constants follow the same rule continued to the
    zero).  Discrete positions do not move."""
    k = sd.kgrid.samples
    b_new = sd.b * np.exp(-4j * k ** 2 * t)
    discrete = tuple(
        type(z)(position=z.position, order=z.order,
                norming=None if z.norming is None
                else z.norming * np.exp(-4j * z.position ** 2 * t))
        for z in sd.discrete
    )
    return ScatteringData(kgrid=sd.kgrid, a=sd.a, b=b_new,
                          discrete=discrete, coupling=sd.coupling)


@dataclass(frozen=True)
class PostQuenchClassification:
    label: str
    predicted_count: int
    found_count: int
    max_abs_b: float

    def to_json_dict(self):
        return {
            "label": self.label,
            "predicted_N": self.predicted_count,
            "found_N": self.found_count,
            "max_abs_b": self.max_abs_b,
        }


def classify_post_quench(report: QuenchReport, nu_effective: Optional[float] = None,
                         b_threshold: float = 1e-5) -> PostQuenchClassification:
    """Sort the post-quench data into pure-multisoliton / soliton+radiation /
    pure-radiation, and compare the found zero count with the one predicted
    for a normalised single-soliton quench of strength nu_effective."""
    post = report.post
    if nu_effective is None:
        nu_effective = abs(post.coupling.value)
    found = sum(z.order for z in post.discrete)
    predicted = (predicted_zero_count(nu_effective)
                 if post.coupling.regime == "focusing" else 0)
    max_b = float(np.max(np.abs(post.b)))
    if found == 0:
        label = PURE_RADIATION
    elif max_b < b_threshold:
        label = PURE_MULTISOLITON
    else:
        label = SOLITON_RADIATION
    return PostQuenchClassification(label=label, predicted_count=predicted,
                                    found_count=found, max_abs_b=max_b)


# ---------------------------------------------------------------------------
# higher-level scattering problem

@dataclass(frozen=True)
class ThetaSolution:
    """Theta_eps(x, k) for eps = +, -, on the integrator grid, normalised to
    the identity at x = eps * end."""

    x: np.ndarray
    theta_plus: np.ndarray   # (n, 2, 2)
    theta_minus: np.ndarray  # (n, 2, 2)
    k: float
    c_old: complex
    c_new: complex

    def unitarity_defect(self) -> float:
        """max over x of |Theta^dag Theta - 1| and |det Theta - 1|; only a
        meaningful invariant when (c' - c)/c is real."""
        worst = 0.0
        for th in (self.theta_plus, self.theta_minus):
            herm = np.conj(np.transpose(th, (0, 2, 1))) @ th
            worst = max(worst, float(np.max(np.abs(herm - np.eye(2)))))
            det = th[:, 0, 0] * th[:, 1, 1] - th[:, 0, 1] * th[:, 1, 0]
            worst = max(worst, float(np.max(np.abs(det - 1.0))))
        return worst

    def boundary_defect(self) -> float:
        eye = np.eye(2)
        return float(max(np.max(np.abs(self.theta_plus[-1] - eye)),
                         np.max(np.abs(self.theta_minus[0] - eye))))


def _require_theta_scope(p: FieldProfile, c: Coupling, c_new: Coupling):
    if not isinstance(p.asymptotics, Schwartz):
        raise NlsQuenchError("the factorisation machinery needs rapid decay")
    for cc in (c, c_new):
        if cc.regime == "defocusing":
            raise NlsQuenchError(
                "higher-level dressing uses unitary Jost matrices; couplings "
                "must be focusing or zero"
            )


def _theta_pass(p: FieldProfile, c: Coupling, c_new: Coupling, k: np.ndarray,
                cfg: IntegratorConfig, direction: int,
                keep: Optional[np.ndarray] = None):
    """Joint RK4 integration of Phi (auxiliary problem at coupling c, in the
    e^{ik sigma3 x} gauge) and Theta with generator (c'-c) Phi^dag What Phi,
    from one end of the grid to the other.

    direction=+1 integrates upward from the left end (Theta_-);
    direction=-1 integrates downward from the right end (Theta_+).
    Returns (x nodes, Phi at kept nodes, Theta at kept nodes), the latter
    two shaped (len(keep), nk, 2, 2); keep=None records every node.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    nk = len(k)
    xs, q_nodes, q_mids, h = _working_samples(p, cfg)
    n = len(xs)
    dc = c_new.value - c.value
    if keep is None:
        keep = np.arange(n)
    keep = np.asarray(keep, dtype=int)
    slot = {int(j): i for i, j in enumerate(keep)}

    x_all = np.empty(2 * n - 1)
    x_all[::2] = xs
    x_all[1::2] = 0.5 * (xs[:-1] + xs[1:])
    ph = np.exp(2j * np.outer(x_all, k))
    q_all = np.empty(2 * n - 1, dtype=np.complex128)
    q_all[::2] = q_nodes
    q_all[1::2] = q_mids

    def u_hat(idx):
        """e^{ik sigma3 x} [[0, q], [q*, 0]] e^{-ik sigma3 x} at x_all[idx]."""
        g = np.zeros((nk, 2, 2), dtype=np.complex128)
        g[:, 0, 1] = q_all[idx] * ph[idx]
        g[:, 1, 0] = np.conj(q_all[idx]) * np.conj(ph[idx])
        return g

    eye = np.broadcast_to(np.eye(2, dtype=np.complex128), (nk, 2, 2)).copy()
    phi = eye.copy()
    theta = eye.copy()
    phi_out = np.empty((len(keep), nk, 2, 2), dtype=np.complex128)
    theta_out = np.empty_like(phi_out)

    if direction > 0:
        order = range(0, n - 1)
        start = 0
    else:
        order = range(n - 1, 0, -1)
        start = n - 1
    if start in slot:
        phi_out[slot[start]] = phi
        theta_out[slot[start]] = theta
    s = direction * h

    def rhs(uh, phi_v, theta_v):
        dphi = (c.value * uh) @ phi_v
        gen = dc * (np.conj(np.transpose(phi_v, (0, 2, 1))) @ uh @ phi_v)
        return dphi, gen @ theta_v

    for j in order:
        i0 = 2 * j
        im = 2 * j + direction
        i1 = 2 * j + 2 * direction
        u0, um, u1 = u_hat(i0), u_hat(im), u_hat(i1)
        p1, t1 = rhs(u0, phi, theta)
        p2, t2 = rhs(um, phi + 0.5 * s * p1, theta + 0.5 * s * t1)
        p3, t3 = rhs(um, phi + 0.5 * s * p2, theta + 0.5 * s * t2)
        p4, t4 = rhs(u1, phi + s * p3, theta + s * t3)
        phi = phi + (s / 6.0) * (p1 + 2 * p2 + 2 * p3 + p4)
        theta = theta + (s / 6.0) * (t1 + 2 * t2 + 2 * t3 + t4)
        target = j + direction
        if target in slot:
            phi_out[slot[target]] = phi
            theta_out[slot[target]] = theta
    if not (np.isfinite(phi).all() and np.isfinite(theta).all()):
        raise IntegratorDiverged("dressing integration produced non-finite values")
    return xs, phi_out, theta_out


def higher_level_theta(p: FieldProfile, c: Coupling, c_new: Coupling, k: float,
                       cfg: IntegratorConfig = DEFAULT_INTEGRATOR) -> ThetaSolution:
    """Dressing matrices Theta_+- at one real spectral point."""
    _require_theta_scope(p, c, c_new)
    karr = np.array([float(k)])
    xs, _, th_minus = _theta_pass(p, c, c_new, karr, cfg, direction=+1)
    _, _, th_plus = _theta_pass(p, c, c_new, karr, cfg, direction=-1)
    return ThetaSolution(x=xs, theta_plus=th_plus[:, 0], theta_minus=th_minus[:, 0],
                         k=float(k), c_old=c.value, c_new=c_new.value)


@dataclass(frozen=True)
class FactorizationReport:
    """Residuals of the dressing identity against an independent scatter."""

    max_residual: float
    x_spread: float            # std over x of the per-x max residual
    boundary_defect: float     # asymptotic consistency at the two grid ends
    x_samples: np.ndarray
    per_x_residual: np.ndarray

    def to_json_dict(self):
        return {
            "max_residual": self.max_residual,
            "x_spread": self.x_spread,
            "boundary_defect": self.boundary_defect,
            "x_samples": self.x_samples.tolist(),
            "per_x_residual": self.per_x_residual.tolist(),
        }


def verify_factorization(p: FieldProfile, c: Coupling, c_new: Coupling,
                         kgrid: KGrid, x_samples: Optional[Sequence[float]] = None,
                         cfg: IntegratorConfig = DEFAULT_INTEGRATOR) -> FactorizationReport:
    """max over x samples and the spectral grid of
    |Theta_-^dag(x) S(k) Theta_+(x) - S'(k)|, with S' scattered at the new
    coupling; also checks the boundary identities S Theta_+(left) = S' and
    Theta_-^dag(right) S = S'."""
    _require_theta_scope(p, c, c_new)
    if x_samples is None:
        x_samples = np.linspace(-p.L / 2.0, p.L / 2.0, 9)
    x_samples = np.asarray(x_samples, dtype=float)

    k = kgrid.samples
    s_old = scattering_batch(p, c, k, cfg)
    s_new = scattering_batch(p, c_new, k, cfg)

    # record Theta only at the sample nodes and the two grid ends
    xs_probe, _, _, _ = _working_samples(p, cfg)
    idx = np.array([int(np.argmin(np.abs(xs_probe - xv))) for xv in x_samples])
    keep = np.unique(np.concatenate([idx, [0, len(xs_probe) - 1]]))
    pos = {int(j): i for i, j in enumerate(keep)}
    xs, _, th_minus = _theta_pass(p, c, c_new, k, cfg, direction=+1, keep=keep)
    _, _, th_plus = _theta_pass(p, c, c_new, k, cfg, direction=-1, keep=keep)

    per_x = np.empty(len(idx))
    for i, j in enumerate(idx):
        tm = th_minus[pos[int(j)]]
        tp = th_plus[pos[int(j)]]
        lhs = np.conj(np.transpose(tm, (0, 2, 1))) @ s_old @ tp
        per_x[i] = float(np.max(np.abs(lhs - s_new)))
    # ends: Theta_-(left) = Theta_+(right) = 1 by construction, so the
    # asymptotic identities reduce to these two
    lhs_left = s_old @ th_plus[pos[0]]
    lhs_right = np.conj(np.transpose(th_minus[pos[len(xs_probe) - 1]], (0, 2, 1))) @ s_old
    bdry = max(float(np.max(np.abs(lhs_left - s_new))),
               float(np.max(np.abs(lhs_right - s_new))))
    return FactorizationReport(
        max_residual=float(np.max(per_x)),
        x_spread=float(np.std(per_x)),
        boundary_defect=bdry,
        x_samples=np.asarray(xs_probe[idx]),
        per_x_residual=per_x,
    )
