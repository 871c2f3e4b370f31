"""Stochastic local transformations by product matrices.

A pure-state SLOCC conversion ``|phi> -> |psi>`` exists iff some product
matrix ``M = (x)_k M^(k)`` maps ``|phi>`` onto a nonzero multiple of
``|psi>``. This module checks such certificates, searches for them with
alternating least squares, runs the measurement-to-transformation
protocol and simulates qudit teleportation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .constants import (
    ALS_MAX_ITER,
    ALS_NORM_CAP,
    ALS_RESTARTS,
    TOL_ALS,
    TOL_NORM,
    TOL_PSD,
)
from .tensor import (
    PureState,
    ProductOperator,
    ShapeError,
    apply_local,
    apply_product,
    fidelity,
    max_entangled,
)


class ZeroImageError(ValueError):
    """The product operator annihilates the input state."""


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class TransformCheck:
    ok: bool
    mu: complex
    residual: float


def verify_transform(
    phi: PureState, target: PureState, m: ProductOperator, tol: float = TOL_NORM
) -> TransformCheck:
    """Find ``mu`` with ``mu M|phi> = |target>`` and report the fit.

    ``mu`` is the least-squares scale ``<M phi|target> / ||M phi||^2``.
    """
    if m.out_shape != target.shape:
        raise ShapeError(f"operator output {m.out_shape.dims} != target {target.dims}")
    image, nrm = apply_product(m, phi)
    if nrm < 1e-300 or nrm < 1e-14 * np.sqrt(m.hs_norm_sq()):
        raise ZeroImageError("M|phi> = 0")
    mu = np.vdot(image.amps, target.amps) / nrm**2
    residual = float(np.linalg.norm(mu * image.amps - target.amps))
    return TransformCheck(residual < tol, complex(mu), residual)


@dataclass(frozen=True)
class TransformSearch:
    """Outcome of :func:`find_transform`.

    ``operator`` holds the best factors seen even when ``found`` is false.
    ``residual_trace`` and ``amplification_trace`` follow the best restart
    sweep by sweep; the amplification is ``prod_k ||M^(k)||_F`` for a
    unit-norm input, which stays bounded for genuine solutions and diverges
    when the target is only reached as a limit (border rank).
    """

    found: bool
    operator: ProductOperator | None
    residual: float
    restarts: int
    best_restart: int
    border_rank_escape: bool
    reason: str
    residual_trace: tuple[float, ...] = field(default=(), repr=False)
    amplification_trace: tuple[float, ...] = field(default=(), repr=False)


def _unfold(t: np.ndarray, k: int) -> np.ndarray:
    return np.moveaxis(t, k, 0).reshape(t.shape[k], -1)


def _balance(factors: list[np.ndarray]) -> list[np.ndarray]:
    norms = np.array([np.linalg.norm(f) for f in factors])
    if np.any(norms == 0):
        return factors
    g = np.exp(np.mean(np.log(norms)))
    return [f * (g / n) for f, n in zip(factors, norms)]


def _image(factors, phi_t):
    t = phi_t
    for k, f in enumerate(factors):
        t = apply_local(t, k, f)
    return t


def _jacobian(factors, phi_t) -> np.ndarray:
    """Derivative of the flattened image with respect to every factor entry.

    The image is complex-linear in each factor, so this is an ordinary
    complex Jacobian (no conjugate block).
    """
    out_dims = [f.shape[0] for f in factors]
    size = int(np.prod(out_dims))
    blocks = []
    for k, fk in enumerate(factors):
        y = phi_t
        for j, f in enumerate(factors):
            if j != k:
                y = apply_local(y, j, f)
        yk = np.moveaxis(y, k, -1)  # (..rest.., in_k)
        jac = np.zeros(out_dims + [fk.shape[0], fk.shape[1]], dtype=complex)
        jm = np.moveaxis(jac, k, 0)
        for p in range(fk.shape[0]):
            jm[p, ..., p, :] = yk
        blocks.append(jac.reshape(size, -1))
    return np.hstack(blocks)


def _lm_step(factors, phi_t, target_t, res, lam):
    """One damped Gauss-Newton step on all factors jointly, accepted only if it helps."""
    r = (_image(factors, phi_t) - target_t).reshape(-1)
    jac = _jacobian(factors, phi_t)
    a = jac.conj().T @ jac
    g = jac.conj().T @ r
    scale = max(1.0, np.trace(a).real / len(a))
    while lam < 1e10:
        step = np.linalg.solve(a + lam * scale * np.eye(len(a)), -g)
        trial, o = [], 0
        for f in factors:
            trial.append(f + step[o:o + f.size].reshape(f.shape))
            o += f.size
        trial_res = float(np.linalg.norm(_image(trial, phi_t) - target_t))
        if trial_res < res:
            return trial, trial_res, max(lam / 3, 1e-12)
        lam *= 4
    return factors, res, lam


def _polish(factors, phi_t, target_t, res, steps: int = 10):
    """Minimum-norm Gauss-Newton steps on a converged fit, down to rounding level.

    Solutions often sit where the Jacobian is nearly rank deficient; an
    undamped least-squares step still converges there.
    """
    for _ in range(steps):
        if res < 1e-14:
            break
        r = (_image(factors, phi_t) - target_t).reshape(-1)
        step, *_ = np.linalg.lstsq(_jacobian(factors, phi_t), -r, rcond=None)
        trial, o = [], 0
        for f in factors:
            trial.append(f + step[o:o + f.size].reshape(f.shape))
            o += f.size
        trial_res = float(np.linalg.norm(_image(trial, phi_t) - target_t))
        if trial_res >= res:
            break
        factors, res = trial, trial_res
    return _balance(factors), res


def _als_run(phi_t, target_t, factors, tol, max_iter, norm_cap):
    """One restart. Returns (factors, residual trace, amplification trace, status).

    Each iteration is an ALS sweep (exact least squares for one factor at a
    time) followed by a damped Gauss-Newton step on all factors jointly.
    Plain ALS swamps on W-type targets; the joint step restores fast local
    convergence. Both moves are accepted only when they do not increase the
    residual.
    """
    n = len(factors)
    phi_norm = np.linalg.norm(phi_t)
    res_trace, amp_trace = [], []
    status = "max_iter"
    lam = 1e-3
    for it in range(max_iter):
        for k in range(n):
            # image of every factor except k, with party k still in the input space
            y = phi_t
            for j, f in enumerate(factors):
                if j != k:
                    y = apply_local(y, j, f)
            sol, *_ = np.linalg.lstsq(_unfold(y, k).T, _unfold(target_t, k).T, rcond=None)
            factors[k] = sol.T
        res = float(np.linalg.norm(_image(factors, phi_t) - target_t))
        if res >= tol:
            factors, res, lam = _lm_step(factors, phi_t, target_t, res, lam)
        factors = _balance(factors)
        amp = float(np.prod([np.linalg.norm(f) for f in factors]) * phi_norm)
        res_trace.append(res)
        amp_trace.append(amp)
        if max(np.linalg.norm(f) for f in factors) > norm_cap:
            status = "norm_cap"
            break
        if res < tol:
            status = "converged"
            factors, res = _polish(factors, phi_t, target_t, res)
            res_trace[-1] = res
            break
        if it >= 25 and res_trace[-26] - res <= 1e-10 * res_trace[-26]:
            status = "stalled"
            break
        if it >= 60 and _is_escape(res_trace, amp_trace, status):
            status = "escape"
            break
    return factors, res_trace, amp_trace, status


def _is_escape(res_trace, amp_trace, status) -> bool:
    """Residual still draining while the factors blow up: a border-rank limit."""
    if status in ("norm_cap", "escape"):
        return True
    if len(res_trace) < 40:
        return False
    half = len(res_trace) // 2
    draining = res_trace[-1] < 0.5 * res_trace[half] and res_trace[-1] < 0.1
    growing = amp_trace[-1] > 2.0 * min(amp_trace[: half + 1])
    return draining and growing


def find_transform(
    phi: PureState,
    target: PureState,
    restarts: int = ALS_RESTARTS,
    max_iter: int = ALS_MAX_ITER,
    norm_cap: float = ALS_NORM_CAP,
    seed: int = 0,
    tol: float = TOL_ALS,
) -> TransformSearch:
    """Search for a product matrix taking ``phi`` to ``target`` (up to scale).

    Alternating least squares over the local factors minimises
    ``||M|phi> - |target>||``; the overall scale lives in the factors, so
    a zero residual means ``M|phi> = |target>`` exactly. Restart ``i``
    draws its initial factors from ``default_rng([seed, i])`` and the
    search stops at the first restart that converges, so results are
    deterministic given ``seed``.
    """
    if phi.shape.n != target.shape.n:
        raise ShapeError("phi and target must have the same number of parties")
    phi_t = phi.tensor()
    target_t = target.amps.reshape(target.dims) / target.norm
    shapes = [(dout, din) for dout, din in zip(target.dims, phi.dims)]

    best = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        factors = [
            (rng.standard_normal(s) + 1j * rng.standard_normal(s)) / np.sqrt(2 * s[1])
            for s in shapes
        ]
        factors, res_trace, amp_trace, status = _als_run(
            phi_t, target_t, factors, tol, max_iter, norm_cap
        )
        key = res_trace[-1]
        if best is None or key < best[0]:
            best = (key, r, factors, res_trace, amp_trace, status)
        if status == "converged":
            break

    res, r, factors, res_trace, amp_trace, status = best
    found = status == "converged"
    escape = (not found) and _is_escape(res_trace, amp_trace, status)
    if found:
        reason = "converged"
    elif escape:
        reason = "border-rank escape: residual only shrinks as factor norms diverge"
    else:
        reason = f"residual plateau at {res:.3e}"
    return TransformSearch(
        found=found,
        operator=ProductOperator(tuple(factors)),
        residual=res,
        restarts=min(restarts, r + 1) if found else restarts,
        best_restart=r,
        border_rank_escape=escape,
        reason=reason,
        residual_trace=tuple(res_trace),
        amplification_trace=tuple(amp_trace),
    )


def _sqrt_psd(e: np.ndarray, tol: float = TOL_PSD) -> np.ndarray:
    w, v = np.linalg.eigh((e + e.conj().T) / 2)
    if w.min() < -tol:
        raise PreconditionError(f"operator has eigenvalue {w.min():.3e} < 0")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


@dataclass(frozen=True)
class ProtocolBranch:
    """One measurement outcome of the forward protocol.

    ``state`` is the dominant eigenvector of the third register's reduced
    operator; ``purity`` measures how close that register is to pure.
    """

    outcome: int
    probability: float
    state: PureState
    fidelity: float
    purity: float


def protocol_from_measurement(phi: PureState, b, povm, tol: float = TOL_NORM) -> list[ProtocolBranch]:
    """Turn an unambiguous measurement of ``|Phi> (x) B`` into ``|Phi^*> -> |~psi_x>``.

    The parties prepare ``|Phi^*> (x) |Psi>`` with ``|Psi>`` maximally
    entangled on two copies of ``H`` (made locally, one pair per party),
    apply the conjugated measurement to the resource and the first copy,
    and trace those out. Outcome ``x`` leaves the second copy in
    ``|~psi_x>`` with probability ``eps_x / (D <~psi_x|psi_x>^2)``.
    The inconclusive outcome is reported last with ``fidelity`` nan.
    """
    from .discrimination import check_unambiguous
    from .dual import dual_basis

    table = check_unambiguous(povm, phi, b)
    if not table.passed:
        raise PreconditionError(
            f"measurement is not unambiguous (offdiag {table.offdiag_max:.3e}, "
            f"min eps {table.eps.min():.3e})"
        )
    duals = dual_basis(b)
    dprime, d = phi.shape.dim, b.dim
    n = phi.shape.n
    # (resource axes, copy-1 axes, copy-2 axes)
    t = np.multiply.outer(phi.tensor().conj(), max_entangled(d).amps.reshape(b.shape.dims + b.shape.dims))
    order = [ax for k in range(n) for ax in (k, n + k)] + [2 * n + k for k in range(n)]
    joint = np.transpose(t, order).reshape(dprime * d, d)

    out = []
    for x, e in enumerate(povm.elements):
        branch = _sqrt_psd(e.conj()) @ joint
        # reduced operator of the untouched copy: rho[t, t'] = sum_r B[r, t] B*[r, t']
        rho = branch.T @ branch.conj()
        p = float(np.trace(rho).real)
        if p <= 0:
            state = PureState(b.shape, np.zeros(d), normalized=False)
            out.append(ProtocolBranch(x, 0.0, state, float("nan"), 0.0))
            continue
        w, v = np.linalg.eigh(rho / p)
        state = PureState(b.shape, v[:, -1] / np.linalg.norm(v[:, -1]), f"branch_{x}")
        purity = float(np.sum(w**2))
        fid = fidelity(state, duals[x]) if x < len(b) else float("nan")
        out.append(ProtocolBranch(x, p, state, fid, purity))
    return out


def weyl_shift(d: int, m: int) -> np.ndarray:
    """``X^m |j> = |j + m mod d>``."""
    return np.roll(np.eye(d), m, axis=0)


def weyl_clock(d: int, n: int) -> np.ndarray:
    """``Z^n |j> = w^{jn} |j>`` with ``w = exp(2 pi i / d)``."""
    return np.diag(np.exp(2j * np.pi * n * np.arange(d) / d))


def bell_vector(d: int, m: int, n: int) -> np.ndarray:
    """Generalized Bell state ``(Z^n X^m (x) I)|Phi_d>`` as a ``d x d`` array."""
    return (weyl_clock(d, n) @ weyl_shift(d, m)) / np.sqrt(d)


def bell_measure(t: np.ndarray, s_axis: int, a_axis: int, b_axis: int, outcome) -> np.ndarray:
    """Project axes ``(s, a)`` onto a generalized Bell state and correct axis ``b``.

    Returns the unnormalized branch with ``s`` and ``a`` removed and the
    corrected ``b`` axis moved into the slot ``s`` had (the relocated
    subsystem). Its squared norm is the outcome probability.
    """
    d = t.shape[s_axis]
    if t.shape[a_axis] != d or t.shape[b_axis] != d:
        raise ShapeError("teleported subsystem and resource pair must share one dimension")
    m, n = outcome
    bell = bell_vector(d, m, n)
    labels = list(range(t.ndim))
    keep = [ax for ax in labels if ax not in (s_axis, a_axis)]
    branch = np.einsum(t, labels, bell.conj(), [s_axis, a_axis], keep)
    pos_b = keep.index(b_axis)
    branch = apply_local(branch, pos_b, weyl_clock(d, n) @ weyl_shift(d, m))
    # slot of s among the remaining axes
    target = sum(1 for ax in keep if ax < s_axis and ax != b_axis)
    return np.moveaxis(branch, pos_b, target)


@dataclass(frozen=True)
class TeleportBranch:
    outcome: tuple[int, int]
    probability: float
    state: PureState


def teleport_branches(state: PureState, resource: PureState, src: int) -> list[TeleportBranch]:
    """Teleport party ``src`` through a two-party maximally entangled resource.

    The sender holds the resource's first half, the receiver its second;
    every one of the ``d^2`` Bell outcomes is returned after correction.
    """
    d = resource.dims[0]
    if resource.dims != (d, d):
        raise ShapeError("resource must be a two-party d x d state")
    if fidelity(resource, max_entangled(d)) < 1 - TOL_NORM:
        raise PreconditionError("resource is not the standard maximally entangled state")
    if not 0 <= src < state.shape.n:
        raise ShapeError(f"no party {src}")
    if state.dims[src] != d:
        raise ShapeError(f"party {src} has dimension {state.dims[src]}, resource has {d}")
    n = state.shape.n
    t = np.multiply.outer(state.tensor(), resource.tensor())
    out = []
    for outcome in itertools.product(range(d), range(d)):
        branch = bell_measure(t, src, n, n + 1, outcome)
        p = float(np.linalg.norm(branch) ** 2)
        out.append(TeleportBranch(outcome, p, PureState(state.shape, branch.reshape(-1) / np.sqrt(p), state.label)))
    return out


def teleport(state: PureState, resource: PureState, src: int, tol: float = TOL_NORM) -> PureState:
    """Relocate party ``src`` into the receiver's half of ``resource``.

    Raises if any Bell branch fails to reproduce the input exactly (up to
    normalization) or the branch probabilities are not uniform.
    """
    branches = teleport_branches(state, resource, src)
    d = resource.dims[0]
    for br in branches:
        if abs(br.probability - 1.0 / d**2) > tol:
            raise AssertionError(f"branch {br.outcome} has probability {br.probability}")
        err = np.linalg.norm(br.state.amps - state.amps)
        if err > tol:
            raise AssertionError(f"branch {br.outcome} is off by {err:.3e}")
    return branches[0].state
