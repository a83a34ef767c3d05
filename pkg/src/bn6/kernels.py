"""Hot radial integration kernels.

Everything expensive in this package funnels through the RK4 integrators in
this module: nonlinear shooting for u'' + (5/r)u' + |u|u + lam*u = 0 and
linear shooting for the angular-sector equation

    psi'' + (5/r) psi' - ell(ell+4)/r^2 psi + (q(r) + mu) psi + f(r) = 0.

The 5/r singularity at the origin is removed by starting the integration at
the first mesh node with a Taylor seed (even powers of r; the quartic term is
kept for the nonlinear problem so the seed error stays below RK4 truncation).

Two interchangeable implementations are provided:

* numba ``@njit`` kernels (default; compiled lazily, disk-cached), and
* a pure-numpy fallback, selected by setting the environment variable
  ``BN6_NO_NUMBA`` to a non-empty value other than ``0`` before import.

Both paths implement the same arithmetic in the same order; they agree to a
few ulps (fused-multiply-add differences only).  ``benchmarks/bench_kernels.py``
compares their throughput.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "NUMBA_ENABLED",
    "shoot_mesh",
    "shoot_mesh_final",
    "linear_shoot_l0",
    "eig_shoot",
    "eig_shoot_batch",
]


def _numba_wanted() -> bool:
    return os.environ.get("BN6_NO_NUMBA", "").strip() in ("", "0")


NUMBA_ENABLED = False
if _numba_wanted():
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:

    def njit(*args, **kwargs):  # noqa: D103 - identity decorator fallback
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


# ---------------------------------------------------------------------------
# scalar kernels (numba-compiled when available)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _shoot_mesh_scalar(s, lam, nodes, u_out, up_out):
    """RK4 for the nonlinear radial equation over an arbitrary node array.

    nodes[0] must be 0; the Taylor seed covers [0, nodes[1]].  Fills u_out,
    up_out (same length as nodes) and returns nothing.
    """
    g0 = abs(s) * s + lam * s
    gp0 = 2.0 * abs(s) + lam
    u2 = -g0 / 12.0
    u4 = gp0 * g0 / 384.0
    n = nodes.shape[0]
    u_out[0] = s
    up_out[0] = 0.0
    r = nodes[1]
    u = s + u2 * r * r + u4 * r * r * r * r
    up = 2.0 * u2 * r + 4.0 * u4 * r * r * r
    u_out[1] = u
    up_out[1] = up
    for i in range(1, n - 1):
        h = nodes[i + 1] - nodes[i]
        # k1
        k1u = up
        k1p = -(5.0 / r) * up - (abs(u) * u + lam * u)
        # k2
        r2 = r + 0.5 * h
        uu = u + 0.5 * h * k1u
        pp = up + 0.5 * h * k1p
        k2u = pp
        k2p = -(5.0 / r2) * pp - (abs(uu) * uu + lam * uu)
        # k3
        uu = u + 0.5 * h * k2u
        pp = up + 0.5 * h * k2p
        k3u = pp
        k3p = -(5.0 / r2) * pp - (abs(uu) * uu + lam * uu)
        # k4
        r4 = r + h
        uu = u + h * k3u
        pp = up + h * k3p
        k4u = pp
        k4p = -(5.0 / r4) * pp - (abs(uu) * uu + lam * uu)
        u = u + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        up = up + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        r = r4
        u_out[i + 1] = u
        up_out[i + 1] = up


@njit(cache=True)
def _shoot_mesh_final_numba(svals, lam, nodes):
    m = svals.shape[0]
    out = np.empty(m)
    u_buf = np.empty(nodes.shape[0])
    up_buf = np.empty(nodes.shape[0])
    for j in range(m):
        _shoot_mesh_scalar(svals[j], lam, nodes, u_buf, up_buf)
        out[j] = u_buf[-1]
    return out


@njit(cache=True)
def _hermite_pair(r, h, ys, ds):
    """Cubic Hermite value of a uniformly sampled function at radius r."""
    n = ys.shape[0] - 1
    j = int(r / h)
    if j < 0:
        j = 0
    if j > n - 1:
        j = n - 1
    t = r / h - j
    omt = 1.0 - t
    h00 = (1.0 + 2.0 * t) * omt * omt
    h10 = t * omt * omt
    h01 = t * t * (3.0 - 2.0 * t)
    h11 = t * t * (t - 1.0)
    return h00 * ys[j] + h10 * h * ds[j] + h01 * ys[j + 1] + h11 * h * ds[j + 1]


@njit(cache=True)
def _linear_rhs(r, psi, psip, h, q, qp, f, fp, ell4, mu):
    qv = _hermite_pair(r, h, q, qp) + mu
    fv = _hermite_pair(r, h, f, fp)
    cent = ell4 / (r * r)
    return -(5.0 / r) * psip + cent * psi - qv * psi - fv


@njit(cache=True)
def _linear_shoot_scalar(q, qp, f, fp, h, ell, mu, seed_center, s, psi_out, psip_out):
    """RK4 for the linear sector equation on the uniform grid of spacing h.

    seed_center selects the seed: True -> psi(0)=s, psi'(0)=0 (only ell=0,
    forcing allowed); False -> regular solution psi ~ r^ell, normalized to
    psi(h) = 1 + c2 h^2, s ignored.
    """
    n = q.shape[0] - 1
    ell4 = float(ell * (ell + 4))
    if seed_center:
        v2 = -((q[0] + mu) * s + f[0]) / 12.0
        psi_out[0] = s
        psip_out[0] = 0.0
        psi = s + v2 * h * h
        psip = 2.0 * v2 * h
    else:
        c2 = -(q[0] + mu) / (4.0 * (ell + 3.0))
        psi_out[0] = 0.0
        psip_out[0] = 0.0
        psi = 1.0 + c2 * h * h
        psip = (ell + (ell + 2.0) * c2 * h * h) / h
    psi_out[1] = psi
    psip_out[1] = psip
    r = h
    for i in range(1, n):
        k1u = psip
        k1p = _linear_rhs(r, psi, psip, h, q, qp, f, fp, ell4, mu)
        r2 = r + 0.5 * h
        uu = psi + 0.5 * h * k1u
        pp = psip + 0.5 * h * k1p
        k2u = pp
        k2p = _linear_rhs(r2, uu, pp, h, q, qp, f, fp, ell4, mu)
        uu = psi + 0.5 * h * k2u
        pp = psip + 0.5 * h * k2p
        k3u = pp
        k3p = _linear_rhs(r2, uu, pp, h, q, qp, f, fp, ell4, mu)
        r4 = r + h
        uu = psi + h * k3u
        pp = psip + h * k3p
        k4u = pp
        k4p = _linear_rhs(r4, uu, pp, h, q, qp, f, fp, ell4, mu)
        psi = psi + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        psip = psip + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        r = r4
        psi_out[i + 1] = psi
        psip_out[i + 1] = psip


@njit(cache=True)
def _count_flips(vals):
    """Sign changes over vals[1..n-1] (seed node through last interior node)."""
    n = vals.shape[0] - 1
    count = 0
    last = 0.0
    for i in range(1, n):
        v = vals[i]
        if v != 0.0:
            if last != 0.0 and v * last < 0.0:
                count += 1
            last = v
    return count


@njit(cache=True)
def _eig_shoot_batch_numba(q, qp, h, ell, mus):
    m = mus.shape[0]
    psiR = np.empty(m)
    counts = np.empty(m, dtype=np.int64)
    npts = q.shape[0]
    psi_buf = np.empty(npts)
    psip_buf = np.empty(npts)
    zeros = np.zeros(npts)
    for j in range(m):
        _linear_shoot_scalar(q, qp, zeros, zeros, h, ell, mus[j], False, 0.0, psi_buf, psip_buf)
        psiR[j] = psi_buf[-1]
        counts[j] = _count_flips(psi_buf)
    return psiR, counts


# ---------------------------------------------------------------------------
# numpy fallback (vectorized over the batch dimension)
# ---------------------------------------------------------------------------


def _shoot_mesh_final_numpy(svals, lam, nodes):
    s = np.asarray(svals, dtype=float)
    g0 = np.abs(s) * s + lam * s
    u2 = -g0 / 12.0
    u4 = (2.0 * np.abs(s) + lam) * g0 / 384.0
    r = nodes[1]
    u = s + u2 * r * r + u4 * r**4
    up = 2.0 * u2 * r + 4.0 * u4 * r**3

    def acc(rr, uu, pp):
        return -(5.0 / rr) * pp - (np.abs(uu) * uu + lam * uu)

    for i in range(1, len(nodes) - 1):
        h = nodes[i + 1] - nodes[i]
        r2 = r + 0.5 * h
        r4 = r + h
        k1u = up
        k1p = acc(r, u, up)
        uu = u + 0.5 * h * k1u
        pp = up + 0.5 * h * k1p
        k2u = pp
        k2p = acc(r2, uu, pp)
        uu = u + 0.5 * h * k2u
        pp = up + 0.5 * h * k2p
        k3u = pp
        k3p = acc(r2, uu, pp)
        uu = u + h * k3u
        pp = up + h * k3p
        k4u = pp
        k4p = acc(r4, uu, pp)
        u = u + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        up = up + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        r = r4
    return u


def _shoot_mesh_numpy(s, lam, nodes, u_out, up_out):
    g0 = abs(s) * s + lam * s
    u2 = -g0 / 12.0
    u4 = (2.0 * abs(s) + lam) * g0 / 384.0
    u_out[0] = s
    up_out[0] = 0.0
    r = nodes[1]
    u = s + u2 * r * r + u4 * r**4
    up = 2.0 * u2 * r + 4.0 * u4 * r**3
    u_out[1] = u
    up_out[1] = up
    for i in range(1, len(nodes) - 1):
        h = nodes[i + 1] - nodes[i]
        r2 = r + 0.5 * h
        r4 = r + h
        k1u = up
        k1p = -(5.0 / r) * up - (abs(u) * u + lam * u)
        uu = u + 0.5 * h * k1u
        pp = up + 0.5 * h * k1p
        k2u = pp
        k2p = -(5.0 / r2) * pp - (abs(uu) * uu + lam * uu)
        uu = u + 0.5 * h * k2u
        pp = up + 0.5 * h * k2p
        k3u = pp
        k3p = -(5.0 / r2) * pp - (abs(uu) * uu + lam * uu)
        uu = u + h * k3u
        pp = up + h * k3p
        k4u = pp
        k4p = -(5.0 / r4) * pp - (abs(uu) * uu + lam * uu)
        u = u + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        up = up + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        r = r4
        u_out[i + 1] = u
        up_out[i + 1] = up


def _hermite_uniform_batch(r, h, ys, ds):
    n = ys.shape[0] - 1
    j = np.clip((r / h).astype(np.int64), 0, n - 1)
    t = r / h - j
    omt = 1.0 - t
    h00 = (1.0 + 2.0 * t) * omt * omt
    h10 = t * omt * omt
    h01 = t * t * (3.0 - 2.0 * t)
    h11 = t * t * (t - 1.0)
    return h00 * ys[j] + h10 * h * ds[j] + h01 * ys[j + 1] + h11 * h * ds[j + 1]


def _linear_shoot_numpy(q, qp, f, fp, h, ell, mu, seed_center, s, psi_out, psip_out):
    mu_arr = np.atleast_1d(np.asarray(mu, dtype=float))
    batch = mu_arr.shape[0]
    n = q.shape[0] - 1
    ell4 = float(ell * (ell + 4))
    if seed_center:
        v2 = -((q[0] + mu_arr) * s + f[0]) / 12.0
        psi = s + v2 * h * h
        psip = 2.0 * v2 * h
        psi0 = np.full(batch, float(s))
    else:
        c2 = -(q[0] + mu_arr) / (4.0 * (ell + 3.0))
        psi = 1.0 + c2 * h * h
        psip = (ell + (ell + 2.0) * c2 * h * h) / h
        psi0 = np.zeros(batch)
    if psi_out is not None:
        psi_out[:, 0] = psi0
        psip_out[:, 0] = 0.0
        psi_out[:, 1] = psi
        psip_out[:, 1] = psip

    def rhs(rr, uu, pp):
        qv = _hermite_uniform_batch(np.full(1, rr), h, q, qp)[0] + mu_arr
        fv = _hermite_uniform_batch(np.full(1, rr), h, f, fp)[0]
        return -(5.0 / rr) * pp + (ell4 / (rr * rr)) * uu - qv * uu - fv

    r = h
    for i in range(1, n):
        r2 = r + 0.5 * h
        r4 = r + h
        k1u = psip
        k1p = rhs(r, psi, psip)
        uu = psi + 0.5 * h * k1u
        pp = psip + 0.5 * h * k1p
        k2u = pp
        k2p = rhs(r2, uu, pp)
        uu = psi + 0.5 * h * k2u
        pp = psip + 0.5 * h * k2p
        k3u = pp
        k3p = rhs(r2, uu, pp)
        uu = psi + h * k3u
        pp = psip + h * k3p
        k4u = pp
        k4p = rhs(r4, uu, pp)
        psi = psi + (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        psip = psip + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        r = r4
        if psi_out is not None:
            psi_out[:, i + 1] = psi
            psip_out[:, i + 1] = psip
    return psi, psip


def _count_flips_numpy(vals):
    v = vals[1:-1]
    nz = v[v != 0.0]
    if nz.size < 2:
        return 0
    sg = np.sign(nz)
    return int(np.sum(sg[1:] != sg[:-1]))


# ---------------------------------------------------------------------------
# public dispatch
# ---------------------------------------------------------------------------


def shoot_mesh(s, lam, nodes):
    """Integrate the nonlinear radial ODE from u(0)=s over ``nodes``.

    Returns (u, u') sampled at the nodes.  nodes[0] must be 0 and the array
    strictly increasing.
    """
    nodes = np.ascontiguousarray(nodes, dtype=float)
    u = np.empty(nodes.shape[0])
    up = np.empty(nodes.shape[0])
    if NUMBA_ENABLED:
        _shoot_mesh_scalar(float(s), float(lam), nodes, u, up)
    else:
        _shoot_mesh_numpy(float(s), float(lam), nodes, u, up)
    return u, up


def shoot_mesh_final(svals, lam, nodes):
    """Boundary values u(R; s) for a batch of shooting heights."""
    nodes = np.ascontiguousarray(nodes, dtype=float)
    svals = np.ascontiguousarray(svals, dtype=float)
    if NUMBA_ENABLED:
        return _shoot_mesh_final_numba(svals, float(lam), nodes)
    return np.atleast_1d(_shoot_mesh_final_numpy(svals, float(lam), nodes))


def linear_shoot_l0(q, qp, f, fp, h, mu, s):
    """Center-value shoot (psi(0)=s, psi'(0)=0) for the ell=0 linear equation.

    q, qp, f, fp are the potential/forcing and their radial derivatives on a
    uniform grid of spacing h.  Returns (psi, psi') on the same grid.
    """
    q = np.ascontiguousarray(q, dtype=float)
    qp = np.ascontiguousarray(qp, dtype=float)
    f = np.ascontiguousarray(f, dtype=float)
    fp = np.ascontiguousarray(fp, dtype=float)
    npts = q.shape[0]
    psi = np.empty(npts)
    psip = np.empty(npts)
    if NUMBA_ENABLED:
        _linear_shoot_scalar(q, qp, f, fp, float(h), 0, float(mu), True, float(s), psi, psip)
    else:
        buf = np.empty((1, npts))
        bufp = np.empty((1, npts))
        _linear_shoot_numpy(q, qp, f, fp, float(h), 0, float(mu), True, float(s), buf, bufp)
        psi[:] = buf[0]
        psip[:] = bufp[0]
    return psi, psip


def eig_shoot(q, qp, h, ell, mu):
    """Regular-solution shoot for one (ell, mu); returns (psi, psi')."""
    q = np.ascontiguousarray(q, dtype=float)
    qp = np.ascontiguousarray(qp, dtype=float)
    npts = q.shape[0]
    zeros = np.zeros(npts)
    psi = np.empty(npts)
    psip = np.empty(npts)
    if NUMBA_ENABLED:
        _linear_shoot_scalar(q, qp, zeros, zeros, float(h), int(ell), float(mu), False, 0.0, psi, psip)
    else:
        buf = np.empty((1, npts))
        bufp = np.empty((1, npts))
        _linear_shoot_numpy(q, qp, zeros, zeros, float(h), int(ell), float(mu), False, 0.0, buf, bufp)
        psi[:] = buf[0]
        psip[:] = bufp[0]
    return psi, psip


def eig_shoot_batch(q, qp, h, ell, mus):
    """Boundary values and interior node counts for a batch of trial mu."""
    q = np.ascontiguousarray(q, dtype=float)
    qp = np.ascontiguousarray(qp, dtype=float)
    mus = np.ascontiguousarray(mus, dtype=float)
    if NUMBA_ENABLED:
        return _eig_shoot_batch_numba(q, qp, float(h), int(ell), mus)
    npts = q.shape[0]
    zeros = np.zeros(npts)
    buf = np.empty((mus.shape[0], npts))
    bufp = np.empty((mus.shape[0], npts))
    _linear_shoot_numpy(q, qp, zeros, zeros, float(h), int(ell), mus, False, 0.0, buf, bufp)
    psiR = buf[:, -1].copy()
    counts = np.array([_count_flips_numpy(buf[j]) for j in range(mus.shape[0])], dtype=np.int64)
    return psiR, counts
