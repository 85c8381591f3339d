"""Compiled inner loops for the truncated explicit scheme.

Kernels consume normals directly from a numpy Generator (bit-identical
to python-side draws on the same stream) and record every `stride`-th
step into preallocated arrays.  Return value is -1 on success, else the
1-based step index at which a non-finite proposal appeared.

Every kernel draws one normal pair per step regardless of kind; the
infected component uses the first coordinate, the uninfected the
second.  A single-type run therefore reproduces, bit for bit, the
matching component of a two-type run started with the other component
at zero on the same stream.
"""

import math

import numpy as np
from numba import njit


@njit(inline="always", cache=True)
def pair_step(i, u, z1, z2, b_i, dl_i, d_i, b_u, dl_u, d_u, s_i, s_u, dt, sqdt, limit, clip):
    tot = i + u
    if tot != 0.0:
        frac = u / tot
    elif u == 0.0:
        frac = 0.0
    else:
        frac = np.nan  # raw scheme divides by zero here; surface as non-finite
    it = i + i * ((b_i - dl_i) - d_i * tot) * dt + s_i * i * sqdt * z1
    ut = u + u * ((b_u * frac - dl_u) - d_u * tot) * dt + s_u * u * sqdt * z2
    if not (math.isfinite(it) and math.isfinite(ut)):
        return np.nan, np.nan
    norm = math.hypot(it, ut)
    if norm > limit:
        f = limit / norm
        it = it * f
        ut = ut * f
    if clip:
        if it < 0.0:
            it = 0.0
        if ut < 0.0:
            ut = 0.0
    return it, ut


@njit(inline="always", cache=True)
def scalar_step(x, z, b, dl, d, s, dt, sqdt, limit, clip):
    xt = x + x * ((b - dl) - d * x) * dt + s * x * sqdt * z
    if not math.isfinite(xt):
        return np.nan
    norm = abs(xt)
    if norm > limit:
        xt = xt * (limit / norm)
    if clip and xt < 0.0:
        xt = 0.0
    return xt


@njit(cache=True)
def full_kernel(gen, i0, u0, b_i, dl_i, d_i, b_u, dl_u, d_u, s_i, s_u,
                dt, n_steps, limit, clip, stride, rec_i, rec_u):
    sqdt = math.sqrt(dt)
    i = i0
    u = u0
    rec_i[0] = i
    rec_u[0] = u
    for k in range(1, n_steps + 1):
        z1 = gen.standard_normal()
        z2 = gen.standard_normal()
        i, u = pair_step(i, u, z1, z2, b_i, dl_i, d_i, b_u, dl_u, d_u,
                         s_i, s_u, dt, sqdt, limit, clip)
        if math.isnan(i):
            return k
        if k % stride == 0:
            j = k // stride
            rec_i[j] = i
            rec_u[j] = u
    return -1


@njit(cache=True)
def boundary_kernel(gen, x0, infected_side, b, dl, d, s,
                    dt, n_steps, limit, clip, stride, rec):
    sqdt = math.sqrt(dt)
    x = x0
    rec[0] = x
    for k in range(1, n_steps + 1):
        z1 = gen.standard_normal()
        z2 = gen.standard_normal()
        z = z1 if infected_side else z2
        x = scalar_step(x, z, b, dl, d, s, dt, sqdt, limit, clip)
        if math.isnan(x):
            return k
        if k % stride == 0:
            rec[k // stride] = x
    return -1


@njit(cache=True)
def coupled_kernel(gen, i0, u0, b_i, dl_i, d_i, b_u, dl_u, d_u, s_i, s_u,
                   dt, n_steps, limit, clip, stride,
                   rec_i, rec_u, rec_bi, rec_bu):
    sqdt = math.sqrt(dt)
    i = i0
    u = u0
    x = i0
    y = u0
    rec_i[0] = i
    rec_u[0] = u
    rec_bi[0] = x
    rec_bu[0] = y
    for k in range(1, n_steps + 1):
        z1 = gen.standard_normal()
        z2 = gen.standard_normal()
        i, u = pair_step(i, u, z1, z2, b_i, dl_i, d_i, b_u, dl_u, d_u,
                         s_i, s_u, dt, sqdt, limit, clip)
        x = scalar_step(x, z1, b_i, dl_i, d_i, s_i, dt, sqdt, limit, clip)
        y = scalar_step(y, z2, b_u, dl_u, d_u, s_u, dt, sqdt, limit, clip)
        if math.isnan(i) or math.isnan(x) or math.isnan(y):
            return k
        if k % stride == 0:
            j = k // stride
            rec_i[j] = i
            rec_u[j] = u
            rec_bi[j] = x
            rec_bu[j] = y
    return -1
