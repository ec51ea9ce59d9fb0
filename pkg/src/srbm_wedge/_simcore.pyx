# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Euler step with oblique pushback."""

from libc.math cimport sqrt

DEF MAX_PASSES = 100
DEF SNAP = 1e-13


def euler_block(double[::1] z, const double[:, ::1] normals, double dt,
                const double[:, ::1] F, const double[::1] mu, const double[:, ::1] R,
                double[:, ::1] out):
    """Advance ``z`` through ``len(normals)`` steps, writing each state to ``out``.

    Returns the total number of pushback passes, or -1 if one step needed
    more than ``MAX_PASSES``; ``z`` then holds the state at that step.
    """
    cdef Py_ssize_t i, n = normals.shape[0]
    cdef double sq = sqrt(dt)
    cdef double z1 = z[0], z2 = z[1], g1, g2, t
    cdef double d1 = mu[0] * dt, d2 = mu[1] * dt
    cdef double r11 = R[0, 0], r12 = R[0, 1], r21 = R[1, 0], r22 = R[1, 1]
    cdef long passes, total = 0
    for i in range(n):
        g1 = normals[i, 0]
        g2 = normals[i, 1]
        z1 += d1 + sq * (F[0, 0] * g1 + F[0, 1] * g2)
        z2 += d2 + sq * (F[1, 0] * g1 + F[1, 1] * g2)
        passes = 0
        while z1 < 0 or z2 < 0:
            # residues below SNAP come from rounding in the alternation
            if z1 > -SNAP and z2 > -SNAP:
                z1 = z1 if z1 > 0 else 0.0
                z2 = z2 if z2 > 0 else 0.0
                break
            if z1 < 0:
                t = -z1 / r11
                z1 = 0.0
                z2 += r21 * t
            if z2 < 0:
                t = -z2 / r22
                z2 = 0.0
                z1 += r12 * t
            passes += 1
            if passes > MAX_PASSES:
                z[0] = z1
                z[1] = z2
                return -1
        total += passes
        out[i, 0] = z1
        out[i, 1] = z2
    z[0] = z1
    z[1] = z2
    return total
