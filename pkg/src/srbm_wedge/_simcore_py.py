"""Pure-Python Euler step with oblique pushback, used when the extension is absent."""

import math

MAX_PASSES = 100
SNAP = 1e-13


def euler_block(z, normals, dt, F, mu, R, out):
    sq = math.sqrt(dt)
    z1, z2 = float(z[0]), float(z[1])
    d1, d2 = mu[0] * dt, mu[1] * dt
    f11, f12, f21, f22 = F[0, 0], F[0, 1], F[1, 0], F[1, 1]
    r11, r12, r21, r22 = R[0, 0], R[0, 1], R[1, 0], R[1, 1]
    total = 0
    for i, (g1, g2) in enumerate(normals.tolist()):
        z1 += d1 + sq * (f11 * g1 + f12 * g2)
        z2 += d2 + sq * (f21 * g1 + f22 * g2)
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
                z[0], z[1] = z1, z2
                return -1
        total += passes
        out[i, 0] = z1
        out[i, 1] = z2
    z[0], z[1] = z1, z2
    return total
