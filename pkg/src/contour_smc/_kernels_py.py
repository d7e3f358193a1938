"""Pure-Python versions of the hot kernels.

Mirrors ``_kernels.pyx`` statement for statement so that both backends
produce the same numbers. Everything here works on plain floats; the
numpy-facing API lives in :mod:`contour_smc.plant` and
:mod:`contour_smc.control`.
"""

from math import copysign, cos, exp, fabs, sin

PAPER = 0
CHRISTOFFEL = 1


def signed_pow(x, p):
    if x == 0.0:
        return 0.0
    return copysign(fabs(x) ** p, x)


def sgn(x):
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


class Plant:
    """Two-link arm with optional lumped uncertainty and joint-1 fault.

    With ``unc`` all zero and ``fault_on`` false this is the nominal model
    the controllers use.
    """

    def __init__(self, m1, m2, L1, L2, r1, r2, I1, I2, g, coriolis_mode,
                 unc, fault_on, t_f, sigma1, sigma2, fa, fb, fc):
        self.m1 = m1
        self.m2 = m2
        self.L1 = L1
        self.L2 = L2
        self.r1 = r1
        self.r2 = r2
        self.I1 = I1
        self.I2 = I2
        self.g = g
        self.coriolis_mode = coriolis_mode
        (self.ua1, self.ub1, self.uc1, self.ud1,
         self.ua2, self.ub2, self.uc2, self.ud2) = unc
        self.fault_on = bool(fault_on)
        self.t_f = t_f
        self.sigma1 = sigma1
        self.sigma2 = sigma2
        self.fa = fa
        self.fb = fb
        self.fc = fc
        # q-independent pieces of M
        self._m_a = m1 * r1 * r1 + m2 * r2 * r2 + m2 * L1 * L1 + I1 + I2
        self._m_b = m2 * L1 * r2
        self._m_d = m2 * r2 * r2 + I2
        self._g1 = (m1 * r1 + m2 * L1) * g
        self._g2 = m2 * r2 * g

    def mass(self, q1, q2):
        c2 = cos(q2)
        return (self._m_a + 2.0 * self._m_b * c2,
                self._m_d + self._m_b * c2,
                self._m_d)

    def coriolis(self, q1, q2, v1, v2):
        h = self._m_b * sin(q2)
        if self.coriolis_mode == CHRISTOFFEL:
            return (-h * v2, -h * (v1 + v2), h * v1, 0.0)
        return (-2.0 * h * v2, -2.0 * h * v2 - 2.0 * h * v1, -2.0 * h * v1, 0.0)

    def gravity(self, q1, q2):
        c12 = cos(q1 + q2)
        return (self._g1 * cos(q1) + self._g2 * c12, self._g2 * c12)

    def uncertainty(self, q1, q2, v1, v2):
        return (self.ua1 * v1 + self.ub1 * sin(self.uc1 * q1) + self.ud1 * sin(v1),
                self.ua2 * v2 + self.ub2 * sin(self.uc2 * q2) + self.ud2 * sin(v2))

    def fault_profile(self, t):
        if t < self.t_f:
            return (0.0, 0.0)
        dt = t - self.t_f
        return (1.0 - exp(-self.sigma1 * dt), 1.0 - exp(-self.sigma2 * dt))

    def fault(self, t, q1, q2, v1, v2):
        if not self.fault_on or t < self.t_f:
            return (0.0, 0.0)
        gam1 = 1.0 - exp(-self.sigma1 * (t - self.t_f))
        shape = (self.fa * sin(q1 * q2) + self.fb * cos(v1 * q2)
                 + self.fc * cos(v1 * v2))
        return (gam1 * shape, 0.0)

    def accel(self, t, q1, q2, v1, v2, tau1, tau2):
        m11, m12, m22 = self.mass(q1, q2)
        b11, b12, b21, b22 = self.coriolis(q1, q2, v1, v2)
        g1, g2 = self.gravity(q1, q2)
        p1, p2 = self.uncertainty(q1, q2, v1, v2)
        f1, f2 = self.fault(t, q1, q2, v1, v2)
        rhs1 = tau1 + f1 - (b11 * v1 + b12 * v2) - g1 - p1
        rhs2 = tau2 + f2 - (b21 * v1 + b22 * v2) - g2 - p2
        det = m11 * m22 - m12 * m12
        return ((m22 * rhs1 - m12 * rhs2) / det,
                (m11 * rhs2 - m12 * rhs1) / det)

    def step(self, t, q1, q2, v1, v2, tau1, tau2, h, rk4):
        """Advance the state by ``h`` under a constant torque."""
        if not rk4:
            a1, a2 = self.accel(t, q1, q2, v1, v2, tau1, tau2)
            return (q1 + h * v1, q2 + h * v2, v1 + h * a1, v2 + h * a2)
        hh = 0.5 * h
        ka1, ka2 = self.accel(t, q1, q2, v1, v2, tau1, tau2)
        kq1, kq2 = v1, v2
        x1 = q1 + hh * kq1
        x2 = q2 + hh * kq2
        y1 = v1 + hh * ka1
        y2 = v2 + hh * ka2
        kb1, kb2 = self.accel(t + hh, x1, x2, y1, y2, tau1, tau2)
        lq1, lq2 = y1, y2
        x1 = q1 + hh * lq1
        x2 = q2 + hh * lq2
        y1 = v1 + hh * kb1
        y2 = v2 + hh * kb2
        kc1, kc2 = self.accel(t + hh, x1, x2, y1, y2, tau1, tau2)
        mq1, mq2 = y1, y2
        x1 = q1 + h * mq1
        x2 = q2 + h * mq2
        y1 = v1 + h * kc1
        y2 = v2 + h * kc2
        kd1, kd2 = self.accel(t + h, x1, x2, y1, y2, tau1, tau2)
        nq1, nq2 = y1, y2
        s6 = h / 6.0
        return (q1 + s6 * (kq1 + 2.0 * lq1 + 2.0 * mq1 + nq1),
                q2 + s6 * (kq2 + 2.0 * lq2 + 2.0 * mq2 + nq2),
                v1 + s6 * (ka1 + 2.0 * kb1 + 2.0 * kc1 + kd1),
                v2 + s6 * (ka2 + 2.0 * kb2 + 2.0 * kc2 + kd2))


class Sliding:
    """Non-singular terminal sliding surface and the shared SMC torque law."""

    def __init__(self, c11, c12, c21, c22, ratio, eta1, eta2, eps_reg):
        self.c11 = c11
        self.c12 = c12
        self.c21 = c21
        self.c22 = c22
        self.ratio = ratio
        self.eta1 = eta1
        self.eta2 = eta2
        self.eps_reg = eps_reg

    def surface(self, e1, e2, ed1, ed2):
        r = self.ratio
        return (ed1 + self.c11 * signed_pow(e1, r) + self.c21 * signed_pow(e1, self.eta1),
                ed2 + self.c12 * signed_pow(e2, r) + self.c22 * signed_pow(e2, self.eta2))

    def _gain1(self, e, c1, c2, eta):
        a = fabs(e)
        r = self.ratio
        a1 = a if r >= 1.0 or a >= self.eps_reg else self.eps_reg
        a2 = a if eta >= 1.0 or a >= self.eps_reg else self.eps_reg
        return c1 * r * a1 ** (r - 1.0) + c2 * eta * a2 ** (eta - 1.0)

    def gain(self, e1, e2):
        return (self._gain1(e1, self.c11, self.c21, self.eta1),
                self._gain1(e2, self.c12, self.c22, self.eta2))

    def torque(self, plant, q1, q2, v1, v2, r1, r2, rd1, rd2, rdd1, rdd2,
               K1, K2, k1, k2):
        """Return ``(u1, u2, s1, s2)`` for the NTSMC/ANTSMC law.

        ``K`` is the additive lumped-term estimate, ``k`` the per-joint
        switching gain.
        """
        e1 = q1 - r1
        e2 = q2 - r2
        ed1 = v1 - rd1
        ed2 = v2 - rd2
        s1, s2 = self.surface(e1, e2, ed1, ed2)
        g1, g2 = self.gain(e1, e2)
        w1 = g1 * ed1 - rdd1
        w2 = g2 * ed2 - rdd2
        m11, m12, m22 = plant.mass(q1, q2)
        b11, b12, b21, b22 = plant.coriolis(q1, q2, v1, v2)
        gr1, gr2 = plant.gravity(q1, q2)
        z1 = s1 - v1
        z2 = s2 - v2
        u1 = (-(m11 * w1 + m12 * w2) - (b11 * z1 + b12 * z2) + gr1 + K1
              - k1 * (s1 * fabs(s1) + sgn(s1) * fabs(s1)))
        u2 = (-(m12 * w1 + m22 * w2) - (b21 * z1 + b22 * z2) + gr2 + K2
              - k2 * (s2 * fabs(s2) + sgn(s2) * fabs(s2)))
        return (u1, u2, s1, s2)
