# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Statement-for-statement mirror of ``_kernels_py.py``; keep the two in sync.
"""

from libc.math cimport copysign, cos, exp, fabs, pow, sin

DEF _CHRISTOFFEL = 1

PAPER = 0
CHRISTOFFEL = _CHRISTOFFEL


cdef inline double _spow(double x, double p) nogil:
    if x == 0.0:
        return 0.0
    return copysign(pow(fabs(x), p), x)


cdef inline double _sgn(double x) nogil:
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


def signed_pow(double x, double p):
    return _spow(x, p)


def sgn(double x):
    return _sgn(x)


cdef class Plant:
    cdef public double m1, m2, L1, L2, r1, r2, I1, I2, g
    cdef public int coriolis_mode
    cdef public double ua1, ub1, uc1, ud1, ua2, ub2, uc2, ud2
    cdef public bint fault_on
    cdef public double t_f, sigma1, sigma2, fa, fb, fc
    cdef double _m_a, _m_b, _m_d, _g1, _g2

    def __init__(self, double m1, double m2, double L1, double L2, double r1, double r2,
                 double I1, double I2, double g, int coriolis_mode, unc, fault_on,
                 double t_f, double sigma1, double sigma2, double fa, double fb, double fc):
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
        self._m_a = m1 * r1 * r1 + m2 * r2 * r2 + m2 * L1 * L1 + I1 + I2
        self._m_b = m2 * L1 * r2
        self._m_d = m2 * r2 * r2 + I2
        self._g1 = (m1 * r1 + m2 * L1) * g
        self._g2 = m2 * r2 * g

    cdef inline void _mass(self, double q2, double* out) nogil:
        cdef double c2 = cos(q2)
        out[0] = self._m_a + 2.0 * self._m_b * c2
        out[1] = self._m_d + self._m_b * c2
        out[2] = self._m_d

    cdef inline void _coriolis(self, double q2, double v1, double v2, double* out) nogil:
        cdef double h = self._m_b * sin(q2)
        if self.coriolis_mode == _CHRISTOFFEL:
            out[0] = -h * v2
            out[1] = -h * (v1 + v2)
            out[2] = h * v1
        else:
            out[0] = -2.0 * h * v2
            out[1] = -2.0 * h * v2 - 2.0 * h * v1
            out[2] = -2.0 * h * v1
        out[3] = 0.0

    cdef inline void _gravity(self, double q1, double q2, double* out) nogil:
        cdef double c12 = cos(q1 + q2)
        out[0] = self._g1 * cos(q1) + self._g2 * c12
        out[1] = self._g2 * c12

    cdef void _accel(self, double t, double q1, double q2, double v1, double v2,
                     double tau1, double tau2, double* out) nogil:
        cdef double m[3]
        cdef double b[4]
        cdef double gr[2]
        cdef double p1, p2, f1 = 0.0, rhs1, rhs2, det
        self._mass(q2, m)
        self._coriolis(q2, v1, v2, b)
        self._gravity(q1, q2, gr)
        p1 = self.ua1 * v1 + self.ub1 * sin(self.uc1 * q1) + self.ud1 * sin(v1)
        p2 = self.ua2 * v2 + self.ub2 * sin(self.uc2 * q2) + self.ud2 * sin(v2)
        if self.fault_on and t >= self.t_f:
            f1 = (1.0 - exp(-self.sigma1 * (t - self.t_f))) * (
                self.fa * sin(q1 * q2) + self.fb * cos(v1 * q2) + self.fc * cos(v1 * v2))
        rhs1 = tau1 + f1 - (b[0] * v1 + b[1] * v2) - gr[0] - p1
        rhs2 = tau2 - (b[2] * v1 + b[3] * v2) - gr[1] - p2
        det = m[0] * m[2] - m[1] * m[1]
        out[0] = (m[2] * rhs1 - m[1] * rhs2) / det
        out[1] = (m[0] * rhs2 - m[1] * rhs1) / det

    def mass(self, double q1, double q2):
        cdef double m[3]
        self._mass(q2, m)
        return (m[0], m[1], m[2])

    def coriolis(self, double q1, double q2, double v1, double v2):
        cdef double b[4]
        self._coriolis(q2, v1, v2, b)
        return (b[0], b[1], b[2], b[3])

    def gravity(self, double q1, double q2):
        cdef double gr[2]
        self._gravity(q1, q2, gr)
        return (gr[0], gr[1])

    def uncertainty(self, double q1, double q2, double v1, double v2):
        return (self.ua1 * v1 + self.ub1 * sin(self.uc1 * q1) + self.ud1 * sin(v1),
                self.ua2 * v2 + self.ub2 * sin(self.uc2 * q2) + self.ud2 * sin(v2))

    def fault_profile(self, double t):
        if t < self.t_f:
            return (0.0, 0.0)
        cdef double dt = t - self.t_f
        return (1.0 - exp(-self.sigma1 * dt), 1.0 - exp(-self.sigma2 * dt))

    def fault(self, double t, double q1, double q2, double v1, double v2):
        if not self.fault_on or t < self.t_f:
            return (0.0, 0.0)
        cdef double gam1 = 1.0 - exp(-self.sigma1 * (t - self.t_f))
        return (gam1 * (self.fa * sin(q1 * q2) + self.fb * cos(v1 * q2)
                        + self.fc * cos(v1 * v2)), 0.0)

    def accel(self, double t, double q1, double q2, double v1, double v2,
              double tau1, double tau2):
        cdef double a[2]
        self._accel(t, q1, q2, v1, v2, tau1, tau2, a)
        return (a[0], a[1])

    cdef void _step(self, double t, double* x, double tau1, double tau2, double h,
                    bint rk4) nogil:
        cdef double ka[2]
        cdef double kb[2]
        cdef double kc[2]
        cdef double kd[2]
        cdef double q1 = x[0], q2 = x[1], v1 = x[2], v2 = x[3]
        cdef double hh, x1, x2, y1, y2, lq1, lq2, mq1, mq2, nq1, nq2, s6
        if not rk4:
            self._accel(t, q1, q2, v1, v2, tau1, tau2, ka)
            x[0] = q1 + h * v1
            x[1] = q2 + h * v2
            x[2] = v1 + h * ka[0]
            x[3] = v2 + h * ka[1]
            return
        hh = 0.5 * h
        self._accel(t, q1, q2, v1, v2, tau1, tau2, ka)
        x1 = q1 + hh * v1
        x2 = q2 + hh * v2
        y1 = v1 + hh * ka[0]
        y2 = v2 + hh * ka[1]
        self._accel(t + hh, x1, x2, y1, y2, tau1, tau2, kb)
        lq1 = y1
        lq2 = y2
        x1 = q1 + hh * lq1
        x2 = q2 + hh * lq2
        y1 = v1 + hh * kb[0]
        y2 = v2 + hh * kb[1]
        self._accel(t + hh, x1, x2, y1, y2, tau1, tau2, kc)
        mq1 = y1
        mq2 = y2
        x1 = q1 + h * mq1
        x2 = q2 + h * mq2
        y1 = v1 + h * kc[0]
        y2 = v2 + h * kc[1]
        self._accel(t + h, x1, x2, y1, y2, tau1, tau2, kd)
        nq1 = y1
        nq2 = y2
        s6 = h / 6.0
        x[0] = q1 + s6 * (v1 + 2.0 * lq1 + 2.0 * mq1 + nq1)
        x[1] = q2 + s6 * (v2 + 2.0 * lq2 + 2.0 * mq2 + nq2)
        x[2] = v1 + s6 * (ka[0] + 2.0 * kb[0] + 2.0 * kc[0] + kd[0])
        x[3] = v2 + s6 * (ka[1] + 2.0 * kb[1] + 2.0 * kc[1] + kd[1])

    def step(self, double t, double q1, double q2, double v1, double v2,
             double tau1, double tau2, double h, bint rk4):
        """Advance the state by ``h`` under a constant torque."""
        cdef double x[4]
        x[0] = q1
        x[1] = q2
        x[2] = v1
        x[3] = v2
        self._step(t, x, tau1, tau2, h, rk4)
        return (x[0], x[1], x[2], x[3])


cdef class Sliding:
    cdef public double c11, c12, c21, c22, ratio, eta1, eta2, eps_reg

    def __init__(self, double c11, double c12, double c21, double c22, double ratio,
                 double eta1, double eta2, double eps_reg):
        self.c11 = c11
        self.c12 = c12
        self.c21 = c21
        self.c22 = c22
        self.ratio = ratio
        self.eta1 = eta1
        self.eta2 = eta2
        self.eps_reg = eps_reg

    cdef inline double _gain1(self, double e, double c1, double c2, double eta) nogil:
        cdef double a = fabs(e)
        cdef double r = self.ratio
        cdef double a1 = a if (r >= 1.0 or a >= self.eps_reg) else self.eps_reg
        cdef double a2 = a if (eta >= 1.0 or a >= self.eps_reg) else self.eps_reg
        return c1 * r * pow(a1, r - 1.0) + c2 * eta * pow(a2, eta - 1.0)

    def surface(self, double e1, double e2, double ed1, double ed2):
        cdef double r = self.ratio
        return (ed1 + self.c11 * _spow(e1, r) + self.c21 * _spow(e1, self.eta1),
                ed2 + self.c12 * _spow(e2, r) + self.c22 * _spow(e2, self.eta2))

    def gain(self, double e1, double e2):
        return (self._gain1(e1, self.c11, self.c21, self.eta1),
                self._gain1(e2, self.c12, self.c22, self.eta2))

    def torque(self, Plant plant, double q1, double q2, double v1, double v2,
               double r1, double r2, double rd1, double rd2, double rdd1, double rdd2,
               double K1, double K2, double k1, double k2):
        """Return ``(u1, u2, s1, s2)`` for the NTSMC/ANTSMC law."""
        cdef double m[3]
        cdef double b[4]
        cdef double gr[2]
        cdef double e1 = q1 - r1, e2 = q2 - r2, ed1 = v1 - rd1, ed2 = v2 - rd2
        cdef double rr = self.ratio
        cdef double s1 = ed1 + self.c11 * _spow(e1, rr) + self.c21 * _spow(e1, self.eta1)
        cdef double s2 = ed2 + self.c12 * _spow(e2, rr) + self.c22 * _spow(e2, self.eta2)
        cdef double w1 = self._gain1(e1, self.c11, self.c21, self.eta1) * ed1 - rdd1
        cdef double w2 = self._gain1(e2, self.c12, self.c22, self.eta2) * ed2 - rdd2
        cdef double z1 = s1 - v1, z2 = s2 - v2, u1, u2
        plant._mass(q2, m)
        plant._coriolis(q2, v1, v2, b)
        plant._gravity(q1, q2, gr)
        u1 = (-(m[0] * w1 + m[1] * w2) - (b[0] * z1 + b[1] * z2) + gr[0] + K1
              - k1 * (s1 * fabs(s1) + _sgn(s1) * fabs(s1)))
        u2 = (-(m[1] * w1 + m[2] * w2) - (b[2] * z1 + b[3] * z2) + gr[1] + K2
              - k2 * (s2 * fabs(s2) + _sgn(s2) * fabs(s2)))
        return (u1, u2, s1, s2)
