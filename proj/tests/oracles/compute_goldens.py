"""High-precision oracles for the frozen constants in the unit tests.

Run with: python tests/oracles/compute_goldens.py
Each value is computed directly from its defining formula with mpmath at
50 digits; none of it goes through the C++ library.
"""
import mpmath as mp

mp.mp.dps = 50


def g(x, alpha, rho):
    w = mp.pi * (rho - mp.mpf(1) / 2)
    # |cos x| guards against quadrature nodes rounding past pi/2
    return mp.sin(alpha * (x + w)) / (
        abs(mp.cos(x)) ** (1 / alpha) * mp.cos((1 - alpha) * x - alpha * w) ** (1 - 1 / alpha))


def g_moment(alpha, rho, q):
    # E[G^q 1{G>0}], V uniform on (-pi/2, pi/2); G > 0 iff V > -omega
    lo = -mp.pi * (rho - mp.mpf(1) / 2)
    return mp.re(mp.quad(lambda v: g(v, alpha, rho) ** q, [lo, mp.pi / 2])) / mp.pi


def positive_moment(alpha, rho, q):
    zeta = 1 - 1 / mp.mpf(alpha)
    return mp.gamma(1 + q * zeta) * g_moment(alpha, rho, q)


def tail_integral(b, p, q):
    f = lambda x: x ** (p - 1) * min(1, (b * x) ** (-q))
    pts = [1, 1 / b, mp.inf] if b < 1 else [1, mp.inf]
    return mp.quad(f, pts)


def exp_moment_lhs(alpha, s, x):
    zeta = 1 - 1 / mp.mpf(alpha)
    return mp.quad(lambda y: y ** s * mp.exp(-x * y ** zeta) * mp.exp(-y), [0, 1, mp.inf])


def g_laplace_lhs(alpha, rho, x):
    lo = -mp.pi * (rho - mp.mpf(1) / 2)
    return mp.quad(lambda v: mp.exp(-x * g(v, alpha, rho)), [lo, mp.pi / 2]) / (mp.pi / 2 - lo)


def q_series(alpha, p, r, rho, terms=200):
    s = 0
    for k in range(1, terms + 1):
        s += rho * (1 - rho) ** (k - 1) * (1 + r) ** (k - 1) * (
            (1 + r - p / alpha) ** (1 - k) / (p * (1 - p) * (1 - p / alpha)) - (1 + r) ** (1 - k) / p)
    return s


if __name__ == "__main__":
    a, r = mp.mpf("1.5"), mp.mpf("0.4")
    print("cms_g(0.3; 1.5, 0.4) =", mp.nstr(g(mp.mpf("0.3"), a, r), 20))
    print("positive_moment(1.5, 0.4, 0.7) =", mp.nstr(positive_moment(a, r, mp.mpf("0.7")), 20))
    print("g_moment(0.7, 0.6, 0.3) =", mp.nstr(g_moment(mp.mpf("0.7"), mp.mpf("0.6"), mp.mpf("0.3")), 20))
    print("tail_integral(0.5, 0.3, 2) =", mp.nstr(tail_integral(mp.mpf("0.5"), mp.mpf("0.3"), 2), 20))
    print("tail_integral(0.5, 0.3, 1) =", mp.nstr(tail_integral(mp.mpf("0.5"), mp.mpf("0.3"), 1), 20))
    print("exp_moment_lhs(1.5, 1, 10) =", mp.nstr(exp_moment_lhs(a, 1, 10), 20))
    print("exp_moment_lhs(0.5, 0.5, 100) =", mp.nstr(exp_moment_lhs(mp.mpf("0.5"), mp.mpf("0.5"), 100), 20))
    print("g_laplace_lhs(1.5, 0.4, 5) =", mp.nstr(g_laplace_lhs(a, r, 5), 20))
    print("q_series(1.5, 0.3, 1, 0.5) =", mp.nstr(q_series(a, mp.mpf("0.3"), 1, mp.mpf("0.5")), 20))
    print("triple stick moment E[l1 l2 l3] =", mp.nstr(mp.beta(2, 3) * mp.beta(2, 2) * mp.beta(2, 1), 20))
