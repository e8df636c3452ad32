"""High-precision reference implementation used to freeze expected values.

Written directly from the closed forms in mpmath at 40 digits; shares no code
with the package.  ``python tests/mp_reference.py`` prints the frozen table.
"""
import mpmath as mp

mp.mp.dps = 40


def A(s):
    s = mp.mpf(s)
    return mp.log(mp.sqrt(s) + mp.sqrt(s - 1))


def D(s):
    s = mp.mpf(s)
    return 2 * s - 1 + mp.sqrt((s - 1) / s) * A(s)


def branch(s, alpha):
    s, alpha = mp.mpf(s), mp.mpf(alpha)
    d = D(s)
    r = mp.sqrt(s * (s - 1))
    return {"a": 1 / d, "b": s / d, "sigma": (r + A(s)) ** 2 / (2 * d ** 3),
            "lambda": (r + A(s) + 4 * alpha * d * A(s)) ** 2 / (2 * d ** 3)}


def E(s):
    s = mp.mpf(s)
    r = mp.sqrt(s * (s - 1))
    return 3 / (2 * s * r) * A(s) ** 2 + (4 + 3 / s) * A(s) + (4 * s ** 2 - 5 * s - 3) / (2 * r)


def F(s):
    s = mp.mpf(s)
    r = mp.sqrt(s * (s - 1))
    return (2 / s ** 2 * A(s) ** 3 + 2 * (4 * s - 3) / r * A(s) ** 2
            + 2 * (2 * s - 1) * (4 * s - 3) / s * A(s) - 4 * (2 * s - 1) ** 2 / r)


def phi(a, w):
    a, w = mp.mpf(a), mp.mpf(w)
    return mp.sqrt(a) * (mp.sqrt(w * (w - a)) + a * mp.log((mp.sqrt(w) + mp.sqrt(w - a)) / mp.sqrt(a)))


def integral_inv_w(a, sigma):
    """Int_{-1}^{1} dy / w, integrating w'' = sigma / w^2 together with the integral."""
    a, sigma = mp.mpf(a), mp.mpf(sigma)
    sol = mp.odefun(lambda x, y: [y[1], sigma / y[0] ** 2, 1 / y[0]], 0, [a, mp.mpf(0), mp.mpf(0)])
    w, wp, q = sol(1)
    return 2 * q, w, wp


def lam_of_s(s, alpha):
    return branch(s, alpha)["lambda"]


def s_star(alpha):
    """Fold by maximising lambda(s) directly, not through E and F."""
    return mp.findroot(lambda s: mp.diff(lambda x: lam_of_s(x, alpha), s), (1.01, 50),
                       solver="anderson", tol=mp.mpf(10) ** -20)


if __name__ == "__main__":
    print("A(2) =", A(2))
    print("A(4) =", A(4))
    print("E(2) =", E(2))
    print("F(2) =", F(2))
    print("phi(0.5, 0.75) =", phi(0.5, 0.75))
    print("branch(2, 0) =", branch(2, 0))
    print("branch(2, 1) =", branch(2, 1))
    bp = branch(2, 0)
    print("I, w(1), w'(1) at s=2 =", integral_inv_w(bp["a"], bp["sigma"]))
    for al in (0, 0.25, 0.5, 1, 2):
        ss = s_star(al)
        print(f"alpha={al}: s* =", ss, " lambda* =", lam_of_s(ss, al))
    sm = mp.findroot(lambda s: mp.diff(lambda x: branch(x, 0)["b"], s), 8)
    print("argmin b =", sm, "b_min =", branch(sm, 0)["b"])
    print("g(3/2) =", A(1.5) - mp.mpf(1.5) * (4 * 1.5 - 5) / (8 * mp.mpf(0.5) * mp.sqrt(mp.mpf(1.5) * 0.5)))
