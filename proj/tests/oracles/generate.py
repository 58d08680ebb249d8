"""Independent high-precision reference values for the C++ tests.

Every value is computed from first principles with mpmath (extremal Rayleigh
quotients, defining integrals), never from the closed forms under test.
Run `python3 generate.py > frozen_values.hpp` to refresh the header.
"""
import mpmath as mp

mp.mp.dps = 40


def sigma(n):
    return mp.pi ** (mp.mpf(n) / 2) / mp.gamma(mp.mpf(n) / 2 + 1)


def radial(n, f, a=0, b=mp.inf):
    return n * sigma(n) * mp.quad(lambda r: f(r) * r ** (n - 1), [a, 1, 10, 100, b] if b == mp.inf else [a, b])


def sobolev_rayleigh(n, p):
    # Aubin–Talenti u = (1 + r^{p/(p-1)})^{-(n-p)/p}
    a, e = p / (p - 1), -(n - p) / p
    u = lambda r: (1 + r ** a) ** e
    du = lambda r: abs(e * (1 + r ** a) ** (e - 1) * a * r ** (a - 1))
    ps = n * p / (n - p)
    grad = radial(n, lambda r: du(r) ** p)
    norm = radial(n, lambda r: u(r) ** ps)
    return grad ** (1 / p) / norm ** (1 / ps)


def gn_rayleigh(n, p, alpha):
    a = p / (p - 1)
    if alpha > 1:
        e = -1 / (alpha - 1)
        u = lambda r: (1 + r ** a) ** e
        du = lambda r: abs(e * (1 + r ** a) ** (e - 1) * a * r ** (a - 1))
        b = mp.inf
        q_main, q_sec = alpha * p, alpha * (p - 1) + 1
        theta = n * (alpha - 1) / (alpha * (n * p - (alpha * p + 1 - alpha) * (n - p)))
    else:
        e = 1 / (1 - alpha)
        u = lambda r: (1 - r ** a) ** e if r < 1 else mp.mpf(0)
        du = lambda r: abs(e * (1 - r ** a) ** (e - 1) * a * r ** (a - 1)) if r < 1 else mp.mpf(0)
        b = 1
        q_main, q_sec = alpha * (p - 1) + 1, alpha * p
        theta = n * (1 - alpha) / ((alpha * p + 1 - alpha) * (n - alpha * (n - p)))
    grad = radial(n, lambda r: du(r) ** p, 0, b) ** (1 / p)
    main = radial(n, lambda r: u(r) ** q_main, 0, b) ** (1 / q_main)
    sec = radial(n, lambda r: u(r) ** q_sec, 0, b) ** (1 / q_sec)
    return main / (grad ** theta * sec ** (1 - theta))


def morrey_rayleigh(n, p):
    # u = 1 - r^{(p-n)/(p-1)} on the unit ball, sup u = 1
    k = (p - n) / (p - 1)
    grad = radial(n, lambda r: (k * r ** (k - 1)) ** p, 0, 1) ** (1 / p)
    return 1 / (sigma(n) ** (1 / mp.mpf(n) - 1 / p) * grad)


def linfty_quadrature(n, p):
    # C = (n sigma)^{-1} (n sigma int_0^inf sinh^{-(n-1)/(p-1)})^{(p-1)/p}
    a = mp.mpf(n - 1) / (p - 1)
    integral = mp.quad(lambda r: mp.sinh(r) ** (-a), [0, 1, 10, mp.inf])
    return (n * sigma(n) * integral) ** ((p - 1) / p) / (n * sigma(n))


def phi(n, t):
    return n * mp.quad(lambda s: mp.sinh(s) ** (n - 1), [0, t])


def margin_F(n, p, t):
    # F cancels to ~1e-40 relative at large t; keep 300 digits here
    with mp.workdps(300):
        return _margin_F(mp.mpf(n), mp.mpf(p), mp.mpf(t))


def _margin_F(n, p, t):
    P = n * mp.quad(lambda s: mp.sinh(s) ** (n - 1), [0, t])
    return mp.sinh(t) ** (p * (n - 1)) - P ** (p * (n - 1) / n) - ((mp.mpf(n) - 1) / n) ** p * P ** p


def emit(name, value):
    print(f"inline constexpr double {name} = {mp.nstr(value, 20, min_fixed=-1, max_fixed=-1)};")


def main():
    print("// Generated by tests/oracles/generate.py (mpmath, 40 digits). Do not edit.")
    print("#pragma once\n")
    print("namespace oracle {\n")
    for n, p in [(3, mp.mpf(2)), (4, mp.mpf(8) / 3), (5, mp.mpf(5) / 2), (6, mp.mpf(12) / 5), (8, mp.mpf(3))]:
        tag = f"{n}_{mp.nstr(p, 4).replace('.', '_')}"
        emit(f"sobolev_{tag}", sobolev_rayleigh(n, p))
    for n, p, alpha in [(4, mp.mpf(8) / 3, mp.mpf(2)), (5, mp.mpf(5) / 2, mp.mpf(3) / 2), (4, mp.mpf(3), mp.mpf(1) / 2)]:
        tag = f"{n}_{mp.nstr(p, 4).replace('.', '_')}_{mp.nstr(alpha, 3).replace('.', '_')}"
        emit(f"gn_{tag}", gn_rayleigh(n, p, alpha))
    for n, p in [(2, mp.mpf(4)), (3, mp.mpf(5)), (4, mp.mpf(6)), (2, mp.mpf(3))]:
        emit(f"morrey_{n}_{int(p)}", morrey_rayleigh(n, p))
        emit(f"linfty_{n}_{int(p)}", linfty_quadrature(n, p))
    for n in [4, 5, 6, 7, 8]:
        for t in ["0.001", "0.5", "3", "12"]:
            emit(f"phi_{n}_{t.replace('.', '_')}", phi(n, mp.mpf(t)))
    # p as the exact double the C++ side passes: F cancels too hard to tolerate
    # a 1e-16 change in p at large t
    for n, p, t in [(4, 8 / 3, "1"), (4, 8 / 3, "10"), (5, 2.5 + 0.2, "3"), (3, 3.0, "2"), (3, 2.9, "69"),
                    (3, 2.9, "30"), (6, 12 / 5 - 0.1, "5")]:
        tag = f"{n}_{mp.nstr(mp.mpf(p), 4).replace('.', '_')}_{t}"
        emit(f"margin_{tag}", margin_F(n, p, t))
    print("\n}  // namespace oracle")


if __name__ == "__main__":
    main()
