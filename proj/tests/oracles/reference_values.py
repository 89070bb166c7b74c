"""Independent high-precision reference values for the frozen test constants.

Run with: python3 tests/oracles/reference_values.py
Everything here uses mpmath directly from the defining integrals or closed
forms; none of it shares code with the C++ implementation.
"""
import mpmath as mp

mp.mp.dps = 40


def W(L, R, P, g):
    y = mp.mpf(g) * P
    return mp.sqrt(L) * (mp.log(1 + y) - R) / mp.sqrt(1 - 1 / (1 + y) ** 2)


def Q(z):
    return mp.erfc(z / mp.sqrt(2)) / 2


def omega_integral(K, l, P):
    R = mp.mpf(K) / l
    th = (mp.e ** R - 1) / P
    b = mp.sqrt(l * mp.mpf(P) ** 2 / (mp.e ** (2 * R) - 1))
    pts = [0] + [th + c / b for c in (-10, -3, -1, 0, 1, 3, 10) if th + c / b > 0] + [mp.inf]
    return mp.quad(lambda x: mp.e ** (-x) * Q(W(l, R, P, x)), pts)


def linearized(K, l, P):
    R = mp.mpf(K) / l
    th = (mp.e ** R - 1) / P
    b = mp.sqrt(l * mp.mpf(P) ** 2 / (mp.e ** (2 * R) - 1))
    w = mp.sqrt(mp.pi / (2 * b * b))
    return 1 - b / mp.sqrt(2 * mp.pi) * mp.e ** (-th) * (mp.e ** w - mp.e ** (-w))


def v_bound(K, l, P):
    R = mp.mpf(K) / l
    th = (mp.e ** R - 1) / P
    b = mp.sqrt(l * mp.mpf(P) ** 2 / (mp.e ** (2 * R) - 1))
    return (1 - mp.erf(-th * b / mp.sqrt(2))
            - mp.e ** ((1 - 2 * th * b * b) / (2 * b * b)) * (1 - mp.erf((1 - b * b * th) / (mp.sqrt(2) * b)))) / 2


def upper_gamma_integral(a, x):
    # t = x e^s flattens the sharp peak at t = x for large negative a
    a, x = mp.mpf(a), mp.mpf(x)
    return x ** a * mp.quad(lambda s: mp.exp(a * s - x * mp.expm1(s)), [0, 0.01, 0.05, 0.2, 1, 3]) * mp.exp(-x)


if __name__ == "__main__":
    print("W(L=300,R=1,P=10,g=1)      =", mp.nstr(W(300, 1, 10, 1), 20))
    print("Q(W(L=300,K=600,P=10,g=2)) =", mp.nstr(Q(W(300, mp.mpf(2), 10, 2)), 20))
    print("Omega(K=600,l=600,P=10)    =", mp.nstr(omega_integral(600, 600, 10), 20))
    print("Omega(K=300,l=300,P=5)     =", mp.nstr(omega_integral(300, 300, 5), 20))
    print("Omega(K=600,l=600,P=2)     =", mp.nstr(omega_integral(600, 600, 2), 20))
    print("Lin(K=300,l=300,P=5)       =", mp.nstr(linearized(300, 300, 5), 20))
    print("v(K=300,l=600,P=100)       =", mp.nstr(v_bound(300, 600, 100), 20))
    print("v(K=600,l=300,P=1)         =", mp.nstr(v_bound(600, 300, 1), 20))
    print("E1(1)                      =", mp.nstr(mp.e1(1), 20))
    print("Gamma(-50.5,10)            =", mp.nstr(mp.gammainc(-50.5, 10), 20))
    print("Gamma(-50.5,10) integral   =", mp.nstr(upper_gamma_integral(-50.5, 10), 20))
