"""High-precision reference values for E_{a,b}(x), x <= 0.

Two independent routes, cross-checked where both apply:
  * power series summed in multiprecision (small |x|^(1/a));
  * pole residues plus the Hankel loop integral around the negative axis.
For b >= a + 1 the recurrence E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z is used.
"""
import sys
import mpmath as mp


def ml_series(a, b, x):
    a, b, x = mp.mpf(a), mp.mpf(b), mp.mpf(x)
    scale = float(abs(x)) ** (1.0 / float(a)) if x != 0 else 0.0
    mp.mp.dps = int(scale / 2.3) + 40
    s = mp.mpf(0)
    n = 0
    while True:
        term = x ** n / mp.gamma(a * n + b) if (a * n + b) > 0 or (a * n + b) % 1 != 0 else mp.mpf(0)
        s += term
        if n > 10 and abs(term) < mp.mpf(10) ** (-35) * max(1, abs(s)):
            break
        n += 1
    return s


def ml_hankel(a, b, x):
    mp.mp.dps = 40
    a, b, z = mp.mpf(a), mp.mpf(b), mp.mpf(x)
    if b > a:
        return (ml_hankel(a, b - a, x) - 1 / mp.gamma(b - a)) / z
    res = mp.mpf(0)
    # poles s^a = z in the principal sheet |arg s| < pi
    k = -5
    while k <= 5:
        th = (mp.pi + 2 * k * mp.pi) / a
        if abs(th) < mp.pi - mp.mpf(10) ** -30:
            s = abs(z) ** (1 / a) * mp.expj(th)
            res += s ** (1 - b) * mp.exp(s) / a
        k += 1
    f = lambda s: mp.exp(s) * s ** (a - b) / (s ** a - z)
    g = lambda r: (f(r * mp.expj(mp.pi)) - f(r * mp.expj(-mp.pi))) / (2j * mp.pi)
    hank = mp.quad(g, [0, 1, 10, 50, mp.inf])
    return mp.re(res + hank)


def ml(a, b, x):
    if x == 0:
        mp.mp.dps = 40
        return 1 / mp.gamma(b)
    if abs(x) ** (1.0 / a) < 40:
        return ml_series(a, b, x)
    return ml_hankel(a, b, x)


if __name__ == "__main__":
    if len(sys.argv) > 1 and sys.argv[1] == "check":
        for (a, b, x) in [(0.5, 1, -3), (0.7, 0.7, -5), (1.5, 1.2, -8), (0.9, 1.8, -2), (1.3, 0.6, -6)]:
            print(a, b, x, mp.nstr(ml_series(a, b, x), 20), mp.nstr(ml_hankel(a, b, x), 20))
        sys.exit(0)
    cases = []
    for a in (0.1, 0.3, 0.5, 0.75, 0.9, 1.0, 1.25, 1.5, 1.9):
        for b in (0.3, 0.5, a, 1.0, 1.5, a + 1, 2.7):
            for x in (-0.01, -0.5, -1, -3, -7.5, -20, -60, -150, -400, -1000):
                cases.append((a, b, x))
    for (a, b, x) in cases:
        v = ml(a, b, x)
        print("{%.17g, %.17g, %.17g, %s}," % (a, b, x, mp.nstr(v, 20, min_fixed=-mp.inf, max_fixed=mp.inf)))
