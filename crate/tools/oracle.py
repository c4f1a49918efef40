"""Reference values computed independently of the Rust code.

Run with `python3 tools/oracle.py`; the printed numbers are frozen into the
test suites.
"""
from math import gcd, isqrt

from mpmath import mp, mpf, pi, sin, cos, cot

mp.dps = 40


def primitive_count(r):
    """#{(a, b) in Z^2 primitive : a^2 + b^2 <= r^2} for rational r given as (num, den)."""
    num, den = r
    n = 0
    lim = num // den + 1
    for a in range(-lim, lim + 1):
        for b in range(-lim, lim + 1):
            if (a, b) != (0, 0) and gcd(a, b) == 1 and (a * a + b * b) * den * den <= num * num:
                n += 1
    return n


def trapezoid_lattice():
    return sum(
        1
        for a in range(-3, 4)
        for b in range(-3, 4)
        if (a, b) != (0, 0) and gcd(a, b) == 1 and 2 * b >= 1 and b <= 1 and 0 <= a <= b
    )


def heights_widths(n):
    return [
        (4 * sin(pi * (2 * j - 1) / n) * cos(pi / n), 2 * sin(pi * (2 * j - 1) / n) * sin(pi / n))
        for j in range(1, (n - 1) // 2 + 1)
    ]


def area_x(n):
    # two regular n-gons of circumradius 1
    return n * sin(2 * pi / n)


def c_x_orbit_sum(n):
    # per-orbit sum: n/((n-2) pi) * sum 1/(h_j w_j)
    return n / ((n - 2) * pi) * sum(1 / (h * w) for h, w in heights_widths(n))


def c_s(n):
    # twice the base constant plus the branch-point term, over area(X_n)
    return 2 * c_x_orbit_sum(n) + mpf(n * (n - 1)) / (4 * (n - 2) * pi) / area_x(n)


def p_coeff(n):
    return 6 / pi * mpf((n - 1) * (n * n + n + 3)) / (144 * (n - 2))


def main():
    print("primitive counts")
    for r in [(5, 2), (10, 1), (50, 1), (15, 2)]:
        print(f"  r={r[0]}/{r[1]}: {primitive_count(r)}")
    print("trapezoid lattice points:", trapezoid_lattice())
    for n in [5, 7, 9]:
        print(f"n={n}")
        for j, (h, w) in enumerate(heights_widths(n), 1):
            print(f"  h{j}={mp.nstr(h, 17)} w{j}={mp.nstr(w, 17)} h/w={mp.nstr(h / w, 17)} area={mp.nstr(h * w, 17)}")
        print("  2cot(pi/n) =", mp.nstr(2 * cot(pi / n), 17))
        print("  area X_n =", mp.nstr(area_x(n), 17))
        print("  c_X (orbit sum) =", mp.nstr(c_x_orbit_sum(n), 17))
        print("  c_S =", mp.nstr(c_s(n), 17))
        tri = sin(2 * pi / n) / 2
        print("  area P_n =", mp.nstr(tri, 17), " P coeff =", mp.nstr(p_coeff(n), 17),
              " P const =", mp.nstr(p_coeff(n) / tri, 17))
    hw = heights_widths(5)
    print("class ratio h2w2/h1w1 =", mp.nstr(hw[1][0] * hw[1][1] / (hw[0][0] * hw[0][1]), 17))
    print("u5 lower-left =", mp.nstr(2 * cot(pi / 5), 17))
    print("sl2z raw formula at T=10 =", mp.nstr(3 / pi * 100, 17))
    for n in [3, 5, 7, 9, 11]:
        s = sum(1 / sin(pi * (2 * j - 1) / n) ** 2 for j in range(1, (n - 1) // 2 + 1))
        print(f"identity n={n}: {mp.nstr(s, 20)} vs {mpf(n * n - 1) / 6}")


if __name__ == "__main__":
    main()
