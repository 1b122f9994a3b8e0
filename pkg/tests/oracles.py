"""Reference values computed independently of the library.

Exact rational arithmetic where the inputs are rational, mpmath otherwise.
"""

from fractions import Fraction

import mpmath


def q_number(n, q):
    q = Fraction(q)
    return (1 - q**n) / (1 - q)


def q_sin_exact(z, q, terms=60):
    """Partial sum of ``sum (-1)^k q^{k(k+1)} z^{2k+1} / [2k+1]_q!`` in rationals."""
    z, q = Fraction(z), Fraction(q)
    total = Fraction(0)
    fact = Fraction(1)
    n = 0
    for k in range(terms):
        while n < 2 * k + 1:
            n += 1
            fact *= q_number(n, q)
        total += (-1) ** k * q ** (k * (k + 1)) * z ** (2 * k + 1) / fact
    return total


def q_cos_exact(z, q, terms=60):
    """Partial sum of ``sum (-1)^k q^{k^2} z^{2k} / [2k]_q!`` in rationals."""
    z, q = Fraction(z), Fraction(q)
    total = Fraction(0)
    fact = Fraction(1)
    n = 0
    for k in range(terms):
        while n < 2 * k:
            n += 1
            fact *= q_number(n, q)
        total += (-1) ** k * q ** (k * k) * z ** (2 * k) / fact
    return total


def big_E_q_mp(x, q, dps=40):
    """``E_q^x = (-(1-q) x; q)_inf`` through mpmath's q-Pochhammer symbol."""
    with mpmath.workdps(dps):
        return mpmath.qp(-(1 - mpmath.mpf(q)) * x, mpmath.mpf(q))


def big_E_q_series(x, q, dps=40):
    """``sum q^{n(n-1)/2} x^n / [n]_q!`` in mpmath, summed until terms vanish."""
    with mpmath.workdps(dps):
        x, q = mpmath.mpf(x), mpmath.mpf(q)
        total, term, n = mpmath.mpf(0), mpmath.mpf(1), 0
        while abs(term) > mpmath.mpf(10) ** (-dps) * (1 + abs(total)) or n < 5:
            total += term
            n += 1
            term *= q ** (n - 1) * x * (1 - q) / (1 - q**n)
        return total


def first_eigenvalue_bruteforce(q, ratio_exp=0.1, start=1e-2):
    """Scan ``lam`` with ratio ``q^-ratio_exp`` and bisect 200 times in mpmath."""
    def sine(lam):
        with mpmath.workdps(50):
            z = mpmath.sqrt(mpmath.mpf(lam))
            qq = mpmath.mpf(q)
            s, k = mpmath.mpf(0), 0
            fact = mpmath.mpf(1)
            n = 0
            while True:
                while n < 2 * k + 1:
                    n += 1
                    fact *= (1 - qq**n) / (1 - qq)
                term = qq ** (k * (k + 1)) * z ** (2 * k + 1) / fact
                s += (-1) ** k * term
                if k > 5 and abs(term) < mpmath.mpf(10) ** -45:
                    return s
                k += 1

    lam = mpmath.mpf(start)
    prev = sine(lam)
    while True:
        nxt = lam * mpmath.mpf(q) ** (-ratio_exp)
        val = sine(nxt)
        if (val < 0) != (prev < 0):
            break
        lam, prev = nxt, val
    lo, hi = lam, nxt
    with mpmath.workdps(50):
        for _ in range(200):
            mid = (lo + hi) / 2
            if (sine(mid) < 0) == (prev < 0):
                lo = mid
            else:
                hi = mid
    return float((lo + hi) / 2)
