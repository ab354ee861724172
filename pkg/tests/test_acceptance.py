"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""
import math
import os
import random
import sys
import time
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

sys.path.insert(0, os.path.dirname(__file__))

from conftest import (PRINTED_F1, PRINTED_F2, THETA_C, THETA_STAR, che_residual,  # noqa: E402
                      positive_ratio_pair, unitarisable_pair)
from trinoid.certifier import certify, f_poly, sign_table  # noqa: E402
from trinoid.che import CheParams  # noqa: E402
from trinoid.connection import connection_matrix, frobenius_connection  # noqa: E402
from trinoid.exactalg import count_roots  # noqa: E402
from trinoid.monodromy import end_weights, loop_monodromy, m2_check, weight_radicand  # noqa: E402
from trinoid.su2geom import axes, klein_point, simultaneously_unitarisable_pair  # noqa: E402

F = Fraction


def criterion_1():
    t0 = time.perf_counter()
    parts = []
    ok = True
    for ell, printed in ((1, PRINTED_F1), (2, PRINTED_F2)):
        ours = f_poly(THETA_STAR, ell)
        q, r = divmod(ours, printed)
        match = r.is_zero() and q.degree == 0 and q.lc > 0
        ok &= match
        parts.append(f"f_{ell}: deg {ours.degree} vs printed {printed.degree}, "
                     f"{'constant positive quotient' if match else 'exact division fails'}")
    dt = time.perf_counter() - t0
    ok &= dt <= 10
    return ok, "; ".join(parts) + f"; {dt:.2f}s"


def criterion_2():
    t0 = time.perf_counter()
    counts = [count_roots(p, (0, 1)) for p in (PRINTED_F1, PRINTED_F2)]
    dt = time.perf_counter() - t0
    return counts == [0, 0] and dt <= 1, f"roots on (0,1]: {counts}; {dt:.3f}s"


def criterion_3():
    k0 = certify(THETA_STAR, F(4, 5)).k0
    table = sign_table(THETA_STAR, F(4, 5), k0)
    signs = tuple("+" if table[k] > 0 else "-" for k in ("++", "+-", "-+", "--"))
    return signs == ("-", "+", "+", "+"), f"k0 = {k0}, signs (++, +-, -+, --) = {signs}"


def criterion_4():
    results = {"theta_star": certify(THETA_STAR, F(4, 5)).verdict,
               "theta_c": certify(THETA_C, F(4, 5)).verdict}
    for i in range(5):
        results[f"perturb_{i}"] = certify(THETA_STAR.shifted(i, F(1, 1000)), F(4, 5)).verdict
    bad = [k for k, v in results.items() if v != "Unitarisable"]
    return not bad, "all Unitarisable" if not bad else "NotCertified: " + ", ".join(bad)


def criterion_5():
    worst, slowest = 0.0, 0.0
    for t in (0.2, 0.5, 0.8):
        t0 = time.perf_counter()
        a = complex(connection_matrix(THETA_STAR, t).ratio)
        t1 = time.perf_counter()
        f = complex(frobenius_connection(THETA_STAR, t, z_match=0.5).ratio)
        t2 = time.perf_counter()
        worst = max(worst, abs(a - f) / abs(f))
        slowest = max(slowest, t1 - t0, t2 - t1)
    return worst <= 1e-6 and slowest <= 5, f"max relative difference {worst:.2e}; slowest evaluation {slowest:.2f}s"


def criterion_6():
    worst_im, ok = 0.0, True
    for t in (0.1, 0.3, 0.5, 0.7, 0.9):
        r = complex(connection_matrix(THETA_STAR, t).ratio)
        worst_im = max(worst_im, abs(r.imag))
        ok &= abs(r.imag) <= 1e-8 and r.real < 0
    worst_tr_im, max_tr = 0.0, 0.0
    for j in range(16):
        lam = complex(math.cos(2 * math.pi * (j + 0.5) / 16), math.sin(2 * math.pi * (j + 0.5) / 16))
        for loop in (0, 1):
            tr = complex(np.trace(loop_monodromy(THETA_STAR, lam, loop)))
            worst_tr_im = max(worst_tr_im, abs(tr.imag))
            max_tr = max(max_tr, abs(tr.real))
            ok &= abs(tr.imag) <= 1e-8 and abs(tr.real) < 2 + 1e-8
    return ok, f"ratio |Im| <= {worst_im:.1e}; trace |Im| <= {worst_tr_im:.1e}, max |tr| = {max_tr:.6f}"


def criterion_7():
    t0 = time.perf_counter()
    chk = m2_check(THETA_STAR)
    dt = time.perf_counter() - t0
    closed = 2j * math.pi * np.array([[-1 / 32, -3 / 32], [0, 1 / 32]])
    e0 = np.linalg.norm(chk.m0 - np.eye(2), 2)
    e1 = np.linalg.norm(chk.m1, 2)
    e2 = np.abs(chk.m2 - closed).max()
    ok = e0 <= 1e-8 and e1 <= 1e-6 and e2 <= 1e-4 and dt <= 30
    return ok, f"|M0-Id| {e0:.1e}, |M1| {e1:.1e}, |M2-closed| {e2:.1e}; {dt:.2f}s"


def criterion_8():
    star, crit = end_weights(THETA_STAR), end_weights(THETA_C)
    ok_star = star.w_inf_over_pi == F(1, 16)
    failing = [b["check"] for b in crit.balancing if not b["pass"]]
    ok_crit = crit.w_inf == 0 and failing == ["|w0| <= |w1| + |w_inf|"]
    w0, w1, r0, r1 = sp.symbols("w0 w1 r0 r1")
    a1, a2, a3 = r0 + r1, r1 - (w0 + w1) / 4, r1 - w1 / 2
    # (π/8)√R = (π/2)√(a2² − a1a3)  ⇔  R = 16(a2² − a1a3)
    ok_id = sp.expand(weight_radicand(w0, w1, r0, r1) - 16 * (a2 ** 2 - a1 * a3)) == 0
    return ok_star and ok_crit and ok_id, (f"w_inf(star) = pi*{star.w_inf_over_pi}; w_inf(c) = {crit.w_inf}, "
                                           f"failing {failing}; identity {ok_id}")


def criterion_9():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    sound, worst = 0, 0.0
    for _ in range(200):
        A, B, X = unitarisable_pair(rng)
        ax = axes(A, B)
        if simultaneously_unitarisable_pair(A, B) and ax.intersection is not None:
            d = np.linalg.norm(ax.intersection - klein_point(X))
            worst = max(worst, d)
            sound += d <= 1e-8
    complete = 0
    for _ in range(200):
        A, B = positive_ratio_pair(rng)
        complete += not simultaneously_unitarisable_pair(A, B)
    dt = time.perf_counter() - t0
    ok = sound == 200 and complete == 200 and dt <= 60
    return ok, f"sound {sound}/200 (max distance {worst:.1e}), complete {complete}/200; {dt:.2f}s"


def criterion_10():
    rng = random.Random(10)
    n, good = 12, 0

    def r():
        return F(rng.randint(-30, 30), rng.randint(1, 12))

    for _ in range(50):
        chi = CheParams(r(), r(), r(), r(), abs(r()) + F(1, 7))
        while any(chi.mu0 == k + 1 for k in range(n + 1)):
            chi = CheParams(r(), chi.mu1, chi.r0, chi.r1, chi.a)
        res = che_residual(chi, n)
        good += all(c == 0 for c in res.coeffs[:n])
    return good == 50, f"{good}/50 exact residuals vanish through order {n - 1}"


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


def _report(n, capsys=None):
    ok, detail = CRITERIA[n]()
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok, line


@pytest.mark.parametrize("n", range(1, 11))
def test_criterion(n, capsys):
    ok, line = _report(n, capsys)
    assert ok, line


if __name__ == "__main__":
    results = [_report(n)[0] for n in CRITERIA]
    sys.exit(0 if all(results) else 1)
