import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, strategies as st

from trinoid.che import (SIGNS, CheParams, classify_sign, coefficients, from_trinoid, positivity_threshold,
                         q_value, recurrence_terms, scalar_che_coeffs)
from trinoid.errors import ConvergenceError, DomainError, PoleError, ResonanceError, SignAssumptionError
from trinoid.params import TrinoidParams

from conftest import THETA_STAR, che_residual

F = Fraction
frac = st.fractions(min_value=-3, max_value=3, max_denominator=9)
chis = st.builds(CheParams, frac, frac, frac, frac, st.fractions(min_value=F(1, 9), max_value=3, max_denominator=9))


def test_recurrence_terms_examples():
    chi = CheParams(0, 0, 0, 0, 1)
    assert recurrence_terms(chi, 0) == (1, F(-1, 2), 0)
    assert recurrence_terms(chi, 1) == (4, F(-1, 2), 2)
    chi = CheParams(F(1, 3), F(2, 5), F(1, 7), F(1, 11), F(1, 13))
    assert recurrence_terms(chi, 0)[0] == 1 - F(1, 3)


def test_coefficients_examples():
    c = coefficients(CheParams(0, 0, 0, 0, 1), 2)
    assert c.exact
    assert (c[-1], c[0], c[1], c[2]) == (0, 1, F(-1, 2), F(9, 16))


def test_coefficients_float_mode():
    c = coefficients(CheParams(0.1, 0.2, 0.0, 0.0, 1.0), 3)
    assert not c.exact and c[0] == 1.0


def test_resonance():
    with pytest.raises(ResonanceError) as exc:
        coefficients(CheParams(1, 0, 0, 0, 1), 3)
    assert exc.value.k == 0


@given(chis)
def test_truncated_series_solves_che_exactly(chi):
    assume(all(chi.mu0 != k + 1 for k in range(13)))
    n = 12
    res = che_residual(chi, n)
    assert all(c == 0 for c in res.coeffs[:n])


@pytest.mark.parametrize("chi, m", [(CheParams(0, 0, 0, 0, 1), 2), (CheParams(0, 0, -5, 0, 1), 3)])
def test_positivity_threshold_examples(chi, m):
    assert positivity_threshold(chi) == m


def test_positivity_threshold_needs_positive_a():
    with pytest.raises(DomainError):
        positivity_threshold(CheParams(0, 0, 0, 0, -1))


@given(chis)
def test_positivity_threshold_minimal(chi):
    m = positivity_threshold(chi)
    for k in range(m, m + 60):
        assert all(v > 0 for v in recurrence_terms(chi, k))
    if m > 0:
        assert not all(v > 0 for v in recurrence_terms(chi, m - 1))


def _chi_star(signs, t0=F(4, 5)):
    return from_trinoid(THETA_STAR, float(t0), signs)


def test_classify_sign_examples():
    assert classify_sign(_chi_star((1, 1))).tag == "Sminus"
    assert classify_sign(_chi_star((1, -1))).tag == "Splus"
    assert classify_sign(CheParams(0, 0, -5, 0, 1), cap=0).tag == "Undetermined"


@given(chis)
def test_sign_propagates(chi):
    assume(all(chi.mu0 != k + 1 for k in range(300)))
    cls = classify_sign(chi, cap=60)
    assume(cls.tag != "Undetermined")
    c = coefficients(chi, cls.witness + 50)
    sign = 1 if cls.tag == "Splus" else -1
    assert all(sign * c[k] > 0 for k in range(cls.witness, cls.witness + 51))


@pytest.mark.parametrize("t", [0.2, 0.5, 0.8])
def test_q_sign_matches_class(t):
    for signs in SIGNS:
        chi = from_trinoid(THETA_STAR, t, signs)
        tag = classify_sign(chi).tag
        q, _ = q_value(chi)
        assert (q >= 0) if tag == "Splus" else (q <= 0)


def test_q_value_matches_high_precision_reference():
    chi = from_trinoid(THETA_STAR, 0.5, (1, -1))
    q, err = q_value(chi)
    with mpmath.workprec(256):
        ref, _ = q_value(from_trinoid(THETA_STAR, mpmath.mpf(1) / 2, (1, -1)), K=20000, prec=256)
    assert q >= 0
    assert abs(q - float(ref)) <= 1e-9 * abs(float(ref))
    assert err < 1e-9


def test_aitken_is_unreliable_on_logarithmic_tails():
    # Δ² reports a tiny increment but lands on a wrong limit; Richardson does not
    chi = from_trinoid(THETA_STAR, 0.5, (1, -1))
    ref = 2.857499
    qa, erra = q_value(chi, method="aitken")
    qr, _ = q_value(chi)
    assert abs(float(qr) - ref) < 1e-6
    assert abs(float(qa) - ref) > 1e-5 and erra < 1e-9


def test_q_value_reports_non_convergence():
    chi = from_trinoid(THETA_STAR, 0.5, (1, 1))
    with pytest.raises(ConvergenceError) as exc:
        q_value(chi, K=64, tol=1e-14)
    assert len(exc.value.partial) > 1
    assert exc.value.to_json()["K"] == 64


def test_q_value_unknown_method():
    with pytest.raises(ValueError):
        q_value(_chi_star((1, 1)), method="euler")


def test_from_trinoid_example():
    chi = from_trinoid(THETA_STAR, 0.8, (1, 1))
    expected = (math.sqrt(0.6), math.sqrt(0.6), -0.1, 0.1, 0.125 * math.sqrt(0.8))
    assert chi.astuple() == pytest.approx(expected, rel=1e-15)
    flipped = from_trinoid(THETA_STAR, 0.8, (-1, 1))
    assert flipped.mu0 == -chi.mu0 and flipped.mu1 == chi.mu1


@pytest.mark.parametrize("t", [0, 1, -0.1])
def test_from_trinoid_open_interval(t):
    with pytest.raises(DomainError):
        from_trinoid(THETA_STAR, t)


def test_from_trinoid_domain_and_sign_errors():
    with pytest.raises(DomainError):
        from_trinoid(TrinoidParams.of(2, 0, 0, 0, 1), 0.6)
    with pytest.raises(SignAssumptionError):
        from_trinoid(TrinoidParams.of(0, 0, 0, 0, 0), 0.5)


def test_scalar_coefficients():
    p1, p0 = scalar_che_coeffs(CheParams(0, 0, 0, 0, 0))
    assert p1(0.3) == pytest.approx(1 / 0.3 + 1 / (0.3 - 1))
    with pytest.raises(PoleError):
        p1(0)
    with pytest.raises(PoleError):
        p0(1)


def test_indicial_exponents_at_zero():
    chi = CheParams(F(1, 3), F(1, 5), F(1, 7), F(2, 7), F(1, 2))
    p1, p0 = scalar_che_coeffs(chi)
    # residues: z·p1 → 1 − μ0 and z²·p0 → 0 as z → 0, so ρ(ρ−1) + (1−μ0)ρ = 0
    z = F(1, 10 ** 12)
    b1, b0 = z * p1(z), z * z * p0(z)
    roots = sorted(float(r) for r in (0, chi.mu0))
    for rho in roots:
        assert abs(rho * (rho - 1) + float(b1) * rho + float(b0)) < 1e-9


def test_mirrored_parameters():
    chi = CheParams(F(1, 3), F(1, 5), F(1, 7), F(2, 7), F(1, 2))
    m = chi.mirrored()
    assert m.mirrored() == chi
    assert (m.mu0, m.mu1) == (chi.mu1, chi.mu0)
