from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

from trinoid.che import CheParams, coefficients
from trinoid.exactalg import UniPoly
from trinoid.params import TrinoidParams

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

THETA_STAR = TrinoidParams.of("1/2", "1/2", "-1/8", "1/8", "1/8")
THETA_C = TrinoidParams.of("1/2", "1/4", "1/4", "17/128", "1/8")

X = UniPoly.x()


def _poly(coeffs):
    return UniPoly([Fraction(c) for c in coeffs])


X4 = X ** 4
PRINTED_F1 = X4 * _poly([393216, -245760, 243712, -57856, 26368, -5120, 1008, -252, 27]) \
    * _poly([-1179648, 1032192, -2260992, -61440, 1267968, -241088, 189328, -41116, 6859])
PRINTED_F2 = X4 * _poly([21743271936, -6794772480, 6455033856, -2021916672, 762642432, -174735360,
                         41717760, -5871616, 1031424, -109248, 12240, -1512, 81]) \
    * _poly([-79725330432, 37144756224, -24310185984, 358612992, 24553881600, -9189408768,
             7316135936, -1422535168, 570771456, -78774080, 16092368, -1562408, 130321])

# bc/ad for THETA_STAR / THETA_C, frozen from 256-bit Frobenius matching (n = 120)
RATIO_STAR = {0.2: -2.9536113586276835, 0.5: -2.7770756392205835, 0.8: -2.4491664148734387}
RATIO_C = {0.2: 14.2314298488180, 0.5: -124.4931765504817, 0.8: -8.2178354779414}


@pytest.fixture
def theta_star():
    return THETA_STAR


@pytest.fixture
def theta_c():
    return THETA_C


def random_sl2(rng):
    X = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return X / np.sqrt(np.linalg.det(X))


def random_su2(rng):
    a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
    n = np.hypot(abs(a), abs(b))
    a, b = a / n, b / n
    return np.array([[a, -np.conj(b)], [b, np.conj(a)]])


def rotation(phi):
    return np.diag([np.exp(1j * phi), np.exp(-1j * phi)])


def unitarisable_pair(rng):
    """(X U0 X⁻¹, X U1 X⁻¹, X) with U0, U1 random in SU(2)."""
    X = random_sl2(rng)
    Xi = np.linalg.inv(X)
    return X @ random_su2(rng) @ Xi, X @ random_su2(rng) @ Xi, X


def positive_ratio_pair(rng):
    """Elliptic pair diag-rotation and C·rotation·C⁻¹ with bc/ad > 0, conjugated by a random g."""
    phi, psi = rng.uniform(0.1, 3.0, 2)
    a, b, c, d = rng.uniform(0.2, 2.0, 4) * rng.choice([-1, 1], 4)
    if b * c / (a * d) < 0:
        b = -b
    C = np.array([[a, b], [c, d]], dtype=complex)
    C = C / np.sqrt(np.linalg.det(C))
    g = random_sl2(rng)
    gi = np.linalg.inv(g)
    return g @ rotation(phi) @ gi, g @ C @ rotation(psi) @ np.linalg.inv(C) @ gi


def che_residual(chi: CheParams, n: int) -> UniPoly:
    """z(z−1)·CHE applied to the truncated series Σ_{k≤n} c_k z^k."""
    mu0, mu1, r0, r1, a = chi.astuple()
    A = a * (2 - mu0 - mu1) - (r0 + r1)
    B = (mu0 * mu1 - 2 * a * (1 - mu0) - (mu0 + mu1) + 2 * r0 + 1) / 2
    y = UniPoly(coefficients(chi, n).values)
    z = UniPoly.x()
    p1 = z * (z - 1) * (2 * a) + (z - 1) * (1 - mu0) + z * (1 - mu1)
    return z * (z - 1) * y.derivative().derivative() + p1 * y.derivative() + (z * A + B) * y
