"""Closed-form dressed states of the Lambda and tied five-level systems.

All closed forms refer to the Hamiltonian of :mod:`stirap_toffoli.model`, which
puts ``-Omega`` on the chain. The classic textbook eigenvectors are written for
``+Omega`` couplings; the two conventions differ by the gauge
``|2> -> -|2>, |4> -> -|4>``, which is applied here so that every returned
vector is an eigenvector of :func:`~stirap_toffoli.model.build_hamiltonian`.

Returned vectors follow one phase convention: the first component whose
magnitude is non-negligible is real and positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, NonHermitianError
from .model import HamiltonianSample

__all__ = [
    "Lambda3Dressed",
    "FiveDressed",
    "GeneralFiveSpectrum",
    "lambda3_dressed",
    "five_eigenvalues_tied",
    "five_eigenvalues_general",
    "five_eigenvectors_tied",
    "numeric_spectrum",
    "canonical_phase",
    "quadratic_roots",
]

# sign flip of the intermediate levels, maps +Omega eigenvectors to -Omega ones
_GAUGE5 = np.array([1.0, -1.0, 1.0, -1.0, 1.0])


def canonical_phase(v, rtol: float = 1e-12):
    """Rotate ``v`` so that its first non-negligible component is real positive."""
    v = np.asarray(v, dtype=complex)
    scale = np.linalg.norm(v)
    if scale == 0:
        return v
    idx = np.flatnonzero(np.abs(v) > rtol * scale)[0]
    return v * (np.abs(v[idx]) / v[idx])


def quadratic_roots(delta: float, x: float) -> tuple:
    """Roots ``(minus, plus)`` of ``L * (L - delta) = x`` for ``x >= 0``.

    Uses the cancellation-free form for the smaller-magnitude root so that
    ``-Omega**2 / delta``-sized eigenvalues keep full relative precision.
    """
    s = math.sqrt(delta * delta + 4.0 * x)
    if delta >= 0:
        plus = 0.5 * (delta + s)
        minus = -x / plus if plus != 0 else 0.0
    else:
        minus = 0.5 * (delta - s)
        plus = -x / minus
    return minus, plus


@dataclass(frozen=True)
class Lambda3Dressed:
    theta: float
    phi: float
    dark: np.ndarray
    bright1: np.ndarray
    bright2: np.ndarray
    eigenvalues: tuple

    @property
    def vectors(self) -> np.ndarray:
        """Columns ``(dark, bright1, bright2)``."""
        return np.column_stack([self.dark, self.bright1, self.bright2])


def lambda3_dressed(omega1: float, omega2: float, delta: float, phases=(0.0, 0.0)) -> Lambda3Dressed:
    """Dark and bright states of a Lambda system on two-photon resonance.

    ``omega1`` is the pump (1-2) and ``omega2`` the Stokes (2-3) Rabi
    frequency. ``tan(theta) = omega1 / omega2`` and
    ``tan(2 phi) = 2 Omega / delta`` with ``Omega = hypot(omega1, omega2)``.

    ``bright1`` belongs to ``(delta - sqrt(delta**2 + 4 Omega**2)) / 2`` and
    ``bright2`` to the ``+`` root. Both are built as the orthonormal
    completion of the dark state, because the third component of the
    commonly quoted upper bright state (``cos(theta) cos(phi)``) is not
    orthogonal to the other two.
    """
    if omega1 < 0 or omega2 < 0:
        raise ValueError("Rabi frequencies must be non-negative")
    if omega1 == 0 and omega2 == 0:
        raise DegenerateInputError("mixing angle undefined when both fields vanish")
    if not math.isfinite(delta):
        raise ValueError("delta must be finite")
    p1, p2 = phases
    omega = math.hypot(omega1, omega2)
    theta = math.atan2(omega1, omega2)
    phi = 0.5 * math.atan2(2.0 * omega, delta)
    e1, e3 = np.exp(-1j * p1), np.exp(-1j * p2)

    dark = np.array([math.cos(theta) * e1, 0.0, -math.sin(theta) * e3], dtype=complex)
    # bright combination of the lower levels, couples to |2> with -Omega
    b = np.array([math.sin(theta) * e1, 0.0, math.cos(theta) * e3], dtype=complex)
    two = np.array([0.0, 1.0, 0.0], dtype=complex)
    bright1 = math.cos(phi) * b + math.sin(phi) * two
    bright2 = -math.sin(phi) * b + math.cos(phi) * two

    lo, hi = quadratic_roots(delta, omega * omega)
    dark = canonical_phase(dark)
    dark[1] = 0.0
    return Lambda3Dressed(
        theta=theta,
        phi=phi,
        dark=dark,
        bright1=canonical_phase(bright1),
        bright2=canonical_phase(bright2),
        eigenvalues=(0.0, lo, hi),
    )


def five_eigenvalues_tied(omega1: float, omega2: float, omega3: float, delta: float) -> np.ndarray:
    """Spectrum ``(L0, L1, L2, L3, L4)`` of the five-level chain with ``Omega_4 = Omega_1``.

    ``L1, L3`` are the two-level roots for ``Omega_1`` and ``L2, L4`` those for
    the effective field ``sqrt(Omega_1**2 + Omega_2**2 + Omega_3**2)``.
    """
    l1, l3 = quadratic_roots(delta, omega1 * omega1)
    l2, l4 = quadratic_roots(delta, omega1 * omega1 + omega2 * omega2 + omega3 * omega3)
    return np.array([0.0, l1, l2, l3, l4])


@dataclass(frozen=True)
class GeneralFiveSpectrum:
    x1: float
    x2: float
    lambdas: np.ndarray
    omega_s_sq: float
    v4: float

    @property
    def discriminant(self) -> float:
        return self.omega_s_sq ** 2 - 4.0 * self.v4


def five_eigenvalues_general(omega1, omega2, omega3, omega4, delta) -> GeneralFiveSpectrum:
    """Spectrum of the resonant five-level chain for arbitrary ``Omega_4``.

    With ``x = L (L - delta)`` the characteristic polynomial factorises into
    ``L * (x**2 - Omega_s**2 x + V**4)``. Eigenvalues are returned ascending.
    """
    a, b, c, d = (float(o) ** 2 for o in (omega1, omega2, omega3, omega4))
    omega_s_sq = a + b + c + d
    v4 = b * d + a * c + a * d
    # Omega_s^4 - 4 V^4 rewritten as a sum of squares: no cancellation, never negative
    disc = (a + b - c - d) ** 2 + 4.0 * b * c
    direct = omega_s_sq ** 2 - 4.0 * v4
    assert direct >= -1e-12 * max(1.0, omega_s_sq ** 2), f"negative discriminant {direct}"
    x2 = 0.5 * (omega_s_sq + math.sqrt(disc))
    x1 = v4 / x2 if x2 > 0 else 0.0
    l1, l3 = quadratic_roots(delta, x1)
    l2, l4 = quadratic_roots(delta, x2)
    return GeneralFiveSpectrum(
        x1=x1,
        x2=x2,
        lambdas=np.sort(np.array([0.0, l1, l2, l3, l4])),
        omega_s_sq=omega_s_sq,
        v4=v4,
    )


@dataclass(frozen=True)
class FiveDressed:
    lambdas: np.ndarray
    theta: float
    phi1: float
    phi2: float
    phi: float
    vec_lambda1: np.ndarray
    vec_lambda2: np.ndarray
    omega: float


def five_eigenvectors_tied(omega1: float, omega2: float, omega3: float, delta: float, theta: float | None = None) -> FiveDressed:
    """Eigenvectors for ``L1`` (dark-like) and ``L2`` (bright-like) of the tied chain.

    Angles::

        tan(theta) = Omega_2 / Omega_3
        tan(Phi_1) = -L1 / Omega_1,  tan(Phi_2) = -L2 / Omega_1
        tan(Phi)   = -(Omega / Omega_1) cos(Phi_2),  Omega**2 = Omega_2**2 + Omega_3**2

    The angle written as lower-case ``phi_1`` in the usual statement of
    ``psi_1, psi_2`` is the same ``Phi_1``. Every ratio is evaluated in a
    form that stays finite as ``Omega_1 -> 0``.

    Parameters
    ----------
    theta : float, optional
        Limiting value of the mixing angle, required only when
        ``Omega_2 = Omega_3 = 0``.
    """
    if min(omega1, omega2, omega3) < 0:
        raise ValueError("Rabi frequencies must be non-negative")
    omega = math.hypot(omega2, omega3)
    if omega == 0:
        if theta is None:
            raise DegenerateInputError("theta undefined for Omega_2 = Omega_3 = 0; pass the limiting theta")
    else:
        theta = math.atan2(omega2, omega3)
    lambdas = five_eigenvalues_tied(omega1, omega2, omega3, delta)
    l1, l2 = lambdas[1], lambdas[2]
    if omega1 == 0 and l1 == 0 and delta == 0:
        raise DegenerateInputError("Phi_1 undefined for Omega_1 = delta = 0")
    if omega1 == 0 and l2 == 0:
        raise DegenerateInputError("Phi_2 undefined when all fields vanish")
    # -L/Omega_1 as atan2 of finite numbers (L1 ~ -Omega_1^2/delta at the edges)
    phi1 = math.atan2(-l1, omega1)
    phi2 = math.atan2(-l2, omega1)
    phi = math.atan2(-omega, math.hypot(omega1, l2))

    e = np.eye(5)
    c1, s1 = math.cos(phi1), math.sin(phi1)
    psi1 = c1 * e[0] - s1 * e[1]
    psi2 = c1 * e[4] - s1 * e[3]
    v1 = math.cos(theta) * psi1 - math.sin(theta) * psi2

    c2, s2 = math.cos(phi2), math.sin(phi2)
    psi1p = c2 * e[0] - s2 * e[1]
    psi2p = c2 * e[4] - s2 * e[3]
    v2 = math.cos(phi) * math.sin(theta) * psi1p - math.sin(phi) * e[2] + math.cos(phi) * math.cos(theta) * psi2p

    v1 = canonical_phase(_GAUGE5 * v1)
    v1[2] = 0.0
    v2 = canonical_phase(_GAUGE5 * v2)
    return FiveDressed(
        lambdas=lambdas,
        theta=theta,
        phi1=phi1,
        phi2=phi2,
        phi=phi,
        vec_lambda1=v1,
        vec_lambda2=v2,
        omega=omega,
    )


def numeric_spectrum(H, atol: float = 1e-12):
    """Full eigendecomposition of a Hermitian matrix.

    Returns ``(values, vectors)`` with ascending eigenvalues and eigenvectors as
    columns in canonical phase. Within a degenerate cluster the vectors are
    ordered by the index of their dominant bare-state component.
    """
    M = H.matrix if isinstance(H, HamiltonianSample) else np.asarray(H, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NonHermitianError(f"expected a square matrix, got shape {M.shape}")
    if np.max(np.abs(M - M.conj().T), initial=0.0) > atol:
        raise NonHermitianError("matrix is not Hermitian")
    values, vectors = np.linalg.eigh(M)
    scale = max(1.0, float(np.max(np.abs(values), initial=0.0)))
    order = list(range(len(values)))
    i = 0
    while i < len(values):
        j = i + 1
        while j < len(values) and values[j] - values[i] < 1e-9 * scale:
            j += 1
        if j - i > 1:
            block = sorted(range(i, j), key=lambda k: int(np.argmax(np.abs(vectors[:, k]))))
            order[i:j] = block
        i = j
    values = values[order]
    vectors = np.column_stack([canonical_phase(vectors[:, k]) for k in order])
    return values, vectors
