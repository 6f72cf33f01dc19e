"""Star-shaped boundary curves gamma_eps(xi) = (1 + eps f(xi)) e^{i xi}.

The refraction interface is a radial perturbation of the unit circle with a
finite trigonometric profile f(xi) = sum_k a_k cos(k xi) + b_k sin(k xi).
Everything downstream needs the curve point, its unit tangent/outward normal
and the metric factor |gamma'(xi)| = sqrt(rho^2 + rho'^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = ["PerturbationProfile", "BoundaryGeometry", "boundary"]


@dataclass(frozen=True)
class PerturbationProfile:
    """Radial perturbation rho(xi) = 1 + eps * f(xi) of the unit circle.

    ``fourier_cos[k]`` multiplies cos(k xi) and ``fourier_sin[k]`` multiplies
    sin(k xi) (index = harmonic; the sin constant slot is ignored).
    ``smoothness_k`` records the differentiability class assumed by the
    perturbative results; finite trigonometric profiles are smooth, so any
    k >= 2 is accepted.
    """

    fourier_cos: tuple = ()
    fourier_sin: tuple = ()
    epsilon: float = 0.0
    smoothness_k: int = 6

    def __post_init__(self):
        object.__setattr__(self, "fourier_cos",
                           tuple(float(c) for c in self.fourier_cos))
        object.__setattr__(self, "fourier_sin",
                           tuple(float(c) for c in self.fourier_sin))
        if self.smoothness_k < 2:
            raise DomainError("smoothness_k must be >= 2")
        total = sum(abs(c) for c in self.fourier_cos) + \
            sum(abs(c) for c in self.fourier_sin)
        if abs(self.epsilon) * total >= 1.0:
            # |eps f| < 1 guarantees rho > 0 for every xi.
            grid = np.linspace(0.0, 2 * np.pi, 4096, endpoint=False)
            if np.min(self.radius(grid)) <= 0:
                raise DomainError("radius 1 + eps*f(xi) must stay positive")

    # -- profile evaluations --------------------------------------------------

    def shape(self, xi):
        """f(xi)."""
        xi = np.asarray(xi, dtype=float)
        out = np.zeros_like(xi)
        for k, a in enumerate(self.fourier_cos):
            if a:
                out = out + a * np.cos(k * xi)
        for k, b in enumerate(self.fourier_sin):
            if k and b:
                out = out + b * np.sin(k * xi)
        return out if np.ndim(out) else float(out)

    def shape_prime(self, xi):
        """f'(xi)."""
        xi = np.asarray(xi, dtype=float)
        out = np.zeros_like(xi)
        for k, a in enumerate(self.fourier_cos):
            if k and a:
                out = out - k * a * np.sin(k * xi)
        for k, b in enumerate(self.fourier_sin):
            if k and b:
                out = out + k * b * np.cos(k * xi)
        return out if np.ndim(out) else float(out)

    def radius(self, xi):
        """rho(xi) = 1 + eps f(xi)."""
        if self.epsilon == 0.0:
            xi = np.asarray(xi, dtype=float)
            out = np.ones_like(xi)
            return out if np.ndim(out) else 1.0
        return 1.0 + self.epsilon * self.shape(xi)

    def radius_prime(self, xi):
        """rho'(xi) = eps f'(xi)."""
        if self.epsilon == 0.0:
            xi = np.asarray(xi, dtype=float)
            out = np.zeros_like(xi)
            return out if np.ndim(out) else 0.0
        return self.epsilon * self.shape_prime(xi)

    @property
    def is_circle(self) -> bool:
        return self.epsilon == 0.0 or (not self.fourier_cos and
                                       not self.fourier_sin)

    # -- presets --------------------------------------------------------------

    @classmethod
    def circle(cls) -> "PerturbationProfile":
        """The unperturbed unit circle."""
        return cls()

    @classmethod
    def ellipse_like(cls, ecc: float) -> "PerturbationProfile":
        """Small-eccentricity ellipse r(xi) = 1 + eps (cos 2xi - 1), eps = ecc^2/4.

        First-order polar expansion about the center of an ellipse with unit
        major semi-axis and eccentricity ``ecc``.
        """
        if not 0 <= ecc < 1:
            raise DomainError("eccentricity must lie in [0, 1)")
        return cls(fourier_cos=(-1.0, 0.0, 1.0), fourier_sin=(),
                   epsilon=ecc ** 2 / 4)

    @classmethod
    def cos_profile(cls, harmonic: int, epsilon: float) -> "PerturbationProfile":
        """Pure cosine profile f(xi) = cos(harmonic * xi)."""
        coeffs = [0.0] * (harmonic + 1)
        coeffs[harmonic] = 1.0
        return cls(fourier_cos=tuple(coeffs), fourier_sin=(), epsilon=epsilon)


@dataclass(frozen=True)
class BoundaryGeometry:
    """Local boundary data at gamma(xi) = rho(xi) e^{i xi}.

    ``metric`` is |gamma'(xi)| = sqrt(rho^2 + rho'^2), the factor converting
    d xi to arclength; it equals 1 on the unit circle.
    """

    xi: float
    point: np.ndarray
    tangent_unit: np.ndarray
    normal_out_unit: np.ndarray
    radius: float
    radius_prime: float
    metric: float

    @property
    def point_c(self) -> complex:
        return complex(self.point[0], self.point[1])

    @property
    def tangent_c(self) -> complex:
        return complex(self.tangent_unit[0], self.tangent_unit[1])

    @property
    def normal_c(self) -> complex:
        return complex(self.normal_out_unit[0], self.normal_out_unit[1])


def gamma_point(xi, profile: PerturbationProfile):
    """Boundary point(s) as complex rho(xi) e^{i xi}."""
    xi = np.asarray(xi, dtype=float)
    out = profile.radius(xi) * np.exp(1j * xi)
    return out if np.ndim(out) else complex(out)


def boundary(xi: float, profile: PerturbationProfile) -> BoundaryGeometry:
    """Full local geometry record of the boundary at angle ``xi``.

    gamma'(xi) = (rho' + i rho) e^{i xi}; the unit tangent points
    counterclockwise and the outward normal is the tangent rotated by -pi/2.
    """
    xi = float(xi)
    rho = float(profile.radius(xi))
    rhop = float(profile.radius_prime(xi))
    e = complex(math.cos(xi), math.sin(xi))
    point = rho * e
    dgamma = (rhop + 1j * rho) * e
    m = abs(dgamma)
    t = dgamma / m
    n = -1j * t
    return BoundaryGeometry(
        xi=xi,
        point=np.array([point.real, point.imag]),
        tangent_unit=np.array([t.real, t.imag]),
        normal_out_unit=np.array([n.real, n.imag]),
        radius=rho,
        radius_prime=rhop,
        metric=m,
    )
