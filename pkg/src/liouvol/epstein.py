"""Horosphere-envelope surfaces of conformal metrics in upper half-space.

For a metric e^phi |dz|^2 the envelope point over z is

    xi = 2 e^{-phi/2} / (1 + |psi|^2),   Z = z + xi psi,
    psi = phi_zbar e^{-phi/2},

with Euclidean unit normal eta = (2 psi, 1 - |psi|^2)/(1 + |psi|^2).
For the hyperbolic metric of a domain these quantities reduce to closed
forms in the uniformizing map and its first two derivatives, and the
curvature data reduces to the norm of the Schwarzian derivative.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularDerivative
from .mobius import H3Point
from .quadrature import QuadratureGrid
from .series import LaurentMap, schwarzian

UNIT_TOL = 5e-12


@dataclass(frozen=True)
class MetricJet:
    """log-density phi and its first z-bar derivative at a point."""

    phi: float
    phi_zbar: complex
    phi_zz: complex | None = None


@dataclass(frozen=True)
class EpsteinFrame:
    base: H3Point
    eta_h: complex      # horizontal component of the Euclidean unit normal
    eta_v: float        # vertical component
    source: complex     # boundary parameter point the frame sits over

    def __post_init__(self):
        n = abs(self.eta_h) ** 2 + self.eta_v ** 2
        if abs(n - 1.0) > UNIT_TOL:
            raise DomainError(f"normal is not unit: |eta|^2 = {n}")

    def eta_xyz(self):
        return np.array([self.eta_h.real, self.eta_h.imag, self.eta_v])


@dataclass(frozen=True)
class CurvatureData:
    k_plus: float
    k_minus: float
    khat_plus: float
    khat_minus: float
    H: float
    Hhat: float
    schwarzian_norm: float
    mean_density: float
    immersion_boundary: bool = False


def epstein_point(jet, z):
    """Envelope frame of a general conformal metric from its 1-jet at z."""
    em = math.exp(-jet.phi / 2.0)
    if not em > 0:
        raise DomainError("metric density must be finite and positive")
    psi = jet.phi_zbar * em
    denom = 1.0 + abs(psi) ** 2
    xi = 2.0 * em / denom
    Z = z + xi * psi
    eta_h = 2.0 * psi / denom
    eta_v = (1.0 - abs(psi) ** 2) / denom
    return EpsteinFrame(H3Point(Z, xi), eta_h, eta_v, complex(z))


def poincare_jet(f, zeta):
    """1-jet of the hyperbolic metric of f(D) at z = f(zeta), pulled through f."""
    z0, d1, d2 = f.jet(zeta, upto=2)
    if abs(d1) < 1e-14:
        raise SingularDerivative("f' vanishes at the requested point")
    r2 = abs(zeta) ** 2
    if r2 >= 1.0:
        raise DomainError("poincare_jet needs |zeta| < 1")
    em = 0.5 * abs(d1) * (1.0 - r2)          # e^{-phi/2}
    phi = -2.0 * math.log(em)
    psi = (abs(d1) / np.conj(d1)) * (
        -np.conj(d2 / d1) * (1.0 - r2) / 2.0 + zeta)
    return MetricJet(phi, psi / em)


def _interior_frame_fields(f, zeta):
    """Vectorized (Z, xi, eta_h, eta_v) over an array of interior points."""
    zeta = np.asarray(zeta, dtype=complex)
    z0, d1, d2 = f.jet(zeta, upto=2)
    r2 = np.abs(zeta) ** 2
    em = 0.5 * np.abs(d1) * (1.0 - r2)
    psi = (np.abs(d1) / np.conj(d1)) * (-np.conj(d2 / d1) * (1.0 - r2) / 2.0 + zeta)
    denom = 1.0 + np.abs(psi) ** 2
    xi = 2.0 * em / denom
    Z = z0 + xi * psi
    return Z, xi, 2.0 * psi / denom, (1.0 - np.abs(psi) ** 2) / denom


def _exterior_frame_fields(g, omega):
    """Same fields for the exterior-side surface, |omega| > 1."""
    omega = np.asarray(omega, dtype=complex)
    z0, d1, d2 = g.jet(omega, upto=2)
    r2 = np.abs(omega) ** 2
    em = 0.5 * np.abs(d1) * (r2 - 1.0)
    psi = -(np.abs(d1) / np.conj(d1)) * (np.conj(d2 / d1) * (r2 - 1.0) / 2.0 + omega)
    denom = 1.0 + np.abs(psi) ** 2
    xi = 2.0 * em / denom
    Z = z0 + xi * psi
    return Z, xi, 2.0 * psi / denom, (1.0 - np.abs(psi) ** 2) / denom


def epstein_poincare(fmap, zeta):
    """Envelope frame of the hyperbolic metric of the image domain.

    Accepts an interior series map (|zeta| < 1) or a Laurent exterior map
    (|zeta| > 1); both use only the 2-jet of the map at zeta.
    """
    if isinstance(fmap, LaurentMap):
        if abs(zeta) <= 1.0:
            raise DomainError("exterior frame needs |zeta| > 1")
        Z, xi, eh, ev = _exterior_frame_fields(fmap, zeta)
    else:
        if abs(zeta) >= 1.0:
            raise DomainError("interior frame needs |zeta| < 1")
        d1 = fmap.jet(zeta, upto=1)[1]
        if abs(d1) < 1e-14:
            raise SingularDerivative("f' vanishes at the requested point")
        Z, xi, eh, ev = _interior_frame_fields(fmap, zeta)
    return EpsteinFrame(H3Point(complex(Z), float(xi)),
                        complex(eh), float(ev), complex(zeta))


def geodesic_flow(point, eta_h, eta_v, time):
    """Unit-speed geodesic flow of a frame in upper half-space.

    Returns the transported (H3Point, eta_h, eta_v) after the given time
    along the direction eta.
    """
    xi = point.xi
    if abs(eta_h) < 1e-13:
        sign = 1.0 if eta_v >= 0 else -1.0
        return H3Point(point.z, xi * math.exp(sign * time)), eta_h, eta_v
    e_dir = eta_h / abs(eta_h)
    sigma0 = math.atanh(max(-1 + 1e-16, min(1 - 1e-16, -eta_v)))
    radius = xi * math.cosh(sigma0)
    center = point.z - radius * math.tanh(sigma0) * e_dir
    sigma = sigma0 + time
    z_new = center + radius * math.tanh(sigma) * e_dir
    xi_new = radius / math.cosh(sigma)
    eta_h_new = e_dir / math.cosh(sigma)
    eta_v_new = -math.tanh(sigma)
    return H3Point(z_new, xi_new), eta_h_new, eta_v_new


def geodesic_shift(frame, t):
    """Frame of the metric scaled by e^{2t}: flow time -t along the normal."""
    base, eh, ev = geodesic_flow(frame.base, frame.eta_h, frame.eta_v, -t)
    return EpsteinFrame(base, eh, ev, frame.source)


def schwarzian_norm_interior(f, zeta):
    """Norm of the Schwarzian quadratic differential against the disk
    hyperbolic metric: |S(f)| (1-|zeta|^2)^2 / 4."""
    zeta = np.asarray(zeta, dtype=complex)
    return np.abs(schwarzian(f, zeta)) * (1.0 - np.abs(zeta) ** 2) ** 2 / 4.0


def schwarzian_norm_exterior(g, omega):
    omega = np.asarray(omega, dtype=complex)
    return np.abs(schwarzian(g, omega)) * (np.abs(omega) ** 2 - 1.0) ** 2 / 4.0


def _curvature_fields(theta_norm, rho):
    """Curvature arrays from the Schwarzian norm and the metric density."""
    t = np.asarray(theta_norm, float)
    khat_p = 1.0 + 2.0 * t
    khat_m = 1.0 - 2.0 * t
    with np.errstate(divide="ignore"):
        k_p = -t / (t + 1.0)
        k_m = np.where(t == 1.0, -np.inf, -t / (t - 1.0))
    H = np.where(t == 1.0, np.inf, t * t / (1.0 - t * t))
    mean_density = t * t * rho
    return k_p, k_m, khat_p, khat_m, H, mean_density


def curvatures(f, zeta, boundary_tol=1e-8):
    """Principal curvatures, curvatures at infinity, mean curvature and the
    mean-curvature density of the interior-side surface at parameter zeta."""
    zeta_c = complex(zeta)
    if abs(zeta_c) >= 1.0:
        raise DomainError("curvatures expects |zeta| < 1")
    t = float(schwarzian_norm_interior(f, zeta_c))
    d1 = f.jet(zeta_c, upto=1)[1]
    rho = 4.0 / ((1.0 - abs(zeta_c) ** 2) ** 2 * abs(d1) ** 2)
    k_p, k_m, khat_p, khat_m, H, dens = _curvature_fields(t, rho)
    return CurvatureData(
        float(k_p), float(k_m), float(khat_p), float(khat_m), float(H),
        1.0, t, float(dens), immersion_boundary=abs(t - 1.0) < boundary_tol)


def mean_curvature_total(fmap, grid=None):
    """Total mean curvature of one envelope surface.

    Equals the hyperbolic-norm square of the Schwarzian integrated over the
    parameter domain: int |S|^2 (1-|z|^2)^2 / 4 (interior) and the mirrored
    expression for a Laurent exterior map.
    """
    grid = grid or QuadratureGrid.disk()
    if isinstance(fmap, LaurentMap):
        ext = grid.exterior()
        vals = np.abs(schwarzian(fmap, ext.nodes)) ** 2 \
            * (np.abs(ext.nodes) ** 2 - 1.0) ** 2 / 4.0
        return ext.integrate(vals)
    vals = np.abs(schwarzian(fmap, grid.nodes)) ** 2 \
        * (1.0 - np.abs(grid.nodes) ** 2) ** 2 / 4.0
    return grid.integrate(vals)
