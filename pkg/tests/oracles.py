"""Independent reference computations used by the tests.

Everything here deliberately avoids the code paths it is used to check:
Monte-Carlo integration instead of the product quadrature, coefficient
recurrences instead of grid evaluation, finite differences of the raw
embedding instead of the closed-form curvature formulas.
"""

import math

import numpy as np


# -- Monte-Carlo disk/exterior integration -----------------------------------

def mc_disk_integral(func, n=10_000_000, seed=123):
    """Uniform-sampling integral over the unit disk; returns (value, sigma)."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.0, 1.0, (int(n * 4 / math.pi * 1.05), 2))
    z = pts[:, 0] + 1j * pts[:, 1]
    z = z[np.abs(z) < 1.0][:n]
    vals = func(z)
    mean = float(np.mean(vals))
    sigma = float(np.std(vals) / math.sqrt(vals.size))
    return math.pi * mean, math.pi * sigma


# -- coefficient-space Dirichlet energies -------------------------------------

def _series_divide(num, den, n_out):
    """Power-series quotient c with (den * c) = num, den[0] != 0."""
    c = np.zeros(n_out, dtype=complex)
    num = np.asarray(num, dtype=complex)
    den = np.asarray(den, dtype=complex)
    for k in range(n_out):
        acc = num[k] if k < num.size else 0.0
        for j in range(1, min(k, den.size - 1) + 1):
            acc -= den[j] * c[k - j]
        c[k] = acc / den[0]
    return c


def dirichlet_interior_series(f, n_out=256):
    """int_D |f''/f'|^2 from coefficients: the quotient series c_k of
    f''/f' integrates to pi * sum |c_k|^2 / (k+1)."""
    a = np.asarray(f.coeffs, dtype=complex)
    k = np.arange(a.size)
    d1 = (k * a)[1:]
    d2 = (k * (k - 1) * a)[2:] if a.size > 2 else np.zeros(1, complex)
    c = _series_divide(d2, d1, n_out)
    kk = np.arange(n_out)
    return float(math.pi * np.sum(np.abs(c) ** 2 / (kk + 1)))


def dirichlet_exterior_series(g, n_out=256):
    """int_{|w|>1} |g''/g'|^2 from Laurent coefficients, via the expansion
    of g''/g' in powers of 1/w (starting at w^-3)."""
    b = np.asarray(g.bneg, dtype=complex)
    m = b.size
    # g'(w)  = b1 - sum k b_k w^{-k-1}   -> series in u = 1/w
    d1 = np.zeros(m + 2, dtype=complex)
    d1[0] = g.b1
    for k in range(1, m + 1):
        d1[k + 1] = -k * b[k - 1]
    # g''(w) = sum k(k+1) b_k w^{-k-2}
    d2 = np.zeros(m + 3, dtype=complex)
    for k in range(1, m + 1):
        d2[k + 2] = k * (k + 1) * b[k - 1]
    c = _series_divide(d2, d1, n_out)
    kk = np.arange(n_out)
    mask = kk >= 2
    return float(math.pi * np.sum(np.abs(c[mask]) ** 2 / (kk[mask] - 1)))


# -- finite-difference shape operator -----------------------------------------

def _christoffel_correction(X, N, xi):
    """Gamma(X, N) for the upper half-space metric delta/xi^2."""
    X3 = X[..., 2]
    N3 = N[..., 2]
    dot = np.einsum("...i,...i->...i", X, N).sum(axis=-1)
    out = -(X * N3[..., None] + N * X3[..., None]) / xi[..., None]
    out[..., 2] += dot / xi
    return out


def fd_shape_operator(frame_fields, param_points, h=1e-5):
    """Principal curvatures and mean curvature by central differences.

    ``frame_fields(zeta)`` must return (Z, xi, eta_h, eta_v) arrays; the
    derivative of the embedding and of the normal field are differenced,
    the ambient covariant derivative is corrected by the Christoffel terms
    of the hyperbolic metric, and the shape operator is I^{-1} II.
    Returns (k_low, k_high, H, area_form) where area_form is the
    hyperbolic area density with respect to the parametrization.
    """
    zeta = np.asarray(param_points, dtype=complex)

    def embed(z):
        Z, xi, eh, ev = frame_fields(z)
        pos = np.stack([Z.real, Z.imag, xi], axis=-1)
        normal = np.stack([eh.real * xi, eh.imag * xi, ev * xi], axis=-1)
        return pos, normal

    pos0, n0 = embed(zeta)
    xi0 = pos0[..., 2]

    derivs = []
    nderivs = []
    for step in (h, 1j * h):
        pp, npp = embed(zeta + step)
        pm, nmm = embed(zeta - step)
        derivs.append((pp - pm) / (2 * h))
        nderivs.append((npp - nmm) / (2 * h))

    metric = lambda u, v: np.einsum("...i,...i->...", u, v) / xi0 ** 2
    I = np.empty(zeta.shape + (2, 2))
    II = np.empty(zeta.shape + (2, 2))
    for a in range(2):
        cov_a = nderivs[a] + _christoffel_correction(derivs[a], n0, xi0)
        for b in range(2):
            I[..., a, b] = metric(derivs[a], derivs[b])
            II[..., a, b] = -metric(cov_a, derivs[b])
    shape = np.linalg.solve(I, II)
    tr = shape[..., 0, 0] + shape[..., 1, 1]
    det = shape[..., 0, 0] * shape[..., 1, 1] \
        - shape[..., 0, 1] * shape[..., 1, 0]
    disc = np.sqrt(np.maximum(tr * tr / 4 - det, 0.0))
    area = np.sqrt(np.maximum(np.linalg.det(I), 0.0))
    return tr / 2 - disc, tr / 2 + disc, tr / 2, area


# -- closed-form hyperbolic volumes -------------------------------------------

def ball_volume_euclidean_sphere(center_height, radius):
    """Hyperbolic volume enclosed by the Euclidean sphere at (0, h) with
    Euclidean radius r < h."""
    h, r = center_height, radius
    return 2 * math.pi * h * r / (h * h - r * r) \
        - math.pi * math.log((h + r) / (h - r))


def slab_volume(band_area, t):
    """Volume between a totally geodesic plane and its distance-t
    equidistant over a patch of hyperbolic area band_area."""
    return band_area * (t + math.sinh(t) * math.cosh(t)) / 2.0


def hyperbolic_annulus_area(r1, r2):
    """Hyperbolic area of {r1 <= |z| <= r2} in the unit-disk metric."""
    return 4 * math.pi * (1 / (1 - r2 ** 2) - 1 / (1 - r1 ** 2))
