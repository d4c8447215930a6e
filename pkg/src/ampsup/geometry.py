"""Upper half-plane geometry.

Points are Python/numpy complex numbers with positive imaginary part;
matrices are real 2x2 numpy arrays.  Everything broadcasts over numpy
arrays of points where that makes sense.
"""

import numpy as np

from .errors import InputError


def uhp_point(x, y):
    if not y > 0:
        raise InputError(f"point {x}+{y}i is not in the upper half-plane")
    return complex(x, y)


def parse_point(text):
    """Parse ``"x,y"`` into a point of the upper half-plane."""
    try:
        x, y = (float(t) for t in text.split(","))
    except ValueError as exc:
        raise InputError(f"expected 'x,y', got {text!r}") from exc
    return uhp_point(x, y)


def _check_points(*zs):
    for z in zs:
        if np.any(np.imag(z) <= 0):
            raise InputError("points must lie in the upper half-plane")


def u_value(z, w):
    """Point-pair invariant ``sinh^2(d(z, w) / 2) = |z - w|^2 / (4 Im z Im w)``.

    Computed from ``|z - w|`` directly, so there is no cancellation near z = w.
    """
    _check_points(z, w)
    return np.abs(np.subtract(z, w)) ** 2 / (4 * np.imag(z) * np.imag(w))


def cosh2_half_dist(z, w):
    """``cosh^2(d(z, w) / 2) = |z - conj(w)|^2 / (4 Im z Im w)``."""
    _check_points(z, w)
    return np.abs(np.subtract(z, np.conj(w))) ** 2 / (4 * np.imag(z) * np.imag(w))


def cosh_dist(z, w):
    return 1 + 2 * u_value(z, w)


def dist(z, w):
    """Hyperbolic distance ``2 asinh(|z - w| / (2 sqrt(Im z Im w)))``; exact near 0."""
    _check_points(z, w)
    return 2 * np.arcsinh(np.abs(np.subtract(z, w)) / (2 * np.sqrt(np.imag(z) * np.imag(w))))


def dist_mp(z, w, dps=50):
    """Extended-precision distance for cross-checks (mpmath, ``dps`` digits)."""
    import mpmath

    with mpmath.workdps(dps):
        z, w = mpmath.mpc(z), mpmath.mpc(w)
        u = abs(z - w) ** 2 / (4 * z.imag * w.imag)
        return 2 * mpmath.asinh(mpmath.sqrt(u))


def _as_matrix(m):
    m = np.asarray(m, dtype=float)
    if m.shape[-2:] != (2, 2):
        raise InputError("expected 2x2 matrices")
    return m


def det(m):
    m = _as_matrix(m)
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def j_factor(m, w):
    """Automorphy factor ``c w + d``."""
    m = _as_matrix(m)
    return m[..., 1, 0] * w + m[..., 1, 1]


def mobius(m, z):
    """Fractional linear action of a positive-determinant real matrix."""
    m = _as_matrix(m)
    dt = det(m)
    if np.any(dt <= 0):
        raise InputError("Mobius action needs det > 0")
    _check_points(z)
    j = j_factor(m, z)
    image = (m[..., 0, 0] * z + m[..., 0, 1]) / j
    # recompute the imaginary part from Im(mz) = det Im(z) / |j|^2 (no cancellation)
    return np.real(image) + 1j * (dt * np.imag(z) / np.abs(j) ** 2)


def frame(z):
    """``g_z = [[sqrt y, x / sqrt y], [0, 1 / sqrt y]]``, which sends i to z."""
    x, y = np.real(z), np.imag(z)
    s = np.sqrt(y)
    return np.array([[s, x / s], [0.0, 1 / s]])


def frame_inverse(z):
    x, y = np.real(z), np.imag(z)
    s = np.sqrt(y)
    return np.array([[1 / s, -x / s], [0.0, s]])


def frobenius_sq(m):
    m = _as_matrix(m)
    return np.sum(m * m, axis=(-2, -1))


def log_petersson_magnitude(value, w, k):
    """``log(v^(k/2) |value|)``; ``-inf`` for a zero value."""
    if k < 1:
        raise InputError("weight must be at least 1")
    _check_points(w)
    with np.errstate(divide="ignore"):
        return 0.5 * k * np.log(np.imag(w)) + np.log(np.abs(value))


def petersson_magnitude(value, w, k):
    """Pointwise Petersson weight ``v^(k/2) |value|`` at ``w = u + iv``."""
    return np.exp(log_petersson_magnitude(value, w, k))


def sample_grid(box, nx, ny):
    """Row-major grid of points (y outer, x inner) filling ``box = (x0, x1, y0, y1)``.

    The sup over the surface is approximated by a max over this grid, which
    only gives a lower bound on the true supremum.
    """
    x0, x1, y0, y1 = box
    if y0 <= 0 or y1 <= 0:
        raise InputError("grid box must stay strictly above the real axis")
    if nx < 1 or ny < 1:
        raise InputError("grid needs at least one point per axis")
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    X, Y = np.meshgrid(xs, ys)
    return (X + 1j * Y).ravel()


def hyperbolic_radius_of_box(box, center):
    """Largest distance from ``center`` to a corner of ``box``; for a box containing ``center`` the max is at a corner."""
    x0, x1, y0, y1 = box
    corners = np.array([complex(x, y) for x in (x0, x1) for y in (y0, y1)])
    return float(np.max(dist(center, corners)))
