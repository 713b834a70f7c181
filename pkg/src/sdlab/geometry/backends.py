"""Chart-based metric backends for the built-in four-manifolds.

Every backend evaluates its metric on batches of chart points (shape
(n, 4) -> (n, 4, 4)); all higher geometry is finite differences on top of
these evaluations, so the metric functions are kept branch-free and
vectorized.

Charts and conventions:

* ``flat-torus``: angles x1..x4 in [0, 2pi), metric diag(r1^2..r4^2).
* ``round-s4``: hyperspherical angles (chi, theta, phi, psi), radius a.
* ``multi-taub-nut``: Gibbons-Hawking form on (x, y, z, t_fiber),
  g = V dx.dx + V^{-1}(dt + w)^2 with V = 1 + sum_a m/|x - p_a| and the
  one-form w in the per-center string gauge
      w = sum_a m ((z - z_a)/r_a - 1) dphi_a,
  written component-wise without cancellation:
      w_x = sum_a m (y - y_a) / (r_a (r_a + z - z_a)),
      w_y = -sum_a m (x - x_a) / (r_a (r_a + z - z_a)).
  The Dirac string of center a is the downward ray {x = x_a, y = y_a,
  z < z_a}; it and the centers themselves are the excluded set.  The fiber
  period is 4 pi m (2 pi at the default m = 1/2), which makes the centers
  smooth points.
* ``schwarzschild``: global disc chart (X, Y, theta, phi) with
  u^2 = X^2 + Y^2 and area radius r = 2m + u^2:
      g = 8m (dX^2 + dY^2) + 4 (X dX + Y dY)^2
          - (8m/r) (X dY - Y dX)^2 + r^2 dOmega^2.
  The bolt r = 2m is the ordinary interior point X = Y = 0 of this chart
  (no horizon coordinate singularity anywhere); sqrt(det g) = 8 m r^2
  sin(theta), and the Killing circle has proper period 8 pi m at infinity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ChartError, DescriptorError, DomainError

_TAU_PERIOD_NOTE = "fiber period fixed to 4*pi*mass (smooth centers)"


@dataclass(frozen=True)
class ChartInfo:
    coordinates: tuple[str, str, str, str]
    ranges: tuple[tuple[float, float], ...]
    excluded: str


class GeometryBackend:
    """Common backend interface; subclasses fill in the metric and chart."""

    id: str = ""

    @property
    def params(self) -> dict:
        raise NotImplementedError

    @property
    def chart(self) -> ChartInfo:
        raise NotImplementedError

    def metric(self, x: np.ndarray) -> np.ndarray:
        """Batch metric, (n, 4) -> (n, 4, 4), positive definite."""
        raise NotImplementedError

    def fd_scale(self, x: np.ndarray) -> np.ndarray:
        """Local geometry scale at each point; finite-difference steps are
        a small fraction of this."""
        raise NotImplementedError

    def check_points(self, x: np.ndarray, margin: np.ndarray | float) -> None:
        """Raise ChartError unless a coordinate ball of radius ``margin``
        around each point stays inside the chart, off excluded sets."""
        raise NotImplementedError

    def geometry_scale(self) -> float:
        """Single length scale used by cutoff preconditions."""
        raise NotImplementedError

    def sample_points(self, count: int) -> np.ndarray:
        """Deterministic spread of interior points for pointwise checks."""
        raise NotImplementedError


@dataclass(frozen=True)
class FlatTorus(GeometryBackend):
    radii: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    id: str = field(default="flat-torus", init=False)

    def __post_init__(self):
        if any(not r > 0 for r in self.radii):
            raise DescriptorError("radii-positive", f"torus radii {self.radii}")

    @property
    def params(self) -> dict:
        return {"radii": list(self.radii)}

    @property
    def chart(self) -> ChartInfo:
        return ChartInfo(("x1", "x2", "x3", "x4"),
                         tuple((0.0, 2 * math.pi) for _ in range(4)),
                         excluded="none (periodic chart)")

    def metric(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        g = np.zeros((x.shape[0], 4, 4))
        for i, r in enumerate(self.radii):
            g[:, i, i] = r * r
        return g

    def fd_scale(self, x: np.ndarray) -> np.ndarray:
        return np.full(np.atleast_2d(x).shape[0], 1.0)

    def check_points(self, x, margin) -> None:
        return  # periodic, nothing excluded

    def geometry_scale(self) -> float:
        return max(self.radii)

    def sample_points(self, count: int) -> np.ndarray:
        t = np.arange(count, dtype=float)
        return np.stack([(0.1 + 0.61 * t) % (2 * math.pi),
                         (0.7 + 0.37 * t) % (2 * math.pi),
                         (1.3 + 0.23 * t) % (2 * math.pi),
                         (2.1 + 0.53 * t) % (2 * math.pi)], axis=1)

    def volume(self) -> float:
        return (2 * math.pi) ** 4 * math.prod(self.radii)


@dataclass(frozen=True)
class RoundS4(GeometryBackend):
    a: float = 1.0
    id: str = field(default="round-s4", init=False)

    def __post_init__(self):
        if not self.a > 0:
            raise DescriptorError("radius-positive", f"sphere radius {self.a}")

    @property
    def params(self) -> dict:
        return {"a": self.a}

    @property
    def chart(self) -> ChartInfo:
        return ChartInfo(("chi", "theta", "phi", "psi"),
                         ((0.0, math.pi), (0.0, math.pi), (0.0, math.pi),
                          (0.0, 2 * math.pi)),
                         excluded="poles of chi, theta, phi (sin = 0)")

    def metric(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        a2 = self.a * self.a
        s_chi = np.sin(x[:, 0]) ** 2
        s_th = np.sin(x[:, 1]) ** 2
        s_ph = np.sin(x[:, 2]) ** 2
        g = np.zeros((x.shape[0], 4, 4))
        g[:, 0, 0] = a2
        g[:, 1, 1] = a2 * s_chi
        g[:, 2, 2] = a2 * s_chi * s_th
        g[:, 3, 3] = a2 * s_chi * s_th * s_ph
        return g

    def fd_scale(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        dist = np.minimum.reduce([np.sin(x[:, 0]), np.sin(x[:, 1]), np.sin(x[:, 2])])
        return np.clip(np.abs(dist), 1e-12, None)

    def check_points(self, x, margin) -> None:
        x = np.atleast_2d(x)
        margin = np.broadcast_to(np.asarray(margin, dtype=float), (x.shape[0],))
        for name, col in (("chi", 0), ("theta", 1), ("phi", 2)):
            low = x[:, col] - margin
            high = x[:, col] + margin
            if np.any(low <= 0) or np.any(high >= math.pi):
                raise ChartError("pole-excluded",
                                 f"{name} within {np.max(margin):.2e} of a pole")

    def geometry_scale(self) -> float:
        return self.a

    def sample_points(self, count: int) -> np.ndarray:
        t = np.arange(count, dtype=float)
        lo, hi = 0.4, math.pi - 0.4
        span = hi - lo
        return np.stack([lo + (0.17 + 0.61 * t) % 1.0 * span,
                         lo + (0.39 + 0.37 * t) % 1.0 * span,
                         lo + (0.71 + 0.23 * t) % 1.0 * span,
                         (0.5 + 0.53 * t) % (2 * math.pi)], axis=1)

    def volume(self) -> float:
        return 8 * math.pi ** 2 * self.a ** 4 / 3


@dataclass(frozen=True)
class MultiTaubNut(GeometryBackend):
    mass: float = 0.5
    centers: tuple[tuple[float, float, float], ...] = ((0.0, 0.0, 0.0),)
    # +1 hangs the Dirac string below the centre, -1 above; a per-centre gauge
    # choice that moves the coordinate artifact away from quadrature regions
    string_signs: tuple[int, ...] | None = None
    id: str = field(default="multi-taub-nut", init=False)

    def __post_init__(self):
        if not self.mass > 0:
            raise DescriptorError("mass-positive", f"NUT mass {self.mass}")
        if not self.centers:
            raise DescriptorError("centers-nonempty", "need at least one center")
        if self.string_signs is None:
            object.__setattr__(self, "string_signs", (1,) * len(self.centers))
        if len(self.string_signs) != len(self.centers):
            raise DescriptorError("string-signs-shape",
                                  "need one string sign per center")
        if any(s not in (-1, 1) for s in self.string_signs):
            raise DescriptorError("string-signs-values", "signs must be +1 or -1")

    @property
    def params(self) -> dict:
        return {"mass": self.mass, "centers": [list(c) for c in self.centers],
                "fiber_period": self.fiber_period(),
                "string_signs": list(self.string_signs)}

    def fiber_period(self) -> float:
        return 4 * math.pi * self.mass

    @property
    def chart(self) -> ChartInfo:
        return ChartInfo(("x", "y", "z", "t"),
                         ((-math.inf, math.inf), (-math.inf, math.inf),
                          (-math.inf, math.inf), (0.0, self.fiber_period())),
                         excluded="centers and their Dirac-string rays")

    def _potential_and_oneform(self, x: np.ndarray):
        x = np.atleast_2d(x)
        V = np.ones(x.shape[0])
        wx = np.zeros(x.shape[0])
        wy = np.zeros(x.shape[0])
        for (cx, cy, cz), s in zip(self.centers, self.string_signs):
            dx = x[:, 0] - cx
            dy = x[:, 1] - cy
            dz = x[:, 2] - cz
            r = np.sqrt(dx * dx + dy * dy + dz * dz)
            V += self.mass / r
            denom = r * (r + s * dz)  # vanishes only on the string ray
            wx += s * self.mass * dy / denom
            wy += -s * self.mass * dx / denom
        return V, wx, wy

    def metric(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        V, wx, wy = self._potential_and_oneform(x)
        g = np.zeros((x.shape[0], 4, 4))
        inv_v = 1.0 / V
        g[:, 0, 0] = V + wx * wx * inv_v
        g[:, 1, 1] = V + wy * wy * inv_v
        g[:, 2, 2] = V
        g[:, 0, 1] = g[:, 1, 0] = wx * wy * inv_v
        g[:, 0, 3] = g[:, 3, 0] = wx * inv_v
        g[:, 1, 3] = g[:, 3, 1] = wy * inv_v
        g[:, 3, 3] = inv_v
        return g

    def _excluded_distance(self, x: np.ndarray) -> np.ndarray:
        """Distance (chart euclidean, 3-space) to centers and string rays."""
        x = np.atleast_2d(x)
        d = np.full(x.shape[0], np.inf)
        for (cx, cy, cz), s in zip(self.centers, self.string_signs):
            dx = x[:, 0] - cx
            dy = x[:, 1] - cy
            dz = x[:, 2] - cz
            rho = np.sqrt(dx * dx + dy * dy)
            r = np.sqrt(rho * rho + dz * dz)
            # on the string side of the center the nearest excluded point is
            # the ray itself, on the other side it is the center
            d = np.minimum(d, np.where(s * dz >= 0, r, rho))
        return d

    def fd_scale(self, x: np.ndarray) -> np.ndarray:
        d = self._excluded_distance(x)
        return np.minimum(0.25 * d, 2.0 * self.mass)

    def check_points(self, x, margin) -> None:
        x = np.atleast_2d(x)
        margin = np.broadcast_to(np.asarray(margin, dtype=float), (x.shape[0],))
        d = self._excluded_distance(x)
        if np.any(d <= margin):
            worst = float(np.min(d))
            raise ChartError("string-excluded",
                             f"point within {worst:.3e} of a center or Dirac string")

    def geometry_scale(self) -> float:
        reach = max((math.hypot(cx, cy, cz) for (cx, cy, cz) in self.centers),
                    default=0.0)
        return self.mass + reach

    def sample_points(self, count: int) -> np.ndarray:
        t = np.arange(count, dtype=float)
        scale = self.geometry_scale()
        r = scale * (0.6 + 8.0 * ((0.13 + 0.61 * t) % 1.0))
        th = 0.35 + (math.pi - 0.7) * ((0.29 + 0.37 * t) % 1.0)
        ph = 2 * math.pi * ((0.41 + 0.23 * t) % 1.0)
        pts = np.stack([r * np.sin(th) * np.cos(ph),
                        r * np.sin(th) * np.sin(ph),
                        r * np.cos(th),
                        np.full(count, 0.3)], axis=1)
        return pts


@dataclass(frozen=True)
class Schwarzschild(GeometryBackend):
    mass: float = 1.0
    id: str = field(default="schwarzschild", init=False)

    def __post_init__(self):
        if not self.mass > 0:
            raise DescriptorError("mass-positive", f"mass {self.mass}")

    @property
    def params(self) -> dict:
        return {"mass": self.mass, "circle_period": 8 * math.pi * self.mass}

    @property
    def chart(self) -> ChartInfo:
        return ChartInfo(("X", "Y", "theta", "phi"),
                         ((-math.inf, math.inf), (-math.inf, math.inf),
                          (0.0, math.pi), (0.0, 2 * math.pi)),
                         excluded="theta poles (sin theta = 0)")

    def metric(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        m = self.mass
        X, Y, th = x[:, 0], x[:, 1], x[:, 2]
        r = 2 * m + X * X + Y * Y
        q = 8 * m / r
        g = np.zeros((x.shape[0], 4, 4))
        g[:, 0, 0] = 8 * m + 4 * X * X - q * Y * Y
        g[:, 1, 1] = 8 * m + 4 * Y * Y - q * X * X
        g[:, 0, 1] = g[:, 1, 0] = (4 + q) * X * Y
        g[:, 2, 2] = r * r
        g[:, 3, 3] = (r * np.sin(th)) ** 2
        return g

    def fd_scale(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        u = np.sqrt(x[:, 0] ** 2 + x[:, 1] ** 2)
        # disc block varies on the scale sqrt(r); angular block on sin(theta)
        disc = 0.5 * np.sqrt(2 * self.mass + u * u) / (1.0 + 0.25 * u)
        pole = np.abs(np.sin(x[:, 2]))
        return np.minimum(disc, pole)

    def check_points(self, x, margin) -> None:
        x = np.atleast_2d(x)
        margin = np.broadcast_to(np.asarray(margin, dtype=float), (x.shape[0],))
        low = x[:, 2] - margin
        high = x[:, 2] + margin
        if np.any(low <= 0) or np.any(high >= math.pi):
            raise ChartError("pole-excluded",
                             f"theta within {np.max(margin):.2e} of a pole")

    def geometry_scale(self) -> float:
        return 2 * self.mass

    def sample_points(self, count: int) -> np.ndarray:
        t = np.arange(count, dtype=float)
        u = math.sqrt(self.mass) * (0.0 + 2.2 * ((0.07 + 0.61 * t) % 1.0))
        ang = 2 * math.pi * ((0.23 + 0.37 * t) % 1.0)
        th = 0.5 + (math.pi - 1.0) * ((0.47 + 0.23 * t) % 1.0)
        ph = 2 * math.pi * ((0.11 + 0.53 * t) % 1.0)
        return np.stack([u * np.cos(ang), u * np.sin(ang), th, ph], axis=1)


def metric_at(backend: GeometryBackend, x) -> np.ndarray:
    """Single-point metric with chart validation."""
    arr = np.asarray(x, dtype=float)
    if arr.shape != (4,):
        raise DomainError("point-shape",
                          f"expected 4 coordinates, got shape {arr.shape}")
    pt = arr.reshape(1, 4)
    backend.check_points(pt, margin=0.0 if isinstance(backend, FlatTorus) else 1e-9)
    return backend.metric(pt)[0]
