"""Poincare disk geometry for two-generator Schottky groups.

Orientation-preserving isometries of the disk are stored as pairs
``(alpha, beta)`` acting by ``z -> (alpha z + beta) / (conj(beta) z + conj(alpha))``
with ``|alpha|^2 - |beta|^2 = 1``. The basepoint is the origin throughout.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import words as W
from .errors import BoundaryPointInvalid, NotHyperbolic, NotSchottky, PointOnBoundary

TWO_PI = 2.0 * math.pi
BOUNDARY_TOL = 1e-12
ORIGIN = 0j
_RENORMALIZE_BELOW = 1e6


def wrap(theta: float) -> float:
    """Angle mod 2*pi in (-pi, pi]."""
    t = math.remainder(theta, TWO_PI)
    return math.pi if t == -math.pi else t


def angular_distance(s: float, t: float) -> float:
    return abs(wrap(s - t))


def boundary_point(theta: float) -> complex:
    return cmath.exp(1j * theta)


def _check_boundary(xi: complex) -> None:
    if abs(abs(xi) - 1.0) > BOUNDARY_TOL:
        raise BoundaryPointInvalid(f"|xi| = {abs(xi)!r} is not 1")


def _check_interior(z: complex) -> None:
    if abs(z) >= 1.0:
        raise PointOnBoundary(f"|z| = {abs(z)!r} is not inside the unit disk")


@dataclass(frozen=True)
class MobiusMap:
    alpha: complex
    beta: complex

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1 + 0j, 0j)

    @classmethod
    def rotation(cls, theta: float) -> "MobiusMap":
        """z -> e^{i theta} z."""
        return cls(cmath.exp(0.5j * theta), 0j)

    @classmethod
    def translation(cls, length: float, direction: float = 0.0) -> "MobiusMap":
        """Hyperbolic translation by ``length`` along the diameter at angle ``direction``."""
        return cls(complex(math.cosh(length / 2)), cmath.exp(1j * direction) * math.sinh(length / 2))

    def normalized(self) -> "MobiusMap":
        d = abs(self.alpha) ** 2 - abs(self.beta) ** 2
        if d <= 0:
            raise ValueError("not a disk automorphism: |alpha|^2 - |beta|^2 <= 0")
        r = math.sqrt(d)
        return MobiusMap(self.alpha / r, self.beta / r)

    @property
    def det(self) -> float:
        return abs(self.alpha) ** 2 - abs(self.beta) ** 2

    def __call__(self, z):
        a, b = self.alpha, self.beta
        return (a * z + b) / (b.conjugate() * z + a.conjugate())

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        """Composition ``self o other``."""
        a1, b1, a2, b2 = self.alpha, self.beta, other.alpha, other.beta
        g = MobiusMap(a1 * a2 + b1 * b2.conjugate(), a1 * b2 + b1 * a2.conjugate())
        # |alpha|^2 - |beta|^2 is only measurable when it does not cancel badly
        if abs(g.alpha) ** 2 < _RENORMALIZE_BELOW:
            g = g.normalized()
        return g

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.alpha.conjugate(), -self.beta)

    def derivative(self, z):
        """Complex derivative (for an automorphism, also the boundary stretch factor in modulus)."""
        return 1.0 / (self.beta.conjugate() * z + self.alpha.conjugate()) ** 2

    def matrix(self) -> np.ndarray:
        a, b = self.alpha, self.beta
        return np.array([[a, b], [b.conjugate(), a.conjugate()]])

    @property
    def half_trace(self) -> float:
        return self.alpha.real

    def distance_to(self, other: "MobiusMap", points=(0j, 0.5, 0.5j, -0.3 + 0.2j)) -> float:
        return max(abs(self(z) - other(z)) for z in points)


@dataclass(frozen=True)
class HalfPlane:
    """Half-plane cut off by the geodesic over a boundary arc.

    The arc is ``[center - halfwidth, center + halfwidth]``; the geodesic is
    the circle orthogonal to the unit circle through the arc endpoints.
    """

    center: float
    halfwidth: float

    def __post_init__(self):
        if not (0.0 < self.halfwidth < math.pi / 2):
            raise ValueError(f"half-width {self.halfwidth} must lie in (0, pi/2)")

    @property
    def endpoints(self) -> tuple:
        return self.center - self.halfwidth, self.center + self.halfwidth

    @property
    def circle(self) -> tuple:
        """Center and radius of the bounding orthogonal circle."""
        return cmath.exp(1j * self.center) / math.cos(self.halfwidth), math.tan(self.halfwidth)

    def contains(self, z: complex) -> bool:
        c, r = self.circle
        return abs(z - c) < r

    def contains_angle(self, theta: float) -> bool:
        return angular_distance(theta, self.center) < self.halfwidth

    def margin(self, theta: float) -> float:
        """Angular depth of a boundary point inside the arc (negative outside)."""
        return self.halfwidth - angular_distance(theta, self.center)

    def rotated(self, phi: float) -> "HalfPlane":
        return HalfPlane(wrap(self.center + phi), self.halfwidth)

    def sample_angles(self, samples: int) -> np.ndarray:
        lo, hi = self.endpoints
        return np.linspace(lo, hi, max(samples, 2))


@dataclass(frozen=True)
class SchottkyRep:
    """Generators for all four letters and their ping-pong half-planes."""

    gens: dict        # letter -> MobiusMap
    planes: dict      # letter -> HalfPlane

    def __getitem__(self, x: str) -> MobiusMap:
        return self.gens[x]

    def conjugated(self, h: MobiusMap, phi: float | None = None) -> "SchottkyRep":
        """Conjugate every generator by ``h``; ``phi`` rotates the arcs (for rotations)."""
        gens = {x: h @ g @ h.inverse() for x, g in self.gens.items()}
        if phi is None:
            raise ValueError("arc data can only be transported for rotations; pass phi")
        planes = {x: p.rotated(phi) for x, p in self.planes.items()}
        return SchottkyRep(gens, planes)

    def rotated(self, phi: float) -> "SchottkyRep":
        return self.conjugated(MobiusMap.rotation(phi), phi)


def _plane_of(g: MobiusMap) -> HalfPlane:
    """Half-plane inside the isometric circle of ``g^-1`` (contains g's attracting end)."""
    gi = g.inverse()
    # isometric circle |conj(beta') z + conj(alpha')| = 1 of gi
    c = -gi.alpha.conjugate() / gi.beta.conjugate()
    r = 1.0 / abs(gi.beta)
    return HalfPlane(cmath.phase(c), math.atan(r))


def from_generators(ga: MobiusMap, gb: MobiusMap, planes: dict | None = None) -> SchottkyRep:
    gens = {"a": ga.normalized(), "b": gb.normalized()}
    gens["A"] = gens["a"].inverse()
    gens["B"] = gens["b"].inverse()
    if planes is None:
        planes = {x: _plane_of(gens[x]) for x in W.LETTERS}
    rep = SchottkyRep(gens, dict(planes))
    return rep


@dataclass
class SchottkyReport:
    passed: bool
    disjoint_margin: float
    pingpong_margin: float
    basepoint_margin: float
    witness: str

    @property
    def margin(self) -> float:
        return min(self.disjoint_margin, self.pingpong_margin, self.basepoint_margin)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "margin": self.margin,
            "disjoint_margin": self.disjoint_margin,
            "pingpong_margin": self.pingpong_margin,
            "basepoint_margin": self.basepoint_margin,
            "witness": self.witness,
        }


def verify_schottky(rep: SchottkyRep, samples: int = 64) -> SchottkyReport:
    """Check disjoint closed arcs, ping-pong containment and basepoint position."""
    if samples < 2:
        raise ValueError("need at least 2 samples per arc")
    worst = ""
    disjoint = math.inf
    for i, x in enumerate(W.LETTERS):
        for y in W.LETTERS[i + 1:]:
            px, py = rep.planes[x], rep.planes[y]
            gap = angular_distance(px.center, py.center) - px.halfwidth - py.halfwidth
            if gap < disjoint:
                disjoint = gap
                if gap <= 0:
                    worst = f"arcs of {x} and {y} overlap by {-gap:.3g}"
    pingpong = math.inf
    for x in W.LETTERS:
        g = rep.gens[x]
        for y in W.LETTERS:
            if y == W.inverse(x):
                continue
            thetas = rep.planes[y].sample_angles(samples)
            images = np.angle(g(np.exp(1j * thetas)))
            # depth relative to the target arc, so margins compare across scales
            m = min(rep.planes[x].margin(float(t)) for t in images) / rep.planes[x].halfwidth
            if m < pingpong:
                pingpong = m
                if m <= 0:
                    worst = worst or f"{x} maps the arc of {y} outside the arc of {x}"
    base = math.inf
    for x in W.LETTERS:
        c, r = rep.planes[x].circle
        base = min(base, abs(ORIGIN - c) - r)
    if base <= 0 and not worst:
        worst = "basepoint lies in a half-plane"
    passed = disjoint > 0 and pingpong > 0 and base > 0
    return SchottkyReport(passed, disjoint, pingpong, base, worst)


def standard_schottky(L: float, samples: int = 64) -> SchottkyRep:
    """Translations of length ``L`` along the real and imaginary diameters."""
    if not L > 0:
        raise NotSchottky(f"translation length must be positive, got {L}")
    ga = MobiusMap.translation(L, 0.0)
    gb = MobiusMap.translation(L, math.pi / 2)
    rep = from_generators(ga, gb)
    report = verify_schottky(rep, samples)
    if not report.passed:
        raise NotSchottky(f"L = {L}: {report.witness}")
    return rep


def explicit_schottky(a, b, arcs=None, samples: int = 64) -> SchottkyRep:
    """Build from ``[re(alpha), im(alpha), re(beta), im(beta)]`` lists.

    ``arcs`` is an optional list of four ``[center, halfwidth]`` pairs for
    a, b, A, B; when omitted, isometric-circle half-planes are used.
    """
    ga = MobiusMap(complex(a[0], a[1]), complex(a[2], a[3]))
    gb = MobiusMap(complex(b[0], b[1]), complex(b[2], b[3]))
    planes = None
    if arcs is not None:
        if len(arcs) != 4:
            raise NotSchottky("need exactly four arcs (a, b, A, B)")
        planes = {x: HalfPlane(float(c), float(w)) for x, (c, w) in zip(W.LETTERS, arcs)}
    rep = from_generators(ga, gb, planes)
    report = verify_schottky(rep, samples)
    if not report.passed:
        raise NotSchottky(report.witness)
    return rep


def rep_of_word(rep: SchottkyRep, w: str) -> MobiusMap:
    g = MobiusMap.identity()
    for x in w:
        g = g @ rep.gens[x]
    return g


def dist(z: complex, w: complex) -> float:
    _check_interior(z)
    _check_interior(w)
    num = abs(z - w)
    den = abs(1 - z.conjugate() * w)
    return 2.0 * math.atanh(min(num / den, 1.0))


def displacement(g: MobiusMap) -> float:
    """dist(o, g o), exact for normalized maps and stable for large displacements."""
    return 2.0 * math.log(abs(g.alpha) + abs(g.beta))


def busemann(xi: complex, x: complex, y: complex) -> float:
    _check_boundary(xi)
    _check_interior(x)
    _check_interior(y)
    px = abs(xi - x) ** 2 / (1 - abs(x) ** 2)
    py = abs(xi - y) ** 2 / (1 - abs(y) ** 2)
    return math.log(px / py)


def busemann_orbit(xi: complex, g: MobiusMap) -> float:
    """b_xi(0, g(0)) from the entries of ``g``.

    With g(0) = beta / conj(alpha) and 1 - |g(0)|^2 = 1 / |alpha|^2 this is
    -log|conj(alpha) xi - beta|^2, which stays accurate when g(0) is
    exponentially close to the circle.
    """
    _check_boundary(xi)
    return -2.0 * math.log(abs(g.alpha.conjugate() * xi - g.beta))


def busemann_ray(xi: complex, x: complex, y: complex, t: float = 20.0) -> float:
    """Finite-time version dist(ray(t), x) - dist(ray(t), y) along the ray from 0."""
    r = math.tanh(t / 2)
    p = r * xi
    return _dist_far(p, x) - _dist_far(p, y)


def _dist_far(p: complex, z: complex) -> float:
    # arccosh form keeps precision when one point is close to the boundary
    num = 2 * abs(p - z) ** 2
    den = (1 - abs(p) ** 2) * (1 - abs(z) ** 2)
    return math.acosh(1 + num / den)


def boundary_derivative(g: MobiusMap, xi: complex) -> float:
    _check_boundary(xi)
    return 1.0 / abs(g.beta.conjugate() * xi + g.alpha.conjugate()) ** 2


def boundary_derivative_fd(g: MobiusMap, theta: float, step: float = 1e-6) -> float:
    """Centered finite difference of the induced circle map in the angle."""
    up = cmath.phase(g(cmath.exp(1j * (theta + step))))
    dn = cmath.phase(g(cmath.exp(1j * (theta - step))))
    return abs(wrap(up - dn)) / (2 * step)


def translation_length(g: MobiusMap) -> float:
    t = abs(g.alpha.real)
    return 2.0 * math.acosh(t) if t > 1.0 else 0.0


def word_translation_length(rep: "SchottkyRep", w: str) -> float:
    """Translation length of rho(w), evaluated on the cyclic reduction of ``w``.

    Conjugate words share the translation length; the cyclically reduced one
    has the smallest matrix entries, so its trace carries the most digits.
    """
    return translation_length(rep_of_word(rep, W.cyclic_reduce(W.reduce(w))))


def _scaled_power_displacement(g: MobiusMap, k: int) -> float:
    """dist(o, g^(2^k) o) by repeated squaring with log-scale bookkeeping."""
    M = g.matrix()
    logscale = 0.0
    for _ in range(k):
        M = M @ M
        s = np.abs(M).max()
        M = M / s
        logscale = 2.0 * logscale + math.log(s)
    # singular values of a (scaled) SU(1,1) matrix are |alpha| +- |beta|
    return 2.0 * (math.log(abs(M[0, 0]) + abs(M[0, 1])) + logscale)


def translation_length_iterate(g: MobiusMap, k: int = 10) -> float:
    """Iterate oracle (dist(o, g^{2n} o) - dist(o, g^n o)) / n with n = 2^k."""
    n = 2 ** k
    return (_scaled_power_displacement(g, k + 1) - _scaled_power_displacement(g, k)) / n


def fixed_points(g: MobiusMap) -> tuple:
    a, b = g.alpha, g.beta
    # |beta|^2 - Im(alpha)^2 rewritten without cancellation via the normalization
    disc = a.real ** 2 - 1.0
    if disc <= 0 or abs(b) == 0:
        raise NotHyperbolic("map has no pair of boundary fixed points")
    r = math.sqrt(disc)
    return (1j * a.imag + r) / b.conjugate(), (1j * a.imag - r) / b.conjugate()


def axis_endpoints(g: MobiusMap) -> tuple:
    """``(attracting, repelling)`` boundary fixed points."""
    if translation_length(g) <= 0.0:
        raise NotHyperbolic("map is not hyperbolic")
    z1, z2 = fixed_points(g)
    z1, z2 = z1 / abs(z1), z2 / abs(z2)
    if boundary_derivative(g, z1) < boundary_derivative(g, z2):
        return z1, z2
    return z2, z1


def axes_cross(g: MobiusMap, h: MobiusMap, tol: float = 1e-12) -> str:
    """Classify two axes: 'intersecting', 'disjoint' or 'shared-endpoint'."""
    p = [cmath.phase(z) for z in axis_endpoints(g)]
    q = [cmath.phase(z) for z in axis_endpoints(h)]
    if any(angular_distance(s, t) < tol for s in p for t in q):
        return "shared-endpoint"

    def between(t, lo, hi):
        return 0 < (t - lo) % TWO_PI < (hi - lo) % TWO_PI

    inside = [between(t, p[0], p[1]) for t in q]
    return "intersecting" if inside[0] != inside[1] else "disjoint"


def arc_image(g: MobiusMap, lo: float, hi: float) -> tuple:
    """Image of the counterclockwise arc [lo, hi] as ``(start angle, length)``.

    The length uses the chord distortion identity
    |g(z) - g(w)|^2 = |g'(z)| |g'(w)| |z - w|^2, which stays accurate for tiny arcs.
    """
    e1, e2 = cmath.exp(1j * lo), cmath.exp(1j * hi)
    chord = abs(e1 - e2) * math.sqrt(boundary_derivative(g, e1) * boundary_derivative(g, e2))
    length = 2.0 * math.asin(min(chord / 2.0, 1.0))
    # for arcs longer than pi the chord is ambiguous; decide by the image midpoint
    s = cmath.phase(g(e1))
    if chord > 1.0:
        mid = g(cmath.exp(1j * (lo + ((hi - lo) % TWO_PI) / 2)))
        if ((cmath.phase(mid) - s) % TWO_PI) > math.pi:
            length = TWO_PI - length
    return s, length


def cylinder_arc(rep: SchottkyRep, w: str) -> tuple:
    """Boundary arc ρ(w[:-1]) H_{w[-1]} containing the limit points of rays through w."""
    if not w:
        raise ValueError("cylinder of the empty word is the whole limit set")
    lo, hi = rep.planes[w[-1]].endpoints
    return arc_image(rep_of_word(rep, w[:-1]), lo, hi)


@dataclass(frozen=True)
class LimitPoint:
    point: complex            # rho(w) o
    arc: tuple                # (start angle, length) of the deepest cylinder arc
    diameters: tuple          # arc lengths for prefixes of length 1..n

    @property
    def angle(self) -> float:
        return wrap(self.arc[0] + self.arc[1] / 2)


def limit_point(rep: SchottkyRep, w: str) -> LimitPoint:
    if not w:
        raise ValueError("need a nonempty word")
    diam = tuple(cylinder_arc(rep, w[:k])[1] for k in range(1, len(w) + 1))
    return LimitPoint(rep_of_word(rep, w)(ORIGIN), cylinder_arc(rep, w), diam)


def attracting_point(rep: SchottkyRep, x: str) -> complex:
    """Limit point of the ray x x x ..."""
    return axis_endpoints(rep.gens[x])[0]


def ray_displacements(rep: SchottkyRep, rays: np.ndarray, checkpoints) -> np.ndarray:
    """dist(o, ρ(r[:n]) o) for a batch of rays at each checkpoint length ``n``.

    ``rays`` holds letter indices (a, b, A, B -> 0..3). Products are kept
    scaled to unit size with the log of the scale tracked separately, so
    rays of any length avoid overflow.
    """
    rays = np.asarray(rays)
    T, n = rays.shape
    mats = np.stack([rep.gens[x].matrix() for x in W.LETTERS])    # (4, 2, 2)
    M = np.broadcast_to(np.eye(2, dtype=complex), (T, 2, 2)).copy()
    logscale = np.zeros(T)
    checkpoints = sorted(set(int(c) for c in checkpoints))
    out = np.empty((T, len(checkpoints)))
    j = 0
    for k in range(n):
        M = M @ mats[rays[:, k]]
        s = np.abs(M).max(axis=(1, 2))
        M /= s[:, None, None]
        logscale += np.log(s)
        while j < len(checkpoints) and checkpoints[j] == k + 1:
            out[:, j] = 2.0 * (np.log(np.abs(M[:, 0, 0]) + np.abs(M[:, 0, 1])) + logscale)
            j += 1
    return out


def _svg_xy(z: complex, c: float, R: float) -> str:
    return f"{c + R * z.real:.3f} {c - R * z.imag:.3f}"


def limit_set_svg(rep: SchottkyRep, depth: int = 4, size: int = 600) -> str:
    """Unit circle, the four half-plane geodesics and the depth-``depth`` cylinder arcs."""
    if not 1 <= depth <= 8:
        raise ValueError("depth must be between 1 and 8")
    c = size / 2
    R = 0.45 * size
    colors = {"a": "#c0392b", "b": "#2471a3", "A": "#e67e22", "B": "#27ae60"}
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<circle cx="{c:.3f}" cy="{c:.3f}" r="{R:.3f}" fill="none" stroke="#444" stroke-width="1"/>',
    ]
    for x in W.LETTERS:
        hp = rep.planes[x]
        lo, hi = hp.endpoints
        r = math.tan(hp.halfwidth) * R
        out.append(
            f'<path class="geodesic" d="M {_svg_xy(cmath.exp(1j * lo), c, R)} '
            f'A {r:.3f} {r:.3f} 0 0 1 {_svg_xy(cmath.exp(1j * hi), c, R)}" '
            f'fill="none" stroke="{colors[x]}" stroke-width="1.5"/>'
        )
    Rc = 1.03 * R
    for w in W.reduced_words(depth):
        s, length = cylinder_arc(rep, w)
        p1 = cmath.exp(1j * s)
        p2 = cmath.exp(1j * (s + length))
        large = 1 if length > math.pi else 0
        out.append(
            f'<path class="cylinder" d="M {_svg_xy(p1 * 1.03, c, R)} '
            f'A {Rc:.3f} {Rc:.3f} 0 {large} 1 {_svg_xy(p2 * 1.03, c, R)}" '
            f'fill="none" stroke="{colors[w[0]]}" stroke-width="3"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
