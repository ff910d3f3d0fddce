"""World lines of field modes inside the driven crystal.

Coordinates are dimensionless: x0 = c0 t / L and x1 = z / L. The drive
enters through u = zeta (x0 - n x1) and the refractive perturbation
h = n^2 - 1 + alpha S(u), with S(u) = sech(u) for the half-cycle pulse and
S(u) = -u sech(u) for the single-cycle pulse (the same sign as
``DrivePulse.shape_time``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BranchSingularity, DomainError, EmptyBundle, StepFailure
from .numerics import chi, solve_monotone_root

SHAPES = ("hcp", "scp")

# |u sech u| peaks at u = 1.19967864...
_SCP_PEAK = 0.6627434193491816


@dataclass(frozen=True)
class GeodesicParams:
    alpha: float
    n: float
    zeta: float

    def __post_init__(self):
        if not self.n > 0:
            raise ValueError("n must be positive")
        if not self.zeta > 0:
            raise DomainError("zeta must be positive")

    @classmethod
    def from_groups(cls, alpha_over_n2: float = 0.49, n_zeta: float = 12.0, n: float = 2.0):
        """Parameters from the two invariant groups alpha/n^2 and n zeta at a chosen n."""
        return cls(alpha=alpha_over_n2 * n * n, n=n, zeta=n_zeta / n)


@dataclass(frozen=True)
class PerturbationField:
    params: GeodesicParams
    shape: str

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"shape must be one of {SHAPES}")

    def S(self, u):
        u = np.asarray(u, dtype=float)
        s = 1.0 / np.cosh(np.minimum(np.abs(u), 700.0))
        return s if self.shape == "hcp" else -u * s

    def dS(self, u):
        u = np.asarray(u, dtype=float)
        s = 1.0 / np.cosh(np.minimum(np.abs(u), 700.0))
        t = np.tanh(u)
        if self.shape == "hcp":
            return -s * t
        return -s + u * s * t

    def u(self, x0, x1):
        p = self.params
        return p.zeta * (np.asarray(x0) - p.n * np.asarray(x1))

    def h(self, x0, x1):
        p = self.params
        return p.n**2 - 1.0 + p.alpha * self.S(self.u(x0, x1))

    def dh0(self, x0, x1):
        p = self.params
        return p.alpha * p.zeta * self.dS(self.u(x0, x1))

    def dh1(self, x0, x1):
        p = self.params
        return -p.n * p.alpha * p.zeta * self.dS(self.u(x0, x1))


@dataclass(frozen=True, eq=False)
class WorldLine:
    """Trajectory sampled as rows (x0, x1); ``constant`` is C1 (hcp) or C2 (scp)."""

    shape: str
    params: GeodesicParams
    constant: float
    launch: float
    points: np.ndarray
    method: str = "implicit"

    @property
    def x0(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def x1(self) -> np.ndarray:
        return self.points[:, 1]

    @property
    def constant_rescaled(self) -> float:
        """The same constant in the alpha x1 +- (n/zeta) F(u) = C normalization."""
        return self.params.n * self.constant / self.params.zeta

    def residual(self) -> np.ndarray:
        """Implicit-equation residual at every sample."""
        return implicit_residual(self.shape, self.params, self.constant, self.x0, self.x1)

    def exit_time(self) -> float:
        """Retarded time x0 - n x1 at the last sample."""
        return float(self.x0[-1] - self.params.n * self.x1[-1])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("x0_over_L,x1_over_L,constant\n")
            for a, b in self.points:
                fh.write(f"{a:.12e},{b:.12e},{self.constant:.12e}\n")


def write_bundle_csv(bundle, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("x0_over_L,x1_over_L,constant,launch_index\n")
        for i, wl in enumerate(bundle):
            for a, b in wl.points:
                fh.write(f"{a:.12e},{b:.12e},{wl.constant:.12e},{i}\n")


# implicit forms --------------------------------------------------------------

def launch_constant(shape: str, params: GeodesicParams, launch: float) -> float:
    """Constant of the world line entering the crystal (x1 = 0) at x0 = launch."""
    u0 = params.zeta * launch
    if shape == "hcp":
        return 0.0 - math.sinh(u0)
    if shape == "scp":
        if u0 == 0.0:
            raise BranchSingularity("a launch at the pulse node sits on the Chi singularity", 0.0)
        return float(chi(abs(u0)))
    raise ValueError(f"shape must be one of {SHAPES}")


def implicit_residual(shape, params: GeodesicParams, constant, x0, x1):
    a = params.alpha * params.zeta / params.n
    u = params.zeta * (np.asarray(x0) - params.n * np.asarray(x1))
    if shape == "hcp":
        return a * x1 - np.sinh(u) - constant
    return a * x1 + chi(np.abs(u)) - constant


def worldline_implicit_hcp(params: GeodesicParams, C1: float, z_grid, launch: float | None = None) -> WorldLine:
    """(alpha zeta / n) z - sinh(zeta (x0 - n z)) = C1, solved explicitly for x0."""
    z = np.asarray(z_grid, dtype=float)
    a = params.alpha * params.zeta / params.n
    x0 = params.n * z + np.arcsinh(a * z - C1) / params.zeta
    if launch is None:
        launch = math.asinh(-C1) / params.zeta
    return WorldLine("hcp", params, float(C1), float(launch), np.column_stack([x0, z]), "implicit")


def worldline_implicit_scp(params: GeodesicParams, C2: float, z_grid, branch: int = 1,
                           min_argument: float = 1e-10, launch: float | None = None) -> WorldLine:
    """(alpha zeta / n) z + Chi(|zeta (x0 - n z)|) = C2 on the branch sign(u) = ``branch``.

    Raises BranchSingularity when the required |u| falls below ``min_argument``.
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    z = np.asarray(z_grid, dtype=float)
    a = params.alpha * params.zeta / params.n
    floor = float(chi(min_argument))
    out = np.empty_like(z)
    for i, zi in enumerate(z):
        target = C2 - a * zi
        if target <= floor:
            raise BranchSingularity(f"world line reaches the Chi singularity near z = {zi:.6g}", float(zi))
        hi = 1.0
        while float(chi(hi)) < target:
            hi *= 2.0
        y = solve_monotone_root(lambda v: float(chi(v)) - target, (min_argument, hi), tol=1e-15)
        out[i] = params.n * zi + branch * y / params.zeta
    if launch is None:
        launch = out[0] if z.size and z[0] == 0.0 else math.nan
    return WorldLine("scp", params, float(C2), float(launch), np.column_stack([out, z]), "implicit")


def worldline_implicit(shape: str, params: GeodesicParams, launch: float, z_grid) -> WorldLine:
    """Implicit world line through the entry event (x0, x1) = (launch, 0)."""
    c = launch_constant(shape, params, launch)
    if shape == "hcp":
        return worldline_implicit_hcp(params, c, z_grid, launch)
    return worldline_implicit_scp(params, c, z_grid, branch=1 if launch > 0 else -1, launch=launch)


# first-order reduced ray equation -------------------------------------------

def ray_slope(field: PerturbationField, x0, x1):
    """dx1/dx0 = n / (n^2 + alpha S(u))."""
    p = field.params
    return p.n / (p.n**2 + p.alpha * field.S(field.u(x0, x1)))


def _horizon(field: PerturbationField) -> float:
    p = field.params
    smax = 1.0 if field.shape == "hcp" else _SCP_PEAK
    denom_min = p.n**2 - abs(p.alpha) * smax
    if denom_min <= 0:
        raise DomainError("n^2 + alpha S(u) changes sign: rays are not time-like everywhere")
    return 2.0 * (p.n**2 + abs(p.alpha) * smax) / p.n + 1.0


def worldline_ode(shape: str, params: GeodesicParams, launch: float, z_grid=None,
                  rtol: float = 1e-12, atol: float = 1e-14) -> WorldLine:
    """Integrate the reduced ray equation in x0 from (launch, 0) until x1 = 1.

    With ``z_grid`` the line is returned at those x1 values (inverting the
    dense output); otherwise at the stepper's own nodes.
    """
    field = PerturbationField(params, shape)
    span = _horizon(field)

    def rhs(x0, y):
        return [ray_slope(field, x0, y[0])]

    def exit_face(x0, y):
        return y[0] - 1.0

    exit_face.terminal = True
    exit_face.direction = 1
    sol = solve_ivp(rhs, (launch, launch + span), [0.0], method="DOP853", rtol=rtol, atol=atol,
                    events=exit_face, dense_output=True)
    if sol.status == -1:
        raise StepFailure(f"ray integration failed: {sol.message}")
    if not sol.t_events[0].size:
        raise StepFailure("ray did not reach the exit face")
    t_exit = float(sol.t_events[0][0])
    if z_grid is None:
        keep = sol.t < t_exit
        x0 = np.r_[sol.t[keep], t_exit]
        x1 = np.r_[sol.y[0][keep], 1.0]
    else:
        x1 = np.asarray(z_grid, dtype=float)
        x0 = np.empty_like(x1)
        for i, zi in enumerate(x1):
            if zi <= 0.0:
                x0[i] = launch
            elif zi >= 1.0:
                x0[i] = t_exit
            else:
                x0[i] = solve_monotone_root(lambda t: float(sol.sol(t)[0]) - zi, (launch, t_exit), tol=1e-14)
    try:
        const = launch_constant(shape, params, launch)
    except BranchSingularity:
        const = math.nan
    return WorldLine(shape, params, const, float(launch), np.column_stack([x0, x1]), "ode")


# null geodesics of the full analogue metric ----------------------------------

@dataclass(frozen=True, eq=False)
class GeodesicSolution:
    worldline: WorldLine
    affine: np.ndarray
    velocity: np.ndarray

    def null_residual(self) -> np.ndarray:
        """g_{mu nu} k^mu k^nu / (k^0)^2 along the solution, zero for a null ray."""
        wl = self.worldline
        field = PerturbationField(wl.params, wl.shape)
        h = field.h(wl.x0, wl.x1)
        v0, v1 = self.velocity[:, 0], self.velocity[:, 1]
        return (v0**2 / (1.0 + h) - v1**2) / v0**2


def null_geodesic(shape: str, params: GeodesicParams, launch: float,
                  rtol: float = 1e-12, atol: float = 1e-14) -> GeodesicSolution:
    """Second-order geodesic equations with connection from g^{mu nu} = diag(1 + h, -1).

    x0'' = [dh0/2 x0'^2 + dh1 x0' x1'] / (1 + h),  x1'' = dh1 x0'^2 / (2 (1 + h)^2),
    started null with x0' = 1, x1' = 1/sqrt(1 + h).
    """
    field = PerturbationField(params, shape)
    span = _horizon(field)
    h0 = float(field.h(launch, 0.0))
    y0 = [launch, 0.0, 1.0, 1.0 / math.sqrt(1.0 + h0)]

    def rhs(lam, y):
        x0, x1, v0, v1 = y
        h = field.h(x0, x1)
        d0, d1 = field.dh0(x0, x1), field.dh1(x0, x1)
        a0 = (0.5 * d0 * v0 * v0 + d1 * v0 * v1) / (1.0 + h)
        a1 = d1 * v0 * v0 / (2.0 * (1.0 + h) ** 2)
        return [v0, v1, a0, a1]

    def exit_face(lam, y):
        return y[1] - 1.0

    exit_face.terminal = True
    exit_face.direction = 1
    sol = solve_ivp(rhs, (0.0, 4.0 * span), y0, method="DOP853", rtol=rtol, atol=atol, events=exit_face)
    if sol.status == -1 or not sol.t_events[0].size:
        raise StepFailure(f"geodesic integration failed: {sol.message}")
    # a terminal event leaves the event state as the last sample
    ys, lam = sol.y, sol.t
    wl = WorldLine(shape, params, math.nan, float(launch), ys[:2].T.copy(), "null-geodesic")
    return GeodesicSolution(wl, lam, ys[2:].T.copy())


# bundles -----------------------------------------------------------------------

def launch_grid(count: int, half_width: float, zeta: float, avoid_zero: bool = False) -> np.ndarray:
    """``count`` uniformly spaced entry times covering |u| <= half_width.

    ``avoid_zero`` shifts an odd grid by half a spacing so no line starts on the
    single-cycle node.
    """
    u = np.linspace(-half_width, half_width, count)
    if avoid_zero and count % 2 == 1:
        u = u + 0.5 * (u[1] - u[0])
    return u / zeta


def worldline_bundle(shape: str, params: GeodesicParams, launches, z_grid, method: str = "implicit"):
    out = []
    for l in launches:
        if method == "implicit":
            out.append(worldline_implicit(shape, params, float(l), z_grid))
        else:
            out.append(worldline_ode(shape, params, float(l), z_grid))
    return out


def ray_density(bundle) -> tuple[np.ndarray, np.ndarray]:
    """World-line density per unit retarded time at the exit face.

    For consecutive lines the entry spacing divided by the exit spacing of
    x0 - n x1 gives the crossing density; it equals 1 for straight rays.
    Returns (retarded exit times at midpoints, density).
    """
    if len(bundle) < 2:
        raise EmptyBundle("ray density needs at least two world lines")
    entry = np.array([wl.launch for wl in bundle])
    exit_ = np.array([wl.exit_time() for wl in bundle])
    order = np.argsort(entry)
    entry, exit_ = entry[order], exit_[order]
    density = np.diff(entry) / np.diff(exit_)
    return 0.5 * (exit_[1:] + exit_[:-1]), density
