"""Monte Carlo ensembles and first-order perturbation comparisons.

Realization r of an ensemble samples its mode table with seed
``base_seed XOR r``, solves the homogeneous flow problem with the configured
scheme, and extracts the Darcy velocity (dimensionless, in units of the
effective mean velocity K_g J).
Statistics are ensemble averages at each grid node followed by spatial
averages over an inner region that excludes the boundary-influenced margins;
error bounds are standard errors of the node-wise estimators, spatially
averaged (recorded as such in the summary metadata).

The linear-theory comparators are sigma_Vx^2 = (3/8) sigma^2 U and
sigma_Vy^2 = (1/8) sigma^2 U, together with the head-variance scale
(sigma lam J)^2.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import fdm, fem, grw, postproc, randfield
from .grids import GridSpec, HeadField
from .grw import GrwConfig
from .postproc import VelocityField
from .randfield import RandomFieldModel

_SOLVERS = ("fdm", "fem", "grw")


@dataclass
class McConfig:
    solver: str
    model: RandomFieldModel
    grid: GridSpec
    realizations: int = 100
    n_modes: int = 100
    base_seed: int = 0
    margin_x: float = 4.0  # correlation-length units, inflow/outflow sides
    margin_y: float = 2.0  # correlation-length units, no-flow sides
    h_inflow: float = 1.0
    dimensionless: bool = True
    workers: int = 1
    grw_config: GrwConfig | None = None

    def __post_init__(self):
        if self.solver not in _SOLVERS:
            raise ValueError(f"solver must be one of {_SOLVERS}, got {self.solver!r}")
        if self.grid.ndim != 2:
            raise ValueError("ensembles run on 2D grids")
        if self.realizations < 2:
            raise ValueError("need at least 2 realizations")
        mx = self.margin_x * self.model.lam
        my = self.margin_y * self.model.lam
        if self.margin_x < 0 or self.margin_y < 0 or 2 * mx >= self.grid.lx or 2 * my >= self.grid.ly:
            raise ValueError("margins must be nonnegative and strictly inside the domain")

    def seed_for(self, r: int) -> int:
        return int(self.base_seed) ^ int(r)


@dataclass
class EnsembleResult:
    config: McConfig
    fields: list  # (HeadField, VelocityField) per successful realization
    indices: list  # realization index per entry of ``fields``
    seeds: list
    failures: list  # (realization index, message)
    warnings: list = field(default_factory=list)


def _solve_realization(config: McConfig, r: int):
    seed = config.seed_for(r)
    modes = randfield.sample_modes(config.model, config.n_modes, seed)
    if config.solver == "fdm":
        head = fdm.solve_head_2d(config.grid, modes, config.n_modes, config.model,
                                 case="homogeneous", h_inflow=config.h_inflow)
        warning = None
    elif config.solver == "fem":
        head = fem.solve_fem_2d(config.grid, modes, config.n_modes, config.model,
                                case="homogeneous", h_inflow=config.h_inflow)
        warning = None
    else:
        head, report = grw.run_to_steady_2d(config.grid, modes, config.n_modes,
                                            config.model, case="homogeneous",
                                            config=config.grw_config,
                                            h_inflow=config.h_inflow)
        warning = None if report.converged else (
            f"realization {r}: not stationary after {report.iterations} iterations")
    k_nodes = randfield.conductivity_grid(modes, config.n_modes, config.model,
                                          config.grid.x_nodes(), config.grid.y_nodes())
    vel = postproc.darcy_velocity(head, k_nodes,
                                  dimensionless=config.dimensionless,
                                  model=config.model,
                                  h_inflow=config.h_inflow)
    return head.values, vel.vx, vel.vy, warning


def run_ensemble(config: McConfig) -> EnsembleResult:
    """Run all realizations; failures are collected, not raised.

    Results are reduced in realization order regardless of scheduling, so a
    rerun with the same configuration is bit-identical.
    """
    indices = list(range(config.realizations))
    outcomes: dict[int, object] = {}
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = {r: pool.submit(_solve_realization, config, r) for r in indices}
            for r, fut in futures.items():
                try:
                    outcomes[r] = fut.result()
                except Exception as exc:
                    outcomes[r] = exc
    else:
        for r in indices:
            try:
                outcomes[r] = _solve_realization(config, r)
            except Exception as exc:
                outcomes[r] = exc

    fields, kept, failures, warnings = [], [], [], []
    for r in indices:
        out = outcomes[r]
        if isinstance(out, Exception):
            failures.append((r, f"{type(out).__name__}: {out}"))
            continue
        head_vals, vx, vy, warning = out
        if warning:
            warnings.append(warning)
        head = HeadField(config.grid, head_vals)
        vel = VelocityField(config.grid, vx, vy, config.dimensionless)
        fields.append((head, vel))
        kept.append(r)
    seeds = [config.seed_for(r) for r in indices]
    return EnsembleResult(config, fields, kept, seeds, failures, warnings)


@dataclass
class McSummary:
    mean_vx: float
    mean_vx_bound: float
    mean_vy: float
    mean_vy_bound: float
    var_vx: float
    var_vx_bound: float
    var_vy: float
    var_vy_bound: float
    var_h: float
    var_h_bound: float
    realizations: int
    inner_nodes: int
    error_bound_kind: str = "standard-error"

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _inner_mask(grid: GridSpec, lam: float, margin_x: float, margin_y: float) -> np.ndarray:
    x = grid.x_nodes()
    y = grid.y_nodes()
    mx = margin_x * lam
    my = margin_y * lam
    keep_x = (x >= mx) & (x <= grid.lx - mx)
    keep_y = (y >= my) & (y <= grid.ly - my)
    return np.outer(keep_x, keep_y)


def ensemble_space_stats(fields, margin_x: float, margin_y: float,
                         lam: float = 1.0) -> McSummary:
    """Ensemble-then-space averages of head variance and velocity moments."""
    if len(fields) < 2:
        raise ValueError("need at least 2 realizations for variances")
    grid = fields[0][0].grid
    mask = _inner_mask(grid, lam, margin_x, margin_y)
    if not np.any(mask):
        raise ValueError("margins leave no interior nodes")

    heads = np.stack([h.values[mask] for h, _ in fields])
    vxs = np.stack([v.vx[mask] for _, v in fields])
    vys = np.stack([v.vy[mask] for _, v in fields])
    r = heads.shape[0]

    def moments(samples):
        node_mean = samples.mean(axis=0)
        node_var = samples.var(axis=0, ddof=1)
        mean = float(node_mean.mean())
        var = float(node_var.mean())
        mean_bound = float(np.sqrt(node_var / r).mean())
        var_bound = float((node_var * math.sqrt(2.0 / (r - 1))).mean())
        return mean, mean_bound, var, var_bound

    mvx, mvx_b, vvx, vvx_b = moments(vxs)
    mvy, mvy_b, vvy, vvy_b = moments(vys)
    _, _, vh, vh_b = moments(heads)
    return McSummary(mvx, mvx_b, mvy, mvy_b, vvx, vvx_b, vvy, vvy_b, vh, vh_b,
                     realizations=r, inner_nodes=int(mask.sum()))


def first_order_predictions(sigma2: float, u: float = 1.0, lam: float = 1.0,
                            mean_slope: float = 1.0) -> tuple[float, float, float]:
    """Linear-theory velocity variances and the head-variance scale.

    Returns ((3/8) sigma2 u, (1/8) sigma2 u, sigma2 lam^2 mean_slope^2);
    the last value is an order-of-magnitude scale, not a sharp prediction.
    """
    return (0.375 * sigma2 * u, 0.125 * sigma2 * u,
            sigma2 * lam ** 2 * mean_slope ** 2)


@dataclass
class ProfileTable:
    axis: str
    positions: np.ndarray
    var_h: np.ndarray
    var_vx: np.ndarray
    var_vy: np.ndarray


def boundary_profiles(fields, axis: str = "x") -> ProfileTable:
    """Ensemble variance averaged over the transverse direction.

    Used to locate the boundary-influenced margins: head variance is pinned
    to zero at the Dirichlet ends and the profiles flatten to a plateau in
    the interior (for moderate ln-K variance).
    """
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    grid = fields[0][0].grid
    heads = np.stack([h.values for h, _ in fields])
    vxs = np.stack([v.vx for _, v in fields])
    vys = np.stack([v.vy for _, v in fields])
    transverse = 2 if axis == "x" else 1  # axis 0 is the realization index

    def profile(samples):
        return samples.var(axis=0, ddof=1).mean(axis=transverse - 1)

    positions = grid.x_nodes() if axis == "x" else grid.y_nodes()
    return ProfileTable(axis, positions, profile(heads), profile(vxs), profile(vys))


def sanity_filter(fields, h_min: float, h_max: float, tol: float = 1e-8):
    """Split realizations by the maximum principle h in [h_min, h_max] (+/- tol)."""
    kept, rejected = [], []
    for idx, (head, _) in enumerate(fields):
        values = head.values
        if np.min(values) < h_min - tol or np.max(values) > h_max + tol:
            rejected.append(idx)
        else:
            kept.append(idx)
    return kept, rejected
