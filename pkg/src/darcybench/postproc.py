"""Error norms, Darcy velocities, and the grid-refinement EOC harness."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grids import GridSpec, HeadField


def l2_error_1d(head: HeadField, exact) -> float:
    """Discrete L2 norm: sqrt(dx * sum (h_i - h(x_i))^2) over all nodes."""
    exact_vals = exact(head.grid.x_nodes()) if callable(exact) else np.asarray(exact)
    diff = head.values - exact_vals
    return float(math.sqrt(head.grid.dx * np.sum(diff * diff)))


def l2_error_2d(head: HeadField, exact) -> float:
    """Discrete L2 norm with dx*dy weighting over the full node set."""
    grid = head.grid
    if callable(exact):
        exact_vals = exact(grid.x_nodes()[:, None], grid.y_nodes()[None, :])
    else:
        exact_vals = np.asarray(exact)
    diff = head.values - exact_vals
    return float(math.sqrt(grid.dx * grid.dx * np.sum(diff * diff)))


def linf_error(values, exact) -> float:
    return float(np.max(np.abs(np.asarray(values) - np.asarray(exact))))


@dataclass
class VelocityField:
    """Darcy velocity components sampled on the head grid.

    ``dimensionless`` fields are physical fields divided by the effective
    mean velocity U = K_eff J, with J = H / L_x the mean head slope and
    K_eff the effective conductivity, equal to the geometric mean K_g at
    first order in 2D.  In these units the ensemble mean of v_x sits at 1.
    """

    grid: GridSpec
    vx: np.ndarray
    vy: np.ndarray | None
    dimensionless: bool


def darcy_velocity(head: HeadField, k_nodal, *, dimensionless: bool = False,
                   model=None, h_inflow: float | None = None) -> VelocityField:
    """V = -K grad h with second-order differences (one-sided at edges).

    ``k_nodal`` holds conductivities at the grid nodes (an array shaped like
    the head values, or a vectorized callable evaluated on the nodes).
    Boundary-adjacent values use one-sided stencils and are meant to be
    excluded from statistics via the ensemble margins.  Dimensionless output
    needs the field ``model`` (for K_g) and the inflow head.
    """
    grid = head.grid
    if callable(k_nodal):
        if grid.ndim == 1:
            k = np.asarray(k_nodal(grid.x_nodes()), dtype=np.float64)
        else:
            k = np.asarray(k_nodal(grid.x_nodes(), grid.y_nodes()), dtype=np.float64)
    else:
        k = np.asarray(k_nodal, dtype=np.float64)
    if k.shape != head.values.shape:
        raise ValueError("conductivity table must match the head grid")

    if grid.ndim == 1:
        dh_dx = np.gradient(head.values, grid.dx, edge_order=2)
        vx = -k * dh_dx
        vy = None
    else:
        dh_dx = np.gradient(head.values, grid.dx, axis=0, edge_order=2)
        dh_dy = np.gradient(head.values, grid.dx, axis=1, edge_order=2)
        vx = -k * dh_dx
        vy = -k * dh_dy

    if dimensionless:
        if model is None or h_inflow is None:
            raise ValueError("dimensionless velocities need the field model and h_inflow")
        u_ref = model.geometric_mean * (h_inflow / grid.lx)
        vx = vx / u_ref
        vy = None if vy is None else vy / u_ref
    return VelocityField(grid, vx, vy, dimensionless)


@dataclass
class EocTable:
    """Refinement errors against the finest-level reference.

    ``errors[k]`` is the plain l2 vector norm of (solution_k - reference)
    restricted to the coarsest grid's nodes, and
    ``eoc[k] = log2(errors[k] / errors[k+1])``.  Degenerate (zero-error) or
    failed levels leave NaNs and set ``flagged``.
    """

    dx_levels: np.ndarray
    errors: np.ndarray
    eoc: np.ndarray
    flagged: bool = False
    notes: list = field(default_factory=list)


def _restrict_to_base(field_k: HeadField, level: int) -> np.ndarray:
    stride = 2 ** level
    if field_k.grid.ndim == 1:
        return field_k.values[::stride]
    return field_k.values[::stride, ::stride]


def eoc_study(solver, base_grid: GridSpec, n_levels: int) -> EocTable:
    """Estimated orders of convergence under successive halving.

    ``solver`` maps a GridSpec to a HeadField.  Levels k = 0..n_levels-1 use
    dx = base_dx / 2^k; the finest solution is the reference, and every
    difference is sampled at the base grid's nodes (which all finer grids
    contain exactly).  A solver failure truncates the table and flags it.
    """
    if n_levels < 3:
        raise ValueError("need at least 3 levels (two errors) for an EOC")
    dx_levels = base_grid.dx / 2.0 ** np.arange(n_levels)
    solutions = []
    notes = []
    flagged = False
    for k, dx in enumerate(dx_levels):
        try:
            solutions.append(solver(base_grid.with_dx(dx)))
        except Exception as exc:  # partial table is still a result
            notes.append(f"level {k} (dx={dx:g}) failed: {exc}")
            flagged = True
            break

    n_solved = len(solutions)
    if n_solved < 3:
        return EocTable(dx_levels[:n_solved], np.array([]), np.array([]),
                        flagged=True, notes=notes or ["not enough levels solved"])

    reference = _restrict_to_base(solutions[-1], n_solved - 1)
    errors = np.array([
        float(np.linalg.norm((_restrict_to_base(sol, k) - reference).ravel()))
        for k, sol in enumerate(solutions[:-1])
    ])
    # errors at the solver's roundoff floor carry no order information
    floor = 1e-12 * float(np.linalg.norm(reference.ravel()))
    degenerate = errors <= floor
    with np.errstate(divide="ignore", invalid="ignore"):
        eoc = np.log2(errors[:-1] / errors[1:])
    eoc[degenerate[:-1] | degenerate[1:]] = np.nan
    if np.any(~np.isfinite(eoc)):
        flagged = True
        notes.append("zero or roundoff-level error; EOC undefined at some level")
    return EocTable(dx_levels[:n_solved], errors, eoc, flagged=flagged, notes=notes)
