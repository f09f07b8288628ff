"""Finite-difference discretization of the flow equation.

The 1D scheme is the three-point stencil with conductivities sampled at the
half-index midpoints,

    K(x_i - dx/2) h_{i-1} - [K(x_i + dx/2) + K(x_i - dx/2)] h_i
        + K(x_i + dx/2) h_{i+1} = dx^2 f_i,

and the 2D scheme is its five-point extension with coefficients
A = K(x - dx/2, y)/dx^2, D = K(x + dx/2, y)/dx^2, B/E analogous in y, and
C = -(A + B + D + E).  ``f`` is the divergence of K grad h (zero for the
homogeneous benchmark problem).  Systems are assembled in negated
(positive-definite) orientation.

Boundaries: Dirichlet at the x-ends is eliminated into the right-hand side;
the y-ends carry head-gradient (Neumann) data imposed through mirror ghost
rows.  To keep the operator exactly symmetric, the half-index conductivity
reaching outside the domain is mirrored to its interior counterpart and
boundary rows are scaled by 1/2.
"""

from __future__ import annotations

import numpy as np

from . import manufactured, randfield
from .exceptions import CoefficientError
from .grids import GridSpec, HeadField
from .linalg import SparseSym, TriDiag, solve_spd, solve_tridiag


def _check_positive(k: np.ndarray, points, what: str):
    bad = ~(np.isfinite(k) & (k > 0.0))
    if np.any(bad):
        where = np.argwhere(bad)[0]
        loc = points[tuple(where)] if isinstance(points, np.ndarray) else points(where)
        raise CoefficientError(f"nonpositive {what} sample at {loc}", location=loc)


def assemble_1d(grid: GridSpec, k_eval, rhs, bc: tuple[float, float]):
    """Assemble the interior system (TriDiag, b) for -(K h')' with data f.

    ``k_eval`` and ``rhs`` are vectorized callables; ``bc`` are the Dirichlet
    head values at x = 0 and x = lx.
    """
    if grid.ndim != 1:
        raise ValueError("assemble_1d needs a 1D grid")
    xm = grid.x_midpoints()
    k = np.asarray(k_eval(xm), dtype=np.float64)
    _check_positive(k, xm, "conductivity")
    x_int = grid.x_nodes()[1:-1]
    f = np.broadcast_to(np.asarray(rhs(x_int), dtype=np.float64), x_int.shape)

    diag = k[:-1] + k[1:]
    sub = -k[1:-1]
    a = TriDiag(sub, diag, sub.copy())
    b = -grid.dx ** 2 * f.copy()
    h0, h_l = bc
    b[0] += k[0] * h0
    b[-1] += k[-1] * h_l
    return a, b


def _field_tables_1d(grid, modes, n, model):
    k_mid = randfield.conductivity_lattice(modes, n, model, 0.5 * grid.dx, grid.dx, grid.nx - 1)
    return k_mid


def solve_head_1d(grid: GridSpec, modes, n: int, model, case: str = "manufactured",
                  h_inflow: float = 1.0) -> HeadField:
    """Assemble and solve the 1D problem for one realization.

    ``case`` selects the reference problem: "manufactured" uses the closed
    form head with its source and boundary values, "homogeneous" the
    source-free problem with heads (h_inflow, 0).
    """
    k_mid = _field_tables_1d(grid, modes, n, model)
    _check_positive(k_mid, grid.x_midpoints(), "conductivity")
    dx = grid.dx
    if case == "manufactured":
        bc = (3.0, 3.0 + float(np.sin(grid.lx)))
        f = manufactured.source_1d_lattice(modes, n, model, dx, dx, grid.nx - 2)
    elif case == "homogeneous":
        bc = (h_inflow, 0.0)
        f = np.zeros(grid.nx - 2)
    else:
        raise ValueError(f"unknown case {case!r}")

    diag = k_mid[:-1] + k_mid[1:]
    sub = -k_mid[1:-1]
    b = -dx ** 2 * f
    b[0] += k_mid[0] * bc[0]
    b[-1] += k_mid[-1] * bc[1]
    x = solve_tridiag(TriDiag(sub, diag, sub.copy()), b)

    values = np.empty(grid.nx)
    values[0], values[-1] = bc
    values[1:-1] = x
    return HeadField(grid, values)


def assemble_2d(grid: GridSpec, k_eval, rhs, dirichlet, neumann=None):
    """Assemble the five-point system on a rectangle.

    ``k_eval(xv, yv)`` and ``rhs(xv, yv)`` return tables of shape
    (len(xv), len(yv)).  ``dirichlet = (left, right)`` are head values along
    the x-ends as vectorized functions of y; ``neumann = (bottom, top)`` are
    dh/dy data along the y-ends (None means no-flow).  Returns (SparseSym, b)
    over the unknowns (interior in x, all nodes in y), ordered as
    u = (i - 1) * ny + j.
    """
    if grid.ndim != 2:
        raise ValueError("assemble_2d needs a 2D grid")
    nx, ny, dx = grid.nx, grid.ny, grid.dx
    xv, yv = grid.x_nodes(), grid.y_nodes()
    x_int = xv[1:-1]

    kx = np.asarray(k_eval(grid.x_midpoints(), yv), dtype=np.float64)
    ky = np.asarray(k_eval(xv, grid.y_midpoints()), dtype=np.float64)
    _check_positive(kx, np.stack(np.meshgrid(grid.x_midpoints(), yv, indexing="ij"), -1), "conductivity")
    _check_positive(ky, np.stack(np.meshgrid(xv, grid.y_midpoints(), indexing="ij"), -1), "conductivity")

    f = np.broadcast_to(np.asarray(rhs(x_int, yv), dtype=np.float64), (nx - 2, ny))
    dl = np.broadcast_to(np.asarray(dirichlet[0](yv), dtype=np.float64), (ny,))
    dr = np.broadcast_to(np.asarray(dirichlet[1](yv), dtype=np.float64), (ny,))
    if neumann is None:
        g_bot = np.zeros(nx - 2)
        g_top = np.zeros(nx - 2)
    else:
        g_bot = np.broadcast_to(np.asarray(neumann[0](x_int), dtype=np.float64), (nx - 2,))
        g_top = np.broadcast_to(np.asarray(neumann[1](x_int), dtype=np.float64), (nx - 2,))

    inv_dx2 = 1.0 / dx ** 2
    kyi = ky[1:-1, :] * inv_dx2  # rows at interior x nodes
    a_w = kx[:-1, :] * inv_dx2   # A: west face of unknown (i, j)
    d_e = kx[1:, :] * inv_dx2    # D: east face
    b_s = np.empty((nx - 2, ny))
    e_n = np.empty((nx - 2, ny))
    b_s[:, 1:] = kyi
    b_s[:, 0] = kyi[:, 0]        # mirrored half-index below the bottom row
    e_n[:, :-1] = kyi
    e_n[:, -1] = kyi[:, -1]      # mirrored above the top row

    w = np.ones(ny)
    w[0] = w[-1] = 0.5           # boundary rows halved to keep symmetry

    nun = (nx - 2) * ny
    uidx = np.arange(nun).reshape(nx - 2, ny)

    rows = [uidx.ravel()]
    cols = [uidx.ravel()]
    vals = [(w * (a_w + b_s + d_e + e_n)).ravel()]
    # x neighbors (row-scaled)
    rows += [uidx[1:, :].ravel(), uidx[:-1, :].ravel()]
    cols += [uidx[:-1, :].ravel(), uidx[1:, :].ravel()]
    vals += [(-(w * a_w))[1:, :].ravel(), (-(w * d_e))[:-1, :].ravel()]
    # y neighbors: ghost elimination doubles the boundary coupling, row
    # halving restores it, so the coefficient is uniformly -K/dx^2
    rows += [uidx[:, 1:].ravel(), uidx[:, :-1].ravel()]
    cols += [uidx[:, :-1].ravel(), uidx[:, 1:].ravel()]
    vals += [(-b_s[:, 1:]).ravel(), (-e_n[:, :-1]).ravel()]

    a = SparseSym.from_triplets(np.concatenate(rows), np.concatenate(cols),
                                np.concatenate(vals), nun)

    b = -(w * f)
    b[0, :] += (w * a_w)[0, :] * dl
    b[-1, :] += (w * d_e)[-1, :] * dr
    if neumann is None:
        k_wall = None
    else:
        # the wall flux is K at the wall itself times the given gradient;
        # using the half-index K here would lose an order of consistency
        k_wall = np.asarray(k_eval(x_int, np.array([0.0, grid.ly])), dtype=np.float64)
        b[:, 0] -= k_wall[:, 0] * g_bot / dx
        b[:, -1] += k_wall[:, 1] * g_top / dx
    return a, b.ravel()


def solve_head_2d(grid: GridSpec, modes, n: int, model, case: str = "manufactured",
                  h_inflow: float = 1.0, tol: float = 1e-10,
                  max_iter: int | None = None) -> HeadField:
    """Assemble and solve the 2D problem for one realization (PCG inside)."""
    def k_eval(xv, yv):
        return randfield.conductivity_grid(modes, n, model, xv, yv)

    if case == "manufactured":
        mcase = manufactured.case_2d(modes, n, model, grid.lx, grid.ly)
        a, b = assemble_2d(grid, k_eval, mcase.source,
                           (mcase.dirichlet_left, mcase.dirichlet_right),
                           (mcase.neumann_bottom, mcase.neumann_top))
        dl = mcase.dirichlet_left(grid.y_nodes())
        dr = mcase.dirichlet_right(grid.y_nodes())
    elif case == "homogeneous":
        zero = lambda xv, yv: np.zeros((xv.size, yv.size))  # noqa: E731
        a, b = assemble_2d(grid, k_eval, zero,
                           (lambda y: np.full(y.size, h_inflow),
                            lambda y: np.zeros(y.size)))
        dl = np.full(grid.ny, h_inflow)
        dr = np.zeros(grid.ny)
    else:
        raise ValueError(f"unknown case {case!r}")

    res = solve_spd(a, b, tol=tol, max_iter=max_iter)
    values = np.empty((grid.nx, grid.ny))
    values[0, :] = dl
    values[-1, :] = dr
    values[1:-1, :] = res.x.reshape(grid.nx - 2, grid.ny)
    return HeadField(grid, values)
