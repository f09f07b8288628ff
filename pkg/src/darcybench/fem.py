"""Conforming P1 finite elements on intervals and structured triangle meshes.

The coefficient K and the data f are interpolated with P1 elements as well:
element stiffness uses the vertex-mean conductivity (exact for a P1
coefficient in 1D, vertex-rule quadrature in 2D) and the load vector uses
vertex quadrature.  The 2D mesh splits every grid square along the
bottom-left to top-right diagonal into two right isosceles triangles; the
fixed diagonal direction makes error tables reproducible.

No-flow top/bottom boundaries contribute nothing; inhomogeneous
head-gradient data enters through the boundary term of the weak form with
trapezoid quadrature along the edges.  Dirichlet nodes at the x-ends are
eliminated symmetrically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import manufactured, randfield
from .exceptions import CoefficientError
from .grids import GridSpec, HeadField
from .linalg import SparseSym, TriDiag, solve_spd, solve_tridiag


def assemble_fem_1d(grid: GridSpec, k_nodal, rhs_nodal, bc: tuple[float, float]):
    """Interior stiffness system for the 1D weak form.

    ``k_nodal``/``rhs_nodal`` are values at the grid nodes; ``bc`` the
    Dirichlet heads at the interval ends.  The load is -dx * f at interior
    nodes (vertex quadrature of -integral f phi).
    """
    if grid.ndim != 1:
        raise ValueError("assemble_fem_1d needs a 1D grid")
    k = np.asarray(k_nodal, dtype=np.float64)
    f = np.asarray(rhs_nodal, dtype=np.float64)
    if k.shape != (grid.nx,):
        raise ValueError("k_nodal must hold one value per node")
    if np.any(~(np.isfinite(k) & (k > 0.0))):
        bad = int(np.argmax(~(np.isfinite(k) & (k > 0.0))))
        raise CoefficientError(f"nonpositive conductivity at node {bad}",
                               location=grid.x_nodes()[bad])
    dx = grid.dx
    ke = 0.5 * (k[:-1] + k[1:]) / dx  # per-element integral of K * phi'a phi'b
    diag = ke[:-1] + ke[1:]
    sub = -ke[1:-1]
    b = -dx * np.broadcast_to(f, (grid.nx,))[1:-1].copy()
    b[0] += ke[0] * bc[0]
    b[-1] += ke[-1] * bc[1]
    return TriDiag(sub, diag, sub.copy()), b


def solve_fem_1d(grid: GridSpec, modes, n: int, model, case: str = "manufactured",
                 h_inflow: float = 1.0) -> HeadField:
    k = randfield.conductivity_lattice(modes, n, model, 0.0, grid.dx, grid.nx)
    if case == "manufactured":
        bc = (3.0, 3.0 + float(np.sin(grid.lx)))
        f = np.zeros(grid.nx)
        f[1:-1] = manufactured.source_1d_lattice(modes, n, model, grid.dx, grid.dx, grid.nx - 2)
    elif case == "homogeneous":
        bc = (h_inflow, 0.0)
        f = np.zeros(grid.nx)
    else:
        raise ValueError(f"unknown case {case!r}")
    a, b = assemble_fem_1d(grid, k, f, bc)
    x = solve_tridiag(a, b)
    values = np.empty(grid.nx)
    values[0], values[-1] = bc
    values[1:-1] = x
    return HeadField(grid, values)


@dataclass(eq=False)
class TriMesh:
    """Friedrichs-Keller triangulation of a structured rectangle.

    Node ids follow the grid ordering i * ny + j.  Triangle count is
    2 (nx-1)(ny-1); every triangle is positively oriented.
    """

    grid: GridSpec
    vertices: np.ndarray          # (n_nodes, 2)
    triangles: np.ndarray         # (n_tri, 3) int
    dirichlet_mask: np.ndarray    # bool per node (x-end columns)
    bottom_edges: np.ndarray      # (nx-1, 2) node ids along y = 0
    top_edges: np.ndarray         # (nx-1, 2) node ids along y = ly

    @property
    def n_nodes(self) -> int:
        return self.vertices.shape[0]


def build_tri_mesh(grid: GridSpec) -> TriMesh:
    if grid.ndim != 2:
        raise ValueError("build_tri_mesh needs a 2D grid")
    nx, ny = grid.nx, grid.ny
    xv, yv = grid.x_nodes(), grid.y_nodes()
    xx, yy = np.meshgrid(xv, yv, indexing="ij")
    vertices = np.column_stack([xx.ravel(), yy.ravel()])

    node = np.arange(nx * ny).reshape(nx, ny)
    v00 = node[:-1, :-1].ravel()
    v10 = node[1:, :-1].ravel()
    v01 = node[:-1, 1:].ravel()
    v11 = node[1:, 1:].ravel()
    # diagonal runs bottom-left to top-right in every cell
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.vstack([lower, upper])

    dirichlet = np.zeros(nx * ny, dtype=bool)
    dirichlet[node[0, :]] = True
    dirichlet[node[-1, :]] = True
    bottom = np.column_stack([node[:-1, 0], node[1:, 0]])
    top = np.column_stack([node[:-1, -1], node[1:, -1]])
    return TriMesh(grid, vertices, triangles, dirichlet, bottom, top)


def stiffness_and_load(mesh: TriMesh, k_nodal, rhs_nodal, neumann=None):
    """Full (pre-elimination) stiffness matrix and load vector.

    The stiffness is exactly symmetric with zero row sums and is positive
    semidefinite; Dirichlet elimination happens in :func:`assemble_fem_2d`.
    """
    k = np.asarray(k_nodal, dtype=np.float64).ravel()
    f = np.asarray(rhs_nodal, dtype=np.float64).ravel()
    n_nodes = mesh.n_nodes
    if k.size != n_nodes or f.size != n_nodes:
        raise ValueError("k_nodal and rhs_nodal must hold one value per node")
    if np.any(~(np.isfinite(k) & (k > 0.0))):
        bad = int(np.argmax(~(np.isfinite(k) & (k > 0.0))))
        raise CoefficientError(f"nonpositive conductivity at node {bad}",
                               location=tuple(mesh.vertices[bad]))

    tri = mesh.triangles
    coords = mesh.vertices[tri]                      # (T, 3, 2)
    x = coords[:, :, 0]
    y = coords[:, :, 1]
    beta = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    gamma = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    area = 0.5 * (beta[:, 0] * gamma[:, 1] - beta[:, 1] * gamma[:, 0])
    k_bar = k[tri].mean(axis=1)
    scale = k_bar / (4.0 * area)                     # (T,)

    local = scale[:, None, None] * (beta[:, :, None] * beta[:, None, :]
                                    + gamma[:, :, None] * gamma[:, None, :])
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    a_full = sp.coo_matrix((local.ravel(), (rows, cols)),
                           shape=(n_nodes, n_nodes)).tocsr()

    b_full = np.zeros(n_nodes)
    np.add.at(b_full, tri.ravel(),
              np.repeat(-area / 3.0, 3) * f[tri].ravel())

    if neumann is not None:
        g_bottom, g_top = neumann
        for edges, g_fn, sign in ((mesh.bottom_edges, g_bottom, -1.0),
                                  (mesh.top_edges, g_top, +1.0)):
            ends = edges.ravel()
            xe = mesh.vertices[ends, 0]
            lengths = np.repeat(
                np.abs(mesh.vertices[edges[:, 1], 0] - mesh.vertices[edges[:, 0], 0]), 2)
            np.add.at(b_full, ends,
                      sign * 0.5 * lengths * k[ends] * np.asarray(g_fn(xe), dtype=np.float64))
    return a_full, b_full


def assemble_fem_2d(mesh: TriMesh, k_nodal, rhs_nodal, dirichlet_values, neumann=None):
    """Reduced stiffness system over the free (non-Dirichlet) nodes.

    ``k_nodal``, ``rhs_nodal`` and ``dirichlet_values`` are arrays over all
    mesh nodes (Dirichlet values are read only where the mask is set);
    ``neumann = (g_bottom, g_top)`` gives dh/dy data as vectorized functions
    of x, or None for no-flow.  Returns (SparseSym, b) in the order of
    ``free_nodes(mesh)``.
    """
    a_full, b_full = stiffness_and_load(mesh, k_nodal, rhs_nodal, neumann)
    fixed = mesh.dirichlet_mask
    free = ~fixed
    hd = np.asarray(dirichlet_values, dtype=np.float64).ravel()
    b_red = b_full[free] - a_full[free][:, fixed] @ hd[fixed]
    a_red = a_full[free][:, free]
    return SparseSym.from_csr(a_red), b_red


def free_nodes(mesh: TriMesh) -> np.ndarray:
    return np.flatnonzero(~mesh.dirichlet_mask)


def solve_fem_2d(grid: GridSpec, modes, n: int, model, case: str = "manufactured",
                 h_inflow: float = 1.0, tol: float = 1e-10,
                 max_iter: int | None = None) -> HeadField:
    mesh = build_tri_mesh(grid)
    k = randfield.conductivity_grid(modes, n, model, grid.x_nodes(), grid.y_nodes()).ravel()

    hd = np.zeros(mesh.n_nodes)
    if case == "manufactured":
        mcase = manufactured.case_2d(modes, n, model, grid.lx, grid.ly)
        f = mcase.source(grid.x_nodes(), grid.y_nodes()).ravel()
        yv = grid.y_nodes()
        hd_grid = np.zeros((grid.nx, grid.ny))
        hd_grid[0, :] = mcase.dirichlet_left(yv)
        hd_grid[-1, :] = mcase.dirichlet_right(yv)
        hd = hd_grid.ravel()
        neumann = (mcase.neumann_bottom, mcase.neumann_top)
    elif case == "homogeneous":
        f = np.zeros(mesh.n_nodes)
        hd_grid = np.zeros((grid.nx, grid.ny))
        hd_grid[0, :] = h_inflow
        hd = hd_grid.ravel()
        neumann = None
    else:
        raise ValueError(f"unknown case {case!r}")

    a, b = assemble_fem_2d(mesh, k, f, hd, neumann)
    res = solve_spd(a, b, tol=tol, max_iter=max_iter)

    values = hd.copy()
    values[free_nodes(mesh)] = res.x
    return HeadField(grid, values.reshape(grid.nx, grid.ny))
