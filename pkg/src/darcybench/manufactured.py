"""Closed-form reference heads, source terms, and boundary data.

The 1D reference head is h(x) = 3 + sin(x); the 2D one is
h(x, y) = 1 + sin(2x + y).  Forcing either head to solve the flow equation
produces a source; with f denoting the divergence of K grad h, the equation
reads -div(K grad h) = -f and the discrete schemes in this package all
consume f directly (their stencils encode the divergence).

The sources are implemented in factored form

    f = grad K . grad h + K * laplace h

with the analytic conductivity gradient, which keeps a single code path for
K and its derivatives.  Equality with the fully expanded expressions is
checked in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import randfield
from .randfield import ModeSet, RandomFieldModel


# -- 1D ---------------------------------------------------------------------

def head_1d(x):
    return 3.0 + np.sin(x)


def head_1d_slope(x):
    return np.cos(x)


def source_1d(modes: ModeSet, n: int, model: RandomFieldModel, x):
    """f(x) = K'(x) cos(x) - K(x) sin(x) = (K h')' for h = 3 + sin x."""
    k, dkx, _ = randfield.conductivity_with_gradient(modes, n, model, x, 1.0)
    return dkx * np.cos(x) - k * np.sin(x)


def source_1d_lattice(modes: ModeSet, n: int, model: RandomFieldModel,
                      x0: float, dx: float, m: int):
    """Same as :func:`source_1d` on a uniform lattice (fast path)."""
    k, dkx = randfield.conductivity_lattice(modes, n, model, x0, dx, m, gradient=True)
    x = x0 + np.arange(m) * dx
    return dkx * np.cos(x) - k * np.sin(x)


@dataclass
class ManufacturedCase1D:
    length: float
    head: Callable
    source: Callable
    dirichlet: tuple[float, float]


def case_1d(modes: ModeSet, n: int, model: RandomFieldModel, length: float) -> ManufacturedCase1D:
    return ManufacturedCase1D(
        length=length,
        head=head_1d,
        source=lambda x: source_1d(modes, n, model, x),
        dirichlet=(3.0, 3.0 + float(np.sin(length))),
    )


# -- 2D ---------------------------------------------------------------------

def head_2d(x, y):
    return 1.0 + np.sin(2.0 * np.asarray(x) + np.asarray(y))


def head_2d_gradient(x, y):
    phase = 2.0 * np.asarray(x) + np.asarray(y)
    return 2.0 * np.cos(phase), np.cos(phase)


def source_2d(modes: ModeSet, n: int, model: RandomFieldModel, x, y):
    """f = (2 K_x + K_y) cos(2x + y) - 5 K sin(2x + y)."""
    k, dkx, dky = randfield.conductivity_with_gradient(modes, n, model, x, y)
    phase = 2.0 * np.asarray(x) + np.asarray(y)
    return (2.0 * dkx + dky) * np.cos(phase) - 5.0 * k * np.sin(phase)


def source_2d_grid(modes: ModeSet, n: int, model: RandomFieldModel, x_nodes, y_nodes):
    """Source table on a tensor grid, shape (len(x_nodes), len(y_nodes))."""
    k, dkx, dky = randfield.conductivity_grid(modes, n, model, x_nodes, y_nodes, gradient=True)
    phase = 2.0 * np.asarray(x_nodes)[:, None] + np.asarray(y_nodes)[None, :]
    return (2.0 * dkx + dky) * np.cos(phase) - 5.0 * k * np.sin(phase)


@dataclass
class ManufacturedCase2D:
    lx: float
    ly: float
    head: Callable
    source: Callable  # source(x_nodes, y_nodes) -> table
    dirichlet_left: Callable  # h(0, y)
    dirichlet_right: Callable  # h(Lx, y)
    neumann_bottom: Callable  # dh/dy at y = 0
    neumann_top: Callable  # dh/dy at y = Ly


def case_2d(modes: ModeSet, n: int, model: RandomFieldModel,
            lx: float, ly: float) -> ManufacturedCase2D:
    return ManufacturedCase2D(
        lx=lx,
        ly=ly,
        head=head_2d,
        source=lambda xv, yv: source_2d_grid(modes, n, model, xv, yv),
        dirichlet_left=lambda y: 1.0 + np.sin(np.asarray(y, dtype=float)),
        dirichlet_right=lambda y: 1.0 + np.sin(2.0 * lx + np.asarray(y, dtype=float)),
        neumann_bottom=lambda x: np.cos(2.0 * np.asarray(x, dtype=float)),
        neumann_top=lambda x: np.cos(2.0 * np.asarray(x, dtype=float) + ly),
    )
