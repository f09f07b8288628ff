"""Log-normal hydraulic-conductivity fields built from randomized cosine modes.

A conductivity realization is a finite sum of N cosine modes

    Y'(x, y) = sigma * sqrt(2/N) * sum_i cos(phi_i + 2 pi (k1_i x + k2_i y))
    K(x, y)  = K_g * exp(Y'(x, y)),     K_g = <K> * exp(-sigma^2 / 2)

with wavenumbers drawn from the spectral density of the chosen correlation
function and phases uniform on [0, 2 pi).  Because the field is a closed-form
expression, its derivatives are available analytically, realizations are
reproducible from a stored mode table, and a field with n <= n_max modes is
exactly the prefix of the full table (so one sampling serves every mode count
in a study).

Wavenumber laws (isotropic, correlation length ``lam``):

* Gaussian correlation  C(r) = sigma^2 exp(-r^2 / lam^2):
  k1, k2 i.i.d. normal with standard deviation 1 / (sqrt(2) pi lam).
* Exponential correlation  C(r) = sigma^2 exp(-|r| / lam):
  direction uniform on the circle, radial magnitude
  kappa = sqrt((1 - u)^-2 - 1) / (2 pi lam) with u uniform on (0, 1),
  i.e. the inverse CDF of F(v) = 1 - (1 + v^2)^(-1/2) for v = 2 pi lam kappa.

One-dimensional fields are the restriction of the 2D sum to the line y = 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from ._sums import TWO_PI, mode_sums, mode_sums_grid, mode_sums_lattice
from .exceptions import ModeFileError

GENERATOR_NAME = "pcg64-boxmuller-v1"
_FLOAT_FMT = ".17g"  # shortest decimal that round-trips IEEE double


class Correlation(enum.Enum):
    GAUSSIAN = "gaussian"
    EXPONENTIAL = "exponential"

    @classmethod
    def parse(cls, name: str) -> "Correlation":
        key = str(name).strip().lower()
        aliases = {
            "gaussian": cls.GAUSSIAN,
            "gauss": cls.GAUSSIAN,
            "exponential": cls.EXPONENTIAL,
            "exp": cls.EXPONENTIAL,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown correlation kind: {name!r}") from None


@dataclass(frozen=True)
class RandomFieldModel:
    """Statistical description of ln K: correlation kind, variance, length, mean.

    ``sigma2`` is the variance of ln K (dimensionless), ``lam`` the isotropic
    correlation length, ``mean_k`` the arithmetic mean conductivity <K>.
    """

    correlation: Correlation
    sigma2: float
    lam: float = 1.0
    mean_k: float = 15.0

    def __post_init__(self):
        if isinstance(self.correlation, str):
            object.__setattr__(self, "correlation", Correlation.parse(self.correlation))
        if not (self.sigma2 >= 0.0):
            raise ValueError(f"sigma2 must be >= 0, got {self.sigma2}")
        if not (self.lam > 0.0):
            raise ValueError(f"lam must be > 0, got {self.lam}")
        if not (self.mean_k > 0.0):
            raise ValueError(f"mean_k must be > 0, got {self.mean_k}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def geometric_mean(self) -> float:
        """K_g = <K> exp(-sigma^2/2); strictly positive by construction."""
        return self.mean_k * math.exp(-0.5 * self.sigma2)

    def with_sigma2(self, sigma2: float) -> "RandomFieldModel":
        """Same correlation structure at a different ln-K variance.

        Wavenumbers do not depend on sigma2, so a ModeSet sampled from this
        model stays valid for the returned one.
        """
        return replace(self, sigma2=sigma2)


@dataclass(eq=False)
class ModeSet:
    """A fixed realization of wavenumbers and phases.

    Fields built from the prefix of length ``n <= n_max`` are reproducible
    across implementations from this table alone; the RNG is only a means of
    producing it once.
    """

    k1: np.ndarray
    k2: np.ndarray
    phi: np.ndarray
    seed: int
    model: RandomFieldModel
    generator: str = GENERATOR_NAME

    def __post_init__(self):
        self.k1 = np.ascontiguousarray(self.k1, dtype=np.float64)
        self.k2 = np.ascontiguousarray(self.k2, dtype=np.float64)
        self.phi = np.ascontiguousarray(self.phi, dtype=np.float64)
        if not (self.k1.size == self.k2.size == self.phi.size):
            raise ValueError("k1, k2, phi must have identical length")
        if self.k1.size < 1:
            raise ValueError("a ModeSet needs at least one mode")
        if np.any(self.phi < 0.0) or np.any(self.phi >= TWO_PI):
            raise ValueError("phases must lie in [0, 2 pi)")

    @property
    def n_max(self) -> int:
        return self.k1.size

    def truncated(self, n: int) -> "ModeSet":
        """The prefix of length n as a standalone ModeSet."""
        self._check_prefix(n)
        return ModeSet(self.k1[:n].copy(), self.k2[:n].copy(), self.phi[:n].copy(),
                       self.seed, self.model, self.generator)

    def _check_prefix(self, n: int):
        if not (1 <= n <= self.n_max):
            raise ValueError(f"mode count n={n} outside [1, {self.n_max}]")


def sample_modes(model: RandomFieldModel, n_max: int, seed: int) -> ModeSet:
    """Draw wavenumbers and phases for ``n_max`` modes.

    The stream layout is fixed so mode files act as regression baselines:
    per mode i (ascending), three uniforms (u1, u2, u3) are consumed in C
    order; (k1, k2) come from Box-Muller on (u1, u2) in the Gaussian case or
    from inverse-CDF radius u1 and direction angle 2 pi u2 in the exponential
    case, and phi = 2 pi u3.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random((int(n_max), 3))

    if model.correlation is Correlation.GAUSSIAN:
        # Box-Muller; 1-u avoids log(0) on the half-open uniform.
        rho = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        std = 1.0 / (math.sqrt(2.0) * math.pi * model.lam)
        k1 = std * rho * np.cos(TWO_PI * u[:, 1])
        k2 = std * rho * np.sin(TWO_PI * u[:, 1])
    else:
        kappa = np.sqrt((1.0 - u[:, 0]) ** -2 - 1.0) / (TWO_PI * model.lam)
        theta = TWO_PI * u[:, 1]
        k1 = kappa * np.cos(theta)
        k2 = kappa * np.sin(theta)

    phi = TWO_PI * u[:, 2]
    np.clip(phi, 0.0, np.nextafter(TWO_PI, 0.0), out=phi)
    return ModeSet(k1, k2, phi, int(seed), model)


# ---------------------------------------------------------------------------
# Field evaluation
# ---------------------------------------------------------------------------

def _amplitude(sigma2: float, n: int) -> float:
    return math.sqrt(sigma2) * math.sqrt(2.0 / n)


def log_fluctuation(modes: ModeSet, n: int, sigma2: float, x, y=1.0):
    """Y'(x, y) from the n-mode prefix; broadcasts over x, y."""
    modes._check_prefix(n)
    s = mode_sums(modes.k1[:n], modes.k2[:n], modes.phi[:n], x, y)
    return _amplitude(sigma2, n) * s


def conductivity(modes: ModeSet, n: int, model: RandomFieldModel, x, y=1.0):
    """K(x, y) = K_g exp(Y'); strictly positive."""
    return model.geometric_mean * np.exp(log_fluctuation(modes, n, model.sigma2, x, y))


def conductivity_gradient(modes: ModeSet, n: int, model: RandomFieldModel, x, y=1.0):
    """Analytic (dK/dx, dK/dy) at the given points."""
    _, dkx, dky = conductivity_with_gradient(modes, n, model, x, y)
    return dkx, dky


def conductivity_with_gradient(modes: ModeSet, n: int, model: RandomFieldModel, x, y=1.0):
    """(K, dK/dx, dK/dy) in one pass over the modes."""
    modes._check_prefix(n)
    s, s1, s2 = mode_sums(modes.k1[:n], modes.k2[:n], modes.phi[:n], x, y, gradient=True)
    c2 = _amplitude(model.sigma2, n)
    k = model.geometric_mean * np.exp(c2 * s)
    factor = -TWO_PI * c2 * k
    return k, factor * s1, factor * s2


def conductivity_grid(modes: ModeSet, n: int, model: RandomFieldModel,
                      x_nodes, y_nodes, gradient: bool = False):
    """K on the tensor grid {x_p} x {y_q}, shape (P, Q).

    With ``gradient=True`` returns (K, dK/dx, dK/dy).  Uses the factored
    mode-sum path, so large solver grids stay cheap.
    """
    modes._check_prefix(n)
    c2 = _amplitude(model.sigma2, n)
    out = mode_sums_grid(modes.k1[:n], modes.k2[:n], modes.phi[:n],
                         x_nodes, y_nodes, gradient=gradient)
    if not gradient:
        return model.geometric_mean * np.exp(c2 * out)
    s, s1, s2 = out
    k = model.geometric_mean * np.exp(c2 * s)
    factor = -TWO_PI * c2 * k
    return k, factor * s1, factor * s2


def conductivity_lattice(modes: ModeSet, n: int, model: RandomFieldModel,
                         x0: float, dx: float, m: int, y: float = 1.0,
                         gradient: bool = False):
    """K at x_j = x0 + j*dx, j = 0..m-1, fixed y (default: the 1D line y = 1).

    With ``gradient=True`` returns (K, dK/dx).
    """
    modes._check_prefix(n)
    c2 = _amplitude(model.sigma2, n)
    out = mode_sums_lattice(modes.k1[:n], modes.k2[:n], modes.phi[:n],
                            x0, dx, m, y, gradient=gradient)
    if not gradient:
        return model.geometric_mean * np.exp(c2 * out)
    s, s1, _ = out
    k = model.geometric_mean * np.exp(c2 * s)
    return k, -TWO_PI * c2 * k * s1


# ---------------------------------------------------------------------------
# Sample-smoothness diagnostics
# ---------------------------------------------------------------------------

@dataclass
class SmoothnessReport:
    """Finite-difference probes of sample smoothness.

    ``derivative_estimates[l, i]`` is the forward difference of K at
    x0 + i*dx for step dx = dx_levels[l]; ``lipschitz_estimates[m]`` is the
    max difference quotient at fixed step for mode count n_values[m].
    """

    abscissae: np.ndarray
    derivative_estimates: np.ndarray | None = None
    lipschitz_estimates: np.ndarray | None = None
    dx_levels: np.ndarray | None = None
    n_values: np.ndarray | None = None
    analytic_derivative: np.ndarray | None = None


def derivative_profile(modes: ModeSet, model: RandomFieldModel, n: int,
                       x0: float, dx_levels, n_points: int) -> SmoothnessReport:
    """Forward-difference dK/dx estimates at shrinking steps.

    For Gaussian correlation the rows converge to the analytic derivative as
    dx shrinks; for exponential correlation with many modes they spread,
    which is the signature of the non-differentiable limit.
    """
    dx_levels = np.asarray(dx_levels, dtype=np.float64)
    if dx_levels.ndim != 1 or dx_levels.size == 0:
        raise ValueError("dx_levels must be a non-empty 1D sequence")
    if np.any(dx_levels <= 0.0) or np.any(np.diff(dx_levels) >= 0.0):
        raise ValueError("dx_levels must be strictly decreasing and positive")

    estimates = np.empty((dx_levels.size, n_points))
    for lvl, dx in enumerate(dx_levels):
        k = conductivity_lattice(modes, n, model, x0, dx, n_points + 1)
        estimates[lvl] = np.diff(k) / dx
    _, dk_analytic, _ = conductivity_with_gradient(
        modes, n, model, x0 + np.arange(n_points) * dx_levels[-1], 1.0)
    return SmoothnessReport(
        abscissae=np.arange(n_points, dtype=np.float64),
        derivative_estimates=estimates,
        dx_levels=dx_levels,
        analytic_derivative=dk_analytic,
    )


def lipschitz_profile(modes: ModeSet, model: RandomFieldModel, n_values,
                      dx: float, n_points: int, span: float | None = None) -> SmoothnessReport:
    """Max |K(x+dx) - K(x)| / dx over a scan window, per mode count."""
    if dx <= 0.0:
        raise ValueError("dx must be positive")
    n_values = np.asarray(n_values, dtype=np.int64)
    if span is None:
        span = 10.0 * model.lam
    x = np.linspace(0.0, span, n_points)
    estimates = np.empty(n_values.size)
    for m, n in enumerate(n_values):
        k_lo = conductivity(modes, int(n), model, x, 1.0)
        k_hi = conductivity(modes, int(n), model, x + dx, 1.0)
        estimates[m] = np.max(np.abs(k_hi - k_lo)) / dx
    return SmoothnessReport(abscissae=x, lipschitz_estimates=estimates, n_values=n_values)


# ---------------------------------------------------------------------------
# Mode file I/O
# ---------------------------------------------------------------------------

def write_modes(modes: ModeSet, path) -> None:
    """Write a mode table as '#'-headed CSV with 17-significant-digit values.

    The format is the portability mechanism: any implementation that reads
    the same file reconstructs bit-identical conductivity parameters.
    """
    m = modes.model
    lines = [
        "# darcybench mode file v1",
        f"# generator={modes.generator}",
        f"# seed={modes.seed}",
        f"# correlation={m.correlation.value}",
        f"# sigma2={format(m.sigma2, _FLOAT_FMT)}",
        f"# lambda={format(m.lam, _FLOAT_FMT)}",
        f"# mean_k={format(m.mean_k, _FLOAT_FMT)}",
        f"# n_max={modes.n_max}",
        "# columns=i,k1,k2,phi",
    ]
    for i in range(modes.n_max):
        lines.append(
            f"{i},{format(modes.k1[i], _FLOAT_FMT)},"
            f"{format(modes.k2[i], _FLOAT_FMT)},{format(modes.phi[i], _FLOAT_FMT)}"
        )
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_modes(path) -> ModeSet:
    """Read a mode file written by :func:`write_modes` (or a compatible tool)."""
    header: dict[str, str] = {}
    k1, k2, phi = [], [], []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    header[key.strip()] = value.strip()
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise ModeFileError(f"expected 4 columns, got {len(parts)}", line=lineno)
            try:
                idx = int(parts[0])
                vals = [float(p) for p in parts[1:]]
            except ValueError as exc:
                raise ModeFileError(str(exc), line=lineno) from None
            if idx != len(k1):
                raise ModeFileError(f"row index {idx} out of order", line=lineno)
            k1.append(vals[0])
            k2.append(vals[1])
            phi.append(vals[2])

    required = ("seed", "correlation", "sigma2", "lambda", "mean_k")
    missing = [k for k in required if k not in header]
    if missing:
        raise ModeFileError(f"missing header fields: {', '.join(missing)}")
    if not k1:
        raise ModeFileError("no mode rows found")
    if "n_max" in header and int(header["n_max"]) != len(k1):
        raise ModeFileError(f"header n_max={header['n_max']} but {len(k1)} rows present")

    model = RandomFieldModel(
        correlation=Correlation.parse(header["correlation"]),
        sigma2=float(header["sigma2"]),
        lam=float(header["lambda"]),
        mean_k=float(header["mean_k"]),
    )
    return ModeSet(np.array(k1), np.array(k2), np.array(phi),
                   seed=int(header["seed"]), model=model,
                   generator=header.get("generator", "unknown"))
