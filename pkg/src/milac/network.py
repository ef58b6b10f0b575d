"""Multiport admittance network model of a microwave linear analog computer.

A network has ``P = N + M`` ports. The first ``N`` ports are driven by
voltage sources with series admittance ``y0``; the remaining ``M`` ports are
terminated in ``y0``. Tunable admittance ``components[k, k]`` ties port ``k``
to ground and ``components[i, k]`` (``i != k``) ties port ``i`` to port ``k``.

With ``P = Y / y0 + I`` the port voltages satisfy ``P @ v = [u; 0]``, which
is what :func:`simulate_nodal` solves directly. :func:`simulate_blockwise`
evaluates the equivalent closed forms in terms of the blocks of ``P``.
"""

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .numerics import ShapeError, as_matrix, solve_linear

__all__ = [
    "MilacNetwork",
    "PartitionedP",
    "Variant",
    "IllConditionedWarning",
    "admittance_matrix",
    "p_matrix",
    "components_from_p",
    "simulate_nodal",
    "simulate_blockwise",
    "effective_matrix",
    "replace_couplings",
    "scale_output",
    "dump_network",
    "load_network",
    "dumps_network",
    "loads_network",
]

#: Condition number of ``P`` above which simulation warns.
COND_WARN = 1e10


class IllConditionedWarning(RuntimeWarning):
    pass


def _frozen(a):
    a = np.array(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class MilacNetwork:
    """P-port network of tunable admittances (siemens).

    Parameters
    ----------
    n_in : int
        Number of driven ports ``N``.
    m_out : int
        Number of undriven ports ``M`` (at least one).
    y0 : float
        Reference admittance, ``1 / Z0``.
    components : (P, P) array_like
        Tunable admittance grid. Not assumed symmetric.
    """

    n_in: int
    m_out: int
    y0: float
    components: np.ndarray

    def __post_init__(self):
        if self.n_in < 0 or self.m_out < 1:
            raise ValueError(f"need n_in >= 0 and m_out >= 1, got {self.n_in}, {self.m_out}")
        y0 = float(self.y0)
        if not (np.isfinite(y0) and y0 > 0):
            raise ValueError(f"y0 must be positive and finite, got {self.y0}")
        comps = _frozen(as_matrix(self.components, "components"))
        p = self.n_in + self.m_out
        if comps.shape != (p, p):
            raise ShapeError(f"components must be {p}x{p}, got {comps.shape}")
        object.__setattr__(self, "y0", y0)
        object.__setattr__(self, "components", comps)

    @property
    def n_ports(self):
        return self.n_in + self.m_out

    def __eq__(self, other):
        if not isinstance(other, MilacNetwork):
            return NotImplemented
        return (
            self.n_in == other.n_in
            and self.m_out == other.m_out
            and self.y0 == other.y0
            and np.array_equal(self.components, other.components)
        )

    __hash__ = None


@dataclass(frozen=True)
class PartitionedP:
    """``P`` split at row/column ``N`` into four blocks."""

    p11: np.ndarray
    p12: np.ndarray
    p21: np.ndarray
    p22: np.ndarray

    def __post_init__(self):
        blocks = [_frozen(as_matrix(getattr(self, k), k)) for k in ("p11", "p12", "p21", "p22")]
        p11, p12, p21, p22 = blocks
        n, m = p11.shape[0], p22.shape[0]
        if (
            p11.shape != (n, n)
            or p22.shape != (m, m)
            or p12.shape != (n, m)
            or p21.shape != (m, n)
        ):
            raise ShapeError(
                "inconsistent block shapes "
                f"{p11.shape}, {p12.shape}, {p21.shape}, {p22.shape}"
            )
        for k, b in zip(("p11", "p12", "p21", "p22"), blocks):
            object.__setattr__(self, k, b)

    @property
    def n(self):
        return self.p11.shape[0]

    @property
    def m(self):
        return self.p22.shape[0]

    @property
    def full(self):
        return np.block([[self.p11, self.p12], [self.p21, self.p22]])

    @classmethod
    def from_full(cls, p, n):
        p = as_matrix(p, "P")
        if p.shape[0] != p.shape[1] or not 0 <= n < p.shape[0]:
            raise ShapeError(f"cannot split {p.shape} at {n}")
        return cls(p[:n, :n], p[:n, n:], p[n:, :n], p[n:, n:])


class Variant(str, Enum):
    VIA_P11 = "p11"
    VIA_P22 = "p22"


def admittance_matrix(net):
    """Admittance matrix: ``-Y[i,k]`` off the diagonal, column sums on it."""
    c = net.components
    y = -c.copy()
    np.fill_diagonal(y, c.sum(axis=0))
    return y


def p_matrix(net):
    y = admittance_matrix(net)
    p = y / net.y0 + np.eye(net.n_ports)
    return PartitionedP.from_full(p, net.n_in)


def components_from_p(p, y0):
    """Component values that make a network realize the given ``P``.

    ``Y[i,k] = -y0 P[i,k]`` for ``i != k`` and
    ``Y[k,k] = y0 * sum_p P[p,k] - y0``.
    """
    if not (np.isfinite(y0) and y0 > 0):
        raise ValueError(f"y0 must be positive and finite, got {y0}")
    full = p.full
    comps = -y0 * full
    np.fill_diagonal(comps, y0 * full.sum(axis=0) - y0)
    return MilacNetwork(p.n, p.m, y0, comps)


def _check_input(u, n):
    u = as_matrix(u, "u")
    if u.shape[0] != n:
        raise ShapeError(f"input has {u.shape[0]} rows, network has {n} driven ports")
    return u


def _warn_conditioning(p):
    cond = np.linalg.cond(p)
    if cond > COND_WARN:
        warnings.warn(f"P is ill-conditioned (cond = {cond:.2e})", IllConditionedWarning, stacklevel=3)


def simulate_nodal(net, u, check_conditioning=True):
    """Port voltages from the full nodal system ``P v = [u; 0]``.

    `u` may hold several input vectors as columns; the outputs then have the
    same number of columns.

    Returns
    -------
    v1 : (N, k) ndarray
        Voltages at the driven ports.
    v2 : (M, k) ndarray
        Voltages at the undriven ports.
    """
    u = _check_input(u, net.n_in)
    p = p_matrix(net).full
    if check_conditioning:
        _warn_conditioning(p)
    rhs = np.vstack([u, np.zeros((net.m_out, u.shape[1]), dtype=np.complex128)])
    v = solve_linear(p, rhs, label="P")
    return v[: net.n_in], v[net.n_in :]


def simulate_blockwise(p, u, variant=Variant.VIA_P11):
    """Port voltages from the block closed forms.

    ``VIA_P11`` needs ``P11`` and ``P21 P11^-1 P12 - P22`` invertible;
    ``VIA_P22`` needs ``P22`` and ``P12 P22^-1 P21 - P11`` invertible.
    """
    variant = Variant(variant)
    u = _check_input(u, p.n)
    if variant is Variant.VIA_P11:
        # P11^-1 [u, P12] in one factorization
        rhs = np.hstack([u, p.p12])
        sol = solve_linear(p.p11, rhs, label="P11")
        a_u, a_12 = sol[:, : u.shape[1]], sol[:, u.shape[1] :]
        schur = p.p21 @ a_12 - p.p22
        v2 = solve_linear(schur, p.p21 @ a_u, label="P21 P11^-1 P12 - P22")
        v1 = a_u - a_12 @ v2
    else:
        a_21 = solve_linear(p.p22, p.p21, label="P22")
        schur = p.p12 @ a_21 - p.p11
        v1 = -solve_linear(schur, u, label="P12 P22^-1 P21 - P11")
        v2 = -a_21 @ v1
    return v1, v2


def effective_matrix(net):
    """The ``M x N`` matrix the network applies: ``v2 = effective_matrix(net) @ u``."""
    eye = np.eye(net.n_in, dtype=np.complex128)
    return simulate_nodal(net, eye, check_conditioning=False)[1]


def replace_couplings(net, components):
    """New network with the port-to-port components of `components`.

    Port-to-ground components are re-solved so that every column sum, and
    hence the diagonal of ``P``, is the same as in `net`.
    """
    comps = as_matrix(components, "components").copy()
    if comps.shape != net.components.shape:
        raise ShapeError(f"expected {net.components.shape}, got {comps.shape}")
    off_sum = comps.sum(axis=0) - np.diag(comps)
    np.fill_diagonal(comps, net.components.sum(axis=0) - off_sum)
    return MilacNetwork(net.n_in, net.m_out, net.y0, comps)


def scale_output(net, c):
    """Network whose undriven-port voltages are `c` times those of `net`.

    Multiplies the undriven-to-driven couplings by `c` and the
    driven-to-undriven ones by ``1 / c``.
    """
    n = net.n_in
    comps = net.components.copy()
    comps[n:, :n] *= c
    comps[:n, n:] /= c
    return replace_couplings(net, comps)


# -- text serialization -----------------------------------------------------

_MAGIC = "MILAC v1"


def dumps_network(net):
    """Serialize to the ``MILAC v1`` text format.

    Header ``MILAC v1 N M y0`` followed by one ``i k re im`` line per
    component (1-based indices, row-major). Floats are written with
    :func:`repr` so they parse back to the same bits.
    """
    lines = [f"{_MAGIC} {net.n_in} {net.m_out} {net.y0!r}"]
    for i in range(net.n_ports):
        for k in range(net.n_ports):
            z = net.components[i, k]
            lines.append(f"{i + 1} {k + 1} {float(z.real)!r} {float(z.imag)!r}")
    return "\n".join(lines) + "\n"


def loads_network(text):
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or rows[0][:2] != _MAGIC.split() or len(rows[0]) != 5:
        raise ValueError("missing 'MILAC v1 N M y0' header")
    n, m, y0 = int(rows[0][2]), int(rows[0][3]), float(rows[0][4])
    p = n + m
    if len(rows) - 1 != p * p:
        raise ValueError(f"expected {p * p} component lines, found {len(rows) - 1}")
    comps = np.zeros((p, p), dtype=np.complex128)
    seen = np.zeros((p, p), dtype=bool)
    for fields in rows[1:]:
        if len(fields) != 4:
            raise ValueError(f"bad component line: {' '.join(fields)!r}")
        i, k = int(fields[0]) - 1, int(fields[1]) - 1
        if not (0 <= i < p and 0 <= k < p) or seen[i, k]:
            raise ValueError(f"bad or repeated index ({i + 1}, {k + 1})")
        seen[i, k] = True
        comps[i, k] = complex(float(fields[2]), float(fields[3]))
    return MilacNetwork(n, m, y0, comps)


def dump_network(net, path):
    with open(path, "w") as f:
        f.write(dumps_network(net))


def load_network(path):
    with open(path) as f:
        return loads_network(f.read())
