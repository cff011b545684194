"""Square-lattice geometry, contour shells and anti-continuum seeds.

Nodes (n, m) run over [-N, N]^2. Field arrays are stored with shape
(2N+1, 2N+1) indexed as ``arr[m + N, n + N]`` so that C-order flattening is
row-major with n fastest. Sites outside the grid are treated as zero
(Dirichlet ghost ring), which keeps the hopping operator symmetric.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateLineError, ExistenceDomainError, ShapeMismatchError, SizingError

Node = Tuple[int, int]

# S0 in its fixed enumeration j = 1..4 (stored 0-based)
S0_NODES: Tuple[Node, ...] = ((-1, 0), (0, -1), (1, 0), (0, 1))
NEIGHBOR_OFFSETS: Tuple[Node, ...] = ((1, 0), (-1, 0), (0, 1), (0, -1))

DEFAULT_HALF_WIDTH = 10
COUPLINGS = ("hop", "laplacian")


@dataclass(frozen=True)
class GridShape:
    half_width: int = DEFAULT_HALF_WIDTH
    boundary: str = "dirichlet"

    def __post_init__(self):
        if self.half_width < 3:
            raise SizingError(f"half_width must be >= 3, got {self.half_width}")
        if self.boundary != "dirichlet":
            raise SizingError(f"unsupported boundary {self.boundary!r}")

    @property
    def side(self) -> int:
        return 2 * self.half_width + 1

    @property
    def n_nodes(self) -> int:
        return self.side ** 2

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.side, self.side)

    def contains(self, node: Node) -> bool:
        n, m = node
        return abs(n) <= self.half_width and abs(m) <= self.half_width

    def index(self, node: Node) -> int:
        """Flat index of (n, m); n runs fastest."""
        n, m = node
        if not self.contains(node):
            raise IndexError(f"node {node} outside grid of half-width {self.half_width}")
        return (m + self.half_width) * self.side + (n + self.half_width)

    def node(self, index: int) -> Node:
        m, n = divmod(index, self.side)
        return (n - self.half_width, m - self.half_width)

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = True
        return mask


def hop(arr: np.ndarray) -> np.ndarray:
    """Sum of the four nearest neighbours with zero ghost sites."""
    out = np.zeros_like(arr)
    out[:, :-1] += arr[:, 1:]
    out[:, 1:] += arr[:, :-1]
    out[:-1, :] += arr[1:, :]
    out[1:, :] += arr[:-1, :]
    return out


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class LatticeField:
    """One or two complex components on a GridShape."""

    components: Tuple[np.ndarray, ...]
    grid: GridShape

    def __post_init__(self):
        comps = tuple(_freeze(c) for c in self.components)
        if len(comps) not in (1, 2):
            raise ShapeMismatchError(f"expected 1 or 2 components, got {len(comps)}")
        for c in comps:
            if c.shape != self.grid.shape:
                raise ShapeMismatchError(f"component shape {c.shape} != grid {self.grid.shape}")
        object.__setattr__(self, "components", comps)

    @property
    def n_components(self) -> int:
        return len(self.components)

    def flat(self) -> np.ndarray:
        return np.concatenate([c.ravel() for c in self.components])

    @classmethod
    def from_flat(cls, vec: np.ndarray, grid: GridShape, n_components: int) -> "LatticeField":
        vec = np.asarray(vec, dtype=complex)
        if vec.size != n_components * grid.n_nodes:
            raise ShapeMismatchError("flat vector length does not match grid")
        parts = vec.reshape(n_components, *grid.shape)
        return cls(tuple(parts), grid)

    @classmethod
    def zeros(cls, grid: GridShape, n_components: int = 1) -> "LatticeField":
        return cls(tuple(np.zeros(grid.shape, complex) for _ in range(n_components)), grid)

    def at(self, node: Node, component: int = 0) -> complex:
        n, m = node
        N = self.grid.half_width
        return complex(self.components[component][m + N, n + N])

    def boundary_power(self) -> float:
        mask = self.grid.boundary_mask()
        return float(sum(np.sum(np.abs(c[mask]) ** 2) for c in self.components))

    def power(self) -> float:
        return float(sum(np.sum(np.abs(c) ** 2) for c in self.components))

    def __add__(self, other: "LatticeField") -> "LatticeField":
        if other.grid != self.grid or other.n_components != self.n_components:
            raise ShapeMismatchError("fields on different grids")
        return LatticeField(tuple(a + b for a, b in zip(self.components, other.components)), self.grid)

    def scaled(self, factors: Sequence[complex]) -> "LatticeField":
        return LatticeField(tuple(f * c for f, c in zip(factors, self.components)), self.grid)


@dataclass(frozen=True)
class VortexSpec:
    """Problem parameters for one vortex-cross computation.

    ``charge_pair`` is (1, 1) for the double-charge state and (1, -1) for the
    hidden-charge state; it is ignored for the scalar model.

    ``coupling`` selects the inter-site term: "hop" couples through the bare
    neighbour sum eps * (sum of 4 neighbours); "laplacian" uses the discrete
    Laplacian eps * (sum of 4 neighbours - 4 u), which only adds the onsite
    shift 4 eps to both frequencies.
    """

    model: str = "scalar"
    charge_pair: Optional[Tuple[int, int]] = None
    beta: float = 0.0
    omega: float = 1.0
    delta: Optional[float] = None
    epsilon: float = 0.0
    grid: GridShape = field(default_factory=GridShape)
    coupling: str = "hop"

    def __post_init__(self):
        if self.coupling not in COUPLINGS:
            raise ValueError(f"coupling must be one of {COUPLINGS}, got {self.coupling!r}")
        if self.model not in ("scalar", "vector"):
            raise ValueError(f"model must be 'scalar' or 'vector', got {self.model!r}")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.model == "scalar":
            object.__setattr__(self, "charge_pair", None)
            return
        cp = tuple(self.charge_pair) if self.charge_pair is not None else (1, 1)
        if cp not in ((1, 1), (1, -1)):
            raise ValueError(f"charge_pair must be (1, 1) or (1, -1), got {cp}")
        object.__setattr__(self, "charge_pair", cp)
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.beta == 1.0:
            if self.omega != 1.0:
                raise DegenerateLineError("beta = 1 requires omega = 1")
            if self.delta is None:
                raise DegenerateLineError("beta = 1 requires the polarization angle delta")
        else:
            lo, hi = _existence_interval(self.beta)
            if not lo <= self.omega <= hi:
                raise ExistenceDomainError(
                    f"omega={self.omega} outside [{lo}, {hi}] for beta={self.beta}")

    @property
    def n_components(self) -> int:
        return 1 if self.model == "scalar" else 2

    @property
    def winding(self) -> int:
        """Charge of the second component (+1 or -1)."""
        return 1 if self.charge_pair is None else self.charge_pair[1]

    @property
    def is_manakov(self) -> bool:
        return self.model == "vector" and self.beta == 1.0

    @property
    def onsite_shift(self) -> float:
        return 4.0 * self.epsilon if self.coupling == "laplacian" else 0.0

    def with_epsilon(self, epsilon: float) -> "VortexSpec":
        return replace(self, epsilon=float(epsilon))

    def with_grid(self, grid: GridShape) -> "VortexSpec":
        return replace(self, grid=grid)


def _existence_interval(beta: float) -> Tuple[float, float]:
    if beta == 0:
        return 0.0, np.inf
    return min(beta, 1.0 / beta), max(beta, 1.0 / beta)


@dataclass(frozen=True)
class ContourSet:
    """Shells S0..S3 around the vortex cross.

    ``s1`` and ``s2`` map each node to its contour weights ``{j: c}`` meaning
    that the leading correction there is sum_j c * exp(i theta_j) (j 0-based).
    ``s1_modified`` holds the weights feeding the third-order correction on S1
    from the second-order values on S2.
    """

    s0: Tuple[Node, ...]
    s1: Dict[Node, Dict[int, int]]
    s2: Dict[Node, Dict[int, int]]
    s3: Tuple[Node, ...]
    s1_modified: Dict[Node, Dict[int, int]]

    def shell(self, k: int) -> List[Node]:
        return [list(self.s0), list(self.s1), list(self.s2), list(self.s3)][k]


def _neighbors(node: Node) -> List[Node]:
    n, m = node
    return [(n + dn, m + dm) for dn, dm in NEIGHBOR_OFFSETS]


def _l1(node: Node) -> int:
    return abs(node[0]) + abs(node[1])


def _accumulate(targets, sources: Dict[Node, Dict[int, int]]) -> Dict[Node, Dict[int, int]]:
    out = {}
    for node in targets:
        w: Dict[int, int] = {}
        for nb in _neighbors(node):
            for j, c in sources.get(nb, {}).items():
                w[j] = w.get(j, 0) + c
        out[node] = dict(sorted(w.items()))
    return out


def build_contours(grid: GridShape) -> ContourSet:
    """Enumerate the contour shells and their weights by walking the lattice."""
    if grid.half_width < 3:
        raise SizingError("grid half-width must be at least 3")
    s0 = S0_NODES
    base = {node: {j: 1} for j, node in enumerate(s0)}
    # S1: all nodes adjacent to S0 (the centre plus the L1-distance-2 ring)
    s1_nodes = sorted({nb for node in s0 for nb in _neighbors(node)} - set(s0),
                      key=lambda p: (_l1(p), _angle_key(p)))
    s1 = _accumulate(s1_nodes, base)
    outer1 = {p: w for p, w in s1.items() if p != (0, 0)}
    s2_nodes = sorted({nb for p in outer1 for nb in _neighbors(p) if _l1(nb) == 3},
                      key=_angle_key)
    s2 = _accumulate(s2_nodes, outer1)
    s3 = tuple(sorted({nb for p in s2_nodes for nb in _neighbors(p)
                       if _l1(nb) == 4 and grid.contains(nb)}, key=_angle_key))
    s1_modified = {p: w for p, w in _accumulate(s1_nodes, s2).items() if w}
    return ContourSet(s0=s0, s1=s1, s2=s2, s3=s3, s1_modified=s1_modified)


def _angle_key(p: Node) -> float:
    # counter-clockwise from (-1, 0) through (0, -1): matches the S0 ordering
    return float(np.mod(np.arctan2(-p[1], -p[0]) , 2 * np.pi)) if p != (0, 0) else -1.0


def contour_sum(weights: Dict[int, int], phases: Sequence[float]) -> complex:
    return complex(sum(c * np.exp(1j * phases[j]) for j, c in weights.items()))


def cross_phases(sign: int = 1) -> np.ndarray:
    """Phases pi (j-1)/2 of the vortex cross, winding with the given sign."""
    return sign * np.pi * np.arange(4) / 2.0


def anti_continuum_seed(spec: VortexSpec, amplitudes=None) -> LatticeField:
    """Limiting epsilon = 0 state supported on S0.

    ``amplitudes`` is an (a, b) pair (or AmplitudePair); the scalar model always
    uses unit amplitude.
    """
    grid = spec.grid
    N = grid.half_width
    if spec.model == "scalar":
        amps = (1.0,)
        signs = (1,)
    else:
        if amplitudes is None:
            raise ValueError("vector seed needs the (a, b) amplitudes")
        a, b = (amplitudes.a, amplitudes.b) if hasattr(amplitudes, "a") else amplitudes
        amps = (a, b)
        signs = (1, spec.winding)
    comps = []
    for amp, sign in zip(amps, signs):
        arr = np.zeros(grid.shape, complex)
        for (n, m), th in zip(S0_NODES, cross_phases(sign)):
            arr[m + N, n + N] = amp * np.exp(1j * th)
        comps.append(arr)
    return LatticeField(tuple(comps), grid)
