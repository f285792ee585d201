"""TSP instances: TSPLIB EUC_2D loading and symmetric integer distances."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .errors import ContractViolation, TSPLIBParseError

MATRIX_THRESHOLD = 1000

# Distance matrix of the 8-node worked example (labels 1..8).
FIG1_MATRIX = (
    (0, 12, 19, 31, 22, 17, 23, 12),
    (12, 0, 15, 37, 21, 28, 35, 22),
    (19, 15, 0, 50, 36, 35, 35, 21),
    (31, 37, 50, 0, 20, 21, 37, 38),
    (22, 21, 36, 20, 0, 25, 40, 33),
    (17, 28, 35, 21, 25, 0, 16, 18),
    (23, 35, 35, 37, 40, 16, 0, 14),
    (12, 22, 21, 38, 33, 18, 14, 0),
)


def nint(x: float) -> int:
    """TSPLIB nearest integer: halves round up."""
    return int(math.floor(x + 0.5))


def euc_2d(p, q) -> int:
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    return nint(math.sqrt(dx * dx + dy * dy))


@dataclass(frozen=True, eq=False)
class Instance:
    """One symmetric TSP problem.

    Exactly one of ``coords`` (EUC_2D points) or ``matrix`` (explicit integer
    distances) is the distance source. Instances are immutable and can be
    shared between concurrent GA runs.
    """

    name: str
    n: int
    coords: Optional[tuple] = None
    matrix: Optional[np.ndarray] = None
    known_optimum: Optional[int] = None
    matrix_threshold: int = MATRIX_THRESHOLD

    def __post_init__(self):
        if self.n < 3:
            raise ContractViolation(f"instance needs at least 3 nodes, got {self.n}")
        if (self.coords is None) == (self.matrix is None):
            raise ContractViolation("exactly one of coords/matrix must be given")
        if self.coords is not None:
            coords = tuple((float(x), float(y)) for x, y in self.coords)
            if len(coords) != self.n:
                raise ContractViolation(f"{len(coords)} coordinates for n={self.n}")
            object.__setattr__(self, "coords", coords)
        else:
            m = np.array(self.matrix, dtype=np.int64)
            if m.shape != (self.n, self.n):
                raise ContractViolation(f"matrix shape {m.shape} does not match n={self.n}")
            if (m < 0).any():
                raise ContractViolation("negative distance in matrix")
            if not np.array_equal(m, m.T):
                raise ContractViolation("distance matrix is not symmetric")
            if np.diag(m).any():
                raise ContractViolation("distance matrix has a non-zero diagonal")
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
        if self.known_optimum is not None and self.known_optimum <= 0:
            raise ContractViolation("known_optimum must be positive")

    @classmethod
    def from_matrix(cls, matrix, name="matrix", known_optimum=None) -> "Instance":
        m = np.asarray(matrix)
        return cls(name=name, n=len(m), matrix=m, known_optimum=known_optimum)

    @classmethod
    def from_coords(cls, coords, name="coords", known_optimum=None, **kw) -> "Instance":
        coords = list(coords)
        return cls(name=name, n=len(coords), coords=tuple(coords), known_optimum=known_optimum, **kw)

    @cached_property
    def dist_matrix(self) -> np.ndarray:
        """Full n x n int64 distance matrix (computed once, read-only)."""
        if self.matrix is not None:
            return self.matrix
        xy = np.asarray(self.coords, dtype=np.float64)
        diff = xy[:, None, :] - xy[None, :, :]
        m = np.floor(np.sqrt((diff ** 2).sum(axis=2)) + 0.5).astype(np.int64)
        m.setflags(write=False)
        return m

    @cached_property
    def _rows(self):
        return self.dist_matrix.tolist()

    def distance(self, i: int, j: int) -> int:
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise ContractViolation(f"node index out of range: ({i}, {j}) for n={self.n}")
        if self.matrix is not None or self.n <= self.matrix_threshold:
            return self._rows[i][j]
        return euc_2d(self.coords[i], self.coords[j])

    def distance_function(self) -> Callable[[int, int], int]:
        """Unchecked distance callable for hot loops."""
        if self.matrix is not None or self.n <= self.matrix_threshold:
            rows = self._rows
            return lambda i, j: rows[i][j]
        coords = self.coords
        return lambda i, j: euc_2d(coords[i], coords[j])


def fig1_fixture() -> Instance:
    """The 8-node worked example as a matrix instance (0-based nodes)."""
    return Instance.from_matrix(FIG1_MATRIX, name="fig1")


def _split_keyword(line: str):
    if ":" in line:
        key, value = line.split(":", 1)
        return key.strip().upper(), value.strip()
    parts = line.split(None, 1)
    return parts[0].upper(), (parts[1].strip() if len(parts) > 1 else "")


def parse_tsplib(text: str, known_optimum: Optional[int] = None) -> Instance:
    """Parse a TSPLIB95 EUC_2D problem.

    Node labels in the file are 1-based; they become indices 0..n-1.
    """
    name = None
    dimension = None
    weight_type = None
    coords: dict[int, tuple[float, float]] = {}
    in_coords = False
    coord_start = None

    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.upper() == "EOF":
            break
        if in_coords:
            head = line.split()[0]
            if not _looks_numeric(head):
                in_coords = False
            else:
                parts = line.split()
                if len(parts) != 3:
                    raise TSPLIBParseError(f"expected 'label x y', got {line!r}", lineno)
                try:
                    label = int(parts[0])
                    x, y = float(parts[1]), float(parts[2])
                except ValueError:
                    raise TSPLIBParseError(f"non-numeric coordinate entry {line!r}", lineno) from None
                if dimension is not None and not 1 <= label <= dimension:
                    raise TSPLIBParseError(f"node label {label} outside 1..{dimension}", lineno)
                if label in coords:
                    raise TSPLIBParseError(f"duplicate node label {label}", lineno)
                coords[label] = (x, y)
                continue

        key, value = _split_keyword(line)
        if key == "NODE_COORD_SECTION":
            if dimension is None:
                raise TSPLIBParseError("NODE_COORD_SECTION before DIMENSION", lineno)
            if weight_type is None:
                raise TSPLIBParseError("NODE_COORD_SECTION before EDGE_WEIGHT_TYPE", lineno)
            in_coords = True
            coord_start = lineno
        elif key == "NAME":
            name = value
        elif key == "TYPE":
            if value.upper() not in ("TSP", "STSP"):
                raise TSPLIBParseError(f"unsupported problem TYPE {value!r} (only symmetric TSP)", lineno)
        elif key == "DIMENSION":
            try:
                dimension = int(value)
            except ValueError:
                raise TSPLIBParseError(f"DIMENSION is not an integer: {value!r}", lineno) from None
            if dimension < 3:
                raise TSPLIBParseError(f"DIMENSION must be >= 3, got {dimension}", lineno)
        elif key == "EDGE_WEIGHT_TYPE":
            if value.upper() != "EUC_2D":
                raise TSPLIBParseError(f"unsupported EDGE_WEIGHT_TYPE {value!r} (only EUC_2D)", lineno)
            weight_type = "EUC_2D"
        elif key in ("COMMENT", "DISPLAY_DATA_TYPE", "NODE_COORD_TYPE"):
            continue
        elif key.endswith("_SECTION"):
            raise TSPLIBParseError(f"unsupported section {key}", lineno)
        else:
            raise TSPLIBParseError(f"unrecognized line {line!r}", lineno)

    if name is None:
        raise TSPLIBParseError("missing NAME")
    if dimension is None:
        raise TSPLIBParseError("missing DIMENSION")
    if weight_type is None:
        raise TSPLIBParseError("missing EDGE_WEIGHT_TYPE")
    if coord_start is None:
        raise TSPLIBParseError("missing NODE_COORD_SECTION")
    if len(coords) != dimension:
        missing = sorted(set(range(1, dimension + 1)) - coords.keys())
        shown = ", ".join(map(str, missing[:10])) + (" ..." if len(missing) > 10 else "")
        raise TSPLIBParseError(
            f"NODE_COORD_SECTION has {len(coords)} entries but DIMENSION is {dimension}; "
            f"missing labels: {shown}",
            coord_start,
        )
    ordered = [coords[label] for label in range(1, dimension + 1)]
    return Instance.from_coords(ordered, name=name, known_optimum=known_optimum)


def _looks_numeric(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_tsplib(path, known_optimum: Optional[int] = None) -> Instance:
    return parse_tsplib(Path(path).read_text(encoding="utf-8"), known_optimum=known_optimum)


def to_tsplib(inst: Instance) -> str:
    """Serialize a coordinate instance back to TSPLIB text."""
    if inst.coords is None:
        raise ContractViolation("only coordinate instances can be written as EUC_2D")
    out = [
        f"NAME: {inst.name}",
        "TYPE: TSP",
        f"DIMENSION: {inst.n}",
        "EDGE_WEIGHT_TYPE: EUC_2D",
        "NODE_COORD_SECTION",
    ]
    out += [f"{k + 1} {x!r} {y!r}" for k, (x, y) in enumerate(inst.coords)]
    out.append("EOF")
    return "\n".join(out) + "\n"


def random_instance(n: int, rng: np.random.Generator, scale: float = 1000.0, name=None) -> Instance:
    """Uniform random EUC_2D instance with integer coordinates."""
    pts = rng.integers(0, int(scale), size=(n, 2))
    return Instance.from_coords([tuple(map(float, p)) for p in pts], name=name or f"rand{n}")

