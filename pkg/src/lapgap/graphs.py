"""Erdos-Renyi samples and the matrix variants built from them."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from lapgap import rng as rngmod

INV_SQRT2 = 1.0 / math.sqrt(2.0)


class GraphFormatError(ValueError):
    """Malformed graph file; ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int, path: str | None = None):
        where = f"{path}:" if path else "line "
        super().__init__(f"{where}{lineno}: {message}")
        self.lineno = lineno
        self.path = path


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GraphSample:
    """One G(n, p) draw.

    The adjacency matrix is kept bit-packed row by row; ``adjacency`` unpacks
    it on demand.  ``seed`` is the seed of the stream the sample was drawn
    from and ``generation`` counts switching passes applied since.
    """

    n: int
    p: float
    packed: np.ndarray
    degrees: np.ndarray
    seed: int = 0
    generation: int = 0
    degenerate: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need n >= 2, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.p in (0.0, 1.0) and not self.degenerate:
            raise ValueError("p in {0, 1} is only allowed with degenerate=True")
        adj = np.unpackbits(self.packed, axis=1, count=self.n).astype(bool)
        if adj.shape != (self.n, self.n):
            raise ValueError("packed adjacency has the wrong shape")
        if adj.diagonal().any():
            raise ValueError("adjacency must have a zero diagonal")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        if not np.array_equal(self.degrees, adj.sum(axis=1)):
            raise ValueError("degrees disagree with adjacency row sums")
        object.__setattr__(self, "packed", _frozen(self.packed))
        object.__setattr__(self, "degrees", _frozen(np.asarray(self.degrees, dtype=np.int64)))

    @classmethod
    def from_adjacency(cls, adjacency, p: float, seed: int = 0, generation: int = 0,
                       degenerate: bool | None = None) -> "GraphSample":
        adj = np.asarray(adjacency, dtype=bool)
        if degenerate is None:
            degenerate = p in (0.0, 1.0)
        return cls(
            n=adj.shape[0],
            p=float(p),
            packed=np.packbits(adj, axis=1),
            degrees=adj.sum(axis=1).astype(np.int64),
            seed=int(seed),
            generation=int(generation),
            degenerate=bool(degenerate),
        )

    @property
    def adjacency(self) -> np.ndarray:
        return np.unpackbits(self.packed, axis=1, count=self.n).astype(bool)

    @property
    def edges(self) -> list[tuple[int, int]]:
        iu, ju = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(iu.tolist(), ju.tolist()))

    @property
    def edge_count(self) -> int:
        return int(self.degrees.sum() // 2)

    def __eq__(self, other):
        if not isinstance(other, GraphSample):
            return NotImplemented
        return (
            self.n == other.n
            and self.p == other.p
            and self.seed == other.seed
            and self.generation == other.generation
            and np.array_equal(self.packed, other.packed)
        )

    __hash__ = None


class Role(enum.Enum):
    LAPLACIAN = "Laplacian"
    CENTERED = "CenteredLaplacian"
    ROTATED_CENTERED = "RotatedCenteredLaplacian"
    EXPECTED = "ExpectedLaplacian"
    PRINCIPAL = "Principal"
    GENERAL = "General"


@dataclass(frozen=True, eq=False)
class MatrixInstance:
    """Dense symmetric matrix tagged with the role it plays."""

    data: np.ndarray
    role: Role = Role.GENERAL
    provenance: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError("matrix must be square")
        if not np.array_equal(data, data.T):
            raise ValueError("matrix must be exactly symmetric")
        n = data.shape[0]
        if self.role is Role.LAPLACIAN:
            off = data[~np.eye(n, dtype=bool)]
            diag = data.diagonal()
            if not np.all((off == 0.0) | (off == -1.0)):
                raise ValueError("Laplacian off-diagonal entries must be 0 or -1")
            if np.any(diag < 0) or np.any(diag != np.round(diag)):
                raise ValueError("Laplacian diagonal must be nonnegative integers")
            if np.any(data.sum(axis=1) != 0.0):
                raise ValueError("Laplacian rows must sum to zero")
        elif self.role is Role.CENTERED:
            scale = 1.0 + np.abs(data).max(initial=0.0)
            if np.any(np.abs(data.sum(axis=1)) > 8 * n * np.finfo(float).eps * scale):
                raise ValueError("centered Laplacian rows must sum to zero")
        object.__setattr__(self, "data", _frozen(data))
        object.__setattr__(self, "provenance", tuple(self.provenance))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    def principal(self, size: int | None = None) -> "MatrixInstance":
        """Leading principal submatrix (default size n - 1)."""
        size = self.n - 1 if size is None else size
        return MatrixInstance(self.data[:size, :size], Role.PRINCIPAL,
                              self.provenance + (f"principal[{size}]",))

    def export_csv(self, path) -> None:
        np.savetxt(path, self.data, delimiter=",", fmt="%.17g")


def _provenance(g: GraphSample, op: str) -> tuple[str, ...]:
    return (f"G(n={g.n},p={g.p!r},seed={g.seed},generation={g.generation})", op)


def sample_gnp(n: int, p: float, seed: int = 0, *, allow_degenerate: bool = False) -> GraphSample:
    """Draw G(n, p) from the Philox stream of ``seed``.

    Each of the n(n-1)/2 pairs is an edge independently with probability p.
    ``p`` in {0, 1} is accepted only with ``allow_degenerate``; the sample is
    then flagged degenerate.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    degenerate = p in (0.0, 1.0)
    if degenerate and not allow_degenerate:
        raise ValueError("p in {0, 1} requires allow_degenerate=True")
    gen = rngmod.stream(seed, rngmod.SAMPLE)
    iu, ju = np.triu_indices(n, 1)
    coin = gen.random(iu.size) < p
    adj = np.zeros((n, n), dtype=bool)
    adj[iu[coin], ju[coin]] = True
    adj |= adj.T
    return GraphSample.from_adjacency(adj, p, seed=seed, degenerate=degenerate)


def laplacian(g: GraphSample) -> MatrixInstance:
    """L = D - A, formed in integer arithmetic."""
    a = g.adjacency.astype(np.int64)
    lap = np.diag(a.sum(axis=1)) - a
    return MatrixInstance(lap.astype(np.float64), Role.LAPLACIAN, _provenance(g, "laplacian"))


def expected_laplacian(n: int, p: float) -> MatrixInstance:
    """E L = p n I - p J."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    data = np.full((n, n), -p)
    np.fill_diagonal(data, p * n - p)
    return MatrixInstance(data, Role.EXPECTED, (f"E L(n={n},p={p!r})",))


def centered_laplacian(g: GraphSample) -> MatrixInstance:
    lap = laplacian(g).data
    exp = expected_laplacian(g.n, g.p).data
    return MatrixInstance(lap - exp, Role.CENTERED, _provenance(g, "centered_laplacian"))


def rotation_matrix(n: int, inverse: bool = False) -> np.ndarray:
    """Block-diagonal ``diag(I_{n-2}, U2)`` with U2 = [[1, -1], [1, 1]] / sqrt 2."""
    u = np.eye(n)
    u[-2:, -2:] = [[INV_SQRT2, -INV_SQRT2], [INV_SQRT2, INV_SQRT2]]
    return u.T.copy() if inverse else u


def rotate_last_two(m: MatrixInstance, inverse: bool = False) -> MatrixInstance:
    """Conjugate ``m`` by ``diag(I, U2)``: returns U^T m U (or U m U^T).

    Column n-1 becomes (c_{n-1} + c_n)/sqrt 2 and column n becomes
    (c_n - c_{n-1})/sqrt 2, and likewise for rows.  The spectrum is unchanged.
    """
    if m.n < 3:
        raise ValueError("rotation needs n >= 3")
    x = np.array(m.data, copy=True)
    for axis in (1, 0):
        a = np.take(x, -2, axis=axis).copy()
        b = np.take(x, -1, axis=axis).copy()
        first, second = ((a - b), (a + b)) if inverse else ((a + b), (b - a))
        if axis == 1:
            x[:, -2], x[:, -1] = first * INV_SQRT2, second * INV_SQRT2
        else:
            x[-2, :], x[-1, :] = first * INV_SQRT2, second * INV_SQRT2
    x = (x + x.T) / 2.0
    if m.role is Role.CENTERED and not inverse:
        role = Role.ROTATED_CENTERED
    elif m.role is Role.ROTATED_CENTERED and inverse:
        role = Role.CENTERED
    else:
        role = Role.GENERAL
    op = "rotate_last_two^-1" if inverse else "rotate_last_two"
    return MatrixInstance(x, role, m.provenance + (op,))


def trivial_direction(n: int, rotated: bool = False) -> np.ndarray:
    """Unit null direction of L and L-bar (1/sqrt n), or its rotated image."""
    one = np.full(n, 1.0 / math.sqrt(n))
    if rotated:
        one = rotation_matrix(n).T @ one
    return one


def _default_pair(g: GraphSample, i, j) -> tuple[int, int]:
    i = g.n - 2 if i is None else int(i)
    j = g.n - 1 if j is None else int(j)
    if i == j:
        raise ValueError("switching needs two distinct vertices")
    for v in (i, j):
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range for n={g.n}")
    return i, j


def switchable_set(g: GraphSample, i: int | None = None, j: int | None = None) -> np.ndarray:
    """Vertices k not in {i, j} adjacent to exactly one of i, j (0-based)."""
    i, j = _default_pair(g, i, j)
    adj = g.adjacency
    mask = adj[:, i] ^ adj[:, j]
    mask[[i, j]] = False
    return np.flatnonzero(mask)


def switch_neighbors(g: GraphSample, i: int | None = None, j: int | None = None,
                     rng: np.random.Generator | None = None) -> GraphSample:
    """Re-deal single-neighbor edges of the pair (i, j) by fair coins.

    For every k adjacent to exactly one of i, j the edge goes to (k, i) or
    (k, j) with probability 1/2 each.  Everything else, including the edge
    (i, j), is untouched.  Vertices are 0-based and default to the last two.
    Without ``rng`` the coins come from the stream (seed, SWITCH, generation+1)
    so that passes are replayable.
    """
    i, j = _default_pair(g, i, j)
    if rng is None:
        rng = rngmod.stream(g.seed, rngmod.SWITCH, g.generation + 1)
    ks = switchable_set(g, i, j)
    adj = g.adjacency
    to_i = rng.random(ks.size) < 0.5
    adj[ks, i] = adj[i, ks] = to_i
    adj[ks, j] = adj[j, ks] = ~to_i
    return GraphSample.from_adjacency(adj, g.p, seed=g.seed, generation=g.generation + 1,
                                      degenerate=g.degenerate)


def store_graph(g: GraphSample, path) -> None:
    """Write ``n m p seed generation`` then one ``u v`` line per edge."""
    edges = g.edges
    lines = [f"{g.n} {len(edges)} {g.p!r} {g.seed} {g.generation}"]
    lines += [f"{u} {v}" for u, v in edges]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_graph(path) -> GraphSample:
    path = str(path)
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise GraphFormatError("empty file", 1, path)
    head = lines[0].split()
    if len(head) != 5:
        raise GraphFormatError("header must be 'n m p seed generation'", 1, path)
    try:
        n, m = int(head[0]), int(head[1])
        p = float(head[2])
        seed, generation = int(head[3]), int(head[4])
    except ValueError as exc:
        raise GraphFormatError(f"bad header field ({exc})", 1, path) from None
    if n < 2 or m < 0 or not 0.0 <= p <= 1.0 or seed < 0 or generation < 0:
        raise GraphFormatError("header values out of range", 1, path)
    body = [(k + 2, ln) for k, ln in enumerate(lines[1:]) if ln.strip()]
    if len(body) != m:
        lineno = body[m][0] if len(body) > m else len(lines) + 1
        raise GraphFormatError(f"expected {m} edge lines, found {len(body)}", lineno, path)
    adj = np.zeros((n, n), dtype=bool)
    for lineno, ln in body:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError("edge line must be 'u v'", lineno, path)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"non-integer endpoint in {ln!r}", lineno, path) from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"endpoint out of range for n={n}: {ln!r}", lineno, path)
        if u == v:
            raise GraphFormatError(f"self-loop {ln!r}", lineno, path)
        if adj[u, v]:
            raise GraphFormatError(f"duplicate edge {ln!r}", lineno, path)
        adj[u, v] = adj[v, u] = True
    return GraphSample.from_adjacency(adj, p, seed=seed, generation=generation)

