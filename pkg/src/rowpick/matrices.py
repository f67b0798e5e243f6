"""Test-matrix generators and the GEO series-matrix reader used by the
benchmark harness.
"""

import gzip
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import (
    DimensionMismatchError,
    InvalidParamError,
    ParseError,
    RaggedTableError,
)

GEO_EXPECTED_SHAPE = (107, 22283)  # samples x probes of the reference dataset


def gen_decay_dense(m, n, rng):
    """Dense Gaussian matrix with row ``i`` (1-based) scaled by ``i**-2``.

    Seeded-deterministic: the Gaussian block is drawn row-major in one call.
    """
    m, n = int(m), int(n)
    if m < 1 or n < 1:
        raise InvalidParamError("m and n must be >= 1")
    scale = np.arange(1, m + 1, dtype=np.float64) ** -2.0
    return scale[:, None] * rng.standard_normal((m, n))


def gen_decay_sparse(m, n, nnz_per_col, rng):
    """Sparse analogue of :func:`gen_decay_dense` in canonical CSC form.

    Each column holds ``nnz_per_col`` Gaussian values at distinct uniform
    row positions, then row ``i`` (1-based) is scaled by ``i**-2``. Columns
    are drawn in order (positions, then values).
    """
    m, n, nnz_per_col = int(m), int(n), int(nnz_per_col)
    if m < 1 or n < 1:
        raise InvalidParamError("m and n must be >= 1")
    if not 1 <= nnz_per_col <= m:
        raise InvalidParamError(f"need 1 <= nnz_per_col <= {m}")
    indptr = np.arange(0, n * nnz_per_col + 1, nnz_per_col)
    indices = np.empty(n * nnz_per_col, dtype=np.int64)
    data = np.empty(n * nnz_per_col)
    for j in range(n):
        lo = j * nnz_per_col
        pos = np.sort(rng.choice(m, size=nnz_per_col, replace=False))
        vals = rng.standard_normal(nnz_per_col)
        indices[lo: lo + nnz_per_col] = pos
        data[lo: lo + nnz_per_col] = vals * (pos + 1.0) ** -2.0
    return sp.csc_array((data, indices, indptr), shape=(m, n))


def gen_kernel(grid_side):
    """Inverse-distance kernel between two disjoint planar grids.

    Source points are the ``g x g`` equispaced grid on ``[0,1)^2`` (spacing
    ``1/g``, origin 0, row-major over (row, col) coordinates); targets are
    the same grid shifted to ``[1,2) x [0,1)``. Entry ``(i, j)`` is the
    reciprocal distance between source ``i`` and target ``j``; the grids
    never meet, so all entries are finite and positive. Deterministic.
    """
    g = int(grid_side)
    if g < 1:
        raise InvalidParamError("grid side must be >= 1")
    t = np.arange(g, dtype=np.float64) / g
    xx, yy = np.meshgrid(t, t, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    src = pts
    dst = pts + np.array([1.0, 0.0])
    d2 = (
        (src[:, None, 0] - dst[None, :, 0]) ** 2
        + (src[:, None, 1] - dst[None, :, 1]) ** 2
    )
    return 1.0 / np.sqrt(d2)


def _open_text(path):
    if str(path).endswith(".gz"):
        return gzip.open(path, "rt", encoding="utf-8", errors="replace")
    return open(path, "r", encoding="utf-8", errors="replace")


def _strip_quotes(cell):
    cell = cell.strip()
    if len(cell) >= 2 and cell[0] == '"' and cell[-1] == '"':
        return cell[1:-1]
    return cell


def load_geo_series_matrix(path):
    """Read a GEO series-matrix file into a samples x probes dense matrix.

    The format: lines starting with ``!`` are metadata; the tab-separated
    numeric table sits between the ``table_begin`` and ``table_end`` marker
    lines; its first row is the sample identifiers and its first column the
    probe identifiers. The returned matrix is the table transposed (rows =
    samples). Gzip-compressed files are accepted.

    A shape other than 107 x 22283 (the reference dataset) produces a
    warning, not an error.

    Raises
    ------
    FileNotFoundError
    ParseError
        Missing markers, no data, or an unparseable value (reported with
        its 1-based line number).
    RaggedTableError
        A data row whose field count differs from the header's.
    """
    header = None
    rows = []
    in_table = False
    ended = False
    with _open_text(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not in_table:
                if line.startswith("!") and "table_begin" in line.lower():
                    in_table = True
                continue
            if line.startswith("!"):
                if "table_end" in line.lower():
                    ended = True
                    break
                continue  # stray metadata inside the table is skipped
            if not line.strip():
                continue
            cells = line.split("\t")
            if header is None:
                header = [_strip_quotes(c) for c in cells]
                if len(header) < 2:
                    raise ParseError("table header has no sample columns", lineno)
                continue
            if len(cells) != len(header):
                raise RaggedTableError(
                    f"row has {len(cells)} fields, header has {len(header)}",
                    lineno,
                )
            values = np.empty(len(cells) - 1)
            for j, cell in enumerate(cells[1:]):
                try:
                    values[j] = float(_strip_quotes(cell))
                except ValueError:
                    raise ParseError(
                        f"unparseable value {cell!r} in column {j + 2}", lineno
                    ) from None
            rows.append(values)
    if not in_table:
        raise ParseError("no table_begin marker found")
    if not ended:
        raise ParseError("no table_end marker found")
    if header is None or not rows:
        raise ParseError("table contains no data rows")
    table = np.vstack(rows)  # probes x samples
    out = np.ascontiguousarray(table.T)
    if out.shape != GEO_EXPECTED_SHAPE:
        warnings.warn(
            f"series matrix is {out.shape[0]} samples x {out.shape[1]} probes; "
            f"the reference dataset is {GEO_EXPECTED_SHAPE[0]} x {GEO_EXPECTED_SHAPE[1]}",
            stacklevel=2,
        )
    return out


# descriptor defaults: (desk scale, full scale)
_DENSE_SIZES = ((2000, 2000), (10000, 10000))
_SPARSE_SIZES = ((100000, 2000, 30), (1000000, 10000, 30))
_KERNEL_SIDES = (40, 100)

KINDS = ("dense-decay", "sparse-decay", "kernel", "geo-file", "file")


@dataclass(frozen=True)
class MatrixSpec:
    """Descriptor for a benchmark matrix; parse/describe round-trips.

    Generator kinds (``dense-decay``, ``sparse-decay``, ``kernel``) build
    deterministically from their parameters and ``seed``; file kinds load
    from ``path``.
    """

    kind: str
    m: int = None
    n: int = None
    nnz_per_col: int = None
    grid_side: int = None
    path: str = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParamError(f"unknown matrix kind {self.kind!r}")
        for name in ("m", "n", "nnz_per_col", "grid_side"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise InvalidParamError(f"{name} must be positive")
        if self.kind in ("geo-file", "file") and not self.path:
            raise InvalidParamError(f"kind {self.kind!r} requires a path")

    @classmethod
    def parse(cls, text, full_scale=False):
        """Parse ``kind[:key=value,...]`` descriptors, e.g.
        ``kernel:g=40``, ``dense-decay:m=500,n=300,seed=7``,
        ``geo-file:path=GSE10072_series_matrix.txt``. Missing sizes fall
        back to desk-scale defaults (paper-scale with ``full_scale``).
        """
        kind, _, rest = text.partition(":")
        kind = kind.strip()
        kv = {}
        if rest:
            for part in rest.split(","):
                key, eq, value = part.partition("=")
                if not eq:
                    raise InvalidParamError(
                        f"bad descriptor field {part!r}; expected key=value"
                    )
                kv[key.strip()] = value.strip()
        scale = 1 if full_scale else 0
        if kind == "dense-decay":
            dm, dn = _DENSE_SIZES[scale]
            return cls(kind, m=int(kv.pop("m", dm)), n=int(kv.pop("n", dn)),
                       seed=int(kv.pop("seed", 0)), **_reject_extra(kv))
        if kind == "sparse-decay":
            dm, dn, dnnz = _SPARSE_SIZES[scale]
            return cls(kind, m=int(kv.pop("m", dm)), n=int(kv.pop("n", dn)),
                       nnz_per_col=int(kv.pop("nnz", dnnz)),
                       seed=int(kv.pop("seed", 0)), **_reject_extra(kv))
        if kind == "kernel":
            return cls(kind, grid_side=int(kv.pop("g", _KERNEL_SIDES[scale])),
                       **_reject_extra(kv))
        if kind in ("geo-file", "file"):
            path = kv.pop("path", None)
            if path is None:
                raise InvalidParamError(f"{kind} descriptor needs path=...")
            return cls(kind, path=path, **_reject_extra(kv))
        raise InvalidParamError(f"unknown matrix kind {kind!r}")

    def describe(self):
        if self.kind == "dense-decay":
            return f"dense-decay:m={self.m},n={self.n},seed={self.seed}"
        if self.kind == "sparse-decay":
            return (f"sparse-decay:m={self.m},n={self.n},"
                    f"nnz={self.nnz_per_col},seed={self.seed}")
        if self.kind == "kernel":
            return f"kernel:g={self.grid_side}"
        return f"{self.kind}:path={self.path}"

    def build(self):
        """Materialize the matrix (dense ndarray or CSC)."""
        if self.kind == "dense-decay":
            return gen_decay_dense(self.m, self.n, np.random.default_rng(self.seed))
        if self.kind == "sparse-decay":
            return gen_decay_sparse(
                self.m, self.n, self.nnz_per_col, np.random.default_rng(self.seed)
            )
        if self.kind == "kernel":
            return gen_kernel(self.grid_side)
        if self.kind == "geo-file":
            return load_geo_series_matrix(self.path)
        loaded = np.load(self.path)
        arr = np.asarray(loaded, dtype=np.float64)
        if arr.ndim != 2:
            raise DimensionMismatchError(f"{self.path} does not hold a 2-D array")
        return arr


def _reject_extra(kv):
    if kv:
        raise InvalidParamError(f"unknown descriptor fields: {sorted(kv)}")
    return {}
