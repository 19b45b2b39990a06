"""Exact elimination over Z and Z/p^s, cohomology with generators, induced maps.

The local elimination works on sparse columns.  At each step it takes a pivot of minimal
p-valuation (lowest row, then lowest column), clears the pivot row by column operations and
drops the pivot row and column.  Column operations are logged so that kernel coordinates
can be mapped back and forth; row operations are logged only when the caller needs the
left transformation (the second stage of the cohomology computation).
"""

import heapq
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Optional, Tuple

from sympy import multiplicity

from .errors import ChainMapError, InputError

logger = logging.getLogger(__name__)


@lru_cache(maxsize=65536)
def valuation(x, p, s):
    """v_p(x) for 0 <= x < p^s, with v_p(0) = s."""
    if x == 0:
        return s
    return min(multiplicity(p, x), s)


@dataclass(frozen=True, eq=True)
class SparseMatrix:
    rows: int
    cols: int
    data: Dict[Tuple[int, int], int] = field(default_factory=dict)
    modulus: Optional[int] = None

    def __post_init__(self):
        clean = {}
        for (i, j), v in self.data.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise InputError("entry ({}, {}) outside a {}x{} matrix".format(
                    i, j, self.rows, self.cols))
            if self.modulus is not None:
                v %= self.modulus
            if v:
                clean[(i, j)] = v
        object.__setattr__(self, "data", clean)

    @classmethod
    def zero(cls, rows, cols, modulus=None):
        return cls(rows, cols, {}, modulus)

    @classmethod
    def identity(cls, n, modulus=None):
        return cls(n, n, {(i, i): 1 for i in range(n)}, modulus)

    @classmethod
    def from_dense(cls, rows, modulus=None):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        data = {(i, j): v for i, row in enumerate(rows) for j, v in enumerate(row) if v}
        return cls(len(rows), ncols, data, modulus)

    @property
    def shape(self):
        return self.rows, self.cols

    @property
    def nnz(self):
        return len(self.data)

    def get(self, i, j):
        return self.data.get((i, j), 0)

    def to_dense(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.data.items():
            out[i][j] = v
        return out

    def columns(self):
        cols = defaultdict(dict)
        for (i, j), v in self.data.items():
            cols[j][i] = v
        return cols

    def reduce(self, modulus):
        return SparseMatrix(self.rows, self.cols, self.data, modulus)

    def transpose(self):
        return SparseMatrix(self.cols, self.rows,
                            {(j, i): v for (i, j), v in self.data.items()}, self.modulus)

    def apply(self, vector):
        """Matrix times a vector given as a dict or a dense sequence; returns a dict."""
        if not isinstance(vector, dict):
            vector = {j: v for j, v in enumerate(vector) if v}
        out = defaultdict(int)
        for (i, j), v in self.data.items():
            x = vector.get(j)
            if x:
                out[i] += v * x
        if self.modulus is not None:
            return {i: v % self.modulus for i, v in out.items() if v % self.modulus}
        return {i: v for i, v in out.items() if v}

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise InputError("cannot compose {}x{} with {}x{}".format(
                self.rows, self.cols, other.rows, other.cols))
        left = defaultdict(list)
        for (i, k), v in self.data.items():
            left[k].append((i, v))
        out = defaultdict(int)
        for (k, j), w in other.data.items():
            for i, v in left.get(k, ()):
                out[(i, j)] += v * w
        modulus = self.modulus if self.modulus is not None else other.modulus
        return SparseMatrix(self.rows, other.cols, dict(out), modulus)

    def __sub__(self, other):
        data = dict(self.data)
        for key, v in other.data.items():
            data[key] = data.get(key, 0) - v
        return SparseMatrix(self.rows, self.cols, data, self.modulus)

    def is_zero(self):
        return not self.data


def dump_triplets(matrix):
    """Sparse triplet text: a header line, then ``row col value`` per nonzero entry."""
    lines = ["% {} {} {}".format(matrix.rows, matrix.cols,
                                 matrix.modulus if matrix.modulus is not None else 0)]
    for (i, j) in sorted(matrix.data):
        lines.append("{} {} {}".format(i, j, matrix.data[(i, j)]))
    return "\n".join(lines) + "\n"


def load_triplets(text):
    header = None
    data = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("%"):
            if header is not None:
                raise InputError("line {}: second triplet header".format(lineno))
            parts = line[1:].split()
            if len(parts) != 3:
                raise InputError("line {}: header needs rows, cols and modulus".format(lineno))
            header = tuple(int(x) for x in parts)
            continue
        parts = line.split()
        if header is None or len(parts) != 3:
            raise InputError("line {}: expected 'row col value'".format(lineno))
        i, j, v = (int(x) for x in parts)
        data[(i, j)] = v
    if header is None:
        raise InputError("triplet text has no header")
    rows, cols, modulus = header
    return SparseMatrix(rows, cols, data, modulus or None)


@dataclass(frozen=True)
class Elimination:
    """Result of local_smith: pivots (row, col, valuation) in elimination order and logs.

    ``column_log`` entries (j, k, c) mean V <- V (I + c e_j e_k^T); ``row_log`` entries
    (i, l, f) mean row_l <- row_l - f row_i.  ``carry`` is V^-1 applied to the carried
    matrix, as rows {row: {col: value}}.
    """

    shape: Tuple[int, int]
    p: int
    s: int
    pivots: Tuple[Tuple[int, int, int], ...]
    column_log: Tuple[Tuple[int, int, int], ...] = ()
    row_log: Tuple[Tuple[int, int, int], ...] = ()
    carry: Optional[Dict[int, Dict[int, int]]] = None

    @property
    def rank(self):
        return len(self.pivots)

    def column_valuations(self):
        return {j: v for (_, j, v) in self.pivots}

    def row_valuations(self):
        return {i: v for (i, _, v) in self.pivots}

    def diagonal(self):
        """Sorted pivot valuations, a Smith form over Z/p^s."""
        return tuple(sorted(v for (_, _, v) in self.pivots))


def local_smith(matrix, p, s, carry=None, log_rows=False, log_columns=False):
    """Smith form of ``matrix`` over Z/p^s by minimal-valuation pivoting.

    ``carry`` is an optional matrix with as many rows as ``matrix`` has columns; it is
    transformed by the inverse of the accumulated column operations.
    """
    q = p ** s
    cols: Dict[int, Dict[int, int]] = {}
    rows = defaultdict(set)
    for (i, j), v in matrix.data.items():
        v %= q
        if v:
            cols.setdefault(j, {})[i] = v
            rows[i].add(j)
    kept = None
    if carry is not None:
        if carry.rows != matrix.cols:
            raise InputError("carried matrix has {} rows, expected {}".format(
                carry.rows, matrix.cols))
        kept = {}
        for (i, j), v in carry.data.items():
            v %= q
            if v:
                kept.setdefault(i, {})[j] = v
    pivots = []
    column_log = []
    row_log = []

    def has_valuation(i, v):
        return any(valuation(cols[j][i], p, s) == v for j in rows.get(i, ()))

    for v in range(s):
        pv = p ** v
        heap = [i for i in rows if rows[i] and has_valuation(i, v)]
        heapq.heapify(heap)
        queued = set(heap)
        while heap:
            i = heapq.heappop(heap)
            queued.discard(i)
            candidates = [j for j in rows.get(i, ()) if valuation(cols[j][i], p, s) == v]
            if not candidates:
                continue
            j = min(candidates)
            col_j = cols[j]
            inverse = pow(col_j[i] // pv, -1, q)
            touched = set()
            for k in sorted(rows[i] - {j}):
                col_k = cols[k]
                factor = (col_k[i] // pv) * inverse % q
                for l, a in col_j.items():
                    new = (col_k.get(l, 0) - factor * a) % q
                    if new:
                        col_k[l] = new
                        rows[l].add(k)
                    elif l in col_k:
                        del col_k[l]
                        rows[l].discard(k)
                    touched.add(l)
                if not col_k:
                    del cols[k]
                if log_columns:
                    column_log.append((j, k, (-factor) % q))
                if kept is not None and k in kept:
                    target = kept.setdefault(j, {})
                    for m, x in kept[k].items():
                        y = (target.get(m, 0) + factor * x) % q
                        if y:
                            target[m] = y
                        else:
                            target.pop(m, None)
                    if not target:
                        del kept[j]
            for l, a in col_j.items():
                if l == i:
                    continue
                if log_rows:
                    row_log.append((i, l, (a // pv) * inverse % q))
                rows[l].discard(j)
            del cols[j]
            del rows[i]
            pivots.append((i, j, v))
            touched.discard(i)
            for l in touched:
                if l not in queued and rows.get(l) and has_valuation(l, v):
                    heapq.heappush(heap, l)
                    queued.add(l)
    logger.debug("local_smith %dx%d over Z/%d^%d: %d pivots, %d column ops",
                 matrix.rows, matrix.cols, p, s, len(pivots), len(column_log))
    return Elimination(shape=(matrix.rows, matrix.cols), p=p, s=s, pivots=tuple(pivots),
                       column_log=tuple(column_log), row_log=tuple(row_log), carry=kept)


class CochainComplex:
    """Finite cochain complex of free Z/p^s-modules with integral coboundary matrices."""

    def __init__(self, p, s, dims, differentials):
        self.p = p
        self.s = s
        self.dims = tuple(dims)
        self._integral = tuple(differentials)
        if len(self._integral) != max(len(self.dims) - 1, 0):
            raise InputError("need one coboundary per consecutive pair of degrees")
        for n, d in enumerate(self._integral):
            if d.shape != (self.dims[n + 1], self.dims[n]):
                raise InputError("coboundary {} has shape {}, expected {}".format(
                    n, d.shape, (self.dims[n + 1], self.dims[n])))
        self._reduced = {}

    @property
    def modulus(self):
        return self.p ** self.s

    @property
    def top_degree(self):
        return len(self.dims) - 1

    def dimension(self, n):
        return self.dims[n] if 0 <= n < len(self.dims) else 0

    def integral_differential(self, n):
        if 0 <= n < len(self._integral):
            return self._integral[n]
        return SparseMatrix.zero(self.dimension(n + 1), self.dimension(n))

    def differential(self, n):
        cached = self._reduced.get(n)
        if cached is None:
            cached = self.integral_differential(n).reduce(self.modulus)
            self._reduced[n] = cached
        return cached

    def is_complex(self):
        return all((self.differential(n + 1) @ self.differential(n)).is_zero()
                   for n in range(len(self._integral) - 1))


@dataclass(frozen=True)
class CohomologyResult:
    """H^n of a cochain complex over Z/p^s as a direct sum of cyclic groups Z/p^e.

    ``factors[i]`` is the exponent of the i-th generator; ``generators[i]`` is a cocycle
    (sparse dict).  ``project`` maps a cocycle to its coordinates.
    """

    degree: int
    p: int
    s: int
    dimension: int
    factors: Tuple[int, ...]
    generators: Tuple[Dict[int, int], ...]
    _column_log: Tuple[Tuple[int, int, int], ...] = field(repr=False, compare=False, default=())
    _pivot_valuations: Dict[int, int] = field(repr=False, compare=False, default_factory=dict)
    _coords: Tuple[Tuple[int, int], ...] = field(repr=False, compare=False, default=())
    _row_log: Tuple[Tuple[int, int, int], ...] = field(repr=False, compare=False, default=())
    _factor_rows: Tuple[int, ...] = field(repr=False, compare=False, default=())

    @property
    def invariants(self):
        return tuple(sorted(self.factors, reverse=True))

    @property
    def order_exponent(self):
        return sum(self.factors)

    @property
    def order(self):
        return self.p ** self.order_exponent

    def is_zero(self):
        return not self.factors

    def describe(self):
        return describe_invariants(self.invariants, self.p)

    def project(self, cocycle):
        """Coordinates of a cocycle (dict or dense sequence) in the cyclic decomposition."""
        p, s = self.p, self.s
        q = p ** s
        y = [0] * self.dimension
        items = cocycle.items() if isinstance(cocycle, dict) else enumerate(cocycle)
        for j, v in items:
            y[j] = v % q
        for j, k, c in self._column_log:
            if y[k]:
                y[j] = (y[j] - c * y[k]) % q
        for j, v in self._pivot_valuations.items():
            if y[j] % p ** (s - v):
                raise ChainMapError("vector is not a cocycle in degree {}".format(self.degree),
                                    degree=self.degree, witness=(j, y[j]))
        z = [y[j] // p ** (s - c) for (j, c) in self._coords]
        for i, l, f in self._row_log:
            if z[i]:
                z[l] = (z[l] - f * z[i]) % q
        return tuple(z[t] % p ** e for t, e in zip(self._factor_rows, self.factors))


def describe_invariants(invariants, p):
    if not invariants:
        return "0"
    return " + ".join("Z/{}".format(p ** e) for e in invariants)


def cohomology(complex_, n):
    """H^n of ``complex_`` over Z/p^s with generators and a projection."""
    p, s = complex_.p, complex_.s
    q = p ** s
    dim = complex_.dimension(n)
    lower = complex_.dimension(n - 1)
    first = local_smith(complex_.differential(n), p, s, carry=complex_.differential(n - 1),
                        log_columns=True)
    pivot_valuations = first.column_valuations()
    coords = []
    for j in range(dim):
        v = pivot_valuations.get(j)
        if v is None:
            coords.append((j, s))
        elif v > 0:
            coords.append((j, v))
    carried = first.carry or {}
    for j, v in pivot_valuations.items():
        if v == 0 and carried.get(j):
            raise ChainMapError("coboundaries do not compose to zero at degree {}".format(n),
                                degree=n, witness=(j, carried[j]))
    data = {}
    for t, (j, c) in enumerate(coords):
        shift = p ** (s - c)
        for m, x in carried.get(j, {}).items():
            if x % shift:
                raise ChainMapError("coboundaries do not compose to zero at degree {}".format(n),
                                    degree=n, witness=(j, m, x))
            data[(t, m)] = (x // shift) % p ** c
    extra = lower
    for t, (j, c) in enumerate(coords):
        if c < s:
            data[(t, extra)] = p ** c
            extra += 1
    presentation = SparseMatrix(len(coords), extra, data, q)
    second = local_smith(presentation, p, s, log_rows=True)
    row_valuations = second.row_valuations()
    factors = []
    factor_rows = []
    for t in range(len(coords)):
        e = row_valuations.get(t, s)
        if e > 0:
            factors.append(e)
            factor_rows.append(t)
    generators = []
    for t in factor_rows:
        z = [0] * len(coords)
        z[t] = 1
        for i, l, f in reversed(second.row_log):
            if z[i]:
                z[l] = (z[l] + f * z[i]) % q
        y = [0] * dim
        for (j, c), zt in zip(coords, z):
            y[j] = (zt * p ** (s - c)) % q
        for j, k, c in reversed(first.column_log):
            if y[k]:
                y[j] = (y[j] + c * y[k]) % q
        generators.append({i: v for i, v in enumerate(y) if v})
    logger.debug("H^%d over Z/%d^%d of a complex with C^%d of rank %d: %s",
                 n, p, s, n, dim, describe_invariants(sorted(factors, reverse=True), p))
    return CohomologyResult(
        degree=n, p=p, s=s, dimension=dim, factors=tuple(factors),
        generators=tuple(generators), _column_log=first.column_log,
        _pivot_valuations=pivot_valuations, _coords=tuple(coords),
        _row_log=second.row_log, _factor_rows=tuple(factor_rows))


def all_cohomology(complex_):
    return tuple(cohomology(complex_, n) for n in range(complex_.top_degree + 1))


class CochainMap:
    """Degreewise matrices F^n : C^n(source) -> C^n(target)."""

    def __init__(self, source, target, components):
        self.source = source
        self.target = target
        self.components = dict(components)

    def component(self, n):
        matrix = self.components.get(n)
        if matrix is None:
            return SparseMatrix.zero(self.target.dimension(n), self.source.dimension(n))
        return matrix

    def check(self, n):
        """Raise ChainMapError unless F^{n+1} d^n = d^n F^n over Z/p^s."""
        q = self.target.modulus
        left = (self.component(n + 1) @ self.source.differential(n)).reduce(q)
        right = (self.target.differential(n) @ self.component(n)).reduce(q)
        difference = (left - right).reduce(q)
        if not difference.is_zero():
            (i, j), v = min(difference.data.items())
            raise ChainMapError(
                "cochain map does not commute with the coboundary in degree {}".format(n),
                degree=n, witness=(i, j, v))
        return True

    def compose(self, other):
        """self o other."""
        degrees = set(self.components) | set(other.components)
        return CochainMap(other.source, self.target,
                          {n: (self.component(n) @ other.component(n)).reduce(
                              self.target.modulus) for n in degrees})


@dataclass(frozen=True)
class InducedMap:
    """Matrix of a map on cohomology; column i is the image of source generator i."""

    source: CohomologyResult
    target: CohomologyResult
    matrix: Tuple[Tuple[int, ...], ...]

    def column(self, i):
        return tuple(row[i] for row in self.matrix)

    def compose(self, other):
        """self o other, reduced into the target's cyclic orders."""
        rows = len(self.target.factors)
        cols = len(other.source.factors)
        inner = len(self.source.factors)
        out = []
        for i in range(rows):
            order = self.target.p ** self.target.factors[i]
            out.append(tuple(sum(self.matrix[i][k] * other.matrix[k][j] for k in range(inner))
                             % order for j in range(cols)))
        return InducedMap(other.source, self.target, tuple(out))

    def is_identity(self):
        return all(self.matrix[i][j] == (1 if i == j else 0)
                   for i in range(len(self.matrix)) for j in range(len(self.matrix[i])))


def induced_map(f, n, source=None, target=None, check=True):
    """The map H^n(source complex) -> H^n(target complex) induced by the cochain map f."""
    if check:
        f.check(n)
        f.check(n - 1)
    source = source if source is not None else cohomology(f.source, n)
    target = target if target is not None else cohomology(f.target, n)
    matrix = f.component(n).reduce(f.target.modulus)
    columns = [target.project(matrix.apply(g)) for g in source.generators]
    rows = tuple(tuple(col[i] for col in columns) for i in range(len(target.factors)))
    if check:
        from . import abelian  # abelian imports this module
        if not abelian.is_well_defined([list(row) for row in rows], source.factors,
                                       target.factors, source.p):
            raise ChainMapError("induced map is not well defined in degree {}".format(n),
                                degree=n)
    return InducedMap(source, target, rows)


@dataclass(frozen=True)
class SmithForm:
    """U M V = diag(diagonal) with unimodular U, V; the diagonal has d_i | d_{i+1}."""

    diagonal: Tuple[int, ...]
    U: Optional[Tuple[Tuple[int, ...], ...]]
    V: Optional[Tuple[Tuple[int, ...], ...]]
    shape: Tuple[int, int]

    @property
    def rank(self):
        return len(self.diagonal)


def smith_normal_form(matrix, certificates=True):
    """Integral Smith normal form of a SparseMatrix or a dense list of rows."""
    if isinstance(matrix, SparseMatrix):
        m, n = matrix.rows, matrix.cols
        A = matrix.to_dense()
    else:
        A = [list(row) for row in matrix]
        m = len(A)
        n = len(A[0]) if A else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)] if certificates else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if certificates else None

    def swap_rows(a, b):
        A[a], A[b] = A[b], A[a]
        if U is not None:
            U[a], U[b] = U[b], U[a]

    def swap_cols(a, b):
        for row in A:
            row[a], row[b] = row[b], row[a]
        if V is not None:
            for row in V:
                row[a], row[b] = row[b], row[a]

    def add_row(target, source, factor):
        if factor:
            A[target] = [x + factor * y for x, y in zip(A[target], A[source])]
            if U is not None:
                U[target] = [x + factor * y for x, y in zip(U[target], U[source])]

    def add_col(target, source, factor):
        if factor:
            for row in A:
                row[target] += factor * row[source]
            if V is not None:
                for row in V:
                    row[target] += factor * row[source]

    t = 0
    while t < min(m, n):
        entries = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            for i in range(t + 1, m):
                add_row(i, t, -(A[i][t] // A[t][t]))
            for j in range(t + 1, n):
                add_col(j, t, -(A[t][j] // A[t][t]))
            rest = [(abs(A[i][t]), i, None) for i in range(t + 1, m) if A[i][t]]
            rest += [(abs(A[t][j]), None, j) for j in range(t + 1, n) if A[t][j]]
            if rest:
                _, i, j = min(rest, key=lambda e: e[0])
                if i is not None:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        t += 1
    diagonal = tuple(A[k][k] for k in range(t))
    return SmithForm(
        diagonal=diagonal,
        U=tuple(tuple(row) for row in U) if U is not None else None,
        V=tuple(tuple(row) for row in V) if V is not None else None,
        shape=(m, n))


def cohomology_via_lift(complex_, n):
    """Invariants of H^n over Z/p^s from the integral Smith forms (universal coefficients)."""
    p, s = complex_.p, complex_.s
    below = smith_normal_form(complex_.integral_differential(n - 1), certificates=False)
    here = smith_normal_form(complex_.integral_differential(n), certificates=False)
    free = complex_.dimension(n) - below.rank - here.rank
    factors = [s] * free
    for d in below.diagonal + here.diagonal:
        v = multiplicity(p, d)
        if v:
            factors.append(min(v, s))
    return tuple(sorted(factors, reverse=True))
