"""Flat descriptors and twisted cochain complexes with coinduced coefficients.

C^n at level r has one block of rank |L_r| per n-cell (outside the relative subcomplex).  The
coboundary of an (n+1)-cell sigma sums signed identity blocks over faces i >= 1 and, for face 0,
the left translation by the label of the edge e01(sigma): (g.m)(x) = m(g^-1 x).  This matches
the face-0 twist of complex_core.build_cover, so the twisted complex of the base is the
constant-coefficient complex of the cover, ordered base-cell-major.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .complex_core import DeltaComplex, ValidationReport, validate_complex
from .errors import DescriptorError, TowerError
from .group_towers import AbelianTower, GroupTower, TowerElement, closure_of
from .smith_engine import CochainComplex, CochainMap, SparseMatrix, smith_normal_form

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlatDescriptor:
    """One tower element per edge of ``complex``, satisfying the triangle cocycle rule."""

    complex: DeltaComplex
    tower: GroupTower
    labels: Tuple[TowerElement, ...]
    _indices: Dict[int, Tuple[int, ...]] = field(default_factory=dict, compare=False,
                                                 repr=False)

    def __post_init__(self):
        if len(self.labels) != self.complex.count(1):
            raise DescriptorError("descriptor has {} labels for {} edges".format(
                len(self.labels), self.complex.count(1)))

    @classmethod
    def from_values(cls, complex_, tower, values):
        """Build from a mapping edge label (or index) -> raw element value."""
        resolved = {}
        for key, value in values.items():
            if isinstance(key, int):
                index = key
                if not 0 <= index < complex_.count(1):
                    raise DescriptorError("label defined on missing edge {}".format(key),
                                          cell=key)
            else:
                if complex_.count(1) == 0 or key not in complex_.labels[1]:
                    raise DescriptorError("label defined on missing edge {!r}".format(key),
                                          cell=key)
                index = complex_.labels[1].index(key)
            try:
                resolved[index] = tower.element(value)
            except TowerError as exc:
                raise DescriptorError("edge {}: {}".format(complex_.label(1, index), exc),
                                      cell=complex_.label(1, index), level=exc.level) from exc
        missing = [complex_.label(1, e) for e in range(complex_.count(1)) if e not in resolved]
        if missing:
            raise DescriptorError("edges without a label: {}".format(", ".join(missing)),
                                  cell=missing[0])
        return cls(complex_, tower, tuple(resolved[e] for e in range(complex_.count(1))))

    @classmethod
    def trivial(cls, complex_, tower):
        identity = tower.element_from_top(tower.level(tower.depth).element(
            tower.level(tower.depth).identity))
        return cls(complex_, tower, (identity,) * complex_.count(1))

    def __getstate__(self):
        return {"complex": self.complex, "tower": self.tower, "labels": self.labels,
                "_indices": {}}

    def __setstate__(self, state):
        for key, value in state.items():
            object.__setattr__(self, key, value)

    def level_labels(self, r):
        cached = self._indices.get(r)
        if cached is None:
            group = self.tower.level(r)
            cached = tuple(group.index_of(label.images[r]) for label in self.labels)
            self._indices[r] = cached
        return cached

    def label_index(self, edge, r):
        return self.level_labels(r)[edge]

    def is_dense(self, r=None):
        """Whether the labels generate every level up to r (default: the full depth)."""
        top = self.tower.depth if r is None else r
        sub = closure_of(self.tower, list(self.labels))
        return all(len(sub.subgroups[k]) == self.tower.order(k) for k in range(top + 1))


def validate_descriptor(descriptor):
    """First 2-cell violating g(e02) = g(e01) g(e12), reported at its lowest failing level."""
    complex_ = descriptor.complex
    report = validate_complex(complex_)
    if not report.ok:
        return report
    tower = descriptor.tower
    for e, label in enumerate(descriptor.labels):
        if len(label.images) != tower.depth + 1:
            return ValidationReport(False, "edge {} label has {} levels, tower depth is {}".format(
                complex_.label(1, e), len(label.images), tower.depth), (1, e))
        for r, nf in enumerate(label.images):
            if nf not in tower.level(r):
                return ValidationReport(False, "edge {} label {} is not in level {}".format(
                    complex_.label(1, e), nf, r), (1, e, r))
    for sigma in range(complex_.count(2)):
        e12, e02, e01 = complex_.faces[2][sigma]
        for r in range(1, tower.depth + 1):
            group = tower.level(r)
            g01, g12, g02 = (descriptor.label_index(e, r) for e in (e01, e12, e02))
            if group.mul(g01, g12) != g02:
                return ValidationReport(
                    False,
                    "cocycle condition fails on 2-cell {} at level {}: "
                    "g({})={}, g({})={}, g({})={}".format(
                        complex_.label(2, sigma), r,
                        complex_.label(1, e01), group.element(g01),
                        complex_.label(1, e12), group.element(g12),
                        complex_.label(1, e02), group.element(g02)),
                    (2, sigma, r))
    return ValidationReport(True)


def ensure_descriptor(descriptor):
    report = validate_descriptor(descriptor)
    if not report.ok:
        loc = report.location or ()
        raise DescriptorError(report.message,
                              cell=loc[1] if len(loc) > 1 else None,
                              level=loc[2] if len(loc) > 2 else None)
    return descriptor


def restrict_descriptor(descriptor, complex_, cell_maps):
    """Descriptor on a component or subcomplex given by the old cell indices per dimension."""
    edges = cell_maps[1] if len(cell_maps) > 1 else ()
    return FlatDescriptor(complex_, descriptor.tower,
                          tuple(descriptor.labels[e] for e in edges))


@dataclass(frozen=True)
class CoinducedModule:
    """Maps(L_r, Z/p^s), with basis the indicator functions of the elements of L_r."""

    tower: GroupTower
    level: int
    s: int

    @property
    def rank(self):
        return self.tower.order(self.level)

    def translation(self, g):
        return self.tower.level(self.level).left_translation(g)

    def inclusion(self, r_next):
        return coefficient_inclusion(self.tower, self.level, r_next, self.s)


def coefficient_inclusion(tower, r, r_next, s):
    """Maps(L_r) -> Maps(L_{r_next}) by precomposition with the projection."""
    if r_next < r:
        raise TowerError("inclusion must go up the tower", level=r_next)
    if r_next > tower.depth:
        raise TowerError("level {} exceeds tower depth {}".format(r_next, tower.depth),
                         level=r_next)
    upper = tower.order(r_next)
    data = {(y, tower.project_to(r_next, r, y)): 1 for y in range(upper)}
    return SparseMatrix(upper, tower.order(r), data, tower.p ** s)


@dataclass(frozen=True)
class BlockMatrix:
    """Blocks (row_block, col_block, sign, permutation or None for the identity)."""

    row_blocks: int
    col_blocks: int
    size: int
    entries: Tuple[Tuple[int, int, int, Optional[Tuple[int, ...]]], ...]

    def flatten(self, modulus=None):
        data = {}
        size = self.size
        for rb, cb, sign, perm in self.entries:
            for x in range(size):
                key = (rb * size + x, cb * size + (perm[x] if perm is not None else x))
                data[key] = data.get(key, 0) + sign
        return SparseMatrix(self.row_blocks * size, self.col_blocks * size, data, modulus)


class TwistedCochainComplex(CochainComplex):
    """Cochains of the cells in ``support`` with coefficients in a coinduced module."""

    def __init__(self, module, support, blocks, descriptor=None):
        self.module = module
        self.level = module.level
        self.block_size = module.rank
        self.support = tuple(tuple(cells) for cells in support)
        self.blocks = tuple(blocks)
        self.descriptor = descriptor
        self._positions = tuple({c: i for i, c in enumerate(cells)} for cells in self.support)
        dims = [len(cells) * self.block_size for cells in self.support]
        super().__init__(module.tower.p, module.s, dims, [b.flatten() for b in self.blocks])

    def position(self, n, cell):
        return self._positions[n].get(cell)

    def cells(self, n):
        return self.support[n] if 0 <= n < len(self.support) else ()


def _assemble(complex_, support, module, descriptor=None):
    """Coboundary blocks; face 0 is twisted by the label of e01 when a descriptor is given."""
    positions = [{c: i for i, c in enumerate(cells)} for cells in support]
    blocks = []
    for n in range(len(support) - 1):
        entries = []
        for rb, sigma in enumerate(support[n + 1]):
            for i, tau in enumerate(complex_.faces[n + 1][sigma]):
                cb = positions[n].get(tau)
                if cb is None:
                    continue
                perm = None
                if i == 0 and descriptor is not None:
                    edge = complex_.edge_01(n + 1, sigma)
                    perm = module.translation(descriptor.label_index(edge, module.level))
                entries.append((rb, cb, -1 if i % 2 else 1, perm))
        blocks.append(BlockMatrix(len(support[n + 1]), len(support[n]), module.rank,
                                  tuple(entries)))
    complex_out = TwistedCochainComplex(module, support, blocks, descriptor)
    logger.debug("cochain complex at level %d, s=%d: ranks %s", module.level, module.s,
                 complex_out.dims)
    return complex_out


def _support(complex_, rel=None, only=None):
    out = []
    for n in range(complex_.dim + 1):
        if only is not None:
            out.append(only.cells(n))
        elif rel is not None:
            out.append(rel.complement(complex_, n))
        else:
            out.append(tuple(range(complex_.count(n))))
    return out


def twisted_complex(descriptor, rel=None, r=0, s=1):
    """Relative (if ``rel``) twisted cochain complex at tower level r over Z/p^s."""
    tower = descriptor.tower
    if not 0 <= r <= tower.depth:
        raise TowerError("level {} exceeds tower depth {}".format(r, tower.depth), level=r)
    if s < 1:
        raise DescriptorError("precision s must be at least 1")
    complex_ = descriptor.complex
    return _assemble(complex_, _support(complex_, rel=rel), CoinducedModule(tower, r, s),
                     descriptor)


def restriction_complex(descriptor, Z, r, s):
    """Twisted cochains of the subcomplex Z with the restricted labels."""
    complex_ = descriptor.complex
    return _assemble(complex_, _support(complex_, only=Z),
                     CoinducedModule(descriptor.tower, r, s), descriptor)


def constant_complex(complex_, p, s, rel=None):
    """Ordinary cellular cochains with Z/p^s coefficients."""
    return _assemble(complex_, _support(complex_, rel=rel),
                     CoinducedModule(AbelianTower(0, p, 0), 0, s))


def _selection(rows_cells, cols_cells, size, modulus):
    """Identity blocks between the common cells of two supports."""
    row_pos = {c: i for i, c in enumerate(rows_cells)}
    data = {}
    for j, c in enumerate(cols_cells):
        i = row_pos.get(c)
        if i is not None:
            for x in range(size):
                data[(i * size + x, j * size + x)] = 1
    return SparseMatrix(len(rows_cells) * size, len(cols_cells) * size, data, modulus)


def _blockwise(source, target, block):
    """The cochain map acting by ``block`` on every cell of a shared support."""
    if source.support != target.support:
        raise DescriptorError("cochain map needs complexes over the same cells")
    components = {}
    for n, cells in enumerate(source.support):
        data = {}
        for c in range(len(cells)):
            for (i, j), v in block.data.items():
                data[(c * block.rows + i, c * block.cols + j)] = v
        components[n] = SparseMatrix(target.dimension(n), source.dimension(n), data,
                                     target.modulus)
    return CochainMap(source, target, components)


def cochain_inclusion(source, target):
    """The tower map C(level r) -> C(level r') built from coefficient inclusions."""
    return _blockwise(source, target, source.module.inclusion(target.level))


def precision_reduction(source, target):
    """Reduction C(level r, Z/p^s') -> C(level r, Z/p^s) for s <= s'."""
    if source.level != target.level or target.s > source.s:
        raise DescriptorError("precision reduction needs one level and a smaller precision")
    return _blockwise(source, target, SparseMatrix.identity(source.block_size, target.modulus))


def deck_translation(twisted, h):
    """Right translation (m.h)(x) = m(x h) by h in L_r, blockwise."""
    group = twisted.descriptor.tower.level(twisted.level)
    right = group.right_translation(h)
    size = twisted.block_size
    components = {}
    for n, cells in enumerate(twisted.support):
        data = {(c * size + x, c * size + right[x]): 1
                for c in range(len(cells)) for x in range(size)}
        components[n] = SparseMatrix(twisted.dimension(n), twisted.dimension(n), data,
                                     twisted.modulus)
    return CochainMap(twisted, twisted, components)


@dataclass
class PairSequence:
    """0 -> C(Y, Z) -> C(Y) -> C(Z) -> 0 at one level, with the connecting cochain maps."""

    relative: TwistedCochainComplex
    absolute: TwistedCochainComplex
    boundary: TwistedCochainComplex
    inclusion: CochainMap
    restriction: CochainMap
    connecting: Dict[int, SparseMatrix]


def pair_sequence(descriptor, Z, r, s):
    relative = twisted_complex(descriptor, rel=Z, r=r, s=s)
    absolute = twisted_complex(descriptor, r=r, s=s)
    boundary = restriction_complex(descriptor, Z, r, s)
    q = absolute.modulus
    size = absolute.block_size
    inclusion = CochainMap(relative, absolute, {
        n: _selection(absolute.support[n], relative.support[n], size, q)
        for n in range(len(absolute.support))})
    restriction = CochainMap(absolute, boundary, {
        n: _selection(boundary.support[n], absolute.support[n], size, q)
        for n in range(len(absolute.support))})
    connecting = {}
    for n in range(len(absolute.support) - 1):
        rows = relative.support[n + 1]
        cols = boundary.support[n]
        row_pos = {c: i for i, c in enumerate(rows)}
        col_pos = {c: i for i, c in enumerate(cols)}
        block = absolute.blocks[n]
        entries = []
        for rb, cb, sign, perm in block.entries:
            sigma = absolute.support[n + 1][rb]
            tau = absolute.support[n][cb]
            if sigma in row_pos and tau in col_pos:
                entries.append((row_pos[sigma], col_pos[tau], sign, perm))
        connecting[n] = BlockMatrix(len(rows), len(cols), size, tuple(entries)).flatten(q)
    return PairSequence(relative, absolute, boundary, inclusion, restriction, connecting)


def integral_coboundary(complex_, n):
    """Integral cellular coboundary C^n -> C^{n+1} of the complex."""
    return constant_complex(complex_, 2, 1).integral_differential(n)


def random_abelian_cocycle(complex_, rank, rng, bound=3):
    """Random integral 1-cocycles with values in Z^rank, as {edge label: tuple}."""
    edges = complex_.count(1)
    d1 = integral_coboundary(complex_, 1)
    form = smith_normal_form(d1)
    kernel = [[form.V[i][j] for i in range(edges)] for j in range(form.rank, edges)]
    values = {}
    coords = []
    for _ in range(rank):
        vector = [0] * edges
        for basis in kernel:
            c = rng.randint(-bound, bound)
            if c:
                vector = [a + c * b for a, b in zip(vector, basis)]
        coords.append(vector)
    for e in range(edges):
        values[complex_.label(1, e)] = tuple(coords[k][e] for k in range(rank))
    return values
