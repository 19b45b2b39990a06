"""Finite Delta-complexes, subcomplexes and the finite covers built from a flat descriptor.

A Delta-complex is stored as face lists: for every n-cell (n >= 1) the ordered tuple of the
n+1 cells of dimension n-1 opposite its vertices 0..n.  Cells are identified by dense integer
indices per dimension; labels are optional and only used for input and reports.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from .errors import ComplexError, ConfigError

logger = logging.getLogger(__name__)

_DEFAULT_PREFIX = {0: "v", 1: "e", 2: "t"}


def default_label(dim, index):
    return "{}{}".format(_DEFAULT_PREFIX.get(dim, "c{}_".format(dim)), index)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a validation pass; ``location`` names the offending cell when not ok."""

    ok: bool
    message: str = "valid"
    location: Optional[Tuple] = None

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class DeltaComplex:
    """A finite Delta-complex.

    ``faces[n][i]`` is the tuple of face indices of the i-th n-cell; ``faces[0]`` holds one
    empty tuple per vertex.
    """

    faces: Tuple[Tuple[Tuple[int, ...], ...], ...]
    labels: Tuple[Tuple[str, ...], ...] = ()

    @classmethod
    def build(cls, vertices, *higher, labels=None):
        """Build from a vertex count and one face list per dimension >= 1."""
        faces = [tuple(() for _ in range(vertices))]
        for cells in higher:
            faces.append(tuple(tuple(int(f) for f in cell) for cell in cells))
        while len(faces) > 1 and not faces[-1]:
            faces.pop()
        if vertices == 0 and len(faces) == 1:
            faces = []
        faces = tuple(faces)
        if labels is None:
            labels = tuple(
                tuple(default_label(n, i) for i in range(len(cells)))
                for n, cells in enumerate(faces))
        else:
            labels = tuple(tuple(level) for level in labels)
        return cls(faces=faces, labels=labels)

    @property
    def dim(self):
        return len(self.faces) - 1

    @property
    def cells_per_dim(self):
        return tuple(len(cells) for cells in self.faces)

    def count(self, n):
        if 0 <= n < len(self.faces):
            return len(self.faces[n])
        return 0

    def is_empty(self):
        return not self.faces or not self.faces[0]

    def face(self, n, index, i):
        return self.faces[n][index][i]

    def label(self, n, index):
        if self.labels and n < len(self.labels):
            return self.labels[n][index]
        return default_label(n, index)

    def index_of(self, n, label):
        if self.labels and n < len(self.labels):
            try:
                return self.labels[n].index(label)
            except ValueError:
                pass
        raise ComplexError("no {}-cell labelled {!r}".format(n, label), dimension=n, cell=label)

    def face_cell(self, n, index, keep):
        """The face of an n-cell spanned by the vertex positions in ``keep``."""
        dim, cell = n, index
        for j in sorted(set(range(n + 1)) - set(keep), reverse=True):
            cell = self.faces[dim][cell][j]
            dim -= 1
        return dim, cell

    def cell_vertices(self, n, index):
        return tuple(self.face_cell(n, index, (i,))[1] for i in range(n + 1))

    def edge_01(self, n, index):
        """The edge from vertex 0 to vertex 1 of an n-cell (n >= 1)."""
        if n < 1:
            raise ComplexError("vertices have no edges", dimension=n, cell=index)
        return self.face_cell(n, index, (0, 1))[1]

    def euler_characteristic(self):
        return euler_characteristic(self)


@dataclass(frozen=True)
class Subcomplex:
    """Cells selected per dimension; must be closed under faces."""

    selected: Tuple[frozenset, ...]

    @classmethod
    def empty(cls, complex_):
        return cls(selected=tuple(frozenset() for _ in range(complex_.dim + 1)))

    @classmethod
    def whole(cls, complex_):
        return cls(selected=tuple(frozenset(range(complex_.count(n)))
                                  for n in range(complex_.dim + 1)))

    @classmethod
    def from_cells(cls, complex_, cells):
        """``cells`` maps dimension -> iterable of indices or labels."""
        selected = [set() for _ in range(complex_.dim + 1)]
        for n, members in cells.items():
            if not 0 <= n <= complex_.dim:
                raise ComplexError("subcomplex names dimension {} beyond the complex".format(n),
                                   dimension=n)
            for member in members:
                if isinstance(member, str):
                    member = complex_.index_of(n, member)
                if not 0 <= member < complex_.count(n):
                    raise ComplexError("subcomplex cell out of range", dimension=n, cell=member)
                selected[n].add(member)
        return cls(selected=tuple(frozenset(s) for s in selected))

    def contains(self, n, index):
        return n < len(self.selected) and index in self.selected[n]

    def is_empty(self):
        return not any(self.selected)

    def complement(self, complex_, n):
        chosen = self.selected[n] if n < len(self.selected) else frozenset()
        return tuple(i for i in range(complex_.count(n)) if i not in chosen)

    def cells(self, n):
        if n < len(self.selected):
            return tuple(sorted(self.selected[n]))
        return ()

    def validate(self, complex_):
        for n in range(1, len(self.selected)):
            for index in sorted(self.selected[n]):
                for i, f in enumerate(complex_.faces[n][index]):
                    if f not in self.selected[n - 1]:
                        return ValidationReport(
                            False, "face {} of {}-cell {} is not selected".format(
                                i, n, complex_.label(n, index)), (n, index, i))
        return ValidationReport(True)


def validate_complex(complex_):
    """Check face references and the face identities d_i d_j = d_{j-1} d_i for i < j."""
    for n in range(1, len(complex_.faces)):
        lower = complex_.count(n - 1)
        for index, cell in enumerate(complex_.faces[n]):
            if len(cell) != n + 1:
                return ValidationReport(
                    False, "{}-cell {} has {} faces, expected {}".format(
                        n, complex_.label(n, index), len(cell), n + 1), (n, index))
            for i, f in enumerate(cell):
                if not 0 <= f < lower:
                    return ValidationReport(
                        False, "face {} of {}-cell {} refers to missing {}-cell {}".format(
                            i, n, complex_.label(n, index), n - 1, f), (n, index, i))
    for n in range(2, len(complex_.faces)):
        for index, cell in enumerate(complex_.faces[n]):
            for i, j in combinations(range(n + 1), 2):
                left = complex_.faces[n - 1][cell[i]][j - 1]
                right = complex_.faces[n - 1][cell[j]][i]
                if left != right:
                    return ValidationReport(
                        False, "face identity fails on {}-cell {}: d{} d{} = {} but d{} d{} = {}".format(
                            n, complex_.label(n, index), j - 1, i, left, i, j, right),
                        (n, index, i, j))
    return ValidationReport(True)


def ensure_valid(complex_):
    report = validate_complex(complex_)
    if not report.ok:
        loc = report.location or (None, None)
        raise ComplexError(report.message, dimension=loc[0], cell=loc[1])
    return complex_


def euler_characteristic(complex_):
    return sum((-1) ** n * count for n, count in enumerate(complex_.cells_per_dim))


@dataclass(frozen=True)
class CoverComplex:
    """The finite cover of ``base`` at tower level ``level``.

    Cell (sigma, x) of the cover has index ``sigma * order + x``.
    """

    base: DeltaComplex
    level: int
    order: int
    complex: DeltaComplex

    def cell(self, n, index):
        return divmod(index, self.order)

    def index(self, base_cell, element):
        return base_cell * self.order + element


def build_cover(complex_, descriptor, r):
    """Cover of ``complex_`` at level r; face 0 of (sigma, x) is (d_0 sigma, g(e01)^-1 x)."""
    if descriptor.complex is not complex_ and descriptor.complex != complex_:
        raise ComplexError("descriptor was built for a different complex")
    tower = descriptor.tower
    if not 0 <= r <= tower.depth:
        raise ComplexError("level {} exceeds tower depth {}".format(r, tower.depth))
    group = tower.level(r)
    order = group.order
    faces = [tuple(() for _ in range(complex_.count(0) * order))]
    labels = [tuple("{}@{}".format(complex_.label(0, v), x)
                    for v in range(complex_.count(0)) for x in range(order))]
    for n in range(1, complex_.dim + 1):
        cells = []
        names = []
        for sigma, sigma_faces in enumerate(complex_.faces[n]):
            g = descriptor.label_index(complex_.edge_01(n, sigma), r)
            shift = group.left_translation(g)
            for x in range(order):
                twisted = [sigma_faces[0] * order + shift[x]]
                twisted.extend(f * order + x for f in sigma_faces[1:])
                cells.append(tuple(twisted))
                names.append("{}@{}".format(complex_.label(n, sigma), x))
        faces.append(tuple(cells))
        labels.append(tuple(names))
    cover = DeltaComplex(faces=tuple(faces), labels=tuple(labels))
    logger.debug("cover at level %d: cells %s", r, cover.cells_per_dim)
    return CoverComplex(base=complex_, level=r, order=order, complex=cover)


def cover_projection(cover, lower, descriptor):
    """Cellwise map CoverComplex(r) -> CoverComplex(r') induced by L_r -> L_r'."""
    tower = descriptor.tower
    table = [tower.project_to(cover.level, lower.level, x) for x in range(cover.order)]
    maps = []
    for n in range(cover.base.dim + 1):
        maps.append(tuple(lower.index(sigma, table[x])
                          for sigma in range(cover.base.count(n))
                          for x in range(cover.order)))
    return tuple(maps)


def components(complex_):
    """Connected components, each returned with the old cell indices per dimension."""
    if complex_.is_empty():
        return []
    parent = list(range(complex_.count(0)))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in range(complex_.count(1)):
        a, b = (find(v) for v in complex_.faces[1][e])
        if a != b:
            parent[max(a, b)] = min(a, b)
    roots = sorted({find(v) for v in range(complex_.count(0))})
    result = []
    for root in roots:
        kept = []
        for n in range(complex_.dim + 1):
            kept.append(tuple(i for i in range(complex_.count(n))
                              if find(complex_.cell_vertices(n, i)[0]) == root))
        result.append((_extract(complex_, kept), tuple(kept)))
    return result


def restrict(complex_, subcomplex):
    """The subcomplex as a Delta-complex, with the old cell indices per dimension."""
    kept = [subcomplex.cells(n) for n in range(complex_.dim + 1)]
    return _extract(complex_, kept), tuple(kept)


def _extract(complex_, kept):
    renumber = [{old: new for new, old in enumerate(cells)} for cells in kept]
    faces = []
    labels = []
    for n, cells in enumerate(kept):
        if n == 0:
            faces.append(tuple(() for _ in cells))
        else:
            faces.append(tuple(tuple(renumber[n - 1][f] for f in complex_.faces[n][c])
                               for c in cells))
        labels.append(tuple(complex_.label(n, c) for c in cells))
    while faces and not faces[-1]:
        faces.pop()
        labels.pop()
    return DeltaComplex(faces=tuple(faces), labels=tuple(labels))


def strictness(complex_):
    """ValidationReport saying whether every cell is determined by distinct vertices."""
    for n in range(1, complex_.dim + 1):
        seen = {}
        for i in range(complex_.count(n)):
            verts = complex_.cell_vertices(n, i)
            if len(set(verts)) != len(verts):
                return ValidationReport(
                    False, "{}-cell {} has repeated vertices {}".format(
                        n, complex_.label(n, i), verts), (n, i))
            key = frozenset(verts)
            if key in seen:
                return ValidationReport(
                    False, "{}-cells {} and {} share the vertex set {}".format(
                        n, complex_.label(n, seen[key]), complex_.label(n, i), sorted(key)),
                    (n, i))
            seen[key] = i
    return ValidationReport(True)


def barycentric_subdivision(complex_):
    """First barycentric subdivision of a Delta-complex of dimension at most 2.

    A k-simplex of the subdivision is a cell tau of dimension m with a strictly increasing
    chain of vertex subsets F_0 < ... < F_k = {0..m}; vertex i of the simplex is the
    barycentre of F_i.
    """
    if complex_.dim > 2:
        raise ComplexError("barycentric subdivision is only provided up to dimension 2",
                           dimension=complex_.dim)

    def canonical(n, index, chain):
        top = chain[-1]
        if len(top) == n + 1:
            return n, index, chain
        m, cell = complex_.face_cell(n, index, top)
        position = {v: k for k, v in enumerate(sorted(top))}
        return m, cell, tuple(tuple(position[v] for v in subset) for subset in chain)

    def chains(m, length):
        full = tuple(range(m + 1))
        subsets = [tuple(c) for size in range(1, m + 1) for c in combinations(full, size)]
        if length == 1:
            return [(full,)]
        found = []
        for lower in combinations(subsets, length - 1):
            ok = all(set(lower[i]) < set(lower[i + 1]) for i in range(len(lower) - 1))
            if ok:
                found.append(tuple(lower) + (full,))
        return found

    simplices = []
    index = []
    for k in range(complex_.dim + 1):
        level = []
        for m in range(k, complex_.dim + 1):
            for cell in range(complex_.count(m)):
                for chain in sorted(chains(m, k + 1)):
                    level.append((m, cell, chain))
        simplices.append(level)
        index.append({key: i for i, key in enumerate(level)})
    faces = [tuple(() for _ in simplices[0])]
    for k in range(1, complex_.dim + 1):
        cells = []
        for m, cell, chain in simplices[k]:
            boundary = []
            for i in range(k + 1):
                sub = chain[:i] + chain[i + 1:]
                boundary.append(index[k - 1][canonical(m, cell, sub)])
            cells.append(tuple(boundary))
        faces.append(tuple(cells))
    labels = []
    for k, level in enumerate(simplices):
        labels.append(tuple("sd({}:{})".format(
            complex_.label(m, cell), "<".join("".join(str(v) for v in s) for s in chain))
            for m, cell, chain in level))
    return DeltaComplex(faces=tuple(faces), labels=tuple(labels))


def simplicial_model(complex_):
    """Subdivide until strictly simplicial (at most twice)."""
    current = complex_
    for _ in range(3):
        if strictness(current).ok:
            return current
        current = barycentric_subdivision(current)
    raise ComplexError("complex did not become simplicial after two subdivisions")


def parse_complex(text, first_line=1):
    """Parse the complex text grammar; returns (DeltaComplex, Subcomplex or None).

    Grammar (see CONFIG_FORMAT.md)::

        dim 0
        v                 # one vertex per line, or "count N"
        dim 1
        a: v v            # optional "label:" then the n+1 faces by label or index
        subcomplex
        0: v
        1: a
    """
    blocks: Dict[int, List[Tuple[int, Optional[str], List[str]]]] = {}
    sub_lines: List[Tuple[int, int, List[str]]] = []
    current = None
    for offset, raw in enumerate(text.splitlines()):
        lineno = first_line + offset
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if words[0] == "dim":
            if len(words) != 2 or not words[1].isdigit():
                raise ConfigError("expected 'dim N'", line=lineno, field="complex")
            current = int(words[1])
            if current in blocks:
                raise ConfigError("dimension {} declared twice".format(current),
                                  line=lineno, field="complex")
            blocks[current] = []
            continue
        if words[0] == "subcomplex":
            current = "sub"
            continue
        if current is None:
            raise ConfigError("cell listed before any 'dim N' header", line=lineno,
                              field="complex")
        if current == "sub":
            head, _, rest = line.partition(":")
            if not head.strip().isdigit():
                raise ConfigError("expected 'N: cells...' in subcomplex block", line=lineno,
                                  field="subcomplex")
            sub_lines.append((lineno, int(head), rest.split()))
            continue
        if current == 0:
            if words[0] == "count" and len(words) == 2 and words[1].isdigit():
                for _ in range(int(words[1])):
                    blocks[0].append((lineno, None, []))
            elif len(words) == 1:
                blocks[0].append((lineno, words[0], []))
            else:
                raise ConfigError("a vertex line holds one label", line=lineno, field="complex")
            continue
        label, sep, rest = line.partition(":")
        if sep:
            label = label.strip()
            refs = rest.split()
        else:
            label, refs = None, words
        blocks[current].append((lineno, label, refs))
    if not blocks:
        return DeltaComplex(faces=()), None
    top = max(blocks)
    for n in range(top + 1):
        if n not in blocks:
            raise ConfigError("missing 'dim {}' block".format(n), field="complex")
    labels = []
    faces = []
    for n in range(top + 1):
        names = []
        for i, (lineno, label, _) in enumerate(blocks[n]):
            name = label if label else default_label(n, i)
            if name.isdigit():
                raise ConfigError("labels must not be plain integers", line=lineno,
                                  field="complex")
            if name in names:
                raise ConfigError("duplicate label {!r}".format(name), line=lineno,
                                  field="complex")
            names.append(name)
        labels.append(names)
    for n in range(top + 1):
        if n == 0:
            faces.append(tuple(() for _ in blocks[0]))
            continue
        cells = []
        for lineno, label, refs in blocks[n]:
            if len(refs) != n + 1:
                raise ConfigError("{}-cell needs {} faces, got {}".format(n, n + 1, len(refs)),
                                  line=lineno, field="complex")
            resolved = []
            for ref in refs:
                if ref.isdigit():
                    resolved.append(int(ref))
                elif ref in labels[n - 1]:
                    resolved.append(labels[n - 1].index(ref))
                else:
                    raise ConfigError("unknown {}-cell {!r}".format(n - 1, ref), line=lineno,
                                      field="complex")
            cells.append(tuple(resolved))
        faces.append(tuple(cells))
    complex_ = DeltaComplex(faces=tuple(faces), labels=tuple(tuple(l) for l in labels))
    report = validate_complex(complex_)
    if not report.ok:
        n, index = report.location[0], report.location[1]
        raise ConfigError(report.message, line=blocks[n][index][0], field="complex")
    subcomplex = None
    if sub_lines:
        selected = {}
        for lineno, n, refs in sub_lines:
            if n > top:
                raise ConfigError("subcomplex dimension {} beyond the complex".format(n),
                                  line=lineno, field="subcomplex")
            for ref in refs:
                if ref.isdigit():
                    index = int(ref)
                elif ref in labels[n]:
                    index = labels[n].index(ref)
                else:
                    raise ConfigError("unknown {}-cell {!r}".format(n, ref), line=lineno,
                                      field="subcomplex")
                selected.setdefault(n, set()).add(index)
        subcomplex = Subcomplex.from_cells(complex_, selected)
        report = subcomplex.validate(complex_)
        if not report.ok:
            raise ConfigError(report.message, field="subcomplex")
    return complex_, subcomplex


def format_complex(complex_, subcomplex=None):
    lines = []
    for n in range(complex_.dim + 1):
        lines.append("dim {}".format(n))
        for i in range(complex_.count(n)):
            if n == 0:
                lines.append(complex_.label(0, i))
            else:
                refs = " ".join(complex_.label(n - 1, f) for f in complex_.faces[n][i])
                lines.append("{}: {}".format(complex_.label(n, i), refs))
    if subcomplex is not None and not subcomplex.is_empty():
        lines.append("subcomplex")
        for n in range(len(subcomplex.selected)):
            if subcomplex.selected[n]:
                lines.append("{}: {}".format(
                    n, " ".join(complex_.label(n, i) for i in subcomplex.cells(n))))
    return "\n".join(lines) + "\n"
