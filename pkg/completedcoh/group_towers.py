"""Towers of finite p-groups L_0 <- L_1 <- ... <- L_R with surjective projections.

Elements of a level are indexed 0..|L_r|-1 in lexicographic order of their normal forms
(tuples of integers).  Multiplication rows are computed lazily and cached per level.
"""

import itertools
import logging
import threading
from collections import deque
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from sympy import isprime

from .errors import NonNormalSubgroupError, TowerError

logger = logging.getLogger(__name__)


class LevelGroup:
    """One finite level of a tower, with elements indexed by sorted normal form."""

    def __init__(self, level, elements, multiply, invert, identity):
        self.level = level
        self._elements = tuple(sorted(elements))
        self._index = {nf: i for i, nf in enumerate(self._elements)}
        self._multiply = multiply
        self._invert = invert
        self.identity = self._index[identity]
        self._rows: Dict[int, Tuple[int, ...]] = {}
        self._inverses: Optional[Tuple[int, ...]] = None
        self._lock = threading.Lock()

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_lock"] = None
        state["_rows"] = {}
        state["_inverses"] = None
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()

    @property
    def order(self):
        return len(self._elements)

    def __len__(self):
        return len(self._elements)

    def element(self, index):
        return self._elements[index]

    @property
    def elements(self):
        return self._elements

    def index_of(self, nf):
        try:
            return self._index[tuple(nf)]
        except KeyError:
            raise TowerError("{} is not an element of level {}".format(nf, self.level),
                             level=self.level) from None

    def __contains__(self, nf):
        return tuple(nf) in self._index

    def row(self, g):
        """Left multiplication by g as a tuple: row(g)[x] = g*x."""
        cached = self._rows.get(g)
        if cached is not None:
            return cached
        with self._lock:
            cached = self._rows.get(g)
            if cached is None:
                gnf = self._elements[g]
                cached = tuple(self._index[self._multiply(gnf, xnf)] for xnf in self._elements)
                self._rows[g] = cached
        return cached

    def mul(self, a, b):
        return self.row(a)[b]

    def inv(self, a):
        if self._inverses is None:
            with self._lock:
                if self._inverses is None:
                    self._inverses = tuple(self._index[self._invert(nf)]
                                           for nf in self._elements)
        return self._inverses[a]

    def conjugate(self, g, h):
        return self.mul(self.mul(g, h), self.inv(g))

    def left_translation(self, g):
        """Permutation x -> g^-1 x; (g.m)(x) = m(g^-1 x)."""
        return self.row(self.inv(g))

    def right_translation(self, h):
        """Permutation x -> x h; (m.h)(x) = m(x h)."""
        return tuple(self.mul(x, h) for x in range(self.order))

    def generated_subgroup(self, generators):
        """Subgroup generated by ``generators`` (indices), found by breadth-first search."""
        gens = sorted(set(generators) - {self.identity})
        seen = {self.identity}
        queue = deque([self.identity])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return frozenset(seen)

    def is_abelian(self, generators=None):
        gens = range(self.order) if generators is None else generators
        gens = list(gens)
        return all(self.mul(a, b) == self.mul(b, a) for a in gens for b in gens)


@dataclass(frozen=True)
class TowerElement:
    """A compatible family of normal forms, one per level 0..depth."""

    images: Tuple[Tuple[int, ...], ...]

    def at(self, r):
        return self.images[r]

    def index(self, tower, r):
        return tower.level(r).index_of(self.images[r])


class GroupTower:
    """Base class: subclasses supply normal forms, multiplication and projection."""

    kind = "tower"

    def __init__(self, p, depth):
        if not isprime(p):
            raise TowerError("tower prime must be prime, got {}".format(p))
        if depth < 0:
            raise TowerError("tower depth must be non-negative")
        self.p = p
        self.depth = depth
        self._levels: Dict[int, LevelGroup] = {}
        self._projections: Dict[int, Tuple[int, ...]] = {}
        self._lock = threading.Lock()

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_lock"] = None
        state["_levels"] = {}
        state["_projections"] = {}
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()

    # subclass hooks -------------------------------------------------------------------
    def _level_elements(self, r) -> Iterable[Tuple[int, ...]]:
        raise NotImplementedError

    def _multiply(self, r) -> Callable:
        raise NotImplementedError

    def _invert(self, r) -> Callable:
        raise NotImplementedError

    def _identity(self, r) -> Tuple[int, ...]:
        raise NotImplementedError

    def _project_nf(self, r, nf) -> Tuple[int, ...]:
        """Image in level r-1 of a level-r normal form."""
        raise NotImplementedError

    def element(self, value) -> TowerElement:
        raise NotImplementedError

    def generators(self, r) -> List[int]:
        return [x for x in range(self.level(r).order) if x != self.level(r).identity]

    # shared machinery ------------------------------------------------------------------
    def _check_level(self, r):
        if not 0 <= r <= self.depth:
            raise TowerError("level {} outside 0..{}".format(r, self.depth), level=r)

    def level(self, r) -> LevelGroup:
        self._check_level(r)
        group = self._levels.get(r)
        if group is None:
            with self._lock:
                group = self._levels.get(r)
                if group is None:
                    group = LevelGroup(r, list(self._level_elements(r)), self._multiply(r),
                                       self._invert(r), self._identity(r))
                    logger.debug("%s level %d: order %d", self.kind, r, group.order)
                    self._levels[r] = group
        return group

    def order(self, r):
        return self.level(r).order

    def projection_table(self, r):
        """Indices in level r-1 of the images of the level-r elements."""
        if r < 1:
            raise TowerError("level 0 has no projection", level=r)
        table = self._projections.get(r)
        if table is None:
            upper, lower = self.level(r), self.level(r - 1)
            table = tuple(lower.index_of(self._project_nf(r, nf)) for nf in upper.elements)
            with self._lock:
                self._projections[r] = table
        return table

    def project(self, r, x):
        return self.projection_table(r)[x]

    def project_to(self, r, lower, x):
        if lower > r:
            raise TowerError("cannot project level {} up to {}".format(r, lower), level=r)
        while r > lower:
            x = self.project(r, x)
            r -= 1
        return x

    def element_from_top(self, nf) -> TowerElement:
        """The compatible family determined by a normal form at the top level."""
        images = [tuple(nf)]
        for r in range(self.depth, 0, -1):
            images.append(self._project_nf(r, images[-1]))
        return TowerElement(tuple(reversed(images)))

    def describe(self):
        return "{}(p={}, depth={})".format(self.kind, self.p, self.depth)


def validate_tower(tower):
    """Check p-power orders, trivial L_0 and surjective homomorphic projections."""
    if tower.order(0) != 1:
        raise TowerError("level 0 must be trivial", level=0)
    for r in range(1, tower.depth + 1):
        group = tower.level(r)
        order = group.order
        while order % tower.p == 0:
            order //= tower.p
        if order != 1:
            raise TowerError("level {} has order {}, not a power of {}".format(
                r, group.order, tower.p), level=r)
        table = tower.projection_table(r)
        lower = tower.level(r - 1)
        if set(table) != set(range(lower.order)):
            raise TowerError("projection from level {} is not surjective".format(r), level=r)
        for a in range(group.order):
            for b in range(group.order):
                if table[group.mul(a, b)] != lower.mul(table[a], table[b]):
                    raise TowerError("projection from level {} is not a homomorphism".format(r),
                                     level=r)
    return True


class AbelianTower(GroupTower):
    """L_r = (Z/p^r)^N with reduction maps."""

    kind = "abelian"

    def __init__(self, rank, p, depth):
        super().__init__(p, depth)
        if rank < 0:
            raise TowerError("rank must be non-negative")
        self.rank = rank

    def _level_elements(self, r):
        return itertools.product(range(self.p ** r), repeat=self.rank)

    def _multiply(self, r):
        q = self.p ** r
        return lambda a, b: tuple((x + y) % q for x, y in zip(a, b))

    def _invert(self, r):
        q = self.p ** r
        return lambda a: tuple((-x) % q for x in a)

    def _identity(self, r):
        return (0,) * self.rank

    def _project_nf(self, r, nf):
        q = self.p ** (r - 1)
        return tuple(x % q for x in nf)

    def element(self, value):
        value = _as_ints(value)
        if len(value) != self.rank:
            raise TowerError("abelian rank {} needs {} coordinates, got {}".format(
                self.rank, self.rank, list(value)))
        return TowerElement(tuple(tuple(v % self.p ** r for v in value)
                                  for r in range(self.depth + 1)))

    def generators(self, r):
        group = self.level(r)
        if r == 0:
            return []
        return [group.index_of(tuple(1 if i == k else 0 for i in range(self.rank)))
                for k in range(self.rank)]

    def describe(self):
        return "abelian(rank={}, p={}, depth={})".format(self.rank, self.p, self.depth)


def _heis_mul(q):
    def multiply(u, v):
        return ((u[0] + v[0]) % q, (u[1] + v[1]) % q, (u[2] + v[2] + u[0] * v[1]) % q)
    return multiply


def _heis_inv(q):
    def invert(u):
        return ((-u[0]) % q, (-u[1]) % q, (-u[2] + u[0] * u[1]) % q)
    return invert


class HeisenbergTower(GroupTower):
    """Unipotent upper-triangular 3x3 matrices over Z/p^r, written (a, b, c)."""

    kind = "heisenberg"

    def _level_elements(self, r):
        return itertools.product(range(self.p ** r), repeat=3)

    def _multiply(self, r):
        return _heis_mul(self.p ** r)

    def _invert(self, r):
        return _heis_inv(self.p ** r)

    def _identity(self, r):
        return (0, 0, 0)

    def _project_nf(self, r, nf):
        q = self.p ** (r - 1)
        return tuple(x % q for x in nf)

    def element(self, value):
        value = _as_ints(value)
        if len(value) != 3:
            raise TowerError("heisenberg elements are (a, b, c), got {}".format(list(value)))
        return TowerElement(tuple(tuple(v % self.p ** r for v in value)
                                  for r in range(self.depth + 1)))

    def generators(self, r):
        if r == 0:
            return []
        group = self.level(r)
        return [group.index_of((1, 0, 0)), group.index_of((0, 1, 0))]

    def center(self):
        return closure_of(self, [self.element((0, 0, 1))])


def make_abelian_tower(rank, p, depth):
    """Z_p^rank filtered by p^r Z_p^rank."""
    return AbelianTower(rank, p, depth)


def make_heisenberg_tower(p, depth):
    return HeisenbergTower(p, depth)


def center_subtower(tower):
    """The center {(0, 0, c)} of a Heisenberg tower as a normal subtower."""
    if not isinstance(tower, HeisenbergTower):
        raise TowerError("only heisenberg towers have a known center, got {}".format(
            tower.describe()))
    return tower.center()


class CustomTower(GroupTower):
    """A tower given by Cayley tables per level and projection tables."""

    kind = "custom"

    def __init__(self, p, tables, projections):
        super().__init__(p, len(tables))
        self._tables = [((0,),)] + [tuple(tuple(row) for row in t) for t in tables]
        self._proj = [()] + [tuple(pr) for pr in projections]
        if len(self._proj) != len(self._tables):
            raise TowerError("need one projection table per level")
        for r in range(1, self.depth + 1):
            n = len(self._tables[r])
            if any(len(row) != n for row in self._tables[r]):
                raise TowerError("level {} table is not square".format(r), level=r)
            if len(self._proj[r]) != n:
                raise TowerError("level {} projection has wrong length".format(r), level=r)
            _check_table(self._tables[r], r)

    def _level_elements(self, r):
        return [(i,) for i in range(len(self._tables[r]))]

    def _multiply(self, r):
        table = self._tables[r]
        return lambda a, b: (table[a[0]][b[0]],)

    def _invert(self, r):
        table = self._tables[r]
        e = _table_identity(table)
        inverses = {}
        for a in range(len(table)):
            inverses[a] = next(b for b in range(len(table)) if table[a][b] == e)
        return lambda a: (inverses[a[0]],)

    def _identity(self, r):
        return (_table_identity(self._tables[r]),)

    def _project_nf(self, r, nf):
        return (self._proj[r][nf[0]],)

    def element(self, value):
        value = _as_ints(value)
        if len(value) != self.depth:
            raise TowerError("custom elements list one index per level 1..{}".format(self.depth))
        images = [(0,)] + [(v,) for v in value]
        for r in range(1, self.depth + 1):
            if not 0 <= value[r - 1] < len(self._tables[r]):
                raise TowerError("index {} outside level {}".format(value[r - 1], r), level=r)
            if r > 1 and self._proj[r][value[r - 1]] != value[r - 2]:
                raise TowerError("indices {} are not compatible under projection".format(value),
                                 level=r)
        return TowerElement(tuple(images))


def _table_identity(table):
    n = len(table)
    for e in range(n):
        if all(table[e][x] == x and table[x][e] == x for x in range(n)):
            return e
    raise TowerError("table has no identity")


def _check_table(table, r):
    n = len(table)
    e = _table_identity(table)
    for a in range(n):
        if sorted(table[a]) != list(range(n)):
            raise TowerError("level {} table row {} is not a permutation".format(r, a), level=r)
        if not any(table[a][b] == e for b in range(n)):
            raise TowerError("element {} has no inverse at level {}".format(a, r), level=r)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if table[table[a][b]][c] != table[a][table[b][c]]:
                    raise TowerError("level {} table is not associative".format(r), level=r)


def make_custom_tower(p, tables, projections):
    tower = CustomTower(p, tables, projections)
    validate_tower(tower)
    return tower


@dataclass(frozen=True)
class SubTower:
    """Compatible subgroups H_r of a tower, stored as index sets per level."""

    parent: GroupTower
    subgroups: Tuple[frozenset, ...]

    def index(self, r):
        return self.parent.order(r) // len(self.subgroups[r])

    def contains(self, r, x):
        return x in self.subgroups[r]

    def is_full(self):
        return all(len(h) == self.parent.order(r) for r, h in enumerate(self.subgroups))

    def normality_witness(self, r):
        """First (g, h) with g h g^-1 outside H_r, or None when H_r is normal."""
        group = self.parent.level(r)
        members = sorted(self.subgroups[r])
        for g in self.parent.generators(r):
            for h in members:
                if group.conjugate(g, h) not in self.subgroups[r]:
                    return group.element(g), group.element(h)
        return None

    def is_normal(self):
        return all(self.normality_witness(r) is None for r in range(self.parent.depth + 1))

    def check_normal(self):
        for r in range(self.parent.depth + 1):
            witness = self.normality_witness(r)
            if witness is not None:
                raise NonNormalSubgroupError(
                    "subgroup is not normal at level {}: g={} conjugates h={} outside".format(
                        r, witness[0], witness[1]), level=r, witness=witness)
        return True


def closure_of(tower, elements):
    """The smallest subtower containing the given tower elements."""
    levels = []
    for r in range(tower.depth + 1):
        group = tower.level(r)
        levels.append(group.generated_subgroup([e.index(tower, r) for e in elements]))
    return SubTower(parent=tower, subgroups=tuple(levels))


class SubgroupTower(GroupTower):
    """The subtower H_r viewed as a tower in its own right; normal forms are the parent's."""

    kind = "subgroup"

    def __init__(self, sub: SubTower):
        parent = sub.parent
        super().__init__(parent.p, parent.depth)
        self.parent = parent
        self.sub = sub

    def _level_elements(self, r):
        group = self.parent.level(r)
        return [group.element(x) for x in self.sub.subgroups[r]]

    def _multiply(self, r):
        return self.parent._multiply(r)

    def _invert(self, r):
        return self.parent._invert(r)

    def _identity(self, r):
        return self.parent._identity(r)

    def _project_nf(self, r, nf):
        return self.parent._project_nf(r, nf)

    def element(self, value):
        element = value if isinstance(value, TowerElement) else self.parent.element(value)
        for r in range(self.depth + 1):
            if element.images[r] not in self.level(r):
                raise TowerError("{} is not in the subtower at level {}".format(
                    element.images[r], r), level=r)
        return element

    def describe(self):
        return "subgroup of {}".format(self.parent.describe())


def tower_from_subtower(sub):
    return SubgroupTower(sub)


class QuotientTower(GroupTower):
    """L_r / N_r; each coset is named by its smallest parent normal form."""

    kind = "quotient"

    def __init__(self, normal: SubTower):
        parent = normal.parent
        super().__init__(parent.p, parent.depth)
        self.parent = parent
        self.normal = normal
        self._reps: Dict[int, Tuple[Tuple[int, ...], ...]] = {}

    def __getstate__(self):
        state = super().__getstate__()
        state["_reps"] = {}
        return state

    def representatives(self, r):
        """rep[x] = smallest normal form in the coset x N_r, for every parent index x."""
        reps = self._reps.get(r)
        if reps is None:
            group = self.parent.level(r)
            members = sorted(self.normal.subgroups[r])
            reps = tuple(min(group.element(group.mul(x, n)) for n in members)
                         for x in range(group.order))
            self._reps[r] = reps
        return reps

    def rep(self, r, nf):
        return self.representatives(r)[self.parent.level(r).index_of(nf)]

    def _level_elements(self, r):
        return set(self.representatives(r))

    def _multiply(self, r):
        multiply = self.parent._multiply(r)
        return lambda a, b: self.rep(r, multiply(a, b))

    def _invert(self, r):
        invert = self.parent._invert(r)
        return lambda a: self.rep(r, invert(a))

    def _identity(self, r):
        return self.rep(r, self.parent._identity(r))

    def _project_nf(self, r, nf):
        return self.rep(r - 1, self.parent._project_nf(r, nf))

    def element(self, value):
        element = value if isinstance(value, TowerElement) else self.parent.element(value)
        return TowerElement(tuple(self.rep(r, nf) for r, nf in enumerate(element.images)))

    def generators(self, r):
        group = self.level(r)
        parent = self.parent.level(r)
        gens = {group.index_of(self.rep(r, parent.element(g))) for g in self.parent.generators(r)}
        return sorted(gens - {group.identity})

    def describe(self):
        return "quotient of {}".format(self.parent.describe())


def quotient_tower(tower, normal):
    """L_r / N_r as a tower; raises NonNormalSubgroupError with a witness."""
    if normal.parent is not tower:
        raise TowerError("subtower belongs to a different tower")
    normal.check_normal()
    return QuotientTower(normal)


def _as_ints(value):
    if isinstance(value, int):
        return (value,)
    if isinstance(value, str):
        value = value.replace(",", " ").split()
    try:
        return tuple(int(v) for v in value)
    except (TypeError, ValueError):
        raise TowerError("cannot read group element {!r}".format(value)) from None
