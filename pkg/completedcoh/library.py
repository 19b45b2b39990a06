"""Standard Delta-complexes used by the bundled examples and the test suite."""

import itertools
import logging

from .complex_core import DeltaComplex, Subcomplex, ensure_valid

logger = logging.getLogger(__name__)


def circle():
    return DeltaComplex.build(1, [(0, 0)], labels=(("v",), ("e",)))


def torus():
    """One vertex, edges a, b, c (c the diagonal), triangles T1 = (b, c, a), T2 = (a, c, b)."""
    return DeltaComplex.build(
        1,
        [(0, 0), (0, 0), (0, 0)],
        [(1, 2, 0), (0, 2, 1)],
        labels=(("v",), ("a", "b", "c"), ("T1", "T2")))


TORUS_ELEMENTS = {"a": (1, 0), "b": (0, 1), "c": (1, 1)}


def cylinder():
    """S^1 x [0,1]: bottom circle at vertex a, top circle at vertex b, rungs v and d from a to b."""
    return DeltaComplex.build(
        2,
        [(0, 0), (1, 1), (1, 0), (1, 0)],
        [(2, 3, 0), (1, 3, 2)],
        labels=(("a", "b"), ("bottom", "top", "v", "d"), ("T1", "T2")))


def cylinder_boundary(complex_=None):
    complex_ = complex_ or cylinder()
    return Subcomplex.from_cells(complex_, {0: ["a", "b"], 1: ["bottom", "top"]})


def solid_triangle():
    return DeltaComplex.build(
        3,
        [(1, 0), (2, 0), (2, 1)],
        [(2, 1, 0)],
        labels=(("v0", "v1", "v2"), ("e01", "e02", "e12"), ("T",)))


def hollow_triangle():
    return DeltaComplex.build(
        3,
        [(1, 0), (2, 0), (2, 1)],
        labels=(("v0", "v1", "v2"), ("e01", "e02", "e12")))


def wedge_of_circles(k):
    return DeltaComplex.build(
        1, [(0, 0)] * k,
        labels=(("v",), tuple("e{}".format(i) for i in range(k))))


def lattice_quotient(simplices, multiply, invert, names=None):
    """Delta-complex of a lattice quotient from a fundamental domain.

    ``simplices`` lists the top simplices of a triangulated fundamental domain as ordered
    vertex tuples whose coordinates are the group elements carrying the base point there.
    Two simplices are identified exactly when they have the same sequence of consecutive
    edge elements P_i^-1 P_{i+1}; the triangulation must be invariant under the group.
    Returns the complex and the element carried by each edge label.
    """
    names = names or {}

    def key(vertices):
        return tuple(multiply(invert(a), b) for a, b in zip(vertices, vertices[1:]))

    def rebuild(k):
        # vertex list from key, starting at the identity
        point = None
        out = []
        for step in k:
            point = step if point is None else multiply(point, step)
            out.append(point)
        return out

    top = len(simplices[0]) - 1
    classes = [dict() for _ in range(top + 1)]
    for simplex in simplices:
        classes[top].setdefault(key(simplex), None)
    for n in range(top, 0, -1):
        ordered = sorted(classes[n]) if n < top else list(classes[n])
        for k in ordered:
            identity = multiply(invert(k[0]), k[0]) if k else None
            vertices = [identity] + rebuild(k)
            for i in range(n + 1):
                classes[n - 1].setdefault(key(vertices[:i] + vertices[i + 1:]), None)
    order = [sorted(classes[n]) if n < top else list(classes[top]) for n in range(top + 1)]
    index = [{k: i for i, k in enumerate(level)} for level in order]
    higher = []
    for n in range(1, top + 1):
        cells = []
        for k in order[n]:
            identity = multiply(invert(k[0]), k[0])
            vertices = [identity] + rebuild(k)
            cells.append(tuple(index[n - 1][key(vertices[:i] + vertices[i + 1:])]
                               for i in range(n + 1)))
        higher.append(cells)
    edge_names = []
    for (g,) in order[1]:
        edge_names.append(names.get(g, "g" + "_".join(str(c) for c in g)))
    prefixes = {2: "t", 3: "k"}
    labels = [("v",), tuple(edge_names)]
    for n in range(2, top + 1):
        labels.append(tuple("{}{}".format(prefixes.get(n, "c"), i) for i in range(len(order[n]))))
    complex_ = ensure_valid(DeltaComplex.build(len(order[0]), *higher, labels=labels))
    elements = {name: g for name, (g,) in zip(edge_names, order[1])}
    logger.debug("lattice quotient with cells %s", complex_.cells_per_dim)
    return complex_, elements


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _neg(a):
    return tuple(-x for x in a)


_CUBE_NAMES = {(1, 0, 0): "x", (0, 1, 0): "y", (0, 0, 1): "z", (1, 1, 0): "xy",
               (1, 0, 1): "xz", (0, 1, 1): "yz", (1, 1, 1): "xyz", (0, 1, -1): "w"}


def torus3():
    """T^3 from the unit cube cut into six tetrahedra around the main diagonal."""
    tets = []
    for perm in itertools.permutations(range(3)):
        point = (0, 0, 0)
        path = [point]
        for axis in perm:
            point = tuple(c + (1 if i == axis else 0) for i, c in enumerate(point))
            path.append(point)
        tets.append(tuple(path))
    return lattice_quotient(sorted(tets), _add, _neg, _CUBE_NAMES)


def _heis_mul(u, v):
    return (u[0] + v[0], u[1] + v[1], u[2] + v[2] + u[0] * v[1])


def _heis_inv(u):
    return (-u[0], -u[1], -u[2] + u[0] * u[1])


# Cube triangulation compatible with the sheared gluing (x, y, z) ~ (x+1, y, z+y):
# anti-diagonal on the face x = 0, main diagonal on x = 1.
_NIL_TETS = (
    ((0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 1, 1)),
    ((0, 0, 0), (1, 0, 0), (1, 0, 1), (1, 1, 1)),
    ((0, 0, 0), (0, 0, 1), (1, 0, 1), (1, 1, 1)),
    ((0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 1, 1)),
    ((0, 0, 0), (0, 1, 0), (1, 1, 0), (1, 1, 1)),
    ((0, 0, 1), (0, 1, 0), (0, 1, 1), (1, 1, 1)),
)


def nilmanifold():
    """Heisenberg nilmanifold: the unit cube with the Heisenberg identifications.

    Returns the complex (1 vertex, 7 edges, 12 triangles, 6 tetrahedra) and the Heisenberg
    element (a, b, c) carried by each edge.
    """
    return lattice_quotient(_NIL_TETS, _heis_mul, _heis_inv, _CUBE_NAMES)


def _klein_mul(u, v):
    sign = -1 if u[1] % 2 else 1
    return (u[0] + sign * v[0], u[1] + v[1])


def _klein_inv(u):
    sign = -1 if u[1] % 2 else 1
    return (-sign * u[0], -u[1])


def klein_bottle():
    """One vertex, three edges, two triangles; the square with one side pair reversed."""
    return lattice_quotient(
        (((0, 0), (1, 0), (1, 1)), ((0, 0), (1, 1), (0, 1))),
        _klein_mul, _klein_inv, {(1, 0): "a", (0, 1): "b", (1, 1): "c"})


LIBRARY = {
    "circle": circle,
    "torus": torus,
    "torus3": lambda: torus3()[0],
    "cylinder": cylinder,
    "solid_triangle": solid_triangle,
    "hollow_triangle": hollow_triangle,
    "nilmanifold": lambda: nilmanifold()[0],
    "klein_bottle": lambda: klein_bottle()[0],
}


def library_complex(name):
    from .errors import ComplexError
    if name.startswith("wedge"):
        count = name[len("wedge"):].strip("_") or "2"
        if count.isdigit():
            return wedge_of_circles(int(count))
    try:
        return LIBRARY[name]()
    except KeyError:
        raise ComplexError("unknown library complex {!r}; known: {}".format(
            name, ", ".join(sorted(LIBRARY)))) from None
