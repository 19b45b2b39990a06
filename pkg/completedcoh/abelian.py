"""Homomorphisms between finite abelian p-groups given in cyclic coordinates.

A group is a tuple of exponents (b_1, ..., b_m) standing for the sum of the Z/p^{b_i}; a
homomorphism is an integer matrix whose column j is the image of the j-th generator.
Orders are reported as p-exponents.
"""

from .smith_engine import SparseMatrix, local_smith


def _cokernel_exponent(matrix, target, p):
    """log_p of |target / span(columns)|."""
    if not target:
        return 0
    s = max(target)
    if s == 0:
        return 0
    data = {}
    cols = len(matrix[0]) if matrix else 0
    for i, row in enumerate(matrix):
        for j, v in enumerate(row):
            if v % p ** target[i]:
                data[(i, j)] = v
    for i, b in enumerate(target):
        data[(i, cols + i)] = p ** b
    elimination = local_smith(SparseMatrix(len(target), cols + len(target), data, p ** s), p, s)
    found = elimination.row_valuations()
    return sum(found.get(i, s) for i in range(len(target)))


def image_exponent(matrix, target, p):
    """log_p |im|, for the map with the given matrix into the group ``target``."""
    return sum(target) - _cokernel_exponent(matrix, target, p)


def kernel_exponent(matrix, source, target, p):
    return sum(source) - image_exponent(matrix, target, p)


def scale(matrix, factor):
    return [[factor * v for v in row] for row in matrix]


def image_type(matrix, target, p):
    """Cyclic type of the image, as exponents sorted in decreasing order."""
    sizes = []
    k = 0
    current = image_exponent(matrix, target, p)
    while current > 0:
        following = image_exponent(scale(matrix, p ** (k + 1)), target, p)
        sizes.append(current - following)
        current = following
        k += 1
    # sizes[k] = number of cyclic factors of exponent > k
    exponents = []
    for k, count in enumerate(sizes):
        beyond = sizes[k + 1] if k + 1 < len(sizes) else 0
        exponents.extend([k + 1] * (count - beyond))
    return tuple(sorted(exponents, reverse=True))


def is_zero(matrix, target, p):
    return all(v % p ** target[i] == 0 for i, row in enumerate(matrix) for v in row)


def compose(outer, inner):
    """outer o inner as integer matrices."""
    if not outer or not inner:
        rows = len(outer)
        cols = len(inner[0]) if inner else 0
        return [[0] * cols for _ in range(rows)]
    middle = len(inner)
    return [[sum(outer[i][k] * inner[k][j] for k in range(middle))
             for j in range(len(inner[0]))] for i in range(len(outer))]


def identity(size):
    return [[int(i == j) for j in range(size)] for i in range(size)]


def subtract(left, right):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(left, right)]


def is_well_defined(matrix, source, target, p):
    """p^{a_j} times column j must vanish in the target."""
    for j, a in enumerate(source):
        for i, b in enumerate(target):
            if (p ** a * matrix[i][j]) % p ** b:
                return False
    return True


def is_isomorphism(matrix, source, target, p):
    return (sum(source) == sum(target)
            and image_exponent(matrix, target, p) == sum(target))


def reduce_type(exponents, s):
    """Reduction of Z_p^a + sum Z/p^b modulo p^s, encoded as exponents with free = None."""
    out = []
    for e in exponents:
        e = s if e is None else min(e, s)
        if e:
            out.append(e)
    return tuple(sorted(out, reverse=True))

