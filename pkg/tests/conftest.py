"""Shared fixtures and independent brute-force oracles.

Everything here deliberately avoids the stabilizer chain: closures are
computed by breadth-first multiplication of image tuples, and matrix
images ride along as explicit products, so these helpers can serve as
oracles for the chain-based code under test.
"""

import numpy as np
import pytest

from repblock import Permutation, PermutationGroup, natural_perm_rep


def compose_tuples(p, q):
    return tuple(p[x] for x in q)


def closure(degree, gen_image_lists):
    """All group elements as image tuples, by brute-force BFS closure."""
    ident = tuple(range(degree))
    gens = [tuple(g) for g in gen_image_lists]
    seen = {ident}
    frontier = [ident]
    while frontier:
        new = []
        for p in frontier:
            for g in gens:
                q = compose_tuples(g, p)
                if q not in seen:
                    seen.add(q)
                    new.append(q)
        frontier = new
    return seen


def closure_with_images(degree, gen_image_lists, gen_matrices):
    """Map every group element to its matrix image, chain-free.

    BFS closure where each new element's matrix is the product of the
    generator matrix with the parent's matrix; inconsistent assignments
    (images that do not define a homomorphism) raise.
    """
    ident = tuple(range(degree))
    n = gen_matrices[0].shape[0]
    table = {ident: np.eye(n, dtype=gen_matrices[0].dtype)}
    frontier = [ident]
    gens = [(tuple(g), np.asarray(m)) for g, m in zip(gen_image_lists, gen_matrices)]
    while frontier:
        new = []
        for p in frontier:
            for g, mg in gens:
                q = compose_tuples(g, p)
                mq = mg @ table[p]
                if q in table:
                    assert np.linalg.norm(table[q] - mq) < 1e-10, \
                        "generator matrices are not a homomorphism"
                else:
                    table[q] = mq
                    new.append(q)
        frontier = new
    return table


def group_of(degree, image_lists):
    return PermutationGroup(degree, [Permutation(p) for p in image_lists])


def cyclic(n):
    return group_of(n, [list(range(1, n)) + [0]])


def symmetric(n):
    if n == 1:
        return group_of(1, [])
    swap = [1, 0] + list(range(2, n))
    cycle = list(range(1, n)) + [0]
    return group_of(n, [swap, cycle])


def alternating4():
    return group_of(4, [[1, 2, 0, 3], [1, 0, 3, 2]])


def klein4():
    return group_of(4, [[1, 0, 3, 2], [2, 3, 0, 1]])


def dihedral(n):
    rot = list(range(1, n)) + [0]
    refl = list(reversed(range(n)))
    return group_of(n, [rot, refl])


# --- quaternion group -------------------------------------------------------
#
# Unit quaternions {+-1, +-i, +-j, +-k} indexed as axis*2 + (0 if positive
# else 1), axes ordered (1, i, j, k).

_QMUL = {}  # (axis_a, axis_b) -> (sign, axis)
for a in range(4):
    _QMUL[(0, a)] = (1, a)
    _QMUL[(a, 0)] = (1, a)
for a in range(1, 4):
    _QMUL[(a, a)] = (-1, 0)
_QMUL[(1, 2)] = (1, 3)   # i j = k
_QMUL[(2, 1)] = (-1, 3)
_QMUL[(2, 3)] = (1, 1)   # j k = i
_QMUL[(3, 2)] = (-1, 1)
_QMUL[(3, 1)] = (1, 2)   # k i = j
_QMUL[(1, 3)] = (-1, 2)


def _qmul(x, y):
    ax, sx = x // 2, 1 - 2 * (x % 2)
    ay, sy = y // 2, 1 - 2 * (y % 2)
    s, a = _QMUL[(ax, ay)]
    s *= sx * sy
    return a * 2 + (0 if s > 0 else 1)


def _qperm(x):
    """Left multiplication by unit x as a permutation of the 8 units."""
    return [_qmul(x, y) for y in range(8)]


def _qmatrix(x):
    """Left multiplication by unit x on the quaternion algebra, basis (1,i,j,k)."""
    m = np.zeros((4, 4))
    ax, sx = x // 2, 1 - 2 * (x % 2)
    for c in range(4):
        s, a = _QMUL[(ax, c)]
        m[a, c] = s * sx
    return m


def quaternion8():
    """(group, generator matrices): Q8 acting on itself, with the standard
    4x4 real matrices of left multiplication by i and j as generator images."""
    gens = [_qperm(2), _qperm(4)]  # left multiplication by i and by j
    mats = [_qmatrix(2), _qmatrix(4)]
    return group_of(8, gens), mats


# --- regular representations ------------------------------------------------

def regular_group(group: PermutationGroup):
    """The left-regular permutation action of ``group`` on its own elements."""
    elems = sorted(p.images for p in group.elements())
    index = {e: k for k, e in enumerate(elems)}
    gens = []
    for g in group.generators:
        gens.append([index[compose_tuples(g.images, e)] for e in elems])
    return group_of(len(elems), gens)


def regular_rep(group: PermutationGroup, field="complex"):
    return natural_perm_rep(regular_group(group), field)


def brute_average(elements, matrices_by_element, x):
    """Reynolds average of x over explicitly enumerated elements."""
    acc = np.zeros_like(np.asarray(x, dtype=complex))
    for e in elements:
        u = matrices_by_element[e]
        acc = acc + u @ x @ u.conj().T
    return acc / len(elements)


def perm_matrix(images, dtype=float):
    n = len(images)
    m = np.zeros((n, n), dtype=dtype)
    for k in range(n):
        m[images[k], k] = 1
    return m


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
