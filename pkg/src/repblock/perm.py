"""Finite permutation groups backed by a deterministic stabilizer chain.

A group is built from generating permutations with a deterministic
Schreier-Sims procedure.  The chain stores, for each base point, a
transversal of coset representatives; these give the group order, a
membership test by sifting, exact uniform sampling, and a factorization
of the group into a cartesian product of small sets (one per base point)
that the commutant projection uses to average over the whole group at a
cost proportional to the sum of transversal sizes instead of the group
order.

Points are 0-based.  Base points are the smallest moved points of the
successive stabilizer subgroups, in increasing order, so the chain is
canonical: it does not depend on the order in which generators are given.
"""

from __future__ import annotations

import itertools
from functools import reduce


class Permutation:
    """A permutation of {0, ..., d-1}, stored as the tuple of images.

    ``images[k]`` is the image of point ``k``.  Composition follows the
    usual function convention: ``(p * q)(k) = p(q(k))``, i.e. ``q`` acts
    first.
    """

    __slots__ = ("_images",)

    def __init__(self, images):
        imgs = tuple(int(x) for x in images)
        n = len(imgs)
        if n == 0:
            raise ValueError("a permutation needs degree >= 1")
        seen = [False] * n
        for x in imgs:
            if not 0 <= x < n or seen[x]:
                raise ValueError(f"images {imgs!r} are not a permutation of 0..{n - 1}")
            seen[x] = True
        self._images = imgs

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(range(degree))

    @property
    def images(self) -> tuple:
        return self._images

    @property
    def degree(self) -> int:
        return len(self._images)

    def __call__(self, point: int) -> int:
        return self._images[point]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if not isinstance(other, Permutation):
            return NotImplemented
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch: {self.degree} != {other.degree}")
        p, q = self._images, other._images
        out = object.__new__(Permutation)
        out._images = tuple(p[x] for x in q)
        return out

    def inverse(self) -> "Permutation":
        inv = [0] * len(self._images)
        for i, j in enumerate(self._images):
            inv[j] = i
        out = object.__new__(Permutation)
        out._images = tuple(inv)
        return out

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self._images))

    def smallest_moved(self):
        """Smallest point not fixed, or None for the identity."""
        for i, j in enumerate(self._images):
            if i != j:
                return i
        return None

    def __eq__(self, other):
        return isinstance(other, Permutation) and self._images == other._images

    def __hash__(self):
        return hash(self._images)

    def __repr__(self):
        return f"Permutation({list(self._images)!r})"


def identity(degree: int) -> Permutation:
    return Permutation.identity(degree)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Composition applying ``q`` first, then ``p``."""
    return p * q


def inverse(p: Permutation) -> Permutation:
    return p.inverse()


# ---------------------------------------------------------------------------
# Stabilizer chain construction.
#
# The builder works on (images, word) pairs, where ``word`` expresses the
# permutation as a product of the *original* generators: letter +i stands for
# generator i-1, letter -i for its inverse, leftmost letter applied last.
# Words are what later lets a representation evaluate the matrix image of any
# transversal element from the generator images alone.
# ---------------------------------------------------------------------------


class _Level:
    __slots__ = ("point", "gens", "transversal")

    def __init__(self, point):
        self.point = point
        self.gens = []          # strong generators fixing all earlier base points
        self.transversal = {}   # orbit point -> (images, word), word maps base point there


def _min_moved(images):
    for i, j in enumerate(images):
        if i != j:
            return i
    return None


def _build_chain(degree, gen_words):
    ident = tuple(range(degree))
    levels: list[_Level] = []

    def mul(a, b):
        pa, wa = a
        pb, wb = b
        return tuple(pa[x] for x in pb), wa + wb

    def inv(a):
        p, w = a
        q = [0] * degree
        for i, j in enumerate(p):
            q[j] = i
        return tuple(q), tuple(-x for x in reversed(w))

    def rebuild_transversal(lvl):
        t = {lvl.point: (ident, ())}
        frontier = [lvl.point]
        while frontier:
            grown = []
            for a in frontier:
                ua = t[a]
                for s in lvl.gens:
                    b = s[0][a]
                    if b not in t:
                        t[b] = mul(s, ua)
                        grown.append(b)
            frontier = sorted(set(grown))
        lvl.transversal = t

    def sift(wp, start):
        cur = wp
        for l in range(start, len(levels)):
            lvl = levels[l]
            b = cur[0][lvl.point]
            if b == lvl.point:
                continue
            if b not in lvl.transversal:
                return cur
            cur = mul(inv(lvl.transversal[b]), cur)
        return cur

    def assign(wp, start):
        """Register a strong generator at the levels it belongs to.

        Walks down from ``start`` adding ``wp`` to each level whose base
        point it fixes, stopping at the first level whose base point it
        moves (creating that level if needed).  If ``wp`` moves a point
        smaller than an existing base point, that level is re-rooted at
        the smaller point and the deeper part of the chain is folded back
        into it, to keep the base canonical.  Returns the level index at
        which verification must resume.
        """
        p = _min_moved(wp[0])
        l = start
        while True:
            if l == len(levels):
                lvl = _Level(p)
                lvl.gens.append(wp)
                levels.append(lvl)
                return l
            lvl = levels[l]
            if p < lvl.point:
                merged = list(lvl.gens)
                for deeper in levels[l + 1:]:
                    merged.extend(deeper.gens)
                merged.append(wp)
                del levels[l:]
                nl = _Level(p)
                nl.gens = merged
                levels.append(nl)
                return l
            lvl.gens.append(wp)
            if wp[0][lvl.point] != lvl.point:
                return l
            l += 1

    for wp in gen_words:
        if wp[0] != ident:
            assign(wp, 0)

    # Verify Schreier's condition level by level, deepest first; a failed
    # sift adds the residue as a new strong generator and resumes at the
    # deepest level it touched.
    l = len(levels) - 1
    while l >= 0:
        rebuild_transversal(levels[l])
        lvl = levels[l]
        residue = None
        for a in sorted(lvl.transversal):
            ua = lvl.transversal[a]
            for s in lvl.gens:
                ub = lvl.transversal[s[0][a]]
                sg = mul(inv(ub), mul(s, ua))
                if sg[0] == ident:
                    continue
                res = sift(sg, l + 1)
                if res[0] != ident:
                    residue = res
                    break
            if residue is not None:
                break
        if residue is not None:
            l = assign(residue, l + 1)
        else:
            l -= 1

    return levels


class PermutationGroup:
    """Permutation group with a deterministic stabilizer chain.

    Instances are immutable once constructed and safe to share across
    threads; random-number state is owned by callers and passed into
    :meth:`sample`.

    Attributes
    ----------
    degree : int
    generators : tuple of Permutation
        The generators as given (identities included).
    base : tuple of int
        Increasing sequence of base points; ``base[i]`` is the smallest
        point moved by the stabilizer of ``base[:i]``.
    transversals : tuple of dict
        One map per base point, sending each orbit point ``b`` to a coset
        representative ``u`` with ``u(base[i]) == b``.
    transversal_words : tuple of dict
        The same representatives as words over the original generators
        (letter +i = generator i-1, -i = its inverse, leftmost applied
        last).  Used to carry matrix images along the chain.
    """

    def __init__(self, degree: int, generators):
        degree = int(degree)
        if degree < 1:
            raise ValueError("degree must be >= 1")
        gens = tuple(generators)
        for g in gens:
            if not isinstance(g, Permutation):
                raise TypeError(f"not a Permutation: {g!r}")
            if g.degree != degree:
                raise ValueError(f"generator degree {g.degree} != group degree {degree}")
        self.degree = degree
        self.generators = gens

        levels = _build_chain(degree, [(g.images, (i + 1,)) for i, g in enumerate(gens)])
        self.base = tuple(lvl.point for lvl in levels)
        transversals = []
        words = []
        for lvl in levels:
            tmap, wmap = {}, {}
            for point, (imgs, word) in lvl.transversal.items():
                q = object.__new__(Permutation)
                q._images = imgs
                tmap[point] = q
                wmap[point] = word
            transversals.append(tmap)
            words.append(wmap)
        self.transversals = tuple(transversals)
        self.transversal_words = tuple(words)
        self._orbits = tuple(tuple(sorted(t)) for t in self.transversals)

    def order(self) -> int:
        n = 1
        for t in self.transversals:
            n *= len(t)
        return n

    def sift(self, p: Permutation) -> Permutation:
        """Strip ``p`` through the chain; members reduce to the identity."""
        if p.degree != self.degree:
            raise ValueError(f"degree mismatch: {p.degree} != {self.degree}")
        cur = p
        for point, t in zip(self.base, self.transversals):
            b = cur(point)
            if b == point:
                continue
            if b not in t:
                return cur
            cur = t[b].inverse() * cur
        return cur

    def contains(self, p: Permutation) -> bool:
        return self.sift(p).is_identity()

    __contains__ = contains

    def factorize(self, p: Permutation):
        """Decompose a member into chain coordinates.

        Returns one ``(level, orbit_point)`` pair per chain level, such
        that ``p`` equals the left-to-right product of the corresponding
        transversal representatives.  Raises ValueError for non-members.
        """
        if p.degree != self.degree:
            raise ValueError(f"degree mismatch: {p.degree} != {self.degree}")
        coords = []
        cur = p
        for l, (point, t) in enumerate(zip(self.base, self.transversals)):
            b = cur(point)
            if b not in t:
                raise ValueError(f"{p!r} is not a member of this group")
            coords.append((l, b))
            if b != point:
                cur = t[b].inverse() * cur
        if not cur.is_identity():
            raise ValueError(f"{p!r} is not a member of this group")
        return coords

    def sample(self, rng) -> Permutation:
        """Exactly uniform random element.

        Draws one coset representative uniformly and independently per
        transversal and composes them; uniqueness of the factorization
        makes the product uniform over the group.
        """
        factors = []
        for orbit, t in zip(self._orbits, self.transversals):
            factors.append(t[orbit[rng.integers(len(orbit))]])
        if not factors:
            return Permutation.identity(self.degree)
        return reduce(lambda a, b: a * b, factors)

    def transversal_sets(self):
        """Factorization of the group into a product of transversal sets.

        Returns sets ``[T_1, ..., T_v]`` such that every group element is
        uniquely a product ``t_v * ... * t_1`` with ``t_i`` in ``T_i``;
        element order inside each set follows the sorted orbit points.
        ``T_v`` is the top of the chain, so nesting partial averages from
        ``T_1`` outward reproduces the full group average.
        """
        sets = []
        for orbit, t in zip(self._orbits, self.transversals):
            sets.append([t[b] for b in orbit])
        sets.reverse()
        return sets

    def elements(self):
        """Iterate over all elements (deterministic order, lazily)."""
        if not self.transversals:
            yield Permutation.identity(self.degree)
            return
        pools = [[t[b] for b in orbit] for orbit, t in zip(self._orbits, self.transversals)]
        for combo in itertools.product(*pools):
            yield reduce(lambda a, b: a * b, combo)

    def __repr__(self):
        return (f"PermutationGroup(degree={self.degree}, order={self.order()}, "
                f"base={list(self.base)})")


def group_from_generators(degree: int, gens) -> PermutationGroup:
    """Build the group generated by ``gens`` acting on 0..degree-1."""
    return PermutationGroup(degree, gens)
