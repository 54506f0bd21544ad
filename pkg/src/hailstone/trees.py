"""Inverse-iteration trees, residue-class censuses and inverse-iterate counts.

For the gx+1 map T (g = 3 or 5) a number n has the preimage 2n and, when
2n - 1 is divisible by g, the odd preimage (2n - 1)/g. The pruned tree drops
preimages divisible by g; such a number only has the even preimage, so
pruning removes whole dead branches.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from hailstone.maps import DomainError, MapSpec, Variant, apply_map


def _check_spec(spec):
    if spec.variant is not Variant.T or spec.b != 1:
        raise DomainError("inverse trees are built for the T maps with b = 1")


def inverse_image(spec: MapSpec, n: int, pruned: bool = False) -> set[int]:
    _check_spec(spec)
    g = spec.a
    out = {2 * n}
    if (2 * n - 1) % g == 0:
        odd = (2 * n - 1) // g
        if not (pruned and odd % g == 0):
            out.add(odd)
    if pruned:
        out = {m for m in out if m % g != 0}
    return out


@dataclass
class Node:
    label: int
    depth: int
    parent: int | None
    edge: str  # "root", "even" or "odd"
    children: list[int] = field(default_factory=list)
    circled: bool = False  # had an odd preimage that was pruned


@dataclass
class PrunedTree:
    g: int
    root: int
    depth: int
    modulus: int | None  # root known mod this (None: integer labels)
    nodes: list[Node]

    @property
    def leaves(self) -> list[Node]:
        return [nd for nd in self.nodes if nd.depth == self.depth]

    @property
    def leaf_count(self) -> int:
        return len(self.leaves)

    def signature(self, i: int = 0):
        """Shape with edge kinds, circled marks and leaf residues mod g."""
        nd = self.nodes[i]
        if nd.depth == self.depth:
            return nd.label % self.g
        kids = {self.nodes[c].edge: self.signature(c) for c in nd.children}
        odd = kids.get("odd", "circle" if nd.circled else None)
        return (kids["even"], odd)


def grow_pruned_tree(spec: MapSpec, root: int, k: int, residue: bool = False) -> PrunedTree:
    """Depth-k pruned inverse tree of ``root``.

    With ``residue=True`` the root is taken mod g^(k+1) and a node at depth
    d carries its label mod g^(k+1-d), which is all the tree shape needs.
    """
    _check_spec(spec)
    g = spec.a
    if root % g == 0:
        raise DomainError(f"root {root} is divisible by {g}")
    mod = g ** (k + 1) if residue else None
    nodes = [Node(root % mod if mod else root, 0, None, "root")]
    frontier = [0]
    for d in range(k):
        nxt = []
        cur_mod = g ** (k - d) if mod else None
        for i in frontier:
            n = nodes[i].label
            kids = [(2 * n, "even")]
            if (2 * n - 1) % g == 0:
                odd = (2 * n - 1) // g
                if odd % g == 0:
                    nodes[i].circled = True
                else:
                    kids.append((odd, "odd"))
            for lab, edge in kids:
                if cur_mod:
                    lab %= cur_mod
                nodes.append(Node(lab, d + 1, i, edge))
                nodes[i].children.append(len(nodes) - 1)
                nxt.append(len(nodes) - 1)
        frontier = nxt
    return PrunedTree(g, root, k, mod, nodes)


def _levels(g, a, k, pruned):
    """Labels of every level 0..k of the integer inverse tree of ``a``."""
    level = np.array([a], dtype=object if abs(a) * 2**k >= 2**62 else np.int64)
    out = [level]
    for _ in range(k):
        even = 2 * level
        m = 2 * level - 1
        has = (m % g) == 0
        odd = m[has] // g
        if pruned:
            odd = odd[(odd % g) != 0]
            even = even[(even % g) != 0]
        level = np.concatenate([even, odd])
        out.append(level)
    return out


def leaf_counts(spec: MapSpec, a: int, k: int) -> tuple[int, int]:
    """(N_k(a), N_k*(a)): numbers n with T^k(n) = a, all of them and those
    not divisible by g."""
    _check_spec(spec)
    if k < 0:
        raise ValueError("k must be >= 0")
    full = _levels(spec.a, a, k, pruned=False)[-1]
    return len(full), int(np.count_nonzero(full % spec.a != 0))


# -- census over residue classes --------------------------------------------

@dataclass
class CensusRow:
    g: int
    k: int
    types: int
    n_minus: int
    n_plus: int
    leaf_sum: int
    residues: int

    @property
    def growth(self) -> float:
        return ((self.g + 1) / self.g) ** self.k

    @property
    def d_minus(self) -> float:
        return self.n_minus / self.growth

    @property
    def d_plus(self) -> float:
        return self.n_plus / self.growth

    def csv_row(self):
        return (self.k, self.types, self.n_minus, self.n_plus,
                f"{self.growth:.2f}", f"{self.d_minus:.3f}", f"{self.d_plus:.3f}")


CENSUS_COLUMNS = ("k", "types", "N-", "N+", "growth", "D-", "D+")


def census_levels(g: int, k_max: int):
    """Yield (CensusRow, leaf counts per residue mod g^(k+1)) for k = 1..k_max.

    Level k is built from level k-1: a residue r mod g^(k+1) has the even
    child 2r and, when r = (g+1)/2 (mod g), the odd child (2r-1)/g, both
    known mod g^k; a tree's type is the triple (odd-branch status, type of
    even subtree, type of odd subtree), interned to a small integer. Depth
    0 types are the residues mod g themselves (the leaf label).
    """
    if g not in (3, 5):
        raise ValueError("census is implemented for g = 3 and g = 5")
    mod = g
    r = np.arange(mod, dtype=np.int64)
    typ = np.where(r % g == 0, -1, r % g).astype(np.int64)
    count = np.where(r % g == 0, 0, 1).astype(np.int64)
    branch_res = (g + 1) // 2
    for k in range(1, k_max + 1):
        new_mod = mod * g
        r = np.arange(new_mod, dtype=np.int64)
        valid = r % g != 0
        even = (2 * r) % mod
        branch = (r % g) == branch_res
        odd_child = np.where(branch, ((2 * r - 1) // g) % mod, 0)
        odd_ok = branch & (odd_child % g != 0)
        status = np.where(odd_ok, 2, np.where(branch, 1, 0))
        t_odd = np.where(odd_ok, typ[odd_child], -1)
        width = int(typ.max()) + 2
        key = (status * width + typ[even] + 1) * width + t_odd + 1
        uniq, inv = np.unique(key[valid], return_inverse=True)
        typ = np.full(new_mod, -1, dtype=np.int64)
        typ[valid] = inv
        count = np.where(valid, count[even] + np.where(odd_ok, count[odd_child], 0), 0)
        del key, even, odd_child, t_odd, status, branch, odd_ok
        mod = new_mod
        leaves = count[valid]
        row = CensusRow(g, k, len(uniq), int(leaves.min()), int(leaves.max()),
                        int(leaves.sum()), int(valid.sum()))
        yield row, count


def tree_census(g: int, k: int) -> CensusRow:
    row = None
    for row, _ in census_levels(g, k):
        pass
    return row


def tree_census_rows(g: int, k_max: int) -> list[CensusRow]:
    return [row for row, _ in census_levels(g, k_max)]


def census_sum_identity(g: int, k: int) -> int:
    """Sum of N_k*(a) over residues a mod g^(k+1) not divisible by g."""
    if k == 0:
        return g - 1
    return tree_census(g, k).leaf_sum


def residue_leaf_counts(g: int, k: int) -> np.ndarray:
    """N_k*(a) for every a mod g^(k+1) (0 where g divides a)."""
    if k == 0:
        r = np.arange(g)
        return np.where(r % g == 0, 0, 1)
    counts = None
    for _, counts in census_levels(g, k):
        pass
    return counts


# -- counting inverse iterates ----------------------------------------------

@dataclass
class InverseCount:
    a: int
    x: int
    count: int
    cutoff: int
    exact: bool
    nodes_expanded: int
    budget_exhausted: bool


def sound_cutoff(spec: MapSpec, a: int, x: int, budget: int = 10**5):
    """Largest |value| on the orbits of same-sign seeds |n| <= x up to the
    first repeat. Any path in the inverse tree from a down to such a seed
    stays within it. Returns (cutoff, complete) where complete is False if
    some orbit did not close up within the budget."""
    sign = 1 if a > 0 else -1
    if a == 0:
        return 0, True
    best = x
    complete = True
    for m in range(1, x + 1):
        n = sign * m
        seen = {n}
        v = n
        for _ in range(budget):
            v = apply_map(spec, v)
            if abs(v) > best:
                best = abs(v)
            if v in seen:
                break
            seen.add(v)
        else:
            complete = False
    return best, complete


def count_inverse_iterates(spec: MapSpec, a: int, x: int, cutoff: int | None = None,
                           node_budget: int = 10**7) -> InverseCount:
    """pi_a(x): how many n with |n| <= x have a on their forward orbit.

    Breadth-first search over the unpruned inverse tree of ``a``, keeping
    only nodes with |label| <= cutoff. A node is reached from a only through
    the values of its own forward orbit, so a cutoff at least the largest
    orbit value of every seed |n| <= x loses nothing; that bound is computed
    when ``cutoff`` is None (``exact`` reports whether it is proven).
    A user-supplied smaller cutoff gives a lower bound. Children equal to a
    are dropped, which closes the tree when a lies on a cycle.
    """
    _check_spec(spec)
    if x < abs(a):
        raise ValueError("need x >= |a|")
    exact = False
    if cutoff is None:
        cutoff, exact = sound_cutoff(spec, a, x)
    g = spec.a
    big = cutoff * 2 >= 2**62
    level = np.array([a], dtype=object if big else np.int64)
    count = int(abs(a) <= x)
    expanded = 0
    exhausted = False
    while len(level):
        expanded += len(level)
        if expanded > node_budget:
            exhausted = True
            break
        even = 2 * level
        m = 2 * level - 1
        odd = m[(m % g) == 0] // g
        nxt = np.concatenate([even, odd])
        nxt = nxt[(np.abs(nxt) <= cutoff) & (nxt != a)]
        count += int(np.count_nonzero(np.abs(nxt) <= x))
        level = nxt
    return InverseCount(a, x, count, cutoff, exact and not exhausted, expanded, exhausted)


def count_forward(spec: MapSpec, a: int, x: int, budget: int = 10**4) -> int:
    """Brute-force pi_a(x): forward-iterate every |n| <= x (oracle)."""
    total = 0
    for n in range(-x, x + 1):
        seen = set()
        v = n
        for _ in range(budget + 1):
            if v == a:
                total += 1
                break
            if v in seen:
                break
            seen.add(v)
            v = apply_map(spec, v)
    return total
