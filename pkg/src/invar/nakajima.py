"""Layered (generalised Nakajima) structure of triangular p-groups.

A structure witness is a strictly increasing index sequence (i_0,...,i_r)
together with layers P_1..P_r: layer k collects every group element that
moves only variables with index in (i_{k-1}, i_k] while perturbing them
by earlier variables up to x_{i_{k-1}} (depth <= i_{k-1}).  The witness
is accepted when the layers together generate the whole group.

Layer membership quantifies over all enumerated elements, not just the
input generators, which makes verification canonical.
"""

from __future__ import annotations

import itertools

from .gaction import GroupTable, mat_identity


class NotTriangular(ValueError):
    pass


class BadSequence(ValueError):
    pass


def depth(g):
    """Largest variable index occurring in any g(x_i) - x_i; 0 for the identity."""
    if not g.is_lower_unitriangular():
        raise NotTriangular(f"element is not lower unitriangular: {g!r}")
    best = 0
    for i, row in enumerate(g.matrix):
        for j in range(i - 1, best - 1, -1):
            if row[j]:
                best = j + 1
                break
    return best


def moved_indices(g):
    """1-based indices i with g(x_i) != x_i."""
    ident = mat_identity(g.n)
    return [i + 1 for i in range(g.n) if g.matrix[i] != ident[i]]


class NakajimaStructure:
    """Accepted witness: sequence, layers, and the generated subgroup chain."""

    __slots__ = ("sequence", "layers", "chain", "group", "basis_change")

    def __init__(self, sequence, layers, chain, group, basis_change=None):
        self.sequence = tuple(sequence)
        self.layers = tuple(tuple(layer) for layer in layers)
        self.chain = tuple(chain)
        self.group = group
        self.basis_change = basis_change

    def summary(self):
        return {
            "sequence": list(self.sequence),
            "layer_sizes": [len(layer) for layer in self.layers],
            "chain_orders": [t.order for t in self.chain],
        }

    def __repr__(self):
        return f"NakajimaStructure(sequence={self.sequence})"


class StructureRefutation:
    __slots__ = ("sequence", "reason")

    def __init__(self, sequence, reason):
        self.sequence = tuple(sequence)
        self.reason = reason

    def __repr__(self):
        return f"StructureRefutation(sequence={self.sequence}, reason={self.reason!r})"


def _require_triangular(G):
    for g in G.elements:
        if not g.is_lower_unitriangular():
            raise NotTriangular(f"group element not lower unitriangular: {g!r}")


def verify_structure(G, sequence):
    """Check one candidate sequence; NakajimaStructure or StructureRefutation."""
    _require_triangular(G)
    sequence = tuple(int(i) for i in sequence)
    n = G.n
    if not sequence or any(i < 1 or i > n for i in sequence):
        raise BadSequence(f"sequence {sequence} outside 1..{n}")
    if any(a >= b for a, b in zip(sequence, sequence[1:])):
        raise BadSequence(f"sequence {sequence} is not strictly increasing")
    if len(sequence) > n:
        raise BadSequence(f"sequence {sequence} longer than {n}")

    profile = [(i, frozenset(moved_indices(g)), depth(g)) for i, g in enumerate(G.elements)]
    layers = []
    for k in range(1, len(sequence)):
        lo, hi = sequence[k - 1], sequence[k]
        members = [i for i, moved, dep in profile
                   if all(lo < m <= hi for m in moved) and dep <= lo]
        layers.append(members)

    union = sorted(set(itertools.chain.from_iterable(layers)))
    closure = G.subgroup_closure(union) if union else G.subgroup_closure([G.identity_index()])
    if len(closure) != G.order:
        return StructureRefutation(
            sequence, f"layers generate a subgroup of order {len(closure)} < {G.order}")

    chain = []
    acc = []
    for members in layers:
        acc.extend(members)
        chain.append(G.subgroup_table(acc))
    return NakajimaStructure(
        sequence,
        [[G.elements[i] for i in members] for members in layers],
        chain, G)


def find_sequence(G):
    """First accepted sequence: shortest first, lexicographic within a length.

    Returns None when every sequence is refuted; that certifies only the
    current basis, not all triangular bases.
    """
    _require_triangular(G)
    n = G.n
    for length in range(1, n + 1):
        for seq in itertools.combinations(range(1, n + 1), length):
            result = verify_structure(G, seq)
            if isinstance(result, NakajimaStructure):
                return result
    return None


def is_nakajima_classic(G):
    """Product-of-column-subgroup criterion: prod |G_i| = |G|, where G_i
    holds the elements moving no variable except x_i."""
    _require_triangular(G)
    n = G.n
    product = 1
    for i in range(1, n + 1):
        count = sum(1 for g in G.elements if set(moved_indices(g)) <= {i})
        product *= count
    return product == G.order
