"""Finite groups of graph automorphisms with word metrics and families.

Group elements are vertex permutations stored as tuples (images indexed by
vertex).  The word metric comes from breadth-first search on the Cayley
graph of the symmetrized generating set, so it is left invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graphs import CapExceeded, Graph, canon_edge


def identity_perm(n):
    return tuple(range(n))


def compose(p, q):
    """p after q: (p*q)(x) = p(q(x))."""
    return tuple(p[x] for x in q)


def invert(p):
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def is_automorphism(g: Graph, perm) -> bool:
    if len(perm) != g.vertex_count or set(perm) != set(range(g.vertex_count)):
        return False
    for (u, v) in g.edges:
        if canon_edge(perm[u], perm[v]) not in g.edges:
            return False
    return all(perm[v] in g.cone_vertices for v in g.cone_vertices)


class NotAutomorphism(ValueError):
    pass


@dataclass(frozen=True)
class GroupModel:
    """A finite group of graph automorphisms with a word metric."""

    graph: Graph
    elements: tuple
    generators: tuple
    identity: tuple
    word_length: dict = field(compare=False)

    def __len__(self):
        return len(self.elements)

    def cayley_metric(self, a, b):
        """Left-invariant word distance between elements a and b."""
        return self.word_length[compose(invert(a), b)]

    def ball(self, alpha, center=None):
        """Elements within word distance alpha of center (default identity)."""
        if center is None:
            return tuple(h for h in self.elements if self.word_length[h] <= alpha)
        return tuple(compose(center, h) for h in self.elements
                     if self.word_length[h] <= alpha)

    def index_of(self, element):
        return self.elements.index(element)


def trivial_group(g: Graph) -> GroupModel:
    e = identity_perm(g.vertex_count)
    return GroupModel(g, (e,), (), e, {e: 0})


def close_group(g: Graph, generator_perms, cap=20000) -> GroupModel:
    """Close generators under composition and inverse; BFS word lengths."""
    e = identity_perm(g.vertex_count)
    gens = []
    for p in generator_perms:
        p = tuple(p)
        if not is_automorphism(g, p):
            raise NotAutomorphism("generator %r is not an automorphism" % (p,))
        if p != e and p not in gens:
            gens.append(p)
    sym = list(gens)
    for p in gens:
        ip = invert(p)
        if ip not in sym:
            sym.append(ip)
    word = {e: 0}
    frontier = [e]
    while frontier:
        nxt = []
        for a in frontier:
            for s in sym:
                b = compose(a, s)
                if b not in word:
                    if len(word) >= cap:
                        raise CapExceeded("group closure exceeds cap %d" % cap)
                    word[b] = word[a] + 1
                    nxt.append(b)
        frontier = nxt
    elements = tuple(sorted(word))
    return GroupModel(g, elements, tuple(gens), e, word)


# ---------------------------------------------------------------------------
# Actions
# ---------------------------------------------------------------------------


def act_vertex(perm, v):
    return perm[v]


def act_edge(perm, e):
    return canon_edge(perm[e[0]], perm[e[1]])


def act_angle(perm, angle):
    u, apex, w = angle
    a, b = sorted((perm[u], perm[w]))
    return (a, perm[apex], b)


def act_ordered_pair(perm, pair):
    return (perm[pair[0]], perm[pair[1]])


def act_unordered_pair(perm, pair):
    return frozenset(perm[x] for x in pair)


ACTIONS = {
    "vertices": act_vertex,
    "edges": act_edge,
    "angles": act_angle,
    "pairs": act_ordered_pair,
    "unordered_pairs": act_unordered_pair,
}


def action_fn(action):
    if callable(action):
        return action
    try:
        return ACTIONS[action]
    except KeyError:
        raise ValueError("unknown action %r" % (action,)) from None


def resolve_action_for(obj):
    """Infer the named action from an object's shape."""
    if isinstance(obj, int):
        return act_vertex
    if isinstance(obj, frozenset):
        return act_unordered_pair
    if isinstance(obj, tuple):
        if len(obj) == 2:
            return act_ordered_pair
        if len(obj) == 3:
            return act_angle
    raise ValueError("cannot infer an action for %r" % (obj,))


@dataclass(frozen=True)
class OrbitReport:
    orbits: tuple
    orbit_count: int
    cofinite: bool = True  # finite models: every invariant set is cofinite


def orbits(G: GroupModel, objects, action) -> OrbitReport:
    fn = action_fn(action)
    remaining = set(objects)
    parts = []
    while remaining:
        x = min(remaining, key=repr)
        orb = {fn(p, x) for p in G.elements}
        if not orb <= set(objects):
            raise ValueError("action does not preserve the object set")
        parts.append(frozenset(orb))
        remaining -= orb
    parts.sort(key=lambda s: sorted(map(repr, s)))
    return OrbitReport(tuple(parts), len(parts))


def stabilizer(G: GroupModel, obj, action=None) -> frozenset:
    """Isotropy subgroup of obj.

    Ordered pairs (tuples) get the ordered-pair stabilizer; pass the object
    as a frozenset for the setwise (unordered) stabilizer.
    """
    fn = action_fn(action) if action is not None else resolve_action_for(obj)
    return frozenset(p for p in G.elements if fn(p, obj) == obj)


def setwise_stabilizer(G: GroupModel, subset, action) -> frozenset:
    fn = action_fn(action)
    sub = frozenset(subset)
    return frozenset(p for p in G.elements
                     if frozenset(fn(p, x) for x in sub) == sub)


def subgroup_generated(G: GroupModel, seed) -> frozenset:
    elems = {G.identity}
    frontier = [G.identity]
    seed = list(seed)
    for s in seed:
        if s not in G.word_length:
            raise ValueError("seed element not in group")
    gens = seed + [invert(s) for s in seed]
    while frontier:
        nxt = []
        for a in frontier:
            for s in gens:
                b = compose(a, s)
                if b not in elems:
                    elems.add(b)
                    nxt.append(b)
        frontier = nxt
    return frozenset(elems)


def is_subgroup(G: GroupModel, subset) -> bool:
    sub = frozenset(subset)
    if G.identity not in sub:
        return False
    for a in sub:
        if invert(a) not in sub:
            return False
        for b in sub:
            if compose(a, b) not in sub:
                return False
    return True


def all_subgroups(G: GroupModel, cap=4096):
    """Every subgroup of G, found by closing generated subsets."""
    found = {frozenset([G.identity])}
    frontier = [frozenset([G.identity])]
    while frontier:
        nxt = []
        for H in frontier:
            for x in G.elements:
                if x in H:
                    continue
                H2 = subgroup_generated(G, list(H) + [x])
                if H2 not in found:
                    if len(found) >= cap:
                        raise CapExceeded("subgroup lattice exceeds cap")
                    found.add(H2)
                    nxt.append(H2)
        frontier = nxt
    return sorted(found, key=lambda H: (len(H), sorted(H)))


# ---------------------------------------------------------------------------
# Families of subgroups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubgroupFamily:
    """A family of subgroups, queried by membership only.

    kinds:
      trivial-only      just the trivial subgroup
      all-subgroups     every subgroup (the finite-model stand-in for the
                        virtually cyclic and peripheral families, where every
                        subgroup of a finite group qualifies)
      explicit-list     exactly the listed subgroups (validated to be closed
                        under conjugation and under passing to subgroups)
      stabilizer-closed subgroups subconjugate to one of the seed subgroups
    """

    kind: str
    members: tuple = ()
    seeds: tuple = ()

    def contains(self, subgroup, G: GroupModel) -> bool:
        H = frozenset(subgroup)
        if self.kind == "trivial-only":
            return H == frozenset([G.identity])
        if self.kind == "all-subgroups":
            return is_subgroup(G, H)
        if self.kind == "explicit-list":
            return H in set(self.members)
        if self.kind == "stabilizer-closed":
            if H == frozenset([G.identity]):
                return True
            for S in self.seeds:
                S = frozenset(S)
                for g in G.elements:
                    gi = invert(g)
                    conj = frozenset(compose(compose(g, s), gi) for s in S)
                    if H <= conj:
                        return True
            return False
        raise ValueError("unknown family kind %r" % (self.kind,))

    def validate(self, G: GroupModel):
        if self.kind != "explicit-list":
            return
        listed = set(frozenset(H) for H in self.members)
        for H in listed:
            if not is_subgroup(G, H):
                raise ValueError("family member is not a subgroup")
            for g in G.elements:
                gi = invert(g)
                conj = frozenset(compose(compose(g, h), gi) for h in H)
                if conj not in listed:
                    raise ValueError("family not conjugation closed")
        for H in listed:
            sub_model = GroupModel(G.graph, tuple(sorted(H)), (), G.identity,
                                   {h: 0 for h in H})
            for K in all_subgroups(sub_model):
                if K not in listed:
                    raise ValueError("family not closed under subgroups")


TRIVIAL_ONLY = SubgroupFamily("trivial-only")
ALL_SUBGROUPS = SubgroupFamily("all-subgroups")


def is_F_subset(U, G: GroupModel, family: SubgroupFamily, action):
    """Check the equivariant-subset condition with a stabilizer witness.

    U is an F-subset when its setwise stabilizer F0 lies in the family and
    every other translate of U is disjoint from U.  Returns (ok, witness)
    where witness is F0 on success.
    """
    fn = action_fn(action)
    U = frozenset(U)
    if not U:
        return True, frozenset([G.identity])
    stab = set()
    for p in G.elements:
        pU = frozenset(fn(p, x) for x in U)
        if pU == U:
            stab.add(p)
        elif pU & U:
            return False, None
    stab = frozenset(stab)
    if not family.contains(stab, G):
        return False, None
    return True, stab


# ---------------------------------------------------------------------------
# Induced action on a barycentric subdivision
# ---------------------------------------------------------------------------


def subdivision_perm(perm, subdivision):
    """Extend a vertex permutation of the original graph to the subdivision."""
    n = subdivision.original.vertex_count
    total = subdivision.graph.vertex_count
    out = list(range(total))
    for v in range(n):
        out[v] = perm[v]
    for e, m in subdivision.midpoint_of_edge.items():
        out[m] = subdivision.midpoint_of_edge[act_edge(perm, e)]
    return tuple(out)


def subdivided_group(G: GroupModel, subdivision) -> GroupModel:
    """The same abstract group acting on the subdivided graph."""
    lift = {p: subdivision_perm(p, subdivision) for p in G.elements}
    elements = tuple(sorted(lift.values()))
    word = {lift[p]: G.word_length[p] for p in G.elements}
    gens = tuple(lift[p] for p in G.generators)
    return GroupModel(subdivision.graph, elements, gens,
                      lift[G.identity], word)
