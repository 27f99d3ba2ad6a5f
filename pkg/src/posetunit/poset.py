"""Finite posets: order closure, Hasse quiver, width, primitivity, critical
subposets, the Tits-type quadratic form and one-point extensions."""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import CycleError, DimensionMismatch, DuplicateElement, EmptyPoset


@dataclass(frozen=True)
class Poset:
    """Strict partial order on ``elements``; ``strict_lt`` is transitively closed.

    The order of ``elements`` fixes coordinate indexing everywhere else.
    """

    elements: tuple
    strict_lt: frozenset
    name: str = field(default="", compare=False)

    @property
    def hasse_edges(self) -> frozenset:
        lt = self.strict_lt
        return frozenset(
            (x, y) for (x, y) in lt
            if not any((x, z) in lt and (z, y) in lt for z in self.elements))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.elements

    def index(self, x) -> int:
        return self.elements.index(x)

    def lt(self, x, y) -> bool:
        return (x, y) in self.strict_lt

    def comparable(self, x, y) -> bool:
        return x == y or (x, y) in self.strict_lt or (y, x) in self.strict_lt

    def below(self, x) -> list:
        """Elements strictly below ``x``, in element order."""
        return [y for y in self.elements if (y, x) in self.strict_lt]

    def above(self, x) -> list:
        return [y for y in self.elements if (x, y) in self.strict_lt]

    def induced(self, subset: Iterable) -> "Poset":
        keep = [x for x in self.elements if x in set(subset)]
        ks = set(keep)
        return Poset(tuple(keep), frozenset((a, b) for (a, b) in self.strict_lt
                                            if a in ks and b in ks))

    def opposite(self) -> "Poset":
        return Poset(self.elements, frozenset((b, a) for (a, b) in self.strict_lt),
                     name=f"{self.name}^op" if self.name else "")

    def add_element(self, new, below: Iterable = (), above: Iterable = ()) -> "Poset":
        """One-point extension with ``x < new`` for x in ``below`` and
        ``new < y`` for y in ``above``."""
        rels = set(self.strict_lt)
        rels.update((x, new) for x in below)
        rels.update((new, y) for y in above)
        return make_poset(list(self.elements) + [new], rels)

    def is_chain(self) -> bool:
        return all(self.comparable(x, y) for x, y in itertools.combinations(self.elements, 2))

    def describe(self) -> str:
        """Literal form accepted by :func:`posetunit.notation.parse_poset`."""
        stmts = [f"{x} < {y}" for (x, y) in sorted(self.hasse_edges, key=self._edge_key)]
        touched = {x for e in self.hasse_edges for x in e}
        stmts += [x for x in self.elements if x not in touched]
        label = self.name or "P"
        return f"poset {label} {{ " + "; ".join(stmts) + " }"

    def _edge_key(self, e):
        return (self.index(e[0]), self.index(e[1]))

    def __repr__(self):
        return f"Poset({self.name or '?'}: {list(self.elements)}, hasse={sorted(self.hasse_edges, key=self._edge_key)})"


def make_poset(elements: Sequence, generating_relations: Iterable = (), name: str = "") -> Poset:
    elements = tuple(elements)
    if len(set(elements)) != len(elements):
        dup = [x for x in elements if elements.count(x) > 1][0]
        raise DuplicateElement(f"element {dup!r} listed twice")
    es = set(elements)
    rel = set()
    for a, b in generating_relations:
        if a not in es or b not in es:
            raise ValueError(f"relation ({a!r}, {b!r}) mentions an unknown element")
        rel.add((a, b))
    # Warshall closure over element order
    up = {x: set() for x in elements}
    for a, b in rel:
        up[a].add(b)
    for k in elements:
        for i in elements:
            if k in up[i]:
                up[i] |= up[k]
    for x in elements:
        if x in up[x]:
            raise CycleError(f"relations force {x!r} < {x!r}")
    lt = frozenset((a, b) for a in elements for b in up[a])
    return Poset(elements, lt, name=name)


def chain_names(count: int) -> list[str]:
    return list(string.ascii_lowercase[:count])


def primitive(*lengths: int, name: str = "") -> Poset:
    """Cardinal sum of chains; chain k is ``x1 < x2 < ...`` with x = a, b, c, ..."""
    elements, rels = [], []
    for letter, n in zip(chain_names(len(lengths)), lengths):
        names = [f"{letter}{i}" for i in range(1, n + 1)]
        elements += names
        rels += list(zip(names, names[1:]))
    return make_poset(elements, rels, name=name or "(" + ",".join(map(str, lengths)) + ")")


def n_poset(tail: int, name: str = "") -> Poset:
    """``(N, k)``: a1<a2, b1<b2, b1<a2 plus a disjoint chain c1<...<ck."""
    p = primitive(2, 2, tail)
    return make_poset(p.elements, set(p.strict_lt) | {("b1", "a2")},
                      name=name or f"(N,{tail})")


CRITICAL_NAMES = ("(1,1,1,1)", "(2,2,2)", "(1,3,3)", "(1,2,5)", "(N,4)")


def critical_poset(name: str) -> Poset:
    if name == "(N,4)":
        return n_poset(4)
    if name in CRITICAL_NAMES:
        lengths = tuple(int(t) for t in name.strip("()").split(","))
        return primitive(*lengths)
    raise KeyError(name)


def critical_posets() -> list[Poset]:
    return [critical_poset(n) for n in CRITICAL_NAMES]


def width(p: Poset) -> int:
    """Size of a largest antichain, by brute force (fine for |P| <= 16)."""
    if not p.elements:
        raise EmptyPoset("width of the empty poset")
    els = p.elements
    n = len(els)
    comp = [[p.comparable(els[i], els[j]) and i != j for j in range(n)] for i in range(n)]
    best = 1
    # grow antichains depth-first; prune when they cannot beat the best
    def grow(start, size, chosen):
        nonlocal best
        if size > best:
            best = size
        if size + (n - start) <= best:
            return
        for j in range(start, n):
            if not any(comp[j][c] for c in chosen):
                chosen.append(j)
                grow(j + 1, size + 1, chosen)
                chosen.pop()
    grow(0, 0, [])
    return best


def components(p: Poset) -> list[list]:
    """Connected components of the comparability graph, in element order."""
    seen, comps = set(), []
    for x in p.elements:
        if x in seen:
            continue
        stack, comp = [x], []
        seen.add(x)
        while stack:
            y = stack.pop()
            comp.append(y)
            for z in p.elements:
                if z not in seen and p.comparable(y, z):
                    seen.add(z)
                    stack.append(z)
        comps.append(sorted(comp, key=p.index))
    return comps


def is_primitive(p: Poset):
    """``(True, lengths)`` if ``p`` is a cardinal sum of chains, else ``(False, None)``.

    Lengths are sorted ascending, matching the ``(n1,...,ns)`` notation.
    """
    lengths = []
    for comp in components(p):
        if not p.induced(comp).is_chain():
            return False, None
        lengths.append(len(comp))
    return True, tuple(sorted(lengths))


def _embeddings(small: Poset, big: Poset, candidates=None):
    """Yield injective maps small -> big preserving and reflecting the order."""
    s_els = list(small.elements)
    pool = list(candidates if candidates is not None else big.elements)
    nb_lt = {x: sum(1 for y in small.elements if small.lt(y, x)) for x in s_els}
    nb_gt = {x: sum(1 for y in small.elements if small.lt(x, y)) for x in s_els}
    big_lt = {x: len(big.below(x)) for x in pool}
    big_gt = {x: len(big.above(x)) for x in pool}
    assign: dict = {}
    used: set = set()

    def rec(k):
        if k == len(s_els):
            yield dict(assign)
            return
        x = s_els[k]
        for y in pool:
            if y in used or big_lt[y] < nb_lt[x] or big_gt[y] < nb_gt[x]:
                continue
            ok = True
            for x2, y2 in assign.items():
                if small.lt(x, x2) != big.lt(y, y2) or small.lt(x2, x) != big.lt(y2, y):
                    ok = False
                    break
            if ok:
                assign[x] = y
                used.add(y)
                yield from rec(k + 1)
                del assign[x]
                used.discard(y)

    yield from rec(0)


def find_embedding(small: Poset, big: Poset):
    """First order embedding of ``small`` as an induced subposet of ``big``, or None."""
    if len(small) > len(big):
        return None
    if small.elements and big.elements and width(small) > width(big):
        return None
    return next(_embeddings(small, big), None)


def contains_critical(p: Poset):
    """``(name, embedding)`` for the first critical poset found in ``p``, else None.

    ``embedding`` maps elements of the critical poset to elements of ``p``.
    """
    if not p.elements:
        return None
    w = width(p)
    for crit in critical_posets():
        if len(crit) > len(p) or width(crit) > w:
            continue
        emb = find_embedding(crit, p)
        if emb is not None:
            return crit.name, emb
    return None


def is_finite_type(p: Poset) -> bool:
    return contains_critical(p) is None


def quadratic_form(p: Poset, x: Sequence[int]) -> int:
    """``x0^2 + sum x_i^2 + sum_{a<b} x_a x_b - sum x0 x_a``.

    The cross term runs over every comparable pair of the closed order.
    """
    if len(x) != len(p) + 1:
        raise DimensionMismatch(f"vector of length {len(x)} for a poset of size {len(p)}")
    x0, xs = x[0], dict(zip(p.elements, x[1:]))
    q = x0 * x0 + sum(v * v for v in xs.values())
    q += sum(xs[a] * xs[b] for (a, b) in p.strict_lt)
    q -= sum(x0 * v for v in xs.values())
    return q


def extend_poset(p: Poset, I: Iterable, new: str = "p~") -> Poset:
    """Add ``new`` lying above every element of ``I`` (and nothing else)."""
    I = list(I)
    for i in I:
        if i not in p:
            raise ValueError(f"{i!r} is not an element of the poset")
    if new in p:
        raise DuplicateElement(f"element {new!r} already present")
    return p.add_element(new, below=I)


def is_isomorphism(mapping: dict, source: Poset, target: Poset) -> bool:
    if len(source) != len(target) or set(mapping) != set(source.elements):
        return False
    if set(mapping.values()) != set(target.elements):
        return False
    return all(source.lt(a, b) == target.lt(mapping[a], mapping[b])
               for a in source.elements for b in source.elements if a != b)


def find_isomorphism(source: Poset, target: Poset):
    if len(source) != len(target):
        return None
    return find_embedding(source, target)
