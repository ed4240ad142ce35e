"""Finite abelian groups given as products of cyclic groups.

Elements are plain tuples of residues, one per cyclic factor.  The element
order used everywhere (fibers of standard models, lookup tables) is the
lexicographic order of ``itertools.product``, so the zero element is always
at index 0.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CapacityError, StructuralError

MAX_AUTOMORPHISM_ORDER = 64
MAX_AUTOMORPHISM_COUNT = 200_000

GroupElement = tuple


@dataclass(frozen=True)
class GroupSpec:
    moduli: tuple

    def __post_init__(self):
        moduli = tuple(int(m) for m in self.moduli)
        if not moduli:
            raise StructuralError("a group needs at least one cyclic factor")
        if any(m < 2 for m in moduli):
            raise StructuralError(f"cyclic factors must have order >= 2, got {moduli}")
        object.__setattr__(self, "moduli", moduli)

    @classmethod
    def parse(cls, text: str) -> GroupSpec:
        try:
            return cls(tuple(int(tok) for tok in text.strip().split("x")))
        except ValueError:
            raise StructuralError(f"bad group spec {text!r}") from None

    def __str__(self):
        return "x".join(str(m) for m in self.moduli)

    @cached_property
    def order(self) -> int:
        return int(np.prod(self.moduli))

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @cached_property
    def elements(self) -> tuple:
        return tuple(itertools.product(*(range(m) for m in self.moduli)))

    @cached_property
    def _index(self) -> dict:
        return {e: i for i, e in enumerate(self.elements)}

    def index(self, g) -> int:
        return self._index[self.check(g)]

    @property
    def zero(self) -> tuple:
        return (0,) * self.rank

    def basis(self) -> list:
        out = []
        for i in range(self.rank):
            e = [0] * self.rank
            e[i] = 1
            out.append(tuple(e))
        return out

    def check(self, g) -> tuple:
        g = tuple(g)
        if len(g) != self.rank:
            raise StructuralError(f"element {g} has {len(g)} coordinates, group {self} has {self.rank}")
        if any(not 0 <= x < m for x, m in zip(g, self.moduli)):
            raise StructuralError(f"element {g} out of range for group {self}")
        return g

    def add(self, *args) -> tuple:
        mods = self.moduli
        r = len(mods)
        out = [0] * r
        for g in args:
            if len(g) != r:
                raise StructuralError(f"element {g} does not belong to group {self}")
            for i in range(r):
                out[i] += g[i]
        return tuple(x % m for x, m in zip(out, mods))

    def neg(self, g) -> tuple:
        if len(g) != len(self.moduli):
            raise StructuralError(f"element {g} does not belong to group {self}")
        return tuple(-x % m for x, m in zip(g, self.moduli))

    def sub(self, g, h) -> tuple:
        return self.add(g, self.neg(h))

    def scale(self, k: int, g) -> tuple:
        return tuple(k * x % m for x, m in zip(g, self.moduli))

    def element_order(self, g) -> int:
        k, x = 1, tuple(g)
        while x != self.zero:
            x = self.add(x, g)
            k += 1
        return k

    @cached_property
    def add_table(self) -> np.ndarray:
        els = self.elements
        table = np.empty((len(els), len(els)), dtype=np.int64)
        for i, g in enumerate(els):
            for j, h in enumerate(els):
                table[i, j] = self._index[self.add(g, h)]
        return table

    @cached_property
    def neg_table(self) -> np.ndarray:
        return np.array([self._index[self.neg(g)] for g in self.elements], dtype=np.int64)

    def parse_element(self, text: str) -> tuple:
        try:
            coords = tuple(int(tok) for tok in text.split("."))
        except ValueError:
            raise StructuralError(f"bad group element {text!r}") from None
        if len(coords) != self.rank:
            raise StructuralError(f"element {text!r} needs {self.rank} coordinates")
        return tuple(x % m for x, m in zip(coords, self.moduli))

    @staticmethod
    def format_element(g) -> str:
        return ".".join(str(x) for x in g)


def group_arith(spec: GroupSpec, op: str, *args):
    if op == "zero":
        return spec.zero
    if op == "add":
        return spec.add(*args)
    if op == "neg":
        (g,) = args
        return spec.neg(g)
    raise ValueError(f"unknown group operation {op!r}")


def sign_scale(parity: str | int, g, spec: GroupSpec | None = None):
    """Return ``g`` for even parity and ``-g`` for odd parity.

    ``parity`` is either ``"even"``/``"odd"`` or an integer parity bit.
    """
    odd = parity == "odd" if isinstance(parity, str) else bool(parity % 2)
    if not odd:
        return tuple(g)
    if spec is None:
        raise StructuralError("negation needs the owning group")
    return spec.neg(g)


@dataclass(frozen=True)
class GroupAutomorphism:
    """An automorphism stored by the images of the standard basis."""

    spec: GroupSpec
    gen_images: tuple

    def __call__(self, g) -> tuple:
        out = self.spec.zero
        for x, h in zip(g, self.gen_images):
            out = self.spec.add(out, self.spec.scale(x, h))
        return out

    @cached_property
    def table(self) -> tuple:
        return tuple(self(g) for g in self.spec.elements)

    def compose(self, other: GroupAutomorphism) -> GroupAutomorphism:
        """``self`` after ``other``."""
        return GroupAutomorphism(self.spec, tuple(self(h) for h in other.gen_images))

    def inverse(self) -> GroupAutomorphism:
        back = {img: g for g, img in zip(self.spec.elements, self.table)}
        return GroupAutomorphism(self.spec, tuple(back[e] for e in self.spec.basis()))

    def is_identity(self) -> bool:
        return self.gen_images == tuple(self.spec.basis())

    def format(self) -> str:
        return ",".join(self.spec.format_element(h) for h in self.gen_images)


def identity_automorphism(spec: GroupSpec) -> GroupAutomorphism:
    return GroupAutomorphism(spec, tuple(spec.basis()))


def _span_size(spec: GroupSpec, gens) -> int:
    seen = {spec.zero}
    frontier = [spec.zero]
    while frontier:
        nxt = []
        for x in frontier:
            for h in gens:
                y = spec.add(x, h)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(seen)


def enumerate_group_automorphisms(spec: GroupSpec, max_order: int = MAX_AUTOMORPHISM_ORDER,
                                  max_count: int = MAX_AUTOMORPHISM_COUNT) -> list:
    """All automorphisms of ``spec``, identity first.

    A homomorphism out of a product of cyclic groups is fixed by basis images
    ``h_i`` with ``m_i * h_i = 0``; it is bijective iff every prefix of the
    basis maps injectively, which prunes the search early.
    """
    if spec.order > max_order:
        raise CapacityError(f"group of order {spec.order} exceeds bound {max_order}",
                            count=spec.order, bound=max_order)
    candidates = [[h for h in spec.elements if spec.scale(m, h) == spec.zero] for m in spec.moduli]
    out = []

    def extend(prefix):
        i = len(prefix)
        if i == spec.rank:
            out.append(GroupAutomorphism(spec, tuple(prefix)))
            if len(out) > max_count:
                raise CapacityError(f"more than {max_count} automorphisms of {spec}",
                                    count=len(out), bound=max_count)
            return
        target = int(np.prod(spec.moduli[: i + 1]))
        for h in candidates[i]:
            if _span_size(spec, prefix + [h]) == target:
                extend(prefix + [h])

    extend([])
    ident = identity_automorphism(spec)
    out.sort(key=lambda a: (not a.is_identity(), a.gen_images))
    assert out[0] == ident
    return out


def find_isomorphism(spec: GroupSpec, elements, mul, identity):
    """Find an isomorphism from ``spec`` onto an abstract group.

    ``elements`` lists the target group's elements and ``mul(x, y)`` is its
    product.  Returns a dict from ``spec`` elements to target elements, or
    ``None`` when the groups are not isomorphic.
    """
    elements = list(elements)
    if len(elements) != spec.order:
        return None

    def power(x, k):
        out = identity
        for _ in range(k):
            out = mul(out, x)
        return out

    def order_of(x):
        k, y = 1, x
        while y != identity:
            y = mul(y, x)
            k += 1
        return k

    orders = {x: order_of(x) for x in elements}
    basis = spec.basis()

    def build(images):
        mapping = {}
        for g in spec.elements:
            out = identity
            for x, h in zip(g, images):
                out = mul(out, power(h, x))
            mapping[g] = out
        return mapping

    def search(images):
        i = len(images)
        if i == len(basis):
            mapping = build(images)
            if len(set(mapping.values())) != len(elements):
                return None
            for g in spec.elements:
                for h in spec.elements:
                    if mapping[spec.add(g, h)] != mul(mapping[g], mapping[h]):
                        return None
            return mapping
        for x in elements:
            if orders[x] == spec.moduli[i]:
                found = search(images + [x])
                if found is not None:
                    return found
        return None

    return search([])
