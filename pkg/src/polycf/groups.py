"""Exact word-problem oracles for the group families used by the witness
machinery: free groups, free abelian groups, Baumslag-Solitar groups,
restricted wreath products over the integers, the two-generator metabelian
groups G(c) embedded in Q^s x| Z, and a derived-length-3 family with central
commutator coordinates.

Words are sequences of (generator, +/-1) pairs; the text form uses lowercase
for generators and uppercase for inverses, e.g. "AbaB" = a^-1 b a b^-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

from . import qlinalg

Letter = tuple[str, int]
WordLike = "str | Sequence[Letter]"


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def parse_word(text: str, generators: Sequence[str]) -> tuple[Letter, ...]:
    """Greedy longest-match tokenizer; uppercase initial letter = inverse."""
    gens = sorted(generators, key=len, reverse=True)
    out: list[Letter] = []
    i = 0
    text = "".join(text.split())
    while i < len(text):
        for g in gens:
            inv = g[0].upper() + g[1:]
            if text.startswith(g, i):
                out.append((g, 1))
                i += len(g)
                break
            if text.startswith(inv, i):
                out.append((g, -1))
                i += len(inv)
                break
        else:
            raise ValueError(f"unknown generator at ...{text[i:]!r}")
    return tuple(out)


def format_word(word: Sequence[Letter]) -> str:
    return "".join(g if e > 0 else g[0].upper() + g[1:] for g, e in word)


def invert_word(word: Sequence[Letter]) -> tuple[Letter, ...]:
    return tuple((g, -e) for g, e in reversed(word))


class Group:
    """Common oracle surface: evaluate words exactly, test the identity."""

    generators: tuple[str, ...]

    def identity(self):
        raise NotImplementedError

    def letter(self, gen: str, exp: int):
        raise NotImplementedError

    def mul(self, x, y):
        raise NotImplementedError

    def is_identity(self, elt) -> bool:
        return elt == self.identity()

    def coerce_word(self, word: WordLike) -> tuple[Letter, ...]:
        if isinstance(word, str):
            return parse_word(word, self.generators)
        word = tuple(word)
        for g, e in word:
            if g not in self.generators:
                raise ValueError(f"unknown generator {g!r}")
            if e not in (1, -1):
                raise ValueError(f"letter exponent must be +/-1, got {e}")
        return word

    def eval_word(self, word: WordLike):
        total = self.identity()
        for g, e in self.coerce_word(word):
            total = self.mul(total, self.letter(g, e))
        return total

    def in_word_problem(self, word: WordLike) -> bool:
        return self.is_identity(self.eval_word(word))


@dataclass(frozen=True)
class FreeElt:
    """Freely reduced word; no adjacent inverse pairs."""

    word: tuple[Letter, ...]


class FreeGroup(Group):
    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError("rank must be >= 1")
        self.rank = rank
        self.generators = tuple(f"x{i}" for i in range(1, rank + 1)) \
            if rank > 2 else ("x", "y")[:rank]

    def identity(self) -> FreeElt:
        return FreeElt(())

    def letter(self, gen, exp) -> FreeElt:
        return FreeElt(((gen, exp),))

    def mul(self, x: FreeElt, y: FreeElt) -> FreeElt:
        word = list(x.word)
        for letter in y.word:
            if word and word[-1][0] == letter[0] \
                    and word[-1][1] == -letter[1]:
                word.pop()
            else:
                word.append(letter)
        return FreeElt(tuple(word))


class FreeAbelian(Group):
    """Z^k with generators x1..xk; elements are integer tuples."""

    def __init__(self, rank: int):
        if rank < 1:
            raise ValueError("rank must be >= 1")
        self.rank = rank
        self.generators = tuple(f"x{i}" for i in range(1, rank + 1))

    def identity(self):
        return (0,) * self.rank

    def letter(self, gen, exp):
        i = self.generators.index(gen)
        return tuple(exp if j == i else 0 for j in range(self.rank))

    def mul(self, x, y):
        return tuple(a + b for a, b in zip(x, y))


@dataclass(frozen=True)
class BsElt:
    """Pinch-free alternating form x^a0 t^e1 x^a1 ... t^en x^an.

    Stored as a tuple alternating integers (x-exponents) and ('t', +/-1)
    markers, starting and ending with an integer.
    """

    items: tuple


class BaumslagSolitar(Group):
    """<x, t | t^-1 x^m t = x^n> via stack-based pinch reduction.

    A subword t^-1 x^(qm) t collapses to x^(qn), and t x^(qn) t^-1 to
    x^(qm); a reduced form with any t left is never the identity.
    """

    def __init__(self, m: int, n: int):
        if m == 0 or n == 0:
            raise ValueError("m and n must be nonzero")
        self.m = m
        self.n = n
        self.generators = ("x", "t")

    def identity(self) -> BsElt:
        return BsElt((0,))

    def letter(self, gen, exp) -> BsElt:
        if gen == "x":
            return BsElt((exp,))
        return BsElt((0, ("t", exp), 0))

    def mul(self, x: BsElt, y: BsElt) -> BsElt:
        stack = list(x.items)
        for item in y.items:
            if isinstance(item, int):
                stack[-1] += item
            else:
                eps = item[1]
                a = stack[-1]
                if len(stack) >= 3 and stack[-2] == ("t", -eps):
                    divisor, multiplier = ((self.m, self.n) if eps == 1
                                           else (self.n, self.m))
                    if a % divisor == 0:
                        stack.pop()
                        stack.pop()
                        stack[-1] += (a // divisor) * multiplier
                        continue
                stack.append(("t", eps))
                stack.append(0)
        return BsElt(tuple(stack))

    def is_identity(self, elt: BsElt) -> bool:
        return elt.items == (0,)


def _shift_support(support: tuple, offset: int) -> tuple:
    return tuple((i + offset, c) for i, c in support)


def _merge_mod(a: Iterable[tuple[int, int]], b: Iterable[tuple[int, int]],
               p: int | None) -> tuple:
    acc: dict[int, int] = {}
    for i, c in a:
        acc[i] = acc.get(i, 0) + c
    for i, c in b:
        acc[i] = acc.get(i, 0) + c
    out = []
    for i in sorted(acc):
        c = acc[i] % p if p else acc[i]
        if c:
            out.append((i, c))
    return tuple(out)


@dataclass(frozen=True)
class WreathElt:
    """Lamp configuration and shift: finitely many nonzero lamps over Z."""

    shift: int
    support: tuple  # sorted ((position, coefficient), ...), zeros omitted


class WreathOverZ(Group):
    """Restricted wreath product C_p wr Z (p >= 2) or Z wr Z.

    Generators a (shift) and b (lamp at the origin); conjugating b by a^i
    moves the lamp to position i: (f1,s1)(f2,s2) = (f1 + f2 shifted by s1,
    s1+s2).
    """

    def __init__(self, modulus: int | None):
        if modulus is not None and modulus < 2:
            raise ValueError("lamp modulus must be >= 2 (or None for Z)")
        self.modulus = modulus
        self.generators = ("a", "b")

    def identity(self) -> WreathElt:
        return WreathElt(0, ())

    def letter(self, gen, exp) -> WreathElt:
        if gen == "a":
            return WreathElt(exp, ())
        coeff = exp % self.modulus if self.modulus else exp
        return WreathElt(0, ((0, coeff),) if coeff else ())

    def mul(self, x: WreathElt, y: WreathElt) -> WreathElt:
        # lamps-then-shift normal form: conjugation by a^s moves lamp j
        # to j - s, so b^(a^i) sits at position +i
        support = _merge_mod(x.support, _shift_support(y.support, -x.shift),
                             self.modulus)
        return WreathElt(x.shift + y.shift, support)


@dataclass(frozen=True)
class GcSpec:
    """Coefficient tuple (c_0, ..., c_s): s >= 1, ends nonzero, gcd 1."""

    c: tuple[int, ...]

    def __init__(self, c: Iterable[int]):
        c = tuple(int(x) for x in c)
        if len(c) < 2:
            raise ValueError("need s >= 1, i.e. at least two coefficients")
        if c[0] == 0 or c[-1] == 0:
            raise ValueError("first and last coefficients must be nonzero")
        g = 0
        for x in c:
            g = gcd(g, abs(x))
        if g != 1:
            raise ValueError("coefficients must have gcd 1")
        object.__setattr__(self, "c", c)

    @property
    def s(self) -> int:
        return len(self.c) - 1


def reverse_spec(spec: GcSpec) -> GcSpec:
    """The reversed coefficient tuple presents an isomorphic group
    (substitute the inverse shift and the top conjugate)."""
    return GcSpec(tuple(reversed(spec.c)))


def is_polycyclic_case(spec: GcSpec) -> bool:
    """Both end coefficients of absolute value one: the base is finitely
    generated and the group is polycyclic."""
    return abs(spec.c[0]) == 1 and abs(spec.c[-1]) == 1


def gc_matrix(spec: GcSpec) -> qlinalg.Matrix:
    """Action of the shift generator on Q^s: shifted identity block with
    last column -c_i / c_s."""
    s = spec.s
    cs = spec.c[-1]
    rows = []
    for i in range(1, s + 1):
        row = [Fraction(0)] * s
        if i >= 2:
            row[i - 2] = Fraction(1)
        row[s - 1] = Fraction(-spec.c[i - 1], cs)
        rows.append(tuple(row))
    return tuple(rows)


@dataclass(frozen=True)
class GcElt:
    """Element of Q^s x| Z: exact rational vector plus integer shift."""

    vec: tuple[Fraction, ...]
    shift: int


class GcGroup(Group):
    """Two-generator group with commuting conjugates b^(a^i) and a single
    product relation among b, b^a, ..., b^(a^s), realized inside Q^s x| Z.

    Generator names: a (= y) is the shift, b (= x1) the first basis vector;
    x1..xs address all basis vectors, so bounded witness languages over
    {x1..xs, y} evaluate directly.  The semidirect multiplication convention
    is picked at construction by testing the defining relation.
    """

    def __init__(self, spec: GcSpec):
        self.spec = spec
        self.s = spec.s
        self.matrix = gc_matrix(spec)
        self.matrix_inv = qlinalg.mat_inv(self.matrix)
        self.generators = (("a", "b", "y", "x")
                           + tuple(f"x{i}" for i in range(1, self.s + 1)))
        self._powers: dict[int, qlinalg.Matrix] = {0: qlinalg.identity(self.s)}
        self.convention = None
        for convention in ("right", "left"):
            self.convention = convention
            if self.is_identity(self.eval_word(self._relator_word())):
                break
        else:
            raise AssertionError("no multiplication convention satisfies "
                                 "the defining relation")

    def _relator_word(self) -> tuple[Letter, ...]:
        word: list[Letter] = []
        for i, coeff in enumerate(self.spec.c):
            word.extend((("a", -1),) * i)
            word.extend((("b", 1 if coeff > 0 else -1),) * abs(coeff))
            word.extend((("a", 1),) * i)
        return tuple(word)

    def matrix_power(self, k: int) -> qlinalg.Matrix:
        cached = self._powers.get(k)
        if cached is None:
            base = self.matrix if k > 0 else self.matrix_inv
            cached = qlinalg.mat_pow(base, abs(k))
            self._powers[k] = cached
        return cached

    def identity(self) -> GcElt:
        return GcElt((Fraction(0),) * self.s, 0)

    def letter(self, gen, exp) -> GcElt:
        if gen in ("a", "y"):
            return GcElt((Fraction(0),) * self.s, exp)
        if gen in ("b", "x"):
            index = 1
        else:
            index = int(gen[1:])
        vec = tuple(Fraction(exp) if j == index - 1 else Fraction(0)
                    for j in range(self.s))
        return GcElt(vec, 0)

    def mul(self, x: GcElt, y: GcElt) -> GcElt:
        if self.convention == "right":
            moved = qlinalg.mat_vec(self.matrix_power(y.shift), x.vec)
            vec = tuple(a + b for a, b in zip(moved, y.vec))
        else:
            moved = qlinalg.mat_vec(self.matrix_power(x.shift), y.vec)
            vec = tuple(a + b for a, b in zip(x.vec, moved))
        return GcElt(vec, x.shift + y.shift)


def gc_eval(spec: GcSpec, word: WordLike) -> GcElt:
    return GcGroup(spec).eval_word(word)


def bs_eval(m: int, n: int, word: WordLike) -> BsElt:
    return BaumslagSolitar(m, n).eval_word(word)


@dataclass(frozen=True)
class AbcElt:
    """Normal form shift * ordered lamp product * central part."""

    shift: int
    bpart: tuple  # sorted ((index, coeff mod p), ...), zeros omitted
    cpart: tuple  # sorted ((gap j > 0, coeff mod p), ...), zeros omitted


class AbcGroup(Group):
    """Derived-length-3 group: lamps b_i over Z with b_i^p = 1, shifted by a,
    where swapping lamps deposits central coordinates c_j = [b_i, b_(i+j)]
    with c_j^p = 1.

    Multiplication collects lamps into ascending index order; transposing
    b_i past b_j with i > j multiplies the central coordinate at gap i - j
    by the negated product of the exponents ([g,h] = g^-1 h^-1 g h).  The
    defining relations are verified at construction.
    """

    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.generators = ("a", "b")
        self._relator_suite(index_range=2, gap_range=3)

    def identity(self) -> AbcElt:
        return AbcElt(0, (), ())

    def letter(self, gen, exp) -> AbcElt:
        if gen == "a":
            return AbcElt(exp, (), ())
        coeff = exp % self.p
        return AbcElt(0, ((0, coeff),) if coeff else (), ())

    def mul(self, x: AbcElt, y: AbcElt) -> AbcElt:
        left = _shift_support(x.bpart, y.shift)
        right = y.bpart
        corrections = []
        for i, alpha in left:
            for j, beta in right:
                if i > j:
                    corrections.append((i - j, (-alpha * beta) % self.p))
        bpart = _merge_mod(left, right, self.p)
        cpart = _merge_mod(x.cpart, _merge_mod(y.cpart, corrections, self.p),
                           self.p)
        return AbcElt(x.shift + y.shift, bpart, cpart)

    def conjugate_word(self, base: str, power: int) -> tuple[Letter, ...]:
        """Word for base^(a^power) = a^-power base a^power."""
        sign = 1 if base.islower() else -1
        gen = base.lower()
        return ((("a", -1),) * power if power >= 0 else (("a", 1),) * -power) \
            + ((gen, sign),) \
            + ((("a", 1),) * power if power >= 0 else (("a", -1),) * -power)

    def commutator_word(self, i: int, j: int) -> tuple[Letter, ...]:
        """[b_i, b_j] as a word over a, b."""
        bi = self.conjugate_word("b", i)
        bj = self.conjugate_word("b", j)
        return invert_word(bi) + invert_word(bj) + bi + bj

    def _relator_suite(self, index_range: int, gap_range: int) -> None:
        for i in range(-index_range, index_range + 1):
            word = self.conjugate_word("b", i) * self.p
            if not self.in_word_problem(word):
                raise AssertionError(f"b_{i}^p != 1 in the model")
        for i in range(-index_range, index_range + 1):
            for j in range(1, gap_range + 1):
                comm = self.commutator_word(i, i + j)
                elt = self.eval_word(comm)
                if elt.shift != 0 or elt.bpart != () or not elt.cpart:
                    raise AssertionError(f"[b_{i}, b_{i + j}] not central")
                if not self.in_word_problem(comm * self.p):
                    raise AssertionError("central coordinate has wrong order")
                # the coordinate depends only on the gap
                other = self.eval_word(self.commutator_word(i + 1, i + 1 + j))
                if other.cpart != elt.cpart:
                    raise AssertionError("central coordinate not shift-stable")


def abc_eval(p: int, word: WordLike) -> AbcElt:
    return AbcGroup(p).eval_word(word)


_GROUP_CACHE: dict[tuple, Group] = {}


def group_from_descriptor(descriptor: str) -> Group:
    """Parse descriptors like free:2, zn:3, bs:1,2, wreath:p=2, wreath:Z,
    gc:1,-2, abc:p=3."""
    kind, _, arg = descriptor.partition(":")
    key: tuple
    if kind == "free":
        key = ("free", int(arg))
        maker = lambda: FreeGroup(int(arg))
    elif kind == "zn":
        key = ("zn", int(arg))
        maker = lambda: FreeAbelian(int(arg))
    elif kind == "bs":
        m, n = (int(x) for x in arg.split(","))
        key = ("bs", m, n)
        maker = lambda: BaumslagSolitar(m, n)
    elif kind == "wreath":
        if arg == "Z":
            key = ("wreath", None)
            maker = lambda: WreathOverZ(None)
        else:
            p = int(arg.removeprefix("p="))
            key = ("wreath", p)
            maker = lambda: WreathOverZ(p)
    elif kind == "gc":
        c = tuple(int(x) for x in arg.split(","))
        key = ("gc", c)
        maker = lambda: GcGroup(GcSpec(c))
    elif kind == "abc":
        p = int(arg.removeprefix("p="))
        key = ("abc", p)
        maker = lambda: AbcGroup(p)
    else:
        raise ValueError(f"unknown group descriptor {descriptor!r}")
    if key not in _GROUP_CACHE:
        _GROUP_CACHE[key] = maker()
    return _GROUP_CACHE[key]
