"""Context-free grammar backend: CNF normalization and memoized CYK.

Nonterminals are arbitrary non-string hashables (tuples in practice);
terminals are strings.  The CNF compiler handles epsilon- and unit-laden
grammars, so membership stays exact for pushdown machines with epsilon
cycles.  Parsing uses bitmask nonterminal sets with a global substring memo,
which makes large batches of related queries cheap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

NT = Hashable
Rhs = tuple  # mixed tuple of terminals (str) and nonterminals (non-str)

START: NT = ("#start",)


@dataclass
class Cfg:
    """Raw grammar. productions maps a nonterminal to a set of rhs tuples."""

    terminals: set[str]
    productions: dict[NT, set[Rhs]]
    start: NT = START

    def nonterminals(self) -> set[NT]:
        nts = set(self.productions)
        for rhss in self.productions.values():
            for rhs in rhss:
                nts.update(x for x in rhs if not isinstance(x, str))
        nts.add(self.start)
        return nts

    def add(self, lhs: NT, rhs: Sequence) -> None:
        self.productions.setdefault(lhs, set()).add(tuple(rhs))


def prune_useless(cfg: Cfg) -> Cfg:
    """Drop non-productive and unreachable nonterminals."""
    productive: set[NT] = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhss in cfg.productions.items():
            if lhs in productive:
                continue
            for rhs in rhss:
                if all(isinstance(x, str) or x in productive for x in rhs):
                    productive.add(lhs)
                    changed = True
                    break
    reachable: set[NT] = {cfg.start}
    frontier = [cfg.start]
    while frontier:
        nt = frontier.pop()
        for rhs in cfg.productions.get(nt, ()):
            if any(not isinstance(x, str) and x not in productive for x in rhs):
                continue
            for x in rhs:
                if not isinstance(x, str) and x not in reachable:
                    reachable.add(x)
                    frontier.append(x)
    keep = productive & reachable
    productions = {}
    for lhs in keep:
        rhss = {rhs for rhs in cfg.productions.get(lhs, set())
                if all(isinstance(x, str) or x in keep for x in rhs)}
        if rhss:
            productions[lhs] = rhss
    return Cfg(set(cfg.terminals), productions, cfg.start)


class CnfGrammar:
    """Chomsky-normal-form grammar with bitmask CYK and substring memo."""

    def __init__(self, n: int, start_bit: int, accepts_empty: bool,
                 term_masks: Mapping[str, int],
                 binary_rules: Iterable[tuple[int, int, int]]):
        self.n = n
        self.start_bit = start_bit
        self.accepts_empty = accepts_empty
        self.term_masks = dict(term_masks)
        # right_partners[b] = list of (c, lhs_mask): rules A -> B C grouped by B
        partners: dict[int, dict[int, int]] = {}
        for lhs_bit, b, c in binary_rules:
            partners.setdefault(b, {}).setdefault(c, 0)
            partners[b][c] |= lhs_bit
        self.right_partners = {
            b: tuple(cs.items()) for b, cs in partners.items()
        }
        self._combine_cache: dict[tuple[int, int], int] = {}
        self._mask_memo: dict[tuple[str, ...], int] = {}

    def _combine(self, left: int, right: int) -> int:
        key = (left, right)
        cached = self._combine_cache.get(key)
        if cached is not None:
            return cached
        acc = 0
        lm = left
        while lm:
            low = lm & -lm
            b = low.bit_length() - 1
            lm ^= low
            for c, lhs in self.right_partners.get(b, ()):
                if (right >> c) & 1:
                    acc |= lhs
        self._combine_cache[key] = acc
        return acc

    def mask(self, word: tuple[str, ...]) -> int:
        memo = self._mask_memo
        cached = memo.get(word)
        if cached is not None:
            return cached
        if len(word) == 1:
            result = self.term_masks.get(word[0], 0)
            memo[word] = result
            return result
        result = 0
        for i in range(1, len(word)):
            left = self.mask(word[:i])
            if left:
                right = self.mask(word[i:])
                if right:
                    result |= self._combine(left, right)
        memo[word] = result
        return result

    def derives(self, word: Sequence[str]) -> bool:
        word = tuple(word)
        if not word:
            return self.accepts_empty
        return bool(self.mask(word) & self.start_bit)


def to_cnf(cfg: Cfg) -> CnfGrammar:
    """Standard pipeline: prune, lift terminals, binarize, drop nullables,
    close unit chains, prune again, then index into bitmasks.
    """
    cfg = prune_useless(cfg)
    if cfg.start not in cfg.productions:
        return CnfGrammar(0, 0, False, {}, ())

    productions: dict[NT, set[Rhs]] = {
        lhs: set(rhss) for lhs, rhss in cfg.productions.items()}

    def fresh_term(sym: str) -> NT:
        nt = ("#t", sym)
        productions.setdefault(nt, set()).add((sym,))
        return nt

    # TERM: terminals only in length-1 rhs
    for lhs in list(productions):
        new_rhss = set()
        for rhs in productions[lhs]:
            if len(rhs) >= 2:
                rhs = tuple(fresh_term(x) if isinstance(x, str) else x
                            for x in rhs)
            new_rhss.add(rhs)
        productions[lhs] = new_rhss

    # BIN: rhs length at most 2, chaining through fresh nonterminals
    counter = itertools.count()
    work = [(lhs, rhs) for lhs, rhss in productions.items() for rhs in rhss]
    productions = {}
    for lhs, rhs in work:
        while len(rhs) > 2:
            nt = ("#b", next(counter))
            productions.setdefault(lhs, set()).add((rhs[0], nt))
            lhs, rhs = nt, rhs[1:]
        productions.setdefault(lhs, set()).add(rhs)

    # DEL: nullable elimination
    nullable: set[NT] = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhss in productions.items():
            if lhs in nullable:
                continue
            for rhs in rhss:
                if all(not isinstance(x, str) and x in nullable for x in rhs):
                    nullable.add(lhs)
                    changed = True
                    break
    accepts_empty = cfg.start in nullable
    for lhs in list(productions):
        extra = set()
        for rhs in productions[lhs]:
            if len(rhs) == 2:
                a, b = rhs
                if a in nullable:
                    extra.add((b,))
                if b in nullable:
                    extra.add((a,))
        productions[lhs] = {
            rhs for rhs in (productions[lhs] | extra) if rhs != ()
        }

    # UNIT: transitive closure of single-nonterminal rules
    unit_next: dict[NT, set[NT]] = {}
    for lhs, rhss in productions.items():
        for rhs in rhss:
            if len(rhs) == 1 and not isinstance(rhs[0], str):
                unit_next.setdefault(lhs, set()).add(rhs[0])
    closure: dict[NT, set[NT]] = {}

    def unit_reach(nt: NT) -> set[NT]:
        if nt in closure:
            return closure[nt]
        seen = {nt}
        stack = [nt]
        while stack:
            cur = stack.pop()
            for nxt in unit_next.get(cur, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        closure[nt] = seen
        return seen

    final: dict[NT, set[Rhs]] = {}
    for lhs in productions:
        rhss = set()
        for mid in unit_reach(lhs):
            for rhs in productions.get(mid, ()):
                if len(rhs) == 2 or (len(rhs) == 1 and isinstance(rhs[0], str)):
                    rhss.add(rhs)
        if rhss:
            final[lhs] = rhss

    pruned = prune_useless(Cfg(set(cfg.terminals), final, cfg.start))
    nts = sorted(pruned.productions, key=repr)
    if pruned.start not in pruned.productions:
        return CnfGrammar(0, 0, accepts_empty, {}, ())
    index = {nt: i for i, nt in enumerate(nts)}
    term_masks: dict[str, int] = {}
    binary = []
    for lhs, rhss in pruned.productions.items():
        lhs_bit = 1 << index[lhs]
        for rhs in rhss:
            if len(rhs) == 1:
                term_masks[rhs[0]] = term_masks.get(rhs[0], 0) | lhs_bit
            else:
                binary.append((lhs_bit, index[rhs[0]], index[rhs[1]]))
    return CnfGrammar(len(nts), 1 << index[pruned.start], accepts_empty,
                      term_masks, binary)
