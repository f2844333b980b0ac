"""Nondeterministic pushdown machines and conjunctive recognizers.

Acceptance convention throughout: accepting state AND empty stack after the
whole input is consumed.  Exact membership goes through a triple-construction
grammar, CNF normalization, and memoized CYK; a breadth-first configuration
explorer is kept as an independent (one-sided) oracle and for search pruning.

A KcfRecognizer holds finitely many machines over a common alphabet and
accepts the intersection of their languages.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .grammar import Cfg, CnfGrammar, to_cnf

Word = tuple[str, ...]
TransKey = tuple[str, str | None, str]
TransVal = tuple[str, tuple[str, ...]]


class Npda:
    """Pushdown machine: finite control, one stack, nondeterministic moves.

    transitions maps (state, input symbol or None for epsilon, stack top) to a
    set of (next state, pushed string); the pushed string replaces the popped
    top, leftmost symbol on top.
    """

    def __init__(self, states: Iterable[str], input_alphabet: Iterable[str],
                 stack_alphabet: Iterable[str], initial: str,
                 initial_stack: str, accepting: Iterable[str],
                 transitions: Mapping[TransKey, Iterable[TransVal]]):
        self.states = frozenset(states)
        self.input_alphabet = frozenset(input_alphabet)
        self.stack_alphabet = frozenset(stack_alphabet)
        self.initial = initial
        self.initial_stack = initial_stack
        self.accepting = frozenset(accepting)
        trans: dict[TransKey, frozenset[TransVal]] = {}
        for (q, a, top), moves in transitions.items():
            moves = frozenset((q2, tuple(push)) for q2, push in moves)
            trans[(q, a, top)] = moves
        self.transitions = trans
        self._validate()
        self._cnf: CnfGrammar | None = None

    def _validate(self) -> None:
        if self.initial not in self.states:
            raise ValueError("initial state not declared")
        if self.initial_stack not in self.stack_alphabet:
            raise ValueError("initial stack symbol not declared")
        if not self.accepting <= self.states:
            raise ValueError("accepting states not declared")
        for (q, a, top), moves in self.transitions.items():
            if q not in self.states or top not in self.stack_alphabet:
                raise ValueError(f"undeclared state/stack in {(q, a, top)}")
            if a is not None and a not in self.input_alphabet:
                raise ValueError(f"undeclared input symbol {a!r}")
            for q2, push in moves:
                if q2 not in self.states:
                    raise ValueError(f"undeclared target state {q2!r}")
                if any(s not in self.stack_alphabet for s in push):
                    raise ValueError(f"undeclared pushed symbol in {push}")

    @property
    def max_push(self) -> int:
        longest = 1
        for moves in self.transitions.values():
            for _, push in moves:
                longest = max(longest, len(push))
        return longest

    def cnf(self) -> CnfGrammar:
        if self._cnf is None:
            self._cnf = to_cnf(cfg_from_pda(self))
        return self._cnf

    def __repr__(self) -> str:
        return (f"Npda(states={len(self.states)}, "
                f"input={sorted(self.input_alphabet)}, "
                f"trans={sum(len(m) for m in self.transitions.values())})")


def _check_word(pda: Npda, word: Sequence[str]) -> Word:
    word = tuple(word)
    for sym in word:
        if sym not in pda.input_alphabet:
            raise ValueError(f"symbol {sym!r} not in the input alphabet")
    return word


def cfg_from_pda(pda: Npda) -> Cfg:
    """Triple construction for empty-stack-and-accepting-state acceptance.

    Nonterminal (q, A, p) derives the words that move the machine from state
    q with A on top to state p with A net-popped.  Productive triples are
    computed first so only useful productions are materialized.
    """
    states = sorted(pda.states)
    # fixpoint of productive triples
    productive: set[tuple[str, str, str]] = set()
    by_left: dict[tuple[str, str], set[str]] = {}

    def note(tr):
        if tr not in productive:
            productive.add(tr)
            by_left.setdefault((tr[0], tr[1]), set()).add(tr[2])
            return True
        return False

    changed = True
    while changed:
        changed = False
        for (q, _a, top), moves in pda.transitions.items():
            for q2, push in moves:
                if not push:
                    changed |= note((q, top, q2))
                elif len(push) == 1:
                    for p in by_left.get((q2, push[0]), ()):
                        changed |= note((q, top, p))
                else:
                    # chain through intermediate endpoints
                    ends = {q2}
                    for sym in push[:-1]:
                        nxt = set()
                        for s in ends:
                            nxt |= by_left.get((s, sym), set())
                        ends = nxt
                        if not ends:
                            break
                    for s in ends:
                        for p in by_left.get((s, push[-1]), ()):
                            changed |= note((q, top, p))

    cfg = Cfg(set(pda.input_alphabet), {})
    for f in sorted(pda.accepting):
        if (pda.initial, pda.initial_stack, f) in productive:
            cfg.add(cfg.start, ((pda.initial, pda.initial_stack, f),))
    for (q, a, top), moves in sorted(pda.transitions.items(),
                                     key=lambda kv: repr(kv[0])):
        head = (a,) if a is not None else ()
        for q2, push in sorted(moves):
            if not push:
                cfg.add((q, top, q2), head)
                continue
            # all state sequences q2 -> p1 -> ... -> p_end through push symbols
            partials: list[tuple[str, tuple]] = [(q2, ())]
            for sym in push[:-1]:
                nxt = []
                for state, seq in partials:
                    for p in by_left.get((state, sym), ()):
                        nxt.append((p, seq + ((state, sym, p),)))
                partials = nxt
                if not partials:
                    break
            for state, seq in partials:
                for p in by_left.get((state, push[-1]), ()):
                    cfg.add((q, top, p), head + seq + ((state, push[-1], p),))
    return cfg


def pda_accepts(pda: Npda, word: Sequence[str]) -> bool:
    """Exact membership via the grammar backend (complete for epsilon cycles)."""
    return pda.cnf().derives(_check_word(pda, word))


def explore_accepts(pda: Npda, word: Sequence[str], extra_depth: int = 8) -> bool:
    """Depth-capped configuration-graph search.

    Sound but not complete (pushing epsilon cycles may exceed the cap); used
    as an independent oracle against the grammar backend.
    """
    word = _check_word(pda, word)
    cap = len(word) * pda.max_push + extra_depth
    start = (pda.initial, 0, (pda.initial_stack,))
    seen = {start}
    queue = [start]
    while queue:
        state, pos, stack = queue.pop()
        if pos == len(word) and not stack and state in pda.accepting:
            return True
        if not stack:
            continue
        top, rest = stack[0], stack[1:]
        for a in ([None, word[pos]] if pos < len(word) else [None]):
            for q2, push in pda.transitions.get((state, a, top), ()):
                new_stack = push + rest
                if len(new_stack) > cap:
                    continue
                nxt = (q2, pos + (a is not None), new_stack)
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return False


class PdaConfigSet:
    """Set of (state, stack) configurations reached on a consumed prefix.

    Supports incremental stepping for search pruning: an empty, untruncated
    set means no completion of the prefix can be accepted.
    """

    __slots__ = ("pda", "configs", "truncated", "depth_cap")

    def __init__(self, pda: Npda, depth_cap: int,
                 configs: frozenset | None = None, truncated: bool = False):
        self.pda = pda
        self.depth_cap = depth_cap
        if configs is None:
            base = {(pda.initial, (pda.initial_stack,))}
            configs, truncated = self._closure(base)
        self.configs = configs
        self.truncated = truncated

    def _closure(self, base: set) -> tuple[frozenset, bool]:
        seen = set(base)
        stack = list(base)
        truncated = False
        while stack:
            state, st = stack.pop()
            if not st:
                continue
            top, rest = st[0], st[1:]
            for q2, push in self.pda.transitions.get((state, None, top), ()):
                new_stack = push + rest
                if len(new_stack) > self.depth_cap:
                    truncated = True
                    continue
                cfg = (q2, new_stack)
                if cfg not in seen:
                    seen.add(cfg)
                    stack.append(cfg)
        return frozenset(seen), truncated

    def step(self, sym: str) -> "PdaConfigSet":
        base = set()
        for state, st in self.configs:
            if not st:
                continue
            top, rest = st[0], st[1:]
            for q2, push in self.pda.transitions.get((state, sym, top), ()):
                new_stack = push + rest
                if len(new_stack) <= self.depth_cap:
                    base.add((q2, new_stack))
        configs, truncated = self._closure(base)
        return PdaConfigSet(self.pda, self.depth_cap, configs,
                            truncated or self.truncated)

    def dead(self) -> bool:
        return not self.configs and not self.truncated

    def accepting(self) -> bool:
        return any(state in self.pda.accepting and not st
                   for state, st in self.configs)


@dataclass(frozen=True)
class KcfRecognizer:
    """Conjunction of pushdown machines over one alphabet: accept = all accept."""

    pdas: tuple[Npda, ...]

    def __init__(self, pdas: Iterable[Npda]):
        pdas = tuple(pdas)
        if not pdas:
            raise ValueError("need at least one machine")
        alphabet = pdas[0].input_alphabet
        for pda in pdas[1:]:
            if pda.input_alphabet != alphabet:
                raise ValueError("component alphabets differ")
        object.__setattr__(self, "pdas", pdas)

    @property
    def alphabet(self) -> frozenset[str]:
        return self.pdas[0].input_alphabet

    @property
    def k(self) -> int:
        return len(self.pdas)


def kcf_accepts(rec: KcfRecognizer, word: Sequence[str]) -> bool:
    return all(pda_accepts(pda, word) for pda in rec.pdas)


def _extend_ignoring(pda: Npda, foreign: Iterable[str]) -> Npda:
    """Same machine over a larger alphabet; foreign symbols are consumed by
    stack-preserving self-loops in every state."""
    foreign = sorted(set(foreign))
    transitions = {k: set(v) for k, v in pda.transitions.items()}
    for q in sorted(pda.states):
        for sym in foreign:
            for top in sorted(pda.stack_alphabet):
                transitions.setdefault((q, sym, top), set()).add((q, (top,)))
    return Npda(pda.states, set(pda.input_alphabet) | set(foreign),
                pda.stack_alphabet, pda.initial, pda.initial_stack,
                pda.accepting, transitions)


def direct_product(r1: KcfRecognizer, r2: KcfRecognizer) -> KcfRecognizer:
    """Recognizer over the disjoint union alphabet: each side ignores the
    other's symbols, so a word is accepted iff both erased images are."""
    if r1.alphabet & r2.alphabet:
        raise ValueError("alphabets must be disjoint")
    pdas = [_extend_ignoring(p, r2.alphabet) for p in r1.pdas]
    pdas += [_extend_ignoring(p, r1.alphabet) for p in r2.pdas]
    return KcfRecognizer(pdas)


def _pda_inverse_hom(pda: Npda, hom: Mapping[str, Sequence[str]]) -> Npda:
    """Machine accepting {w : pda accepts hom(w)}.

    States carry the unconsumed suffix of the current image word; real input
    is read only with an empty buffer, and the original moves run on the
    buffer head as virtual input.
    """
    suffixes = {()}
    for image in hom.values():
        image = tuple(image)
        for i in range(len(image)):
            suffixes.add(image[i:])
    states = {(q, suf) for q in pda.states for suf in suffixes}

    def name(q, suf):
        return f"{q}@{'.'.join(suf)}"

    transitions: dict[TransKey, set[TransVal]] = {}

    def add(key, val):
        transitions.setdefault(key, set()).add(val)

    for q in sorted(pda.states):
        for g in sorted(hom):
            image = tuple(hom[g])
            for top in sorted(pda.stack_alphabet):
                add((name(q, ()), g, top), (name(q, image), (top,)))
    for (q, a, top), moves in pda.transitions.items():
        for q2, push in moves:
            if a is None:
                for suf in suffixes:
                    add((name(q, suf), None, top), (name(q2, suf), push))
            else:
                for suf in suffixes:
                    if suf and suf[0] == a:
                        add((name(q, suf), None, top),
                            (name(q2, suf[1:]), push))
    return Npda({name(q, suf) for q, suf in states}, sorted(hom),
                pda.stack_alphabet, name(pda.initial, ()), pda.initial_stack,
                {name(f, ()) for f in pda.accepting}, transitions)


def inverse_homomorphism(rec: KcfRecognizer,
                         hom: Mapping[str, Sequence[str]]) -> KcfRecognizer:
    """Preimage recognizer: w is accepted iff rec accepts hom(w)."""
    for g, image in hom.items():
        for sym in image:
            if sym not in rec.alphabet:
                raise ValueError(f"hom image symbol {sym!r} not in alphabet")
    return KcfRecognizer([_pda_inverse_hom(p, hom) for p in rec.pdas])


class Dfa:
    """Deterministic, total finite automaton."""

    def __init__(self, states: Iterable[str], alphabet: Iterable[str],
                 delta: Mapping[tuple[str, str], str], initial: str,
                 accepting: Iterable[str]):
        self.states = frozenset(states)
        self.alphabet = frozenset(alphabet)
        self.delta = dict(delta)
        self.initial = initial
        self.accepting = frozenset(accepting)
        if self.initial not in self.states:
            raise ValueError("initial state not declared")
        if not self.accepting <= self.states:
            raise ValueError("accepting states not declared")
        for q in self.states:
            for a in self.alphabet:
                if (q, a) not in self.delta:
                    raise ValueError(f"missing transition ({q!r}, {a!r})")
                if self.delta[(q, a)] not in self.states:
                    raise ValueError(f"undeclared target of ({q!r}, {a!r})")

    def accepts(self, word: Sequence[str]) -> bool:
        q = self.initial
        for sym in word:
            if sym not in self.alphabet:
                raise ValueError(f"symbol {sym!r} not in DFA alphabet")
            q = self.delta[(q, sym)]
        return q in self.accepting


def dfa_all(alphabet: Iterable[str]) -> Dfa:
    alphabet = sorted(set(alphabet))
    return Dfa({"q"}, alphabet, {("q", a): "q" for a in alphabet}, "q", {"q"})


def dfa_none(alphabet: Iterable[str]) -> Dfa:
    alphabet = sorted(set(alphabet))
    return Dfa({"q"}, alphabet, {("q", a): "q" for a in alphabet}, "q", set())


def dfa_symbol_blocks(alphabet: Iterable[str],
                      blocks: Sequence[str]) -> Dfa:
    """DFA for b_1* b_2* ... b_n* over the given alphabet.

    State s_i means the word so far fits inside the first i blocks; a symbol
    is assigned greedily to the earliest usable block, which is optimal for
    this ordered-blocks language.
    """
    alphabet = sorted(set(alphabet))
    n = len(blocks)
    states = [f"s{i}" for i in range(n + 1)] + ["dead"]
    delta = {}
    for i in range(n + 1):
        for a in alphabet:
            target = "dead"
            for j in range(max(i, 1), n + 1):
                if blocks[j - 1] == a:
                    target = f"s{j}"
                    break
            delta[(f"s{i}", a)] = target
    for a in alphabet:
        delta[("dead", a)] = "dead"
    accepting = {f"s{i}" for i in range(n + 1)}
    return Dfa(states, alphabet, delta, "s0", accepting)


def _pda_dfa_product(pda: Npda, dfa: Dfa) -> Npda:
    """Machine for L(pda) & L(dfa): input moves advance both components."""
    def name(q, d):
        return f"{q}~{d}"

    transitions: dict[TransKey, set[TransVal]] = {}
    for (q, a, top), moves in pda.transitions.items():
        for q2, push in moves:
            if a is None:
                for d in sorted(dfa.states):
                    transitions.setdefault((name(q, d), None, top),
                                           set()).add((name(q2, d), push))
            else:
                for d in sorted(dfa.states):
                    d2 = dfa.delta[(d, a)]
                    transitions.setdefault((name(q, d), a, top),
                                           set()).add((name(q2, d2), push))
    states = {name(q, d) for q in pda.states for d in dfa.states}
    accepting = {name(q, d) for q in pda.accepting for d in dfa.accepting}
    return Npda(states, pda.input_alphabet, pda.stack_alphabet,
                name(pda.initial, dfa.initial), pda.initial_stack,
                accepting, transitions)


def intersect_regular(rec: KcfRecognizer, dfa: Dfa) -> KcfRecognizer:
    """Replace the last component with its product against the DFA."""
    if dfa.alphabet != rec.alphabet:
        raise ValueError("DFA alphabet must match the recognizer alphabet")
    pdas = list(rec.pdas)
    pdas[-1] = _pda_dfa_product(pdas[-1], dfa)
    return KcfRecognizer(pdas)


def _pda_union(p1: Npda, p2: Npda) -> Npda:
    """Nondeterministic-choice union; an initial epsilon move replaces the
    fresh bottom symbol by either component's bottom symbol."""
    if p1.input_alphabet != p2.input_alphabet:
        raise ValueError("alphabets must match")

    def n1(x):
        return f"1:{x}"

    def n2(x):
        return f"2:{x}"

    transitions: dict[TransKey, set[TransVal]] = {}
    for (q, a, top), moves in p1.transitions.items():
        transitions[(n1(q), a, n1(top))] = {
            (n1(q2), tuple(n1(s) for s in push)) for q2, push in moves}
    for (q, a, top), moves in p2.transitions.items():
        transitions[(n2(q), a, n2(top))] = {
            (n2(q2), tuple(n2(s) for s in push)) for q2, push in moves}
    start, bottom = "u0", "Zu"
    transitions[(start, None, bottom)] = {
        (n1(p1.initial), (n1(p1.initial_stack),)),
        (n2(p2.initial), (n2(p2.initial_stack),)),
    }
    states = ({start} | {n1(q) for q in p1.states}
              | {n2(q) for q in p2.states})
    stack = ({bottom} | {n1(s) for s in p1.stack_alphabet}
             | {n2(s) for s in p2.stack_alphabet})
    accepting = ({n1(q) for q in p1.accepting}
                 | {n2(q) for q in p2.accepting})
    return Npda(states, p1.input_alphabet, stack, start, bottom,
                accepting, transitions)


def kcf_union(r1: KcfRecognizer, r2: KcfRecognizer) -> KcfRecognizer:
    """Recognizer for the union: one component per pair, each the union
    machine of one component from each side (m*n components)."""
    if r1.alphabet != r2.alphabet:
        raise ValueError("alphabets must match")
    pdas = [_pda_union(a, b) for a in r1.pdas for b in r2.pdas]
    return KcfRecognizer(pdas)


def one_counter_pda(pos: str, neg: str, foreign: Iterable[str] = ()) -> Npda:
    """Machine for the words over {pos, neg} with equal counts (the word
    problem of the integers); the sign lives above the bottom marker, so the
    stack holds only P's or only N's.
    """
    alphabet = {pos, neg} | set(foreign)
    transitions: dict[TransKey, set[TransVal]] = {
        ("q", pos, "Z"): {("q", ("P", "Z"))},
        ("q", pos, "P"): {("q", ("P", "P"))},
        ("q", pos, "N"): {("q", ())},
        ("q", neg, "Z"): {("q", ("N", "Z"))},
        ("q", neg, "N"): {("q", ("N", "N"))},
        ("q", neg, "P"): {("q", ())},
        ("q", None, "Z"): {("f", ())},
    }
    pda = Npda({"q", "f"}, {pos, neg}, {"Z", "P", "N"}, "q", "Z", {"f"},
               transitions)
    if foreign:
        pda = _extend_ignoring(pda, foreign)
    return pda


def zk_recognizer(k: int) -> KcfRecognizer:
    """Word problem recognizer for the free abelian group of rank k, built by
    folding direct products of one-counter machines; alphabet x1..xk, X1..Xk.
    """
    rec = KcfRecognizer([one_counter_pda("x1", "X1")])
    for i in range(2, k + 1):
        rec = direct_product(
            rec, KcfRecognizer([one_counter_pda(f"x{i}", f"X{i}")]))
    return rec


def _wreath_shape_dfa(k: int) -> Dfa:
    """Shape (A* b a*)^k (A* B a*)^k over {a, A, b, B}."""
    alphabet = ["A", "B", "a", "b"]
    states = ["dead"]
    delta = {}
    for i in range(1, 2 * k + 1):
        states += [f"pre{i}", f"post{i}"]

    def letter(i):
        return "b" if i <= k else "B"

    for i in range(1, 2 * k + 1):
        pre, post = f"pre{i}", f"post{i}"
        delta[(pre, "A")] = pre
        delta[(pre, letter(i))] = post
        delta[(post, "a")] = post
        if i < 2 * k:
            delta[(post, "A")] = f"pre{i + 1}"
            delta[(post, letter(i + 1))] = f"post{i + 1}"
    for q in states:
        for a in alphabet:
            delta.setdefault((q, a), "dead")
    return Dfa(states, alphabet, delta, "pre1", {f"post{2 * k}"})


def _wreath_equality_pda() -> Npda:
    """Within each A-run/letter/a-run block, the A-count equals the a-count."""
    t: dict[TransKey, set[TransVal]] = {}
    for top in ("Z", "U"):
        t[("s0", "A", top)] = {("s0", ("U", top))}
        for sym in ("b", "B"):
            t[("s0", sym, top)] = {("s1", (top,))}
    t[("s1", "a", "U")] = {("s1", ())}
    t[("s1", "A", "Z")] = {("s0", ("U", "Z"))}
    for sym in ("b", "B"):
        t[("s1", sym, "Z")] = {("s1", ("Z",))}
    t[("s1", None, "Z")] = {("f", ())}
    t[("s0", None, "Z")] = {("f", ())}
    return Npda({"s0", "s1", "f"}, {"a", "A", "b", "B"}, {"Z", "U"},
                "s0", "Z", {"f"}, t)


def _wreath_growth_pda(k: int) -> Npda:
    """Blockwise a-count of block i strictly below the A-count of block i+1,
    except across the two half boundaries (i = k and i = 2k)."""
    n_blocks = 2 * k
    compare_next = [i not in (k, 2 * k) for i in range(n_blocks + 1)]
    t: dict[TransKey, set[TransVal]] = {}
    states = {"f"}

    def letter(i):
        return "b" if i <= k else "B"

    def add(key, val):
        t.setdefault(key, set()).add(val)

    for i in range(1, n_blocks + 1):
        arun = f"A{i}"   # reading A-run of block i
        ext = f"E{i}"    # A-run after strict excess is certified
        post = f"a{i}"   # reading a-run of block i
        states |= {arun, ext, post}
        comparing = i > 1 and compare_next[i - 1]
        if comparing:
            add((arun, "A", "V"), (arun, ()))
            add((arun, "A", "Z"), (ext, ("Z",)))
            add((ext, "A", "Z"), (ext, ("Z",)))
            add((ext, letter(i), "Z"), (post, ("Z",)))
        else:
            add((arun, "A", "Z"), (arun, ("Z",)))
            add((arun, letter(i), "Z"), (post, ("Z",)))
        if compare_next[i]:
            for top in ("Z", "V"):
                add((post, "a", top), (post, ("V", top)))
        else:
            add((post, "a", "Z"), (post, ("Z",)))
        if i < n_blocks:
            # the boundary transition does the first A's work for block i+1
            if compare_next[i]:
                add((post, "A", "V"), (f"A{i + 1}", ()))
                add((post, "A", "Z"), (f"E{i + 1}", ("Z",)))
            else:
                add((post, "A", "Z"), (f"A{i + 1}", ("Z",)))
                # next block may have an empty A-run only when uncompared
                add((post, letter(i + 1), "Z"), (f"a{i + 1}", ("Z",)))
        else:
            add((post, None, "Z"), ("f", ()))
    return Npda(states, {"a", "A", "b", "B"}, {"Z", "V"}, "A1", "Z",
                {"f"}, t)


def build_Mk_wreath(k: int) -> KcfRecognizer:
    """Two machines intersected with the block-shape language: blockwise
    A-count equals a-count, and each a-count is strictly below the next
    block's A-count except across the two halves."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rec = KcfRecognizer([_wreath_growth_pda(k), _wreath_equality_pda()])
    return intersect_regular(rec, _wreath_shape_dfa(k))


def _abc_letters(i: int, k: int) -> tuple[str, str, str, str]:
    """The four marker letters of block i in the quadruple-run shape."""
    return ("B", "B", "b", "b") if i <= k else ("B", "b", "b", "B")


def _abc_shape_dfa(k: int) -> Dfa:
    """Shape (B A* B a* b A* b a*)^k (B A* b a* b A* B a*)^k."""
    alphabet = ["A", "B", "a", "b"]
    states = ["dead"]
    delta = {}
    for i in range(1, 2 * k + 1):
        for j in range(4):
            states.append(f"r{i}.{j}")
    for i in range(1, 2 * k + 1):
        letters = _abc_letters(i, k)
        for j in range(4):
            state = f"r{i}.{j}"
            run = "A" if j % 2 == 0 else "a"
            delta[(state, run)] = state
            if j < 3:
                delta[(state, letters[j + 1])] = f"r{i}.{j + 1}"
            elif i < 2 * k:
                nxt = _abc_letters(i + 1, k)
                delta[(state, nxt[0])] = f"r{i + 1}.0"
    start = "start"
    states.append(start)
    delta[(start, _abc_letters(1, k)[0])] = "r1.0"
    for q in states:
        for a in alphabet:
            delta.setdefault((q, a), "dead")
    return Dfa(states, alphabet, delta, start, {f"r{2 * k}.3"})


def _abc_adjacent_pda() -> Npda:
    """Every A-run matches the a-run that follows it (first condition's
    m=n and mu=nu halves); identical in spirit to the two-letter machine."""
    t: dict[TransKey, set[TransVal]] = {}
    t[("sa", "a", "U")] = {("sa", ())}
    for sym in ("b", "B"):
        t[("sa", sym, "Z")] = {("sA", ("Z",))}
        t[("sA", sym, "Z")] = {("sa", ("Z",))}
        t[("sA", sym, "U")] = {("sa", ("U",))}
    for top in ("Z", "U"):
        t[("sA", "A", top)] = {("sA", ("U", top))}
    t[("sa", None, "Z")] = {("f", ())}
    return Npda({"sa", "sA", "f"}, {"a", "A", "b", "B"}, {"Z", "U"},
                "sa", "Z", {"f"}, t)


def _abc_cross_pda() -> Npda:
    """The two A-runs of every block agree (m = mu): push on runs after an
    odd marker letter, pop on runs after the third, check empty at block end.
    Marker letters are counted mod 4."""
    t: dict[TransKey, set[TransVal]] = {}
    # states c0..c3: number of marker letters seen mod 4 within current block
    for sym in ("b", "B"):
        t[("c0", sym, "Z")] = {("c1", ("Z",))}
        for top in ("Z", "U"):
            t[("c1", sym, top)] = {("c2", (top,))}
            t[("c2", sym, top)] = {("c3", (top,))}
        t[("c3", sym, "Z")] = {("c0", ("Z",))}
    for top in ("Z", "U"):
        t[("c1", "A", top)] = {("c1", ("U", top))}
        t[("c2", "a", top)] = {("c2", (top,))}
        t[("c0", "a", top)] = {("c0", (top,))}
    t[("c3", "A", "U")] = {("c3", ())}
    t[("c0", None, "Z")] = {("f", ())}
    return Npda({"c0", "c1", "c2", "c3", "f"}, {"a", "A", "b", "B"},
                {"Z", "U"}, "c0", "Z", {"f"}, t)


def _abc_growth_pda(k: int) -> Npda:
    """Strict growth of the block exponents within each half.

    Compares the final a-run of block i against the first A-run of block
    i+1; inside the full intersection all four runs of a block agree, so
    this realizes strict growth of the leading exponents.  Marker letters
    b/B are treated interchangeably (the shape machine pins them down).
    """
    n_blocks = 2 * k
    compare_next = [i not in (k, 2 * k) for i in range(n_blocks + 1)]
    t: dict[TransKey, set[TransVal]] = {}
    states = {"f", "start"}

    def add(key, val):
        t.setdefault(key, set()).add(val)

    for sym in ("b", "B"):
        add(("start", sym, "Z"), ("m0.1", ("Z",)))
    for i in range(1, n_blocks + 1):
        # phases inside block i, each entered by consuming a marker letter:
        # m0 first A-run, m1 first a-run, m2 second A-run, m3 final a-run
        m0, m1, m2, m3 = (f"m{p}.{i}" for p in range(4))
        excess = f"e.{i}"
        states |= {m0, m1, m2, m3, excess}
        comparing = i > 1 and compare_next[i - 1]
        if comparing:
            add((m0, "A", "V"), (m0, ()))
            add((m0, "A", "Z"), (excess, ("Z",)))
            add((excess, "A", "Z"), (excess, ("Z",)))
            for sym in ("b", "B"):
                add((excess, sym, "Z"), (m1, ("Z",)))
        else:
            add((m0, "A", "Z"), (m0, ("Z",)))
            for sym in ("b", "B"):
                add((m0, sym, "Z"), (m1, ("Z",)))
        add((m1, "a", "Z"), (m1, ("Z",)))
        for sym in ("b", "B"):
            add((m1, sym, "Z"), (m2, ("Z",)))
        add((m2, "A", "Z"), (m2, ("Z",)))
        for sym in ("b", "B"):
            add((m2, sym, "Z"), (m3, ("Z",)))
        if compare_next[i]:
            for top in ("Z", "V"):
                add((m3, "a", top), (m3, ("V", top)))
        else:
            add((m3, "a", "Z"), (m3, ("Z",)))
        if i < n_blocks:
            for sym in ("b", "B"):
                for top in ("Z", "V"):
                    add((m3, sym, top), (f"m0.{i + 1}", (top,)))
        else:
            add((m3, None, "Z"), ("f", ()))
    return Npda(states, {"a", "A", "b", "B"}, {"Z", "V"}, "start", "Z",
                {"f"}, t)


def build_Mk_abc(k: int) -> KcfRecognizer:
    """Three machines intersected with the quadruple-run shape: adjacent
    run equality, cross run equality, and strict half-wise growth."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rec = KcfRecognizer([_abc_adjacent_pda(), _abc_cross_pda(),
                         _abc_growth_pda(k)])
    return intersect_regular(rec, _abc_shape_dfa(k))


# Text formats.  PDA:
#   pda states=q,f input=x,X stack=Z,P,N init=q initstack=Z accept=f
#   t q x Z -> q P,Z          ('_' = epsilon input / empty push)
# DFA:
#   dfa states=.. input=.. init=.. accept=..
#   t q x -> q2

def format_pda(pda: Npda) -> str:
    head = ("pda states={} input={} stack={} init={} initstack={} accept={}"
            .format(",".join(sorted(pda.states)),
                    ",".join(sorted(pda.input_alphabet)),
                    ",".join(sorted(pda.stack_alphabet)),
                    pda.initial, pda.initial_stack,
                    ",".join(sorted(pda.accepting))))
    lines = [head]
    for (q, a, top), moves in sorted(pda.transitions.items(),
                                     key=lambda kv: repr(kv[0])):
        for q2, push in sorted(moves):
            lines.append("t {} {} {} -> {} {}".format(
                q, a if a is not None else "_", top, q2,
                ",".join(push) if push else "_"))
    return "\n".join(lines)


def parse_pda(text: str) -> Npda:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("pda"):
        raise ValueError("expected 'pda' header")
    fields = {}
    for tok in lines[0].split()[1:]:
        key, _, val = tok.partition("=")
        fields[key] = val
    transitions: dict[TransKey, set[TransVal]] = {}
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] != "t" or parts[4] != "->":
            raise ValueError(f"bad transition line {ln!r}")
        q, a, top, q2, push = parts[1], parts[2], parts[3], parts[5], parts[6]
        key = (q, None if a == "_" else a, top)
        val = (q2, () if push == "_" else tuple(push.split(",")))
        transitions.setdefault(key, set()).add(val)
    split = lambda s: set(s.split(",")) if s else set()
    return Npda(split(fields["states"]), split(fields["input"]),
                split(fields["stack"]), fields["init"], fields["initstack"],
                split(fields["accept"]), transitions)


def format_dfa(dfa: Dfa) -> str:
    head = ("dfa states={} input={} init={} accept={}"
            .format(",".join(sorted(dfa.states)),
                    ",".join(sorted(dfa.alphabet)),
                    dfa.initial, ",".join(sorted(dfa.accepting))))
    lines = [head]
    for (q, a), q2 in sorted(dfa.delta.items()):
        lines.append(f"t {q} {a} -> {q2}")
    return "\n".join(lines)


def parse_dfa(text: str) -> Dfa:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("dfa"):
        raise ValueError("expected 'dfa' header")
    fields = {}
    for tok in lines[0].split()[1:]:
        key, _, val = tok.partition("=")
        fields[key] = val
    delta = {}
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] != "t" or parts[3] != "->":
            raise ValueError(f"bad transition line {ln!r}")
        delta[(parts[1], parts[2])] = parts[4]
    split = lambda s: set(s.split(",")) if s else set()
    return Dfa(split(fields["states"]), split(fields["input"]), delta,
               fields["init"], split(fields["accept"]))
