"""Bounded-scale witnesses against semilinear presentations.

The central tool: a family of prefix vectors a_k whose continuations b in a
set L exist (i), grow at least linearly against any slope k (ii), and are
spaced apart by an unbounded gap function f (iii).  No semilinear set admits
such a family, because a presentation forces a nonzero simple period whose
fixed coordinates would beat every gap.  All checks here run at explicit
caps and are reported as bounded-scale evidence; only a refutation against a
concrete finite presentation is a definitive certificate.

Also here: the p-adic growth pipeline for the rational-matrix groups, and
the block-exponent image extractors for the wreath and central-coordinate
families.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Iterable, Sequence

from . import qlinalg
from .automata import KcfRecognizer, PdaConfigSet, kcf_accepts
from .groups import (AbcGroup, GcGroup, GcSpec, Group, WreathOverZ,
                     is_polycyclic_case, reverse_spec)
from .stratify import SkFamilySpec, build_Snk
from .vecset import (LinearSet, Permutation, SemilinearSet, Vec0,
                     member, member_certificate)


class NotProper(ValueError):
    """Both end coefficients are +-1: the polycyclic case, no growth pipeline."""


@dataclass(frozen=True)
class SplitVec:
    """Vector (a; b) in N0^(r+s), split into prefix and continuation parts."""

    a: Vec0
    b: Vec0

    @property
    def joined(self) -> Vec0:
        return self.a.concat(self.b)


def is_simple(v: Vec0, r: int) -> bool:
    """First r components all zero."""
    return all(x == 0 for x in v.entries[:r])


@dataclass
class WitnessFamily:
    """Indexed prefixes a_of(k), gap function f, and an exact membership
    oracle for the target set L in N0^(r+s).

    b_enumerator(a, cap) must list exactly the b with (a;b) in L and every
    coordinate at most cap.
    """

    r: int
    s: int
    a_of: Callable[[int], Vec0]
    f: Callable[[int], int]
    membership: Callable[[SplitVec], bool]
    b_enumerator: Callable[[Vec0, int], Iterable[Vec0]]
    description: str = ""

    def f_record_levels(self, horizon: int) -> list[int]:
        """Levels where f strictly exceeds all previous values."""
        records = []
        best = None
        for t in range(1, horizon + 1):
            value = self.f(t)
            if best is None or value > best:
                best = value
                records.append(t)
        return records

    def f_unbounded_on(self, horizon: int) -> bool:
        """Sampled-horizon surrogate for unboundedness: a new record appears
        in the upper half of the horizon."""
        records = self.f_record_levels(horizon)
        return bool(records) and records[-1] > horizon // 2


def box_enumerator(membership: Callable[[SplitVec], bool], s: int
                   ) -> Callable[[Vec0, int], list[Vec0]]:
    """Exhaustive continuation enumerator over [0, cap]^s; for small s."""

    def enumerate_b(a: Vec0, cap: int) -> list[Vec0]:
        out = []
        for entries in itertools.product(range(cap + 1), repeat=s):
            b = Vec0(entries)
            if membership(SplitVec(a, b)):
                out.append(b)
        return out

    return enumerate_b


@dataclass(frozen=True)
class PadicCtx:
    """Negated p-adic valuation: vbar(x) counts powers of p in denominators."""

    p: int

    def __post_init__(self):
        p = self.p
        if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not prime")

    def _mult(self, k: int) -> int:
        count = 0
        while k % self.p == 0:
            k //= self.p
            count += 1
        return count

    def vp(self, x) -> int | float:
        x = qlinalg.fr(x)
        if x == 0:
            return math.inf
        return self._mult(x.numerator) - self._mult(x.denominator)

    def vbar(self, x) -> int | float:
        return -self.vp(x)


def complex_period_constant(s: SemilinearSet, r: int, split: int) -> int:
    """Bound C such that complex-only expansions satisfy b(j) < C sigma(a).

    Per component: t is the least integer with q(j) < t*sigma(p) for every
    complex period (p;q) and every j (t=1 when no complex periods), and q is
    the largest of the first r coordinates of the constant.  C is twice the
    maximum of all t and q, at least 1.
    """
    if r + split != s.dim:
        raise ValueError(f"split {r}+{split} != dim {s.dim}")
    worst = 0
    for comp in s.components:
        t = 1
        for p in comp.periods:
            head, tail = p.entries[:r], p.entries[r:]
            weight = sum(head)
            if weight == 0:
                continue
            t = max(t, max(tail, default=0) // weight + 1)
        q = max(comp.constant.entries[:r])
        worst = max(worst, t, q)
    return max(1, 2 * worst)


@dataclass(frozen=True)
class LevelReport:
    k: int
    a: Vec0
    n_members: int
    cond_exists: bool | None   # None = indeterminate (cap produced nothing)
    cond_growth: bool
    cond_gap: bool
    cap: int

    @property
    def ok(self) -> bool:
        return bool(self.cond_exists) and self.cond_growth and self.cond_gap


@dataclass(frozen=True)
class WitnessReport:
    levels: tuple[LevelReport, ...]
    f_unbounded_sampled: bool
    horizon: int

    @property
    def all_pass(self) -> bool:
        return all(l.ok for l in self.levels) and self.f_unbounded_sampled

    def to_text(self) -> str:
        lines = ["k  a  members  exists  growth  gap  cap"]
        for l in self.levels:
            exists = "indet" if l.cond_exists is None else str(l.cond_exists)
            lines.append(f"{l.k}  ({l.a})  {l.n_members}  {exists}  "
                         f"{l.cond_growth}  {l.cond_gap}  {l.cap}")
        lines.append(f"f unbounded on sampled horizon {self.horizon}: "
                     f"{self.f_unbounded_sampled}")
        return "\n".join(lines)


def check_witness_family(family: WitnessFamily, levels: Sequence[int],
                         cap: int) -> WitnessReport:
    """Verify the three conditions at each level, within the given cap.

    Every enumerated continuation is replayed through the membership oracle.
    The result is bounded-scale evidence, not a proof: the cap is recorded.
    """
    out = []
    for k in levels:
        a = family.a_of(k)
        bs = sorted(family.b_enumerator(a, cap), key=lambda b: b.entries)
        for b in bs:
            if not family.membership(SplitVec(a, b)):
                raise AssertionError(
                    f"enumerator emitted a non-member at level {k}: {b}")
        exists: bool | None = True if bs else None
        threshold = k * a.sigma()
        growth = all(any(x >= threshold for x in b.entries) for b in bs)
        gap = family.f(k)
        spaced = all(
            any(abs(x - y) >= gap for x, y in zip(b1.entries, b2.entries))
            for b1, b2 in itertools.combinations(bs, 2))
        out.append(LevelReport(k, a, len(bs), exists, growth, spaced, cap))
    horizon = max(levels) * 2 if levels else 2
    return WitnessReport(tuple(out), family.f_unbounded_on(horizon), horizon)


@dataclass(frozen=True)
class RefutationCertificate:
    """A point on which the presentation and the oracle disagree."""

    point: Vec0
    in_oracle: bool
    in_presentation: bool
    level: int
    bound_c: int
    note: str

    def replay(self, s: SemilinearSet, family: WitnessFamily, r: int) -> bool:
        a, b = self.point.split(r)
        oracle = family.membership(SplitVec(a, b))
        presented = member(self.point, s)
        return (oracle == self.in_oracle
                and presented == self.in_presentation
                and oracle != presented)


@dataclass(frozen=True)
class IndeterminateRefutation:
    reason: str


def refute_presentation(s: SemilinearSet, family: WitnessFamily, cap: int,
                        level_horizon: int = 64
                        ) -> RefutationCertificate | IndeterminateRefutation:
    """Machine-checked disagreement between a presentation and the oracle.

    Chooses a level beyond both the complex-expansion bound of the
    presentation and its largest simple-period coordinate, then exhibits
    either an oracle member outside the presentation, or a presented point
    (member plus forced simple period) outside the oracle.
    """
    r, split = family.r, family.s
    if s.dim != r + split:
        raise ValueError(f"presentation dim {s.dim} != {r}+{split}")
    bound_c = complex_period_constant(s, r, split)
    simple_coord = 0
    for comp in s.components:
        for p in comp.periods:
            if is_simple(p, r) and not p.is_zero():
                simple_coord = max(simple_coord, max(p.entries[r:]))
    level = None
    for k in range(bound_c + 1, bound_c + 1 + level_horizon):
        if family.f(k) > simple_coord:
            level = k
            break
    if level is None:
        return IndeterminateRefutation(
            f"no level in ({bound_c}, {bound_c + level_horizon}] with "
            f"f(k) > {simple_coord}")
    a = family.a_of(level)
    bs = list(family.b_enumerator(a, cap))
    if not bs:
        return IndeterminateRefutation(
            f"cap {cap} yields no continuations at level {level}")
    for b in bs:
        point = a.concat(b)
        if not member(point, s):
            return RefutationCertificate(
                point, True, False, level, bound_c,
                "oracle member missing from the presentation")
    threshold = level * a.sigma()
    for b in bs:
        if not any(x >= threshold for x in b.entries):
            return IndeterminateRefutation(
                "family growth condition failed at the chosen level; "
                "the family does not witness non-semilinearity here")
        point = a.concat(b)
        cert = member_certificate(point, s)
        comp = s.components[cert.component]
        for alpha, period in zip(cert.alphas, comp.periods):
            if alpha > 0 and is_simple(period, r) and not period.is_zero():
                bumped = point + period
                if not member(bumped, s):
                    raise AssertionError("period bump left the component")
                a2, b2 = bumped.split(r)
                if not family.membership(SplitVec(a2, b2)):
                    return RefutationCertificate(
                        bumped, False, True, level, bound_c,
                        "presented point (simple-period bump) outside "
                        "the oracle")
        # complex-only expansion of a fast-growing member: impossible for a
        # genuine presentation of the oracle, so keep scanning other b's
    return IndeterminateRefutation(
        "all presented continuations absorbed every simple-period bump; "
        "family spacing condition fails against this presentation")


def _word_of_template(template, exponents) -> tuple[str, ...]:
    word: list[str] = []
    it = iter(exponents)
    for kind, payload in template:
        if kind == "lit":
            word.append(payload)
        else:
            count = next(it)
            word.extend(payload * count)
    return tuple(word)


def _template_phi(rec: KcfRecognizer, oracle: Callable[[Sequence[str]], bool],
                  template, cap: int) -> list[tuple[int, ...]]:
    """Exponent tuples (one per starred slot, each <= cap) whose word lies in
    every machine's language and satisfies the oracle.

    Depth-first over the slots with machine-configuration pruning; every
    surviving word is confirmed through the grammar backend and the oracle.
    """
    max_len = sum(1 for kind, _ in template if kind == "lit") \
        + cap * sum(len(p) for kind, p in template if kind == "star")
    depth_cap = max_len * max(p.max_push for p in rec.pdas) + 8
    start = tuple(PdaConfigSet(p, depth_cap) for p in rec.pdas)
    slots = [payload for kind, payload in template if kind == "star"]
    results: list[tuple[int, ...]] = []

    def consume(configs, sym):
        configs = tuple(c.step(sym) for c in configs)
        if any(c.dead() for c in configs):
            return None
        return configs

    def walk(pos, configs, exponents):
        if configs is None:
            return
        if pos == len(template):
            word = _word_of_template(template, exponents)
            if kcf_accepts(rec, word) and oracle(word):
                results.append(tuple(exponents))
            return
        kind, payload = template[pos]
        if kind == "lit":
            walk(pos + 1, consume(configs, payload), exponents)
            return
        for count in range(cap + 1):
            walk(pos + 1, configs, exponents + [count])
            if count == cap:
                return
            for sym in payload:
                configs = consume(configs, sym)
                if configs is None:
                    return

    walk(0, start, [])
    return sorted(results)


def bounded_parikh(acceptor, words: Sequence[Sequence[str]], cap: int
                   ) -> list[tuple[int, ...]]:
    """{(m_1..m_n) in [0,cap]^n : w_1^m_1 ... w_n^m_n accepted}; exact in
    the box.

    acceptor may be a KcfRecognizer (searched with machine-state pruning), a
    Group (its word problem), or any word predicate (full box enumeration).
    """
    words = [tuple(w) for w in words]
    if isinstance(acceptor, KcfRecognizer):
        template = [("star", w) for w in words]
        return _template_phi(acceptor, lambda _w: True, template, cap)
    if isinstance(acceptor, Group):
        group = acceptor
        predicate = lambda w: group.is_identity(
            group.eval_word(_letters_word(w)))
    else:
        predicate = acceptor
    out = []
    for exps in itertools.product(range(cap + 1), repeat=len(words)):
        flat = tuple(itertools.chain.from_iterable(
            w * e for w, e in zip(words, exps)))
        if predicate(flat):
            out.append(exps)
    return sorted(out)


def difference_lattice_rank(tuples: Sequence[tuple[int, ...]]) -> int:
    """Rank over Q of the differences against the first member."""
    if len(tuples) < 2:
        return 0
    base = tuples[0]
    rows = [tuple(x - y for x, y in zip(t, base)) for t in tuples[1:]]
    return qlinalg.rank(rows)


@dataclass
class GcPipelineState:
    """Everything the rational-matrix growth analysis produces.

    iota[k] is the first power whose tracked entry has p-denominator
    valuation at least k; ell[j] clears the denominators of column s of the
    j-th power; lam[k] = ell[iota[k]].  Levels in n_seq share one sign
    pattern on the final column, fixing each coordinate's type (1 = entries
    nonnegative, direction -1; 2 = negative, direction +1).
    """

    spec: GcSpec
    spec_used: GcSpec
    was_reversed: bool
    matrix: qlinalg.Matrix
    p: int
    n_max: int
    row: int                       # tracked row index N (1-based)
    depth: int
    iota: dict[int, int]
    ell: dict[int, int]
    lam: dict[int, int]
    types: dict[int, int]          # column index (1-based) -> 1 or 2
    eps: dict[int, int]            # column index -> +-1 direction
    n_seq: tuple[int, ...]
    powers: dict[int, qlinalg.Matrix] = field(repr=False, default_factory=dict)

    @property
    def s(self) -> int:
        return self.spec_used.s

    def last_column(self, j: int):
        return tuple(self.powers[j][i][self.s - 1] for i in range(self.s))


def gc_pipeline(spec: GcSpec, depth: int) -> GcPipelineState:
    """Run the denominator-growth analysis to the given depth.

    Requires the proper (non-polycyclic) case; if the top coefficient has
    absolute value one the reversed spec is used instead.  For every k up to
    depth the analysis locates iota_k <= k*s with valuation at least k and
    clears denominators with lam_k >= p^k; these bounds are asserted.
    """
    if is_polycyclic_case(spec):
        raise NotProper(
            "both end coefficients are +-1: polycyclic case, no pipeline")
    used = spec
    was_reversed = False
    if abs(spec.c[-1]) == 1:
        used = reverse_spec(spec)
        was_reversed = True
    from .groups import gc_matrix

    matrix = gc_matrix(used)
    s = used.s
    last_col = [matrix[i][s - 1] for i in range(s)]
    primes = set()
    for x in last_col:
        d = x.denominator
        q = 2
        while q * q <= d:
            if d % q == 0:
                primes.add(q)
                while d % q == 0:
                    d //= q
            q += 1
        if d > 1:
            primes.add(d)
    if not primes:
        raise NotProper("matrix is integral; no denominator prime exists")
    p = min(primes)
    ctx = PadicCtx(p)
    vals = [ctx.vbar(x) for x in last_col]
    n_max = max(vals)
    row = max(i + 1 for i, v in enumerate(vals) if v == n_max)

    iota: dict[int, int] = {}
    ell: dict[int, int] = {}
    powers: dict[int, qlinalg.Matrix] = {}
    current = qlinalg.identity(s)
    for j in range(1, s * depth + 1):
        current = qlinalg.mat_mul(current, matrix)
        powers[j] = current
        col = [current[i][s - 1] for i in range(s)]
        denom_lcm = 1
        for x in col:
            denom_lcm = denom_lcm * x.denominator // gcd(
                denom_lcm, x.denominator)
        ell[j] = denom_lcm
        value = ctx.vbar(current[row - 1][s - 1])
        for k in range(1, depth + 1):
            if k not in iota and value >= k:
                iota[k] = j
        if all(k in iota for k in range(1, depth + 1)):
            break
    lam = {}
    for k in range(1, depth + 1):
        if k not in iota:
            raise AssertionError(
                f"no power up to {s * depth} reaches valuation {k}")
        if iota[k] > k * s:
            raise AssertionError(f"iota_{k} = {iota[k]} exceeds {k * s}")
        lam[k] = ell[iota[k]]
        if lam[k] < p ** k:
            raise AssertionError(f"lam_{k} = {lam[k]} below {p ** k}")

    patterns: dict[tuple, list[int]] = {}
    order = []
    for t in range(1, depth + 1):
        col = tuple(powers[iota[t]][i][s - 1] for i in range(s))
        pattern = tuple(x >= 0 for x in col)
        if pattern not in patterns:
            order.append(pattern)
        patterns.setdefault(pattern, []).append(t)
    chosen = max(order, key=lambda pat: (len(patterns[pat]),
                                         -order.index(pat)))
    n_seq = tuple(patterns[chosen])
    types = {i + 1: (1 if chosen[i] else 2) for i in range(s)}
    eps = {i: (-1 if types[i] == 1 else 1) for i in types}
    return GcPipelineState(spec, used, was_reversed, matrix, p, n_max, row,
                           depth, iota, ell, lam, types, eps, n_seq, powers)


@dataclass
class GcWitnessData:
    """Block-exponent sample of the bounded witness language, pre and post
    the coordinate swap, plus the packaged family."""

    state: GcPipelineState
    cap: int
    tau: Permutation
    phi_pre_tau: tuple[tuple[int, ...], ...]
    phi: tuple[tuple[int, ...], ...]
    family: WitnessFamily


def _gc_block_word(group: GcGroup, j: int, lam: int,
                   v: Sequence[int], eps: dict[int, int]):
    s = group.s
    word: list[tuple[str, int]] = [("y", -1)] * j
    word += [(f"x{s}", 1)] * lam
    word += [("y", 1)] * j
    for i in range(1, s + 1):
        word += [(f"x{i}", eps[i])] * v[i - 1]
    return word


def gc_witness_language(state: GcPipelineState, k: int, cap: int
                        ) -> GcWitnessData:
    """Sample the image of the bounded witness language and package the
    family the growth analysis supports.

    The language alternates y^-j (x_s)+ y^j with direction-corrected
    (x_i^eps)* tails; a tuple (j, lam, j; v) belongs to the image iff lam is
    a positive multiple of ell_j and v is the forced integer tail, and every
    emitted tuple is replayed through the group oracle.  (The positive
    multiple is required: the zero tuple would defeat the growth condition.)
    The coordinate swap (2 3) moves the lam coordinate behind both level
    coordinates, giving prefixes a_t = (iota, iota).
    """
    if k > state.depth:
        raise ValueError(f"pipeline depth {state.depth} < requested {k}")
    group = GcGroup(state.spec_used)
    s = state.s
    eps = state.eps
    tau = Permutation.transposition(3 + s, 2, 3)

    def forced_tail(j: int, lam: int) -> tuple[int, ...] | None:
        col = state.last_column(j)
        tail = []
        for i in range(1, s + 1):
            value = -eps[i] * lam * col[i - 1]
            if value.denominator != 1 or value < 0:
                return None
            tail.append(int(value))
        return tuple(tail)

    def oracle_member(j: int, lam: int, v: Sequence[int]) -> bool:
        word = _gc_block_word(group, j, lam, v, eps)
        return group.is_identity(group.eval_word(word))

    pre = []
    max_level = state.iota[k]
    for j in range(1, max_level + 1):
        for lam in range(1, cap + 1):
            tail = forced_tail(j, lam)
            if tail is None or any(x > cap for x in tail):
                continue
            if oracle_member(j, lam, tail):
                pre.append((j, lam, j) + tail)
    phi = tuple(sorted(tuple(tau.apply(t)) for t in pre))

    def a_of(t: int) -> Vec0:
        for n in state.n_seq:
            if n >= t and 2 * t * state.iota[n] < state.p ** n:
                return Vec0((state.iota[n], state.iota[n]))
        raise ValueError(
            f"pipeline depth {state.depth} too small for level {t}")

    def membership(sv: SplitVec) -> bool:
        if sv.a.dim != 2 or sv.b.dim != s + 1:
            return False
        if sv.a.entries[0] != sv.a.entries[1]:
            return False
        j = sv.a.entries[0]
        lam = sv.b.entries[0]
        if j < 1 or lam < 1:
            return False
        if j not in state.powers:
            # extend power table on demand
            current = state.powers[max(state.powers)]
            for jj in range(max(state.powers) + 1, j + 1):
                current = qlinalg.mat_mul(current, state.matrix)
                state.powers[jj] = current
        tail = forced_tail(j, lam)
        if tail is None or tail != sv.b.entries[1:]:
            return False
        return oracle_member(j, lam, tail)

    def b_enumerator(a: Vec0, cap_b: int) -> list[Vec0]:
        if a.entries[0] != a.entries[1]:
            return []
        j = a.entries[0]
        out = []
        for lam in range(1, cap_b + 1):
            tail = forced_tail(j, lam)
            if tail is None or any(x > cap_b for x in tail):
                continue
            if oracle_member(j, lam, tail):
                out.append(Vec0((lam,) + tail))
        return out

    family = WitnessFamily(
        r=2, s=s + 1, a_of=a_of, f=lambda t: state.p ** t,
        membership=membership, b_enumerator=b_enumerator,
        description=f"rational-matrix growth family for c={state.spec.c}")
    return GcWitnessData(state, cap, tau, tuple(sorted(pre)), phi, family)


def _letters_word(word: Sequence[str]) -> list[tuple[str, int]]:
    out = []
    for sym in word:
        if sym.isupper():
            out.append((sym.lower(), -1))
        else:
            out.append((sym, 1))
    return out


def wreath_Lk_phi(modulus: int | None, k: int, cap: int
                  ) -> list[tuple[int, ...]]:
    """Block-exponent image of the lamp-group word problem inside the
    two-machine block language, as 4k-tuples (marker letters ignored).

    Asserts the doubled-and-repeated diagonal form and containment in the
    n=2 equal-block family.
    """
    from .automata import build_Mk_wreath

    group = WreathOverZ(modulus)
    rec = build_Mk_wreath(k)
    template = []
    for i in range(1, 2 * k + 1):
        template.append(("star", ("A",)))
        template.append(("lit", "b" if i <= k else "B"))
        template.append(("star", ("a",)))
    oracle = lambda w: group.is_identity(group.eval_word(_letters_word(w)))
    tuples = _template_phi(rec, oracle, template, cap)
    family = build_Snk(SkFamilySpec(2, k))
    for t in tuples:
        ms = t[0::2]
        if t[1::2] != ms or ms[k:] != ms[:k]:
            raise AssertionError(f"tuple {t} is not doubled-and-repeated")
        if not family.contains(t):
            raise AssertionError(f"tuple {t} escapes the diagonal family")
    return tuples


def abc_Lk_phi(p: int, k: int, cap: int) -> list[tuple[int, ...]]:
    """Block-exponent image for the central-coordinate group inside the
    three-machine block language, as 8k-tuples inside the n=4 family."""
    from .automata import build_Mk_abc, _abc_letters

    group = AbcGroup(p)
    rec = build_Mk_abc(k)
    template = []
    for i in range(1, 2 * k + 1):
        l1, l2, l3, l4 = _abc_letters(i, k)
        template += [("lit", l1), ("star", ("A",)), ("lit", l2),
                     ("star", ("a",)), ("lit", l3), ("star", ("A",)),
                     ("lit", l4), ("star", ("a",))]
    oracle = lambda w: group.is_identity(group.eval_word(_letters_word(w)))
    tuples = _template_phi(rec, oracle, template, cap)
    family = build_Snk(SkFamilySpec(4, k))
    for t in tuples:
        quads = [t[4 * i: 4 * i + 4] for i in range(2 * k)]
        if any(len(set(q)) != 1 for q in quads):
            raise AssertionError(f"tuple {t} is not quadrupled")
        if not family.contains(t):
            raise AssertionError(f"tuple {t} escapes the diagonal family")
    return tuples
