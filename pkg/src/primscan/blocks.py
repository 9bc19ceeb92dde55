"""Primitive classes in F2: slopes, block towers, and derivation.

A primitive element (member of a free basis) is classified up to conjugacy
and inversion by its slope p/q, the reduced image in Z^2.  For each slope a
*block tower* realizes the class: starting from w_0 = a, w'_0 = ab, each
continued-fraction entry n produces

    w_i = w_{i-1}^(n-1) * w'_{i-1},      w'_i = w_{i-1}^n * w'_{i-1},

so w_r is a class representative, {w_i, w'_i} is a free basis at every
level, and the lengths satisfy l'_i = l_i + l_{i-1}.

The *derivation* goes the other way.  A cyclic word on {a, b} in which one
letter is isolated and the other occurs in runs of only two consecutive
sizes n, n+1 is rewritten block-by-block (y^n x -> x, y^(n+1) x -> yx); a
word is primitive iff repeated derivation reaches a single letter, and the
run sizes recovered along the way are exactly the tower entries.

Rotation bookkeeping for the towers (adapted rotations, the length-l_i
subword classification, and block counting in windows) lives here too.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .words import (
    check_word,
    cyclic_reduce,
    abelianization,
    rotate,
    rotations,
)


class LemmaViolation(RuntimeError):
    """An internal consistency check failed; the combinatorial machinery
    produced something the theory says cannot happen."""


# --------------------------------------------------------------------------
# continued fractions and slopes
# --------------------------------------------------------------------------

def cf_expansion(p, q):
    """Canonical continued fraction [n1, ..., nr] of p/q with q >= 1.

    n1 = floor(p/q) may be any integer, n_i >= 1 for i >= 2, and n_r >= 2
    whenever r >= 2 (a trailing 1 is folded into its predecessor).
    """
    if q < 1:
        raise ValueError(f"denominator must be >= 1, got {q}")
    out = []
    while True:
        n = p // q
        out.append(n)
        r = p - n * q
        if r == 0:
            break
        p, q = q, r
    if len(out) >= 2 and out[-1] == 1:
        out.pop()
        out[-1] += 1
    return out


def cf_value(cf):
    """Evaluate a continued fraction to a pair (p, q), gcd 1, q >= 0.

    The empty expansion evaluates to (1, 0), i.e. the slope of 'a'.
    """
    p, q = 1, 0
    for n in reversed(cf):
        p, q = n * p + q, p
    return p, q


@dataclass(frozen=True)
class Slope:
    """A slope p/q in lowest terms with q >= 0 (and p = 1 when q = 0).

    `cf` is the canonical continued fraction of p/q; () encodes 1/0.
    """
    p: int
    q: int
    cf: tuple

    @classmethod
    def from_pair(cls, p, q):
        if (p, q) == (0, 0):
            raise ValueError("slope of (0, 0) is undefined")
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        if gcd(abs(p), q) != 1:
            raise ValueError(f"({p}, {q}) is not coprime")
        cf = () if q == 0 else tuple(cf_expansion(p, q))
        return cls(p, q, cf)

    def __str__(self):
        return f"{self.p}/{self.q}"


def slope_of(w):
    """Slope of a word's abelianization, canonicalized up to overall sign.

    Defined whenever the image in Z^2 is a basis vector candidate
    (coprime coordinates); this does not by itself imply primitivity.
    """
    check_word(w)
    p, q = abelianization(w)
    if (p, q) == (0, 0):
        raise ValueError(f"{w!r} abelianizes to (0, 0)")
    if gcd(abs(p), abs(q)) != 1:
        raise ValueError(f"{w!r} abelianizes to non-coprime ({p}, {q})")
    return Slope.from_pair(p, q)


# --------------------------------------------------------------------------
# block towers
# --------------------------------------------------------------------------

# Letter substitutions realizing every slope from the nonnegative, >= 1
# towers: "ab" exchanges the generators (slopes below 1), "bB" inverts b
# (negative slopes), "ab+bB" composes the two.
_SUBS = {
    "none": str.maketrans("", ""),
    "ab": str.maketrans("abAB", "baBA"),
    "bB": str.maketrans("bB", "Bb"),
    "ab+bB": str.maketrans("abAB", "BaAb"),
}


def _tower_plan(p, q):
    """Recursion entries and substitution tag for slope p/q (canonical)."""
    if q == 0:
        return [], "none"
    neg = p < 0
    p = abs(p)
    if p == 0:
        entries, swap = [], "ab"
    elif p >= q:
        entries, swap = cf_expansion(p, q), "none"
    else:
        entries, swap = cf_expansion(q, p), "ab"
    if neg:
        swap = swap + "+bB" if swap == "ab" else "bB"
    return entries, swap


@dataclass(frozen=True)
class BlockTower:
    """The block words and lengths for one slope.

    `cf` holds the recursion entries — the continued fraction of p/q when
    p/q >= 1, of the reciprocal when the a<->b swap applies.  `w[i]`/`wp[i]`
    are w_i, w'_i on the substituted alphabet, so w[-1] is an actual class
    representative of slope p/q.  Lengths: l'_i = l_i + l_{i-1},
    l_i < l'_i < 2 l_i and n_i < l_i/l_{i-1} < n_i + 1 for i >= 1.
    """
    p: int
    q: int
    cf: tuple
    swap: str
    w: tuple
    wp: tuple
    l: tuple
    lp: tuple

    @property
    def depth(self):
        return len(self.cf)

    @property
    def word(self):
        return self.w[-1]

    def to_json_dict(self):
        return {
            "p": self.p,
            "q": self.q,
            "cf": list(self.cf),
            "w": list(self.w),
            "wp": list(self.wp),
            "l": list(self.l),
            "lp": list(self.lp),
            "swap": self.swap,
        }


def build_blocks(p, q):
    """Build the block tower for the slope p/q."""
    slope = Slope.from_pair(p, q)
    entries, swap = _tower_plan(slope.p, slope.q)
    w, wp = ["a"], ["ab"]
    for n in entries:
        if n < 1:
            raise LemmaViolation(f"tower entry {n} < 1 for slope {slope}")
        w.append(w[-1] * (n - 1) + wp[-1])
        wp.append(w[-2] * n + wp[-1])
    table = _SUBS[swap]
    w = tuple(x.translate(table) for x in w)
    wp = tuple(x.translate(table) for x in wp)
    tower = BlockTower(
        p=slope.p, q=slope.q, cf=tuple(entries), swap=swap,
        w=w, wp=wp,
        l=tuple(len(x) for x in w), lp=tuple(len(x) for x in wp),
    )
    pp, qq = abelianization(tower.word)
    if Slope.from_pair(pp, qq) != slope:
        raise LemmaViolation(
            f"tower word for {slope} abelianizes to ({pp}, {qq})")
    return tower


def enumerate_primitive_classes(max_den):
    """One (Slope, BlockTower) per slope with 0 <= p, q <= max_den, plus 1/0.

    Deterministic order: by q, then p; so 1/0 comes first, then 0/1, 1/1,
    2/1, ...  The count is 2 + #{(p, q) : 1 <= p, q <= max_den, coprime}.
    """
    if max_den < 1:
        raise ValueError("max_den must be >= 1")
    pairs = [(1, 0), (0, 1)]
    for q in range(1, max_den + 1):
        for p in range(1, max_den + 1):
            if gcd(p, q) == 1:
                pairs.append((p, q))
    pairs.sort(key=lambda pq: (pq[1], pq[0]))
    return [(Slope.from_pair(p, q), build_blocks(p, q)) for p, q in pairs]


# --------------------------------------------------------------------------
# derivation
# --------------------------------------------------------------------------

def alphabet_class(w):
    """Which of the four sign patterns the word uses, or "mixed".

    Returns a pair like ("a", "b") or ("a", "B") giving the sign in which
    each generator occurs (defaulting to positive for absent generators),
    or the string "mixed" when some generator occurs with both signs.
    """
    has = set(w)
    if ("a" in has and "A" in has) or ("b" in has and "B" in has):
        return "mixed"
    return ("A" if "A" in has else "a", "B" if "B" in has else "b")


_POSITIVE_TABLE = str.maketrans("AB", "ab")


@dataclass(frozen=True)
class DerivationStep:
    word: str      # the cyclic word, rotated to start on a run boundary
    isolated: str  # the isolated letter
    value: int     # smallest run size of the companion letter
    derived: str


@dataclass(frozen=True)
class DerivationTrace:
    word: str       # input word
    core: str       # its cyclic reduction
    positive: str   # sign-normalized core on {a, b} ("" if empty or mixed)
    steps: tuple
    primitive: bool
    reason: str     # "" when primitive

    @property
    def values(self):
        return tuple(s.value for s in self.steps)


def _derive_once(w):
    """One derivation step on a cyclic word over {a, b}.

    Returns (step, None) on success, (None, reason) on failure, and
    (None, "") when w is a single letter (nothing left to do).
    """
    if len(w) == 1:
        return None, ""
    if "b" not in w or "a" not in w:
        return None, f"{w!r} is a proper power of a single letter"
    # prefer treating b as the isolated letter when both qualify
    doubled = w + w
    if "bb" not in doubled:
        x, y = "b", "a"
    elif "aa" not in doubled:
        x, y = "a", "b"
    else:
        return None, f"neither letter is isolated in {w!r}"
    # rotate to just after an occurrence of x, so w is a clean product of
    # blocks y^m x
    v = rotate(w, w.index(x) + 1)
    sizes = [len(run) for run in v.split(x) if run]
    if len(sizes) != v.count(x):
        raise LemmaViolation(f"bad block split of {v!r}")
    n = min(sizes)
    if max(sizes) > n + 1:
        return None, (f"run sizes of {y!r} in {v!r} span more than two "
                      f"consecutive values")
    derived = "".join(x if m == n else y + x for m in sizes)
    return DerivationStep(word=v, isolated=x, value=n, derived=derived), None


def derivation(w):
    """Full derivation trace of a word; decides primitivity.

    The word is cyclically reduced, its sign pattern normalized to {a, b}
    (a mixed pattern is immediately non-primitive), then derived until a
    single letter remains or a step fails.
    """
    check_word(w)
    core, _ = cyclic_reduce(w)
    if not core:
        return DerivationTrace(w, core, "", (), False,
                               "cyclic reduction is empty")
    quad = alphabet_class(core)
    if quad == "mixed":
        return DerivationTrace(w, core, "", (), False,
                               "some generator occurs with both signs")
    positive = core.translate(_POSITIVE_TABLE)
    steps = []
    cur = positive
    while True:
        step, reason = _derive_once(cur)
        if step is None:
            if reason == "":
                return DerivationTrace(w, core, positive, tuple(steps),
                                       True, "")
            return DerivationTrace(w, core, positive, tuple(steps),
                                   False, reason)
        steps.append(step)
        cur = step.derived


def is_primitive(w):
    """True iff w is a member of some free basis of F2."""
    check_word(w)
    return _fast_primitive(w)


def _fast_primitive(w):
    """Allocation-light primitivity check for bulk sweeps.

    Same verdict as `derivation(w).primitive`; skips trace construction and
    bails out early on the cheap necessary conditions.
    """
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == w[j - 1].swapcase():
        i += 1
        j -= 1
    core = w[i:j]
    if not core:
        return False
    has = set(core)
    if ("a" in has and "A" in has) or ("b" in has and "B" in has):
        return False
    cur = core.translate(_POSITIVE_TABLE)
    if gcd(cur.count("a"), cur.count("b")) != 1:
        return False
    while True:
        if len(cur) == 1:
            return True
        doubled = cur + cur
        if "bb" not in doubled:
            x, y = "b", "a"
        elif "aa" not in doubled:
            x, y = "a", "b"
        else:
            return False
        if x not in cur or y not in cur:
            return False
        v = rotate(cur, cur.index(x) + 1)
        sizes = [len(run) for run in v.split(x) if run]
        n = min(sizes)
        if max(sizes) > n + 1:
            return False
        cur = "".join(x if m == n else y + x for m in sizes)


# --------------------------------------------------------------------------
# rotation bookkeeping: adapted rotations, magic subwords, block counts
# --------------------------------------------------------------------------

def block_sequence(tower, i):
    """The factorization of w_r over the level-i blocks.

    Returns a tuple of "w"/"p" symbols such that w_r is the concatenation of
    w_i (for "w") and w'_i (for "p") in that order.
    """
    if not 0 <= i <= tower.depth:
        raise ValueError(f"level {i} outside [0, {tower.depth}]")
    seq_w, seq_p = ("w",), ("p",)
    for n in tower.cf[i:]:
        seq_w, seq_p = seq_w * (n - 1) + seq_p, seq_w * n + seq_p
    return seq_w


@dataclass(frozen=True)
class AdaptedRotation:
    """A rotated basis pair over which a rotation of the class word factors.

    Rotating w_i by k letters pairs with rotating w'_i by j letters so that
    one rotated block is a prefix or a suffix of the other, and
    rotate(w_r, word_rotation) is the concatenation of the rotated blocks in
    the order given by `blocks`.
    """
    i: int
    k: int
    j: int
    case: int            # 1: k <= (n_i - 1) l_{i-1};  2: otherwise
    relation: str        # "prefix" or "suffix"
    block: str           # rotate(w_i, k)
    block_prime: str     # rotate(w'_i, j)
    word_rotation: int
    blocks: tuple


def adapted_permutation(tower, i, k):
    """Adapted rotation pair for the k-rotation of w_i, constructively.

    Case 1 (k <= (n_i - 1) l_{i-1}): j = k and the block order of the
    factorization is unchanged.  Case 2: j = k + l_{i-1} and the first block
    moves to the end.  The factorization identity is re-checked by string
    comparison and a failure raises LemmaViolation.
    """
    if not 1 <= i <= tower.depth:
        raise ValueError(f"level {i} outside [1, {tower.depth}]")
    li = tower.l[i]
    if not 0 <= k < li:
        raise ValueError(f"rotation {k} outside [0, {li})")
    n_i = tower.cf[i - 1]
    threshold = (n_i - 1) * tower.l[i - 1]
    if k <= threshold:
        case, j = 1, k
    else:
        case, j = 2, k + tower.l[i - 1]
    rot_w = rotate(tower.w[i], k)
    rot_wp = rotate(tower.wp[i], j)
    if case == 1:
        if rot_wp.endswith(rot_w):
            relation = "suffix"
        elif rot_wp.startswith(rot_w):
            relation = "prefix"
        else:
            raise LemmaViolation(
                f"no prefix/suffix relation at slope {tower.p}/{tower.q}, "
                f"i={i}, k={k}")
    else:
        if rot_wp.startswith(rot_w):
            relation = "prefix"
        elif rot_wp.endswith(rot_w):
            relation = "suffix"
        else:
            raise LemmaViolation(
                f"no prefix/suffix relation at slope {tower.p}/{tower.q}, "
                f"i={i}, k={k}")
    seq = block_sequence(tower, i)
    if case == 1:
        out_seq = seq
        word_rotation = k
    else:
        out_seq = seq[1:] + seq[:1]
        word_rotation = k if seq[0] == "w" else j
    rebuilt = "".join(rot_w if s == "w" else rot_wp for s in out_seq)
    if rebuilt != rotate(tower.word, word_rotation):
        raise LemmaViolation(
            f"rotated factorization mismatch at slope {tower.p}/{tower.q}, "
            f"i={i}, k={k}")
    return AdaptedRotation(
        i=i, k=k, j=j, case=case, relation=relation,
        block=rot_w, block_prime=rot_wp,
        word_rotation=word_rotation, blocks=out_seq,
    )


_ROTATION_INDEX = {}


def _rotation_index(w):
    """Map rotation -> first rotation index, cached per word (the magic
    suite classifies every cyclic subword of every class word, so the
    rotation lists of the block words are reused heavily)."""
    cached = _ROTATION_INDEX.get(w)
    if cached is None:
        cached = {}
        for r, rot in enumerate(rotations(w)):
            cached.setdefault(rot, r)
        _ROTATION_INDEX[w] = cached
    return cached


@dataclass(frozen=True)
class MagicWitness:
    """How a length-l_i cyclic subword of w_r matches a rotation of w_i."""
    rotation: int
    changed_to: str    # "" when the subword is already a rotation


def classify_magic_subword(tower, i, u):
    """Match a length-l_i cyclic subword of w_r against rotations of w_i.

    Every such subword is a rotation of w_i after changing at most its last
    letter; returns the first matching rotation index (exact matches take
    precedence over last-letter repairs).
    """
    if not 1 <= i <= tower.depth:
        raise ValueError(f"level {i} outside [1, {tower.depth}]")
    li = tower.l[i]
    if len(u) != li:
        raise ValueError(f"subword length {len(u)} != l_{i} = {li}")
    if u not in tower.word + tower.word:
        raise ValueError(f"{u!r} is not a cyclic subword of the class word")
    rots = _rotation_index(tower.w[i])
    hit = rots.get(u)
    if hit is not None:
        return MagicWitness(rotation=hit, changed_to="")
    letters = sorted(set(tower.wp[0]))
    for c in letters:
        if c == u[-1]:
            continue
        hit = rots.get(u[:-1] + c)
        if hit is not None:
            return MagicWitness(rotation=hit, changed_to=c)
    raise LemmaViolation(
        f"{u!r} is not a rotation of w_{i} at slope {tower.p}/{tower.q}, "
        f"even after a last-letter change")


@dataclass(frozen=True)
class BlockCountReport:
    """Fully-contained adapted blocks in one cyclic window of the class word.

    With alpha = len(u)/l_i, every window with alpha > 4 contains at least
    (alpha - 4)/2 complete blocks of the rotated factorization.
    """
    i: int
    k: int
    start: int       # offset of u in rotate(w_r, word_rotation)
    count: int
    alpha: float
    bound: float

    @property
    def satisfied(self):
        return self.count >= self.bound - 1e-12


def count_block_occurrences(u, tower, i, k):
    """Count complete rotated blocks inside the window u.

    u must be a cyclic subword of the class word; the window is located in
    the rotated word of `adapted_permutation(tower, i, k)` and the blocks
    counted are those of its factorization lying entirely inside.
    """
    if not u:
        raise ValueError("empty window")
    if len(u) > tower.l[-1]:
        raise ValueError(f"window length {len(u)} exceeds {tower.l[-1]}")
    adapted = adapted_permutation(tower, i, k)
    word = rotate(tower.word, adapted.word_rotation)
    start = (word + word).find(u)
    if start < 0:
        raise ValueError(f"{u!r} is not a cyclic subword of the class word")
    sizes = [tower.l[i] if s == "w" else tower.lp[i] for s in adapted.blocks]
    bounds = [0]
    for size in sizes + sizes:
        bounds.append(bounds[-1] + size)
    end = start + len(u)
    count = sum(1 for t in range(len(bounds) - 1)
                if bounds[t] >= start and bounds[t + 1] <= end)
    alpha = len(u) / tower.l[i]
    return BlockCountReport(i=i, k=k, start=start, count=count,
                            alpha=alpha, bound=(alpha - 4) / 2)


# --------------------------------------------------------------------------
# exhaustive lemma suites
# --------------------------------------------------------------------------

SUITES = ("recurrences", "magic-len", "perm-cycl", "bloc")


@dataclass
class SuiteReport:
    """Outcome of one exhaustive suite: how many checks ran and every
    failure with enough context to reproduce it."""
    suite: str
    cap: int
    checks: int
    failures: list

    @property
    def passed(self):
        return not self.failures


def _towers_by_word_length(cap):
    return [t for _, t in enumerate_primitive_classes(cap)
            if len(t.word) <= cap]


def _check_recurrences(t, failures):
    """Word and length recurrences plus the length inequalities for one
    tower, in exact integer and string arithmetic."""
    def need(cond, what):
        if not cond:
            failures.append({"p": t.p, "q": t.q, "check": what})

    checks = 2
    need(t.l[0] == 1 and t.lp[0] == 2, "base lengths")
    need(len(t.word) == abs(t.p) + t.q, "word length |p| + q")
    for i in range(1, t.depth + 1):
        n = t.cf[i - 1]
        checks += 7
        need(t.w[i] == t.w[i - 1] * (n - 1) + t.wp[i - 1],
             f"w recurrence at level {i}")
        need(t.wp[i] == t.w[i - 1] * n + t.wp[i - 1],
             f"w' recurrence at level {i}")
        need(t.wp[i] == t.w[i - 1] + t.w[i],
             f"w' = w_(i-1) w_i at level {i}")
        need(t.lp[i] == t.l[i] + t.l[i - 1], f"l' recurrence at level {i}")
        need(t.l[i] < t.lp[i] < 2 * t.l[i], f"l < l' < 2l at level {i}")
        need(i + 1 <= t.l[i], f"l_i >= i + 1 at level {i}")
        if i == 1:
            need(t.l[1] == (n + 1) * t.l[0], "l_1 = (n_1 + 1) l_0")
        else:
            need(n * t.l[i - 1] < t.l[i] < (n + 1) * t.l[i - 1],
                 f"n l < l < (n+1) l at level {i}")
    for i in range(2, t.depth + 1):
        m = t.cf[i - 2]
        checks += 1
        lhs, rhs = (m + 2) * t.l[i - 1], (m + 1) * t.l[i]
        if i >= 3 or t.cf[i - 1] >= 2:
            need(lhs < rhs, f"(m+2) l_(i-1) < (m+1) l_i at level {i}")
        else:
            need(lhs <= rhs, f"(m+2) l_(i-1) <= (m+1) l_i at level {i}")
    return checks


def _magic_suite(cap):
    failures, checks = [], 0
    for t in _towers_by_word_length(cap):
        doubled = t.word + t.word
        for i in range(1, t.depth + 1):
            li = t.l[i]
            for s in range(len(t.word)):
                checks += 1
                try:
                    classify_magic_subword(t, i, doubled[s:s + li])
                except LemmaViolation as e:
                    failures.append({"p": t.p, "q": t.q, "i": i,
                                     "position": s, "error": str(e)})
    return checks, failures


def _perm_suite(cap):
    failures, checks = [], 0
    for t in _towers_by_word_length(cap):
        for i in range(1, t.depth + 1):
            for k in range(t.l[i]):
                checks += 1
                try:
                    ar = adapted_permutation(t, i, k)
                    if ar.relation not in ("prefix", "suffix"):
                        raise LemmaViolation("no prefix-or-suffix witness")
                except LemmaViolation as e:
                    failures.append({"p": t.p, "q": t.q, "i": i, "k": k,
                                     "error": str(e)})
    return checks, failures


def _bloc_suite(cap):
    """Block-count bound over every cyclic window with alpha > 4, every
    level, and every rotation.

    Windows sharing a start and a complete-block count are dominated by
    the longest of them (same count, largest alpha), so only that
    maximal window is evaluated; the bound for all others follows.
    """
    failures, checks = [], 0
    for t in _towers_by_word_length(cap):
        lr = len(t.word)
        for i in range(1, t.depth + 1):
            li = t.l[i]
            if lr <= 4 * li:
                continue
            for k in range(li):
                ar = adapted_permutation(t, i, k)
                sizes = [t.l[i] if s == "w" else t.lp[i] for s in ar.blocks]
                bounds = [0]
                for size in sizes + sizes:
                    bounds.append(bounds[-1] + size)
                idx0 = 0
                for s in range(lr):
                    while bounds[idx0] < s:
                        idx0 += 1
                    m = idx0
                    while m + 1 < len(bounds) and bounds[m] <= s + lr:
                        e_max = min(bounds[m + 1] - 1, s + lr)
                        length = e_max - s
                        if length > 4 * li:
                            checks += 1
                            count = m - idx0
                            alpha = length / li
                            if count < (alpha - 4) / 2 - 1e-12:
                                failures.append({
                                    "p": t.p, "q": t.q, "i": i, "k": k,
                                    "start": s, "length": length,
                                    "count": count, "alpha": alpha,
                                })
                        m += 1
    return checks, failures


def run_suite(suite, cap):
    """Run one exhaustive lemma suite and report every check and failure.

    The cap is a slope bound (|p|, q <= cap) for "recurrences" and a
    class-word length bound (l_r <= cap) for the string suites
    "magic-len", "perm-cycl", and "bloc".
    """
    if suite == "recurrences":
        failures, checks = [], 0
        for _, t in enumerate_primitive_classes(cap):
            checks += _check_recurrences(t, failures)
        return SuiteReport(suite, cap, checks, failures)
    if suite == "magic-len":
        checks, failures = _magic_suite(cap)
        return SuiteReport(suite, cap, checks, failures)
    if suite == "perm-cycl":
        checks, failures = _perm_suite(cap)
        return SuiteReport(suite, cap, checks, failures)
    if suite == "bloc":
        checks, failures = _bloc_suite(cap)
        return SuiteReport(suite, cap, checks, failures)
    raise ValueError(f"unknown suite {suite!r}")
