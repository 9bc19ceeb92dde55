import itertools
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from primscan.blocks import (
    LemmaViolation,
    Slope,
    adapted_permutation,
    alphabet_class,
    block_sequence,
    build_blocks,
    cf_expansion,
    cf_value,
    classify_magic_subword,
    count_block_occurrences,
    derivation,
    enumerate_primitive_classes,
    is_primitive,
    slope_of,
)
from primscan.words import (
    abelianization,
    cyclic_reduce,
    cyclic_subword,
    enumerate_reduced,
    invert,
    reduce,
    rotate,
    rotations,
    substitute,
)


# --------------------------------------------------------------------------
# continued fractions
# --------------------------------------------------------------------------

@given(st.integers(-40, 40), st.integers(1, 40))
def test_cf_roundtrips_through_fraction(p, q):
    cf = cf_expansion(p, q)
    assert Fraction(*cf_value(cf)) == Fraction(p, q)


@given(st.integers(-40, 40), st.integers(1, 40))
def test_cf_is_canonical(p, q):
    cf = cf_expansion(p, q)
    assert all(n >= 1 for n in cf[1:])
    if len(cf) >= 2:
        assert cf[-1] >= 2


def test_cf_canonical_form_is_unique():
    # every canonical sequence evaluates to a distinct rational, so the
    # canonical expansion of each rational is unique
    seen = {}
    seqs = [[n1] for n1 in range(-4, 5)]
    for r in (2, 3):
        for n1 in range(-4, 5):
            for mid in itertools.product(range(1, 5), repeat=r - 2):
                for last in range(2, 5):
                    seqs.append([n1, *mid, last])
    for cf in seqs:
        value = Fraction(*cf_value(cf))
        assert value not in seen, (cf, seen[value])
        seen[value] = cf


def test_cf_examples():
    assert cf_expansion(3, 2) == [1, 2]
    assert cf_expansion(7, 5) == [1, 2, 2]
    assert cf_expansion(1, 1) == [1]
    assert cf_expansion(0, 1) == [0]
    assert cf_expansion(5, 1) == [5]
    assert cf_expansion(-1, 2) == [-1, 2]
    assert cf_expansion(13, 8) == [1, 1, 1, 1, 2]
    assert cf_value(()) == (1, 0)
    assert cf_value([0]) == (0, 1)
    with pytest.raises(ValueError):
        cf_expansion(1, 0)


# --------------------------------------------------------------------------
# slopes
# --------------------------------------------------------------------------

def test_slope_canonicalization():
    assert Slope.from_pair(-3, -2) == Slope.from_pair(3, 2)
    assert Slope.from_pair(-1, 0) == Slope.from_pair(1, 0)
    assert Slope.from_pair(1, 0).cf == ()
    assert Slope.from_pair(3, 2).cf == (1, 2)
    assert str(Slope.from_pair(-3, 2)) == "-3/2"
    with pytest.raises(ValueError):
        Slope.from_pair(2, 4)
    with pytest.raises(ValueError):
        Slope.from_pair(0, 0)


def test_slope_of_words():
    assert slope_of("aab") == Slope.from_pair(2, 1)
    assert slope_of("ABB") == Slope.from_pair(1, 2)
    assert slope_of("aB") == Slope.from_pair(-1, 1)
    with pytest.raises(ValueError):
        slope_of("abAB")  # abelianizes to (0, 0)
    with pytest.raises(ValueError):
        slope_of("aabb")  # (2, 2) not coprime


# --------------------------------------------------------------------------
# block towers
# --------------------------------------------------------------------------

def test_tower_3_2_frozen():
    tower = build_blocks(3, 2)
    assert tower.to_json_dict() == {
        "p": 3,
        "q": 2,
        "cf": [1, 2],
        "w": ["a", "ab", "abaab"],
        "wp": ["ab", "aab", "ababaab"],
        "l": [1, 2, 5],
        "lp": [2, 3, 7],
        "swap": "none",
    }


def test_tower_7_5_frozen():
    tower = build_blocks(7, 5)
    assert tower.cf == (1, 2, 2)
    assert tower.w == ("a", "ab", "abaab", "abaabababaab")
    assert tower.wp == ("ab", "aab", "ababaab", "abaababaabababaab")
    assert tower.l == (1, 2, 5, 12)
    assert tower.lp == (2, 3, 7, 17)
    assert tower.word == "abaabababaab"
    assert tower.depth == 3


def test_tower_substitutions_frozen():
    assert build_blocks(1, 0).word == "a"
    assert build_blocks(0, 1).word == "b"
    assert build_blocks(-1, 0).word == "a"  # canonicalized to 1/0
    swapped = build_blocks(1, 2)
    assert swapped.swap == "ab"
    assert swapped.cf == (2,)
    assert swapped.word == "bba"
    assert build_blocks(-3, 2).swap == "bB"
    assert build_blocks(-3, 2).word == "aBaaB"
    assert build_blocks(-1, 2).swap == "ab+bB"
    assert build_blocks(-1, 2).word == "BBa"


def test_tower_words_have_their_slope():
    for slope, tower in enumerate_primitive_classes(10):
        assert slope_of(tower.word) == slope
    for p, q in [(-7, 5), (-1, 3), (-8, 1)]:
        assert slope_of(build_blocks(p, q).word) == Slope.from_pair(p, q)


def test_tower_length_recurrences_and_bounds():
    towers = [t for _, t in enumerate_primitive_classes(12)]
    towers += [build_blocks(89, 55), build_blocks(-55, 89)]
    for t in towers:
        l, lp, cf = t.l, t.lp, t.cf
        assert l[0] == 1 and lp[0] == 2
        assert len(t.word) == abs(t.p) + t.q
        for i in range(1, t.depth + 1):
            n = cf[i - 1]
            assert t.w[i] == t.w[i - 1] * (n - 1) + t.wp[i - 1]
            assert t.wp[i] == t.w[i - 1] * n + t.wp[i - 1]
            assert t.wp[i] == t.w[i - 1] + t.w[i]
            assert lp[i] == l[i] + l[i - 1]
            assert l[i] < lp[i] < 2 * l[i]
            assert i + 1 <= l[i]
            # l_i sits in (n_i l_{i-1}, (n_i + 1) l_{i-1}], equality only at
            # the first level
            assert n * l[i - 1] < l[i] <= (n + 1) * l[i - 1]
            if i == 1:
                assert l[1] == (n + 1) * l[0]
            else:
                assert l[i] < (n + 1) * l[i - 1]
        for i in range(2, t.depth + 1):
            m = cf[i - 2]
            # comparing consecutive levels against the previous entry; tight
            # exactly at level 2 when the second entry is 1
            assert (m + 2) * l[i - 1] <= (m + 1) * l[i]
            if i >= 3 or cf[i - 1] >= 2:
                assert (m + 2) * l[i - 1] < (m + 1) * l[i]


def test_min_li_bound_is_tight_at_level_two():
    t = build_blocks(*cf_value([1, 1, 2]))
    assert (t.cf[0] + 2) * t.l[1] == (t.cf[0] + 1) * t.l[2]


def test_enumeration_count_matches_totient_sum():
    for max_den in (1, 2, 3, 5, 8, 12):
        classes = enumerate_primitive_classes(max_den)
        phi = list(range(max_den + 1))
        for k in range(2, max_den + 1):
            if phi[k] == k:  # k prime: sieve the multiples
                for m in range(k, max_den + 1, k):
                    phi[m] -= phi[m] // k
        # coprime pairs in [1, N]^2 come in (p, q) / (q, p) twins except (1, 1)
        assert len(classes) == 2 + 2 * sum(phi[1:]) - 1
        slopes = [s for s, _ in classes]
        assert slopes[:2] == [Slope.from_pair(1, 0), Slope.from_pair(0, 1)]
        assert slopes == sorted(slopes, key=lambda s: (s.q, s.p))
        assert len(set(slopes)) == len(slopes)
    with pytest.raises(ValueError):
        enumerate_primitive_classes(0)


# --------------------------------------------------------------------------
# derivation and primitivity
# --------------------------------------------------------------------------

def test_alphabet_class():
    assert alphabet_class("aabab") == ("a", "b")
    assert alphabet_class("aaBaB") == ("a", "B")
    assert alphabet_class("AAb") == ("A", "b")
    assert alphabet_class("ABAB") == ("A", "B")
    assert alphabet_class("a") == ("a", "b")
    assert alphabet_class("abA") == "mixed"


def test_derivation_trace_frozen():
    trace = derivation("aabab")
    assert trace.primitive
    assert trace.values == (1, 2)
    assert [s.derived for s in trace.steps] == ["bab", "a"]
    trace = derivation(build_blocks(7, 5).word)
    assert trace.primitive and trace.values == (1, 2, 2)


def test_derivation_failures():
    assert not derivation("").primitive
    assert derivation("abAB").reason == "some generator occurs with both signs"
    assert not derivation("aa").primitive  # proper power
    assert not derivation("aabb").primitive  # neither letter isolated
    assert not derivation("abaabaaab").primitive  # run sizes 1, 2, 3
    assert not derivation("aabaab").primitive  # gcd 3 survives to a power


def test_derivation_values_match_tower_entries():
    for _, tower in enumerate_primitive_classes(9):
        trace = derivation(tower.word)
        assert trace.primitive and trace.reason == ""
        assert trace.values == tower.cf
        # the value sequence is a conjugacy invariant
        for k in (1, tower.l[-1] // 2):
            rotated = derivation(rotate(tower.word, k))
            assert rotated.primitive and rotated.values == tower.cf


_RELABELINGS = [
    {"a": "a", "b": "b"},
    {"a": "A", "b": "b"},
    {"a": "a", "b": "B"},
    {"a": "A", "b": "B"},
]


def _reference_primitive_words(max_len):
    """All cyclically reduced primitive words of length <= max_len, built
    from towers, sign relabelings, inverses, and rotations only."""
    base = [t.word for _, t in enumerate_primitive_classes(max_len)
            if len(t.word) <= max_len]
    out = set()
    for w in base:
        for sub in _RELABELINGS:
            v = substitute(w, sub)
            for u in (v, invert(v)):
                out.update(rotations(u))
    return out


def test_primitivity_exhaustive_against_reference_set():
    max_len = 9
    reference = _reference_primitive_words(max_len)
    for w in enumerate_reduced(max_len):
        expected = cyclic_reduce(w)[0] in reference
        assert is_primitive(w) == expected, w
    assert not is_primitive("")


def test_fast_primitivity_agrees_with_derivation():
    for w in enumerate_reduced(7):
        assert is_primitive(w) == derivation(w).primitive, w


reduced_words = (
    st.text(alphabet="aAbB", min_size=1, max_size=40)
    .map(lambda s: cyclic_reduce(reduce(s))[0])
    .filter(lambda w: w)
)


@given(reduced_words, st.integers(0, 39))
def test_primitivity_invariances(w, k):
    value = is_primitive(w)
    assert is_primitive(rotate(w, k)) == value
    assert is_primitive(invert(w)) == value
    for sub in _RELABELINGS:
        assert is_primitive(substitute(w, sub)) == value


@given(reduced_words)
def test_primitive_implies_coprime_abelianization(w):
    if is_primitive(w):
        p, q = abelianization(w)
        assert gcd(abs(p), abs(q)) == 1


# --------------------------------------------------------------------------
# block sequences and adapted rotations
# --------------------------------------------------------------------------

def test_block_sequence_reassembles_word():
    for _, tower in enumerate_primitive_classes(8):
        for i in range(tower.depth + 1):
            seq = block_sequence(tower, i)
            rebuilt = "".join(
                tower.w[i] if s == "w" else tower.wp[i] for s in seq)
            assert rebuilt == tower.word
        assert block_sequence(tower, tower.depth) == ("w",)


def _brute_force_adapted_j(tower, i, k):
    """All j for which the k-rotation of w_i is a prefix or suffix of the
    j-rotation of w'_i."""
    rot_w = rotate(tower.w[i], k)
    out = set()
    for j in range(tower.lp[i]):
        rot_wp = rotate(tower.wp[i], j)
        if rot_wp.startswith(rot_w) or rot_wp.endswith(rot_w):
            out.add(j)
    return out


def test_adapted_rotations_exhaustive():
    for _, tower in enumerate_primitive_classes(8):
        word = tower.word
        for i in range(1, tower.depth + 1):
            seq = block_sequence(tower, i)
            n = tower.cf[i - 1]
            for k in range(tower.l[i]):
                ar = adapted_permutation(tower, i, k)
                assert ar.block == rotate(tower.w[i], k)
                assert ar.block_prime == rotate(tower.wp[i], ar.j)
                if ar.relation == "prefix":
                    assert ar.block_prime.startswith(ar.block)
                else:
                    assert ar.relation == "suffix"
                    assert ar.block_prime.endswith(ar.block)
                assert ar.j in _brute_force_adapted_j(tower, i, k)
                if ar.case == 1:
                    assert k <= (n - 1) * tower.l[i - 1]
                    assert ar.j == k
                    assert ar.blocks == seq
                else:
                    assert k > (n - 1) * tower.l[i - 1]
                    assert ar.j == k + tower.l[i - 1]
                    assert ar.blocks == seq[1:] + seq[:1]
                rebuilt = "".join(ar.block if s == "w" else ar.block_prime
                                  for s in ar.blocks)
                assert rebuilt == rotate(word, ar.word_rotation)
                assert sorted(ar.blocks) == sorted(seq)


def test_adapted_rotation_validation():
    tower = build_blocks(7, 5)
    with pytest.raises(ValueError):
        adapted_permutation(tower, 0, 0)
    with pytest.raises(ValueError):
        adapted_permutation(tower, 4, 0)
    with pytest.raises(ValueError):
        adapted_permutation(tower, 2, tower.l[2])


def test_adapted_rotation_spec_example():
    tower = build_blocks(7, 5)
    ar = adapted_permutation(tower, 2, 3)
    assert ar.case == 2
    assert ar.j == 5
    assert ar.relation == "prefix"
    assert ar.word_rotation == 3
    assert ar.blocks == ("p", "w")


# --------------------------------------------------------------------------
# magic subwords
# --------------------------------------------------------------------------

def test_magic_subwords_exhaustive():
    for _, tower in enumerate_primitive_classes(8):
        word = tower.word
        for i in range(1, tower.depth + 1):
            rots = rotations(tower.w[i])
            for start in range(len(word)):
                u = cyclic_subword(word, start, tower.l[i])
                wit = classify_magic_subword(tower, i, u)
                if wit.changed_to == "":
                    assert u == rots[wit.rotation]
                else:
                    assert wit.changed_to != u[-1]
                    assert u[:-1] + wit.changed_to == rots[wit.rotation]
                    # exact matches take precedence
                    assert u not in rots


def test_magic_subword_validation():
    tower = build_blocks(7, 5)
    with pytest.raises(ValueError):
        classify_magic_subword(tower, 2, "abaa")  # wrong length
    with pytest.raises(ValueError):
        classify_magic_subword(tower, 2, "babba")  # not a cyclic subword


# --------------------------------------------------------------------------
# block counts in windows
# --------------------------------------------------------------------------

def test_block_count_bound_exhaustive():
    for p, q in [(13, 8), (21, 13), (11, 3)]:
        tower = build_blocks(p, q)
        word_len = tower.l[-1]
        for i in range(1, tower.depth + 1):
            li = tower.l[i]
            if 4 * li >= word_len:
                continue
            for k in {0, 1, li - 1}:
                for length in range(4 * li + 1, word_len + 1):
                    for start in range(word_len):
                        u = cyclic_subword(tower.word, start, length)
                        rep = count_block_occurrences(u, tower, i, k)
                        assert rep.satisfied
                        # bound holds in exact arithmetic as well
                        assert 2 * li * rep.count >= length - 4 * li
                        assert rep.alpha == length / li


def test_block_count_recount():
    tower = build_blocks(21, 13)
    i, k = 2, 1
    ar = adapted_permutation(tower, i, k)
    word = rotate(tower.word, ar.word_rotation)
    sizes = [tower.l[i] if s == "w" else tower.lp[i] for s in ar.blocks]
    starts = [0]
    for size in sizes:
        starts.append(starts[-1] + size)
    for start in range(len(word)):
        for length in (1, tower.l[i] * 4 + 1, len(word)):
            u = cyclic_subword(word, start, length)
            rep = count_block_occurrences(u, tower, i, k)
            # independent recount: block t of the doubled word is inside
            # [rep.start, rep.start + length)
            count = 0
            for lap in (0, len(word)):
                for t in range(len(sizes)):
                    lo, hi = starts[t] + lap, starts[t + 1] + lap
                    if lo >= rep.start and hi <= rep.start + length:
                        count += 1
            assert rep.count == count


def test_block_count_validation():
    tower = build_blocks(13, 8)
    with pytest.raises(ValueError):
        count_block_occurrences("", tower, 1, 0)
    with pytest.raises(ValueError):
        count_block_occurrences(tower.word * 2, tower, 1, 0)
    with pytest.raises(ValueError):
        count_block_occurrences("bb" + "a" * 6, tower, 1, 0)
