import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plainscore.errors import AllOOV, DegenerateText
from plainscore.textstats import (
    TextStats,
    TokenVocab,
    ari,
    bow_vector,
    build_word_vocab,
    count_syllables,
    count_tokens,
    flesch_kincaid,
    split_sentences,
    text_stats,
    tokenize_words,
)


class TestSplitSentences:
    def test_unambiguous_periods(self):
        assert split_sentences("A fox ran. It hid.") == ["A fox ran.", "It hid."]

    def test_decimal_is_not_a_boundary(self):
        text = "Mean difference 6.20 g/kg/d was found. Next."
        assert split_sentences(text) == ["Mean difference 6.20 g/kg/d was found.", "Next."]

    def test_empty(self):
        assert split_sentences("") == []

    def test_abbreviations(self):
        text = "Dr. Smith et al. reported results. The e.g. case held. Done."
        sents = split_sentences(text)
        assert sents == [
            "Dr. Smith et al. reported results.",
            "The e.g. case held.",
            "Done.",
        ]

    def test_question_and_exclamation(self):
        assert split_sentences("Did it work? It did! Great.") == [
            "Did it work?",
            "It did!",
            "Great.",
        ]

    def test_boundary_before_digit(self):
        assert split_sentences("Scores fell by 4.5. 30 patients improved.") == [
            "Scores fell by 4.5.",
            "30 patients improved.",
        ]

    def test_no_empty_sentences_and_reconstruction(self):
        text = "  One here.   Two there.  "
        sents = split_sentences(text)
        assert all(s for s in sents)
        assert "".join(sents).replace(" ", "") == text.replace(" ", "")

    def test_lowercase_continuation_not_split(self):
        assert split_sentences("measured vs. baseline values confirm it.") == [
            "measured vs. baseline values confirm it."
        ]


class TestSyllables:
    @pytest.mark.parametrize(
        "word,expected",
        [
            ("cat", 1),
            ("cake", 1),
            ("table", 2),
            ("the", 1),
            ("bee", 1),
            ("ale", 1),
            ("e", 1),
            ("hospital", 3),
            ("difference", 3),
        ],
    )
    def test_examples(self, word, expected):
        assert count_syllables(word) == expected

    @given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=20))
    def test_at_least_one_for_alphabetic_words(self, word):
        assert count_syllables(word) >= 1


class TestReadability:
    def test_flesch_kincaid_hand_example(self):
        stats = text_stats("The cat sat on the mat.")
        assert stats == TextStats(n_sentences=1, n_words=6, n_syllables=6, n_chars=17)
        assert flesch_kincaid(stats) == pytest.approx(-1.45, abs=1e-9)

    def test_ari_hand_example(self):
        stats = text_stats("The cat sat on the mat.")
        assert ari(stats) == pytest.approx(-5.08, abs=0.01)

    def test_degenerate(self):
        with pytest.raises(DegenerateText):
            flesch_kincaid(TextStats(1, 0, 0, 0))
        with pytest.raises(DegenerateText):
            ari(TextStats(0, 5, 5, 20))

    def test_duplication_invariance(self):
        doc = "The trial showed a large effect. Side effects were mild."
        single = text_stats(doc)
        double = text_stats(doc + " " + doc)
        assert flesch_kincaid(double) == pytest.approx(flesch_kincaid(single), abs=1e-9)
        assert ari(double) == pytest.approx(ari(single), abs=1e-9)


class TestTokenizeWords:
    def test_hyphenated_words_stay_joined(self):
        assert tokenize_words("lay-audience text") == ["lay-audience", "text"]

    def test_punctuation_dropped(self):
        assert tokenize_words("We found (95% CI 2.71)!") == [
            "We", "found", "95", "CI", "2", "71",
        ]

    def test_case_preserved(self):
        assert tokenize_words("We We we") == ["We", "We", "we"]

    @given(st.text(max_size=200))
    @settings(max_examples=80)
    def test_token_offsets_strictly_increasing(self, text):
        from plainscore.textstats import _WORD_RE

        spans = [m.span() for m in _WORD_RE.finditer(text)]
        assert [m.group(0) for m in _WORD_RE.finditer(text)] == tokenize_words(text)
        for (s0, e0), (s1, _) in zip(spans, spans[1:]):
            assert s0 < e0 <= s1


class TestBow:
    def test_hand_counts(self):
        vocab = TokenVocab(["a", "b"])
        vec = bow_vector("a b a", vocab)
        assert vec.weights == {0: pytest.approx(2 / 3), 1: pytest.approx(1 / 3)}
        assert vec.oov_rate == 0.0

    def test_single_token(self):
        vocab = TokenVocab(["a", "b"])
        assert bow_vector("a", vocab).weights == {0: 1.0}

    def test_all_oov(self):
        with pytest.raises(AllOOV):
            bow_vector("z", TokenVocab(["a", "b"]))

    def test_oov_rate(self):
        vocab = TokenVocab(["a"])
        vec = bow_vector("a z z z", vocab)
        assert vec.oov_rate == pytest.approx(0.75)
        assert vec.weights == {0: 1.0}

    @given(st.lists(st.sampled_from("abcde"), min_size=1, max_size=60))
    @settings(max_examples=60)
    def test_sums_to_one(self, tokens):
        vocab = TokenVocab(list("abc"))
        text = " ".join(tokens)
        try:
            vec = bow_vector(text, vocab)
        except AllOOV:
            assert not (set(tokens) & set("abc"))
            return
        assert math.fsum(vec.weights.values()) == pytest.approx(1.0, abs=1e-9)

    def test_duplicate_vocab_token_rejected(self):
        with pytest.raises(ValueError):
            TokenVocab(["a", "a"])


class TestCountTokens:
    def test_word_count_default(self):
        assert count_tokens("We found three trials.") == 4

    def test_subword_greedy_longest_match(self):
        vocab = TokenVocab(["un", "certain", "ty", "u"])
        # "uncertainty" -> un + certain + ty
        assert count_tokens("uncertainty", vocab) == 3

    def test_subword_unknown_chars_count_single(self):
        vocab = TokenVocab(["ab"])
        # "abxab" -> ab, x, ab
        assert count_tokens("abxab", vocab) == 3


class TestVocabFile:
    def test_round_trip(self, tmp_path):
        vocab = build_word_vocab(["b a a", "c a"])
        assert vocab.id_to_token[0] == "a"  # most frequent first
        path = tmp_path / "vocab.txt"
        vocab.save(path)
        loaded = TokenVocab.from_file(path)
        assert loaded.id_to_token == vocab.id_to_token
        assert loaded.token_to_id == vocab.token_to_id
