import random

import pytest
from hypothesis import given, settings, strategies as st

from pclkit.instruct import (
    PAIR_SEPARATOR,
    SUBCATEGORY_NAMES,
    InstructionSample,
    TemplateConfig,
    binarize_dpm,
    build_description_instruction,
    build_doc_dataset,
    build_pair_dataset,
    build_sample,
    concat_pair,
    enforce_length,
    export_samples,
    filter_offensive_pairs,
    load_samples,
    split_pair,
)
from pclkit.lexicon import Lexicon, LexiconEntry
from pclkit.model import (
    Document,
    Intensity,
    LabelRecord,
    Language,
    Round,
    Subcategory,
    ValidationError,
)

CONFIG = TemplateConfig.default()


def doc(i, text="the text", lang=Language.EN):
    return Document(id=f"d{i:04d}", text=text, language=lang)


def label(i, pcl=True, **kwargs):
    defaults = dict(
        doc_id=f"d{i:04d}", annotator_id="a1", round=Round.PRIMARY, pcl=pcl,
        subcategories={Subcategory.COMPASSION} if pcl else frozenset(),
    )
    defaults.update(kwargs)
    return LabelRecord(**defaults)


class TestDescriptionInstruction:
    def test_fixed_across_calls(self):
        a = build_description_instruction(Language.EN, CONFIG)
        b = build_description_instruction(Language.EN, CONFIG)
        assert a == b

    @pytest.mark.parametrize("lang", [Language.EN, Language.ZH])
    def test_contains_all_five_subcategories(self, lang):
        text = build_description_instruction(lang, CONFIG)
        for name in SUBCATEGORY_NAMES[lang]:
            assert name in text


class TestBuildSample:
    def test_positive_without_intensity(self):
        s = build_sample(doc(1), label(1, pcl=True), config=CONFIG)
        assert s.output == "Yes"
        assert "{level}" not in s.instruction
        assert "intensity" not in s.meta

    def test_negative_token(self):
        s = build_sample(doc(1), label(1, pcl=False), config=CONFIG)
        assert s.output == "No"

    def test_intensity_clause_substituted_once(self):
        s = build_sample(doc(1), label(1), intensity=Intensity.SEVERE,
                         include_intensity=True, config=CONFIG)
        assert s.instruction.count("severe") == 1
        assert s.meta["intensity"] == "SEVERE"

    def test_missing_intensity_rejected(self):
        with pytest.raises(ValidationError):
            build_sample(doc(1), label(1), include_intensity=True, config=CONFIG)

    def test_doc_label_mismatch(self):
        with pytest.raises(ValidationError):
            build_sample(doc(1), label(2), config=CONFIG)

    def test_samples_pass_invariants(self):
        s = build_sample(doc(1, lang=Language.ZH), label(1), config=CONFIG)
        s.validate(CONFIG)
        assert s.output == "是"


class TestConcatPair:
    def test_documented_separator(self):
        assert concat_pair("A", "B") == f"A {PAIR_SEPARATOR} B"

    def test_empty_side_rejected(self):
        with pytest.raises(ValidationError):
            concat_pair("", "B")

    def test_separator_collision_rejected(self):
        with pytest.raises(ValidationError):
            concat_pair(f"has {PAIR_SEPARATOR} inside", "B")

    @settings(max_examples=100, deadline=None)
    @given(
        comment=st.text(min_size=1, max_size=40).filter(lambda t: PAIR_SEPARATOR not in t),
        reply=st.text(min_size=1, max_size=40).filter(lambda t: PAIR_SEPARATOR not in t),
    )
    def test_recoverability(self, comment, reply):
        joined = concat_pair(comment, reply)
        assert split_pair(joined) == (comment, reply)


class TestOffensiveFilter:
    def offensive(self):
        return Lexicon(language=Language.EN, entries=(
            LexiconEntry("idiot", 1.0, True),
            LexiconEntry("trash", 1.0, True),
        ))

    def test_no_matches_unchanged(self):
        pairs = [("nice comment", "kind reply")]
        kept, removed = filter_offensive_pairs(pairs, self.offensive())
        assert kept == pairs and removed == 0

    def test_offensive_reply_removed(self):
        pairs = [("fine", "you idiot"), ("fine", "fine")]
        kept, removed = filter_offensive_pairs(pairs, self.offensive())
        assert removed == 1 and len(kept) == 1

    def test_removal_count_matches_recount(self):
        rng = random.Random(5)
        words = ["nice", "idiot", "trash", "kind", "okay"]
        pairs = [
            (" ".join(rng.choices(words, k=3)), " ".join(rng.choices(words, k=3)))
            for _ in range(200)
        ]
        kept, removed = filter_offensive_pairs(pairs, self.offensive())
        brute = sum(
            1 for c, r in pairs
            if any(w in (c + " " + r).split() for w in ("idiot", "trash"))
        )
        assert removed == brute
        assert len(kept) + removed == len(pairs)


class TestEnforceLength:
    def sample(self, n, lang=Language.EN):
        t = CONFIG.for_language(lang)
        return InstructionSample(
            instruction=t.description_text, input="x" * n,
            output=t.positive_token, language=lang,
        )

    def test_boundary_inclusive(self):
        limit = CONFIG.for_language(Language.EN).max_input_units
        assert enforce_length(self.sample(limit), CONFIG) is not None
        assert enforce_length(self.sample(limit + 1), CONFIG) is None

    def test_zh_limit_larger(self):
        assert enforce_length(self.sample(5000, Language.ZH), CONFIG) is not None

    def test_discard_count_matches_recount(self):
        rng = random.Random(1)
        limit = CONFIG.for_language(Language.EN).max_input_units
        lengths = [rng.randint(limit - 5, limit + 5) for _ in range(100)]
        kept = [enforce_length(self.sample(n), CONFIG) for n in lengths]
        assert sum(1 for k in kept if k is None) == sum(1 for n in lengths if n > limit)


class TestBinarizeDpm:
    def test_extremes(self):
        assert binarize_dpm(0) is False
        assert binarize_dpm(4) is True

    def test_default_threshold(self):
        assert binarize_dpm(2, threshold=2) is True
        assert binarize_dpm(1) is False

    def test_range_enforced(self):
        with pytest.raises(ValidationError):
            binarize_dpm(5)


class TestBuildDatasets:
    def test_doc_dataset_deterministic_export(self, tmp_path):
        docs = [doc(i, text=f"text number {i}") for i in range(30)]
        labels = [label(i, pcl=i % 3 == 0) for i in range(30)]
        samples, report = build_doc_dataset(docs, labels, config=CONFIG)
        assert report.exported == 30
        p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        export_samples(samples, p1)
        export_samples(samples, p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert load_samples(p1) == samples

    def test_pair_dataset_conservation(self):
        rng = random.Random(11)
        offensive = Lexicon(language=Language.EN,
                            entries=(LexiconEntry("idiot", 1.0, True),))
        limit = CONFIG.for_language(Language.EN).max_input_units
        pairs, labels = [], []
        for i in range(500):
            c = "c" * rng.randint(1, 30) + (" idiot" if rng.random() < 0.1 else "")
            r = "r" * rng.randint(1, limit + 10)
            pairs.append((c, r))
            labels.append(rng.choice([True, False, None]))
        samples, report = build_pair_dataset(pairs, labels, offensive_lexicon=offensive,
                                             config=CONFIG)
        assert report.exported == (report.input_count - report.unsure_dropped
                                   - report.offensive_removed - report.length_discarded)
        assert report.exported == len(samples)

    def test_dpm_threshold_binarization(self):
        d = doc(1)
        rec = label(1, pcl=False, dpm_level=3)
        samples, _ = build_doc_dataset([d], [rec], config=CONFIG, dpm_threshold=2)
        assert samples[0].output == "Yes"
        samples, _ = build_doc_dataset([d], [rec], config=CONFIG, dpm_threshold=4)
        assert samples[0].output == "No"
