import random

from hypothesis import given, settings, strategies as st

from pclkit.model import Document, Language
from pclkit.webclean import (
    CleaningConfig,
    clean_pipeline,
    dedupe,
    emojis_to_text,
    redact_users,
    strip_boilerplate,
)


def doc(i, text, lang=Language.ZH):
    return Document(id=f"d{i}", text=text, language=lang)


def config(**kwargs):
    defaults = dict(
        boilerplate_patterns=["# 话题内容", "# 评论日期"],
        emoji_map={"😢": "[泪]", "👍": "[赞]"},
        min_length=0,
    )
    defaults.update(kwargs)
    return CleaningConfig(**defaults)


class TestDedupe:
    def test_byte_identical(self):
        docs = [doc(1, "hello world"), doc(2, "hello world")]
        assert [d.id for d in dedupe(docs)] == ["d1"]

    def test_whitespace_runs_collapse(self):
        docs = [doc(1, "hello   world"), doc(2, "hello world")]
        assert len(dedupe(docs)) == 1

    def test_all_unique_unchanged(self):
        docs = [doc(i, f"text {i}") for i in range(10)]
        assert dedupe(docs) == docs


class TestStripBoilerplate:
    def test_no_tags_identity(self):
        assert strip_boilerplate("今天天气不错", config()) == "今天天气不错"

    def test_weibo_fixed_tags_removed(self):
        text = "# 话题内容 今天很难过 # 评论日期"
        out = strip_boilerplate(text, config())
        assert "# 话题内容" not in out and "# 评论日期" not in out
        assert "今天很难过" in out

    def test_tag_twice_both_removed(self):
        out = strip_boilerplate("# 话题内容 a # 话题内容 b", config())
        assert out == "a b"


class TestRedactUsers:
    def test_mention_replaced(self):
        assert redact_users("@alice 你说得对", config()) == "#USER 你说得对"

    def test_no_mentions_identity(self):
        assert redact_users("没有提及任何人", config()) == "没有提及任何人"

    def test_fullwidth_mention(self):
        assert redact_users("@张三丰：你好", config()) == "#USER：你好"

    def test_bare_at_preserved(self):
        assert redact_users("price @ 5 dollars", config()) == "price @ 5 dollars"

    @settings(max_examples=100, deadline=None)
    @given(st.text(max_size=80))
    def test_idempotent(self, text):
        cfg = config()
        once = redact_users(text, cfg)
        assert redact_users(once, cfg) == once


class TestEmojis:
    def test_no_emoji_identity(self):
        assert emojis_to_text("plain text", config()) == "plain text"

    def test_mapped_emoji_converted(self):
        out = emojis_to_text("太难了😢", config())
        assert out == "太难了[泪]"

    def test_unmapped_emoji_preserved(self):
        assert emojis_to_text("好🎉", config()) == "好🎉"


class TestPipeline:
    def test_empty_corpus(self):
        docs, report = clean_pipeline([], config())
        assert docs == []
        assert report.to_dict() == {
            "removed_dupes": 0, "redactions": 0, "tag_removals": 0,
            "emoji_conversions": 0, "removed_short": 0,
        }

    def test_dedup_after_strip(self):
        # only equal after the tag is stripped
        docs = [doc(1, "# 话题内容 同样的内容"), doc(2, "同样的内容")]
        cleaned, report = clean_pipeline(docs, config())
        assert len(cleaned) == 1
        assert report.removed_dupes == 1
        assert report.tag_removals == 1

    def test_short_docs_dropped(self):
        docs = [doc(1, "嗯"), doc(2, "这是一条足够长的微博内容")]
        cleaned, report = clean_pipeline(docs, config(min_length=5))
        assert [d.id for d in cleaned] == ["d2"]
        assert report.removed_short == 1

    def test_idempotence(self):
        docs = [
            doc(1, "# 话题内容 @user1 这些可怜人😢"),
            doc(2, "@user2 需要 帮助"),
            doc(3, "需要 帮助"),
        ]
        cfg = config()
        once, _ = clean_pipeline(docs, cfg)
        twice, report2 = clean_pipeline(once, cfg)
        assert twice == once
        assert report2.redactions == 0 and report2.tag_removals == 0

    def test_no_mention_leak(self):
        rng = random.Random(3)
        docs = [
            doc(i, "@" + "".join(rng.choices("abc张王李", k=5)) + " 内容 " + str(i))
            for i in range(50)
        ]
        cleaned, report = clean_pipeline(docs, config())
        assert report.redactions == 50
        for d in cleaned:
            assert redact_users(d.text, config()) == d.text

    def test_order_stability(self):
        docs = [doc(i, f"内容编号 {i}") for i in range(20)]
        cleaned, _ = clean_pipeline(docs, config())
        assert [d.id for d in cleaned] == [d.id for d in docs]

    def test_counts_match_recount(self):
        rng = random.Random(9)
        pieces = ["# 话题内容", "@某人", "😢", "普通文本", "更多内容"]
        docs = []
        for i in range(60):
            docs.append(doc(i, " ".join(rng.choices(pieces, k=rng.randint(2, 6)))))
        cfg = config()
        _, report = clean_pipeline(docs, cfg)
        expected_tags = sum(d.text.count("# 话题内容") for d in docs)
        expected_emoji = sum(d.text.count("😢") for d in docs)
        assert report.tag_removals == expected_tags
        assert report.emoji_conversions == expected_emoji


class TestConfig:
    def test_keyword_count_check(self):
        from pclkit.model import GroupTag
        cfg = config(keyword_lists={GroupTag.WOMEN: ["a"] * 20,
                                    GroupTag.ELDERLY: ["b"] * 3})
        assert cfg.check_keyword_counts() == [GroupTag.ELDERLY]

    def test_yaml_roundtrip(self, tmp_path):
        cfg = config()
        cfg.save(tmp_path / "clean.yaml")
        loaded = CleaningConfig.load(tmp_path / "clean.yaml")
        assert loaded == cfg
