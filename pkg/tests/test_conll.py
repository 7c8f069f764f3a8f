import pytest

from data.conll import format_conll, parse_conll, parse_lines, write_conll
from data.errors import ConllFormatError
from models.tags import DomainLabel, UnifiedTag


def test_parse_tagged_and_untagged_sentences():
    lines = ["the\tO", "pizza\tS-POS", "", "fast\tO", "boot\tB-POS", "time\tE-POS", "", "just", "words", ""]
    sentences = parse_lines(lines)
    assert [s.tokens for s in sentences] == [["the", "pizza"], ["fast", "boot", "time"], ["just", "words"]]
    assert sentences[1].unified_tags == [UnifiedTag.O, UnifiedTag.B_POS, UnifiedTag.E_POS]
    assert not sentences[2].labeled


def test_unknown_tag_reports_its_line():
    with pytest.raises(ConllFormatError) as info:
        parse_lines(["the\tO", "pizza\tS-GOOD"], path="demo.conll")
    assert info.value.line == 2
    assert "demo.conll:2" in str(info.value)


def test_conflicting_sentiment_inside_one_aspect_is_an_error():
    with pytest.raises(ConllFormatError):
        parse_lines(["battery\tB-POS", "life\tE-NEG"])


def test_partial_tag_column_is_an_error():
    with pytest.raises(ConllFormatError):
        parse_lines(["battery\tB-POS", "life"])


def test_ill_formed_tags_are_repaired_and_recorded():
    sentence = parse_lines(["a\tO", "battery\tI-NEG", "life\tE-NEG"])[0]
    assert sentence.unified_tags == [UnifiedTag.O, UnifiedTag.B_NEG, UnifiedTag.E_NEG]
    assert sentence.repairs == [2]


def test_write_then_parse_keeps_sentences(tmp_path):
    sentences = parse_lines(["the\tO", "screen\tS-NEG", "", "so\tO", "fast\tO"], domain=DomainLabel.TARGET)
    path = tmp_path / "out.conll"
    write_conll(path, sentences)
    again = parse_conll(path, DomainLabel.TARGET)
    assert again == sentences
    assert format_conll(again) == path.read_text(encoding="utf-8")
