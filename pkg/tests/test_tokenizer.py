"""Lexer: frozen token sequences, lossless-lexing property, table keys."""

import random

import pytest

from saniproxy.extraction import ExtractedInput, Param
from saniproxy.sqltokens import (
    URL_KEY,
    KeywordSet,
    TokenKind,
    build_token_table,
    tokenize,
    url_scan_text,
)

KWS = KeywordSet()


def kinds_and_lexemes(text, keep_ws=False):
    return [
        (t.kind.name, t.lexeme)
        for t in tokenize(text, KWS)
        if keep_ws or t.kind is not TokenKind.WHITESPACE
    ]


def test_tautology_fragment_sequence():
    assert kinds_and_lexemes("nil' OR 1=1--") == [
        ("IDENTIFIER", "nil"),
        ("QUOTE", "'"),
        ("KEYWORD", "OR"),
        ("INT_LITERAL", "1"),
        ("OPERATOR", "="),
        ("INT_LITERAL", "1"),
        ("COMMENT_START", "--"),
    ]


def test_quote_pairing_swallows_connective():
    # the two quotes pair, carrying OR inside the string literal
    assert kinds_and_lexemes("admin123' OR '1=1 - -") == [
        ("IDENTIFIER", "admin123"),
        ("STRING_LITERAL", "' OR '"),
        ("INT_LITERAL", "1"),
        ("OPERATOR", "="),
        ("INT_LITERAL", "1"),
        ("OPERATOR", "-"),
        ("OPERATOR", "-"),
    ]


def test_piggyback_fragment_has_semicolon_then_commands():
    seq = kinds_and_lexemes("'; drop table user --")
    assert ("SEMICOLON", ";") in seq
    assert ("KEYWORD", "drop") in seq
    assert ("KEYWORD", "table") in seq


def test_empty_string():
    assert list(tokenize("", KWS)) == []


def test_keyword_case_insensitive():
    upper = [t.kind for t in tokenize("SeLeCt", KWS)]
    lower = [t.kind for t in tokenize("select", KWS)]
    assert upper == lower == [TokenKind.KEYWORD]


def test_prefix_keywords():
    assert kinds_and_lexemes("sp_who") == [("KEYWORD", "sp_who")]
    assert kinds_and_lexemes("XP_cmdshell") == [("KEYWORD", "XP_cmdshell")]
    # plain identifier that merely contains the letters
    assert kinds_and_lexemes("grasp_it") == [("IDENTIFIER", "grasp_it")]


def test_two_char_operators():
    assert kinds_and_lexemes("a<>b || c") == [
        ("IDENTIFIER", "a"),
        ("OPERATOR", "<>"),
        ("IDENTIFIER", "b"),
        ("OPERATOR", "||"),
        ("IDENTIFIER", "c"),
    ]


@pytest.mark.parametrize("text,opener", [("-- x", "--"), ("# x", "#"), ("/* x", "/*")])
def test_comment_starts(text, opener):
    assert kinds_and_lexemes(text)[0] == ("COMMENT_START", opener)


def test_markup_becomes_tag_tokens():
    assert kinds_and_lexemes("<script>x</script>") == [
        ("TAG", "<script>"),
        ("IDENTIFIER", "x"),
        ("TAG", "</script>"),
    ]


def test_apostrophes_pair_greedily():
    assert kinds_and_lexemes("it's O'Brien") == [
        ("IDENTIFIER", "it"),
        ("STRING_LITERAL", "'s O'"),
        ("IDENTIFIER", "Brien"),
    ]


def test_unknown_bytes_become_other():
    seq = kinds_and_lexemes("café ☕ naïve")
    assert ("OTHER", "é") in seq and ("OTHER", "☕") in seq


def _random_text(rng):
    pools = [
        "abcdefgh XYZ_ 0123456789",
        "'\";-=<>!()#/*|&%+",
        "select or and union -- <tag attr='v'>",
        "\t\n é☕日本語",
    ]
    n = rng.randint(0, 60)
    return "".join(rng.choice(rng.choice(pools)) for _ in range(n))


def test_lossless_lexing_property():
    rng = random.Random(20240801)
    for _ in range(10_000):
        text = _random_text(rng)
        toks = tokenize(text, KWS)
        assert "".join(t.lexeme for t in toks) == text
        for a, b in zip(toks, toks[1:]):
            assert a.end == b.position


def _param(name, value):
    return Param(name=name, value=value, raw_name=name, raw_value=value, evasion=False)


def _extracted(query=(), body=(), path="/items", raw_query=""):
    return ExtractedInput(
        url_path=path,
        raw_path=path,
        raw_query=raw_query,
        query_params=tuple(query),
        body_params=tuple(body),
        user_agent="",
    )


def test_table_keys_unique_and_ordered():
    table = build_token_table(
        _extracted(query=[_param("a", "1")], body=[_param("b", "2"), _param("c", "3")]),
        KWS,
    )
    assert list(table.keys()) == [URL_KEY, "a", "b", "c"]


def test_duplicate_names_get_index_suffix():
    table = build_token_table(
        _extracted(query=[_param("a", "1"), _param("a", "2")]), KWS
    )
    assert list(table.keys()) == [URL_KEY, "a#0", "a#1"]


def test_param_literally_named_url_is_suffixed():
    table = build_token_table(_extracted(query=[_param("URL", "x")]), KWS)
    assert list(table.keys()) == [URL_KEY, "URL#0"]


def test_url_entry_scans_decoded_path_and_query():
    ext = _extracted(path="/items", raw_query="id=5%27%20OR%201%3D1")
    text = url_scan_text(ext)
    assert text == "/items?id=5' OR 1=1"
