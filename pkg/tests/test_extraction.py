"""Input extraction: decoding, evasion flag, rebuild round-trips, errors."""

import pytest

from saniproxy.extraction import (
    ExtractionError,
    OversizeError,
    extract_input,
    rebuild_body,
    rebuild_target,
)

from conftest import make_request


def test_post_body_params_split():
    req = make_request("POST", "/login", b"username=smit&pass=x")
    ext = extract_input(req)
    assert ext.url_path == "/login"
    assert [(p.name, p.value) for p in ext.body_params] == [
        ("username", "smit"),
        ("pass", "x"),
    ]
    assert ext.query_params == ()


def test_query_decoded_once():
    req = make_request("GET", "/items?id=5%27%20OR%201%3D1")
    ext = extract_input(req)
    assert [(p.name, p.value) for p in ext.query_params] == [("id", "5' OR 1=1")]
    assert not ext.has_evasion


def test_no_params():
    ext = extract_input(make_request("GET", "/"))
    assert ext.query_params == () and ext.body_params == ()


def test_plus_decodes_to_space():
    ext = extract_input(make_request("GET", "/s?q=a+b"))
    assert ext.query_params[0].value == "a b"


def test_double_encoding_sets_evasion():
    # %2527 decodes to %27 which decodes again to ' — evasion
    ext = extract_input(make_request("GET", "/items?id=%2527%2520OR%25201%253D1"))
    assert ext.has_evasion
    assert ext.query_params[0].evasion


def test_literal_percent_value_is_not_evasion():
    # "100%" arrives as 100%25; one decode yields a stable value
    ext = extract_input(make_request("GET", "/s?q=100%25"))
    assert ext.query_params[0].value == "100%"
    assert not ext.has_evasion


def test_user_agent_captured():
    req = make_request("GET", "/", headers={"User-Agent": "Mozilla/5.0 Firefox/117.0"})
    assert extract_input(req).user_agent == "Mozilla/5.0 Firefox/117.0"


def test_body_on_get_ignored_without_content_type():
    req = make_request("GET", "/x")
    assert extract_input(req).body_params == ()


def test_unsupported_body_type_is_extraction_error():
    req = make_request(
        "POST", "/x", b'{"a": 1}', headers={"content-type": "application/json"}
    )
    with pytest.raises(ExtractionError):
        extract_input(req)


def test_oversize_body_rejected():
    req = make_request("POST", "/x", b"a=" + b"b" * 100)
    with pytest.raises(OversizeError):
        extract_input(req, max_body_bytes=50)


def test_rebuild_target_preserves_unmodified_params():
    req = make_request("GET", "/items?id=5&note=a%20b")
    ext = extract_input(req)
    assert rebuild_target(ext) == "/items?id=5&note=a%20b"


def test_rebuild_after_replacement_reencodes():
    req = make_request("POST", "/login", b"username=a&password=p w")
    ext = extract_input(req)
    replaced = ext.with_params(
        ext.query_params,
        [ext.body_params[0], ext.body_params[1].replaced("DIGEST")],
    )
    assert rebuild_body(replaced) == b"username=a&password=DIGEST"


def test_login_name_prefers_body_over_query():
    req = make_request("POST", "/login?username=ignored", b"username=real&password=x")
    ext = extract_input(req)
    assert ext.login_name(["username"]) == "real"


def test_login_name_field_aliases():
    ext = extract_input(make_request("POST", "/login", b"login=smit&password=x"))
    assert ext.login_name(["username", "login", "user"]) == "smit"
    assert ext.login_name(["user_id"]) is None
