"""MD5 digest: frozen reference vectors, oracle equivalence, both backends.

hashlib.md5 appears here as the independent oracle only; the implementation
under test never touches it.
"""

import hashlib
import os
import random
import subprocess
import sys

import pytest

from saniproxy import _md5_pure, md5hash
from saniproxy.extraction import Param
from saniproxy.md5hash import Digest128, hash_sensitive_fields, md5_digest

# RFC 1321 appendix vectors plus two fixed passwords; hex frozen up front
KNOWN_VECTORS = [
    (b"", "d41d8cd98f00b204e9800998ecf8427e"),
    (b"a", "0cc175b9c0f1b6a831c399e269772661"),
    (b"abc", "900150983cd24fb0d6963f7d28e17f72"),
    (b"message digest", "f96b697d7cb7938d525a2f31aaf161d0"),
    (b"abcdefghijklmnopqrstuvwxyz", "c3fcd3d76192e4007dfb496cca67e13b"),
    (
        b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789",
        "d174ab98d277d9f5a5611c2c9f419d9f",
    ),
    (b"1234567890" * 8, "57edf4a22be3c955ac49da2e2107b67a"),
    (b"secret", "5ebe2294ecd0e0f08eab7690d2a6ee69"),
    (b"hunter2", "2ab96390c7dbe3439de74d0c9b0b1767"),
]


@pytest.mark.parametrize("data,expected", KNOWN_VECTORS)
def test_known_vectors(data, expected):
    assert md5_digest(data).hex == expected


@pytest.mark.parametrize("data,expected", KNOWN_VECTORS)
def test_known_vectors_pure_backend(data, expected):
    assert _md5_pure.digest(data).hex() == expected


def test_padding_boundary_lengths_match_oracle():
    # 55/56 straddle the length-field cutoff, 63/64/65 the block edge
    for n in (0, 1, 54, 55, 56, 57, 63, 64, 65, 119, 120, 128):
        data = bytes(range(256))[:n] if n <= 256 else b"x" * n
        data = (b"\x5a" * n)[:n]
        assert md5_digest(data).hex == hashlib.md5(data).hexdigest(), n


def test_oracle_equivalence_random():
    rng = random.Random(1321)
    for _ in range(1000):
        n = rng.randint(0, 4096)
        data = rng.randbytes(n)
        assert md5_digest(data).hex == hashlib.md5(data).hexdigest()


def test_backends_agree():
    rng = random.Random(7)
    for _ in range(50):
        data = rng.randbytes(rng.randint(0, 300))
        assert md5hash._backend_digest(data) == _md5_pure.digest(data)


def test_avalanche_single_bit():
    base = bytearray(b"the quick brown fox jumps over the lazy dog")
    reference = md5_digest(bytes(base)).hex
    base[0] ^= 0x01
    assert md5_digest(bytes(base)).hex != reference


def test_digest128_rejects_wrong_length():
    with pytest.raises(ValueError):
        Digest128(b"short")


def test_env_flag_selects_pure_backend():
    env = dict(os.environ, SANIPROXY_PURE_MD5="1")
    out = subprocess.run(
        [sys.executable, "-c",
         "from saniproxy import md5hash; print(md5hash.active_backend())"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "pure"


def _param(name, value):
    return Param(name=name, value=value, raw_name=name, raw_value=value, evasion=False)


def _extracted(body_params):
    from saniproxy.extraction import ExtractedInput

    return ExtractedInput(
        url_path="/login",
        raw_path="/login",
        raw_query="",
        query_params=(),
        body_params=tuple(body_params),
        user_agent="",
    )


def test_hash_sensitive_fields_replaces_password_only():
    ext = _extracted([_param("username", "a"), _param("password", "secret")])
    out = hash_sensitive_fields(ext, ["password"])
    assert out.body_params[0].value == "a"
    assert out.body_params[1].value == "5ebe2294ecd0e0f08eab7690d2a6ee69"
    assert out.hashed


def test_hash_sensitive_fields_noop_cases():
    ext = _extracted([_param("username", "a")])
    assert hash_sensitive_fields(ext, []) is ext
    assert hash_sensitive_fields(ext, ["password"]) is ext


def test_hash_sensitive_fields_single_application():
    ext = _extracted([_param("password", "secret")])
    once = hash_sensitive_fields(ext, ["password"])
    with pytest.raises(ValueError):
        hash_sensitive_fields(once, ["password"])


def test_hash_uses_raw_form():
    # the raw (still URL-encoded) value feeds the digest
    p = Param(name="password", value="a b", raw_name="password", raw_value="a+b", evasion=False)
    out = hash_sensitive_fields(_extracted([p]), ["password"])
    assert out.body_params[0].value == hashlib.md5(b"a+b").hexdigest()
