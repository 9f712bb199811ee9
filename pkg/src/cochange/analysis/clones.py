"""Near-miss clone scoring: normalized statement lines + longest common
subsequence, with the 0.3-dissimilarity floor a near-miss detector applies
(anything under 70 reports as 0, as only clone pairs are emitted)."""

import re

from .java import KEYWORDS, MethodRecord, strip_comments

CLONE_THRESHOLD = 70.0  # dissimilarity 0.3 on the 0..100 scale

_TOKEN_RE = re.compile(
    r"""
    (?P<string>"(?:\\.|[^"\\])*"|'(?:\\.|[^'\\])*')
    | (?P<number>\d[\w.]*)
    | (?P<ident>[A-Za-z_$][\w$]*)
    | (?P<op>[^\sA-Za-z0-9_$]+?)
    """,
    re.VERBOSE,
)

_LITERAL_WORDS = frozenset({"true", "false", "null"})


def normalized_statement_lines(body_source: str) -> tuple[str, ...]:
    """Pretty-print a body one statement per line with identifiers and
    literals replaced by placeholder tokens."""
    text = strip_comments(body_source)
    lines: list[str] = []
    current: list[str] = []
    for match in _TOKEN_RE.finditer(text):
        kind = match.lastgroup
        tok = match.group()
        if kind in ("string", "number"):
            tok = "lit"
        elif kind == "ident":
            if tok in _LITERAL_WORDS:
                tok = "lit"
            elif tok not in KEYWORDS:
                tok = "id"
        current.append(tok)
        if tok in (";", "{", "}"):
            line = " ".join(current).strip()
            if line not in ("{", "}"):  # brace-only lines carry no content
                lines.append(line)
            current = []
    if current:
        line = " ".join(current).strip()
        if line:
            lines.append(line)
    return tuple(lines)


def _lcs_length(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    if not a or not b:
        return 0
    # classic two-row DP; inputs are interned line strings
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def clone_similarity(a: MethodRecord, b: MethodRecord) -> float:
    """0..100 clone score; below the near-miss threshold reports 0."""
    return clone_similarity_lines(
        normalized_statement_lines(a.body_source),
        normalized_statement_lines(b.body_source),
    )


def clone_similarity_lines(lines_a: tuple[str, ...], lines_b: tuple[str, ...]) -> float:
    if not lines_a or not lines_b:
        return 0.0
    score = 100.0 * _lcs_length(lines_a, lines_b) / max(len(lines_a), len(lines_b))
    return score if score >= CLONE_THRESHOLD else 0.0
