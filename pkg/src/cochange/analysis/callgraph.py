"""Name+arity call graph over one project snapshot.

Closed world: only calls resolving to project methods produce edges. A call
site `g(...)` matches every project method named g with the same argument
count; this over-approximates (no type inference) and is documented as such.
"""

import re

from collections import Counter, defaultdict
from dataclasses import dataclass

from .java import KEYWORDS, MethodRecord, mask_comments_and_strings

_CALL_RE = re.compile(r"([A-Za-z_$][\w$]*)\s*\(")

# previous word after which an identifier+( is still a call site
_CALL_CONTEXT_WORDS = frozenset("return throw new else case yield do assert".split())
_SKIP_NAMES = frozenset(
    "if for while switch catch synchronized super this try".split()
)


@dataclass(frozen=True)
class CallEdge:
    caller: str
    callee: str
    count: int


def _call_sites(body_source: str) -> Counter:
    """(name, arity) -> occurrences within a method body."""
    masked = mask_comments_and_strings(body_source)
    sites: Counter = Counter()
    for match in _CALL_RE.finditer(masked):
        name = match.group(1)
        if name in _SKIP_NAMES or name in KEYWORDS:
            continue
        if not _looks_like_call(masked, match.start(1)):
            continue
        arity = _arity(masked, match.end() - 1)
        if arity is not None:
            sites[(name, arity)] += 1
    return sites


def _looks_like_call(masked: str, name_start: int) -> bool:
    j = name_start - 1
    while j >= 0 and masked[j].isspace():
        j -= 1
    if j < 0:
        return True
    prev = masked[j]
    if prev == ".":
        return True
    if prev in ")]>":  # cast/array/generic-declaration context
        return False
    if prev.isalnum() or prev in "_$":
        word_match = re.search(r"([\w$]+)$", masked[: j + 1])
        word = word_match.group(1) if word_match else ""
        return word in _CALL_CONTEXT_WORDS
    return True  # operator, delimiter, etc.


def _arity(masked: str, open_paren: int) -> int | None:
    depth = 0
    commas = 0
    saw_token = False
    for j in range(open_paren, len(masked)):
        ch = masked[j]
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth == 0:
                return commas + 1 if saw_token else 0
        elif depth == 1:
            if ch == ",":
                commas += 1
            elif not ch.isspace():
                saw_token = True
    return None  # unbalanced


def build_call_graph(methods: list[MethodRecord]) -> list[CallEdge]:
    by_signature: dict[tuple[str, int], list[str]] = defaultdict(list)
    for m in methods:
        by_signature[(m.name, len(m.params))].append(m.method_id)

    counts: Counter = Counter()
    for m in methods:
        for (name, arity), n in _call_sites(m.body_source).items():
            for callee in by_signature.get((name, arity), ()):
                if callee != m.method_id:
                    counts[(m.method_id, callee)] += n

    return [
        CallEdge(caller=a, callee=b, count=c)
        for (a, b), c in sorted(counts.items())
    ]


def symmetric_call_counts(edges: list[CallEdge]) -> dict[tuple[str, str], int]:
    """count(a→b) + count(b→a), keyed by unordered (min, max) id pair."""
    totals: dict[tuple[str, str], int] = defaultdict(int)
    for e in edges:
        key = (e.caller, e.callee) if e.caller < e.callee else (e.callee, e.caller)
        totals[key] += e.count
    return dict(totals)
