"""Tolerant method-level parser for Java source.

Not a full grammar: a masked-text scanner that tracks brace nesting, type
declarations and method signatures. Good enough to recover one record per
method/constructor with its body text and line span, while never raising on
odd input (parse trouble yields an empty result plus a warning, mirroring
tolerant mining).
"""

import bisect
import logging
import re

from dataclasses import dataclass, field

from ..identity import method_id

logger = logging.getLogger(__name__)

KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while var record sealed
    permits yield non-sealed""".split()
)

# A `{` preceded by `name(...)` where name is one of these opens a control
# block, not a method body.
CONTROL_NAMES = frozenset(
    "if for while switch catch synchronized try do else return new assert".split()
)

_IDENT_RE = re.compile(r"[A-Za-z_$][\w$]*")
_PACKAGE_RE = re.compile(r"^\s*package\s+([\w.]+)\s*;", re.MULTILINE)
_TYPE_DECL_RE = re.compile(r"\b(class|interface|enum|record)\s+([A-Za-z_$][\w$]*)")
_NAME_BEFORE_PAREN_RE = re.compile(r"([A-Za-z_$][\w$]*)\s*$")
_THROWS_TAIL_RE = re.compile(r"^(\s*throws\s+[\w\s.,<>\[\]$]*)?\s*$")
_NEW_TAIL_RE = re.compile(r"\bnew\s+[\w$.\s<>\[\],?]*$")


@dataclass(frozen=True)
class MethodRecord:
    """One parsed method or constructor."""

    method_id: str
    file_path: str
    package: str
    type_name: str
    name: str
    params: tuple[tuple[str, str], ...]  # (type_name, arg_name)
    superclasses: tuple[str, ...]  # nearest first; transitive after snapshot resolution
    body_source: str
    line_span: tuple[int, int]
    is_test: bool

    @property
    def param_types(self) -> tuple[str, ...]:
        return tuple(t for t, _ in self.params)

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(n for _, n in self.params)


@dataclass(frozen=True)
class TypeDecl:
    name: str
    package: str
    supers: tuple[str, ...]  # declared: extends first, then implements, as written


@dataclass
class ParsedFile:
    methods: list[MethodRecord] = field(default_factory=list)
    types: list[TypeDecl] = field(default_factory=list)


def mask_comments_and_strings(source: str) -> str:
    """Blank out comments and literal contents, preserving length and newlines."""
    out = list(source)
    i, n = 0, len(source)

    def blank(a: int, b: int) -> None:
        for j in range(a, b):
            if out[j] != "\n":
                out[j] = " "

    while i < n:
        c = source[i]
        if c == "/" and i + 1 < n and source[i + 1] == "/":
            j = source.find("\n", i)
            j = n if j < 0 else j
            blank(i, j)
            i = j
        elif c == "/" and i + 1 < n and source[i + 1] == "*":
            j = source.find("*/", i + 2)
            j = n if j < 0 else j + 2
            blank(i, j)
            i = j
        elif c == '"' and source.startswith('"""', i):
            j = source.find('"""', i + 3)
            j = n if j < 0 else j + 3
            blank(i + 3, max(i + 3, j - 3))
            i = j
        elif c in "\"'":
            j = i + 1
            while j < n and source[j] != c:
                j = j + 2 if source[j] == "\\" else j + 1
            j = min(j + 1, n)
            blank(i + 1, max(i + 1, j - 1))
            i = j
        else:
            i += 1
    return "".join(out)


def strip_comments(source: str) -> str:
    """Remove comments entirely (string literals kept verbatim)."""
    out = []
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c == "/" and i + 1 < n and source[i + 1] == "/":
            j = source.find("\n", i)
            i = n if j < 0 else j
        elif c == "/" and i + 1 < n and source[i + 1] == "*":
            j = source.find("*/", i + 2)
            i = n if j < 0 else j + 2
            out.append(" ")
        elif c in "\"'":
            j = i + 1
            if c == '"' and source.startswith('"""', i):
                j = source.find('"""', i + 3)
                j = n if j < 0 else j + 3
            else:
                while j < n and source[j] != c:
                    j = j + 2 if source[j] == "\\" else j + 1
                j = min(j + 1, n)
            out.append(source[i:j])
            i = j
        else:
            out.append(c)
            i += 1
    return "".join(out)


def normalize_body_text(body_source: str) -> str:
    """Comment-stripped, whitespace-collapsed body; the change-detection key."""
    return " ".join(strip_comments(body_source).split())


def _strip_generics(text: str) -> str:
    out, depth = [], 0
    for ch in text:
        if ch == "<":
            depth += 1
        elif ch == ">":
            depth = max(0, depth - 1)
        elif depth == 0:
            out.append(ch)
    return "".join(out)


def _split_top_level(text: str, sep: str = ",") -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "<([":
            depth += 1
        elif ch in ">)]":
            depth = max(0, depth - 1)
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _parse_params(raw: str) -> tuple[tuple[str, str], ...]:
    params = []
    for part in _split_top_level(raw):
        part = re.sub(r"@[\w$.]+(\s*\([^)]*\))?", " ", part)  # drop annotations
        part = re.sub(r"\bfinal\b", " ", part)
        part = part.replace("...", "[]")
        m = re.search(r"([A-Za-z_$][\w$]*)\s*((?:\[\s*\])*)\s*$", part)
        if not m:
            continue
        name = m.group(1)
        trailing_dims = re.sub(r"\s+", "", m.group(2) or "")
        type_text = re.sub(r"\s+", "", part[: m.start()]) + trailing_dims
        if not type_text:
            # single token: a bare type (e.g. abstract signature) — treat as type
            type_text, name = name, ""
        params.append((type_text, name))
    return tuple(params)


def _parse_supers(seg: str) -> tuple[str, ...]:
    """Declared supertypes from a type-declaration segment, extends first.

    Generics are stripped up front so type-parameter bounds (`<T extends X>`)
    cannot shadow the class-level extends clause.
    """
    seg = _strip_generics(seg)
    names: list[str] = []
    ext = re.search(r"\bextends\b(.*?)(?:\bimplements\b|\bpermits\b|$)", seg, re.DOTALL)
    imp = re.search(r"\bimplements\b(.*?)(?:\bpermits\b|$)", seg, re.DOTALL)
    for match in (ext, imp):
        if not match:
            continue
        for item in _split_top_level(match.group(1)):
            name = item.split(".")[-1].strip()
            if name and _IDENT_RE.fullmatch(name):
                names.append(name)
    # dedupe preserving order
    seen: set[str] = set()
    return tuple(n for n in names if not (n in seen or seen.add(n)))


def _is_test(file_path: str, type_name: str, name: str) -> bool:
    parts = file_path.replace("\\", "/").split("/")
    if "test" in parts:
        return True
    for ident in (type_name, name):
        if ident.startswith("test") or ident.startswith("Test"):
            return True
    return False


@dataclass
class _Scope:
    kind: str  # "type" | "anon" | "method" | "block"
    name: str | None = None
    supers: tuple[str, ...] = ()
    # method scopes carry the record-in-progress
    pending: dict | None = None


def parse_file(file_path: str, source: str) -> ParsedFile:
    """Parse one source file into method records and type declarations."""
    result = ParsedFile()
    try:
        _scan(file_path, source, result)
    except Exception:  # noqa: BLE001 — tolerant mining: never propagate
        logger.warning("parse failure in %s; skipping file", file_path)
        return ParsedFile()
    return result


def extract_methods(file_path: str, source: str) -> list[MethodRecord]:
    return parse_file(file_path, source).methods


def _scan(file_path: str, source: str, result: ParsedFile) -> None:
    masked = mask_comments_and_strings(source)
    pkg_match = _PACKAGE_RE.search(masked)
    package = pkg_match.group(1) if pkg_match else ""

    # line number lookup: count of newlines before an index, 1-based
    newline_at = [i for i, ch in enumerate(source) if ch == "\n"]

    def line_of(idx: int) -> int:
        return bisect.bisect_right(newline_at, idx - 1) + 1

    stack: list[_Scope] = []
    seg_start = 0
    i, n = 0, len(masked)
    while i < n:
        ch = masked[i]
        if ch in ";":
            seg_start = i + 1
        elif ch == "{":
            scope = _classify_open(masked, seg_start, i, stack, package)
            if scope.kind == "method":
                scope.pending["open"] = i
                scope.pending["seg_line"] = line_of(_first_nonspace(masked, seg_start, i))
            elif scope.kind == "type":
                if not any(t.name == scope.name and t.package == package for t in result.types):
                    result.types.append(TypeDecl(name=scope.name, package=package, supers=scope.supers))
            stack.append(scope)
            seg_start = i + 1
        elif ch == "}":
            if stack:
                scope = stack.pop()
                if scope.kind == "method" and scope.pending:
                    _finish_method(file_path, package, source, scope.pending, i, line_of, result)
            seg_start = i + 1
        i += 1


def _first_nonspace(text: str, start: int, end: int) -> int:
    for j in range(start, end):
        if not text[j].isspace():
            return j
    return start


def _nearest_named_type(stack: list[_Scope]) -> _Scope | None:
    for scope in reversed(stack):
        if scope.kind == "type":
            return scope
    return None


def _classify_open(masked: str, seg_start: int, brace_at: int, stack: list[_Scope], package: str) -> _Scope:
    seg = masked[seg_start:brace_at].strip()
    if not seg or seg.endswith("->") or seg.endswith("=") or seg.endswith("["):
        return _Scope("block")

    type_match = _TYPE_DECL_RE.search(seg)
    if type_match:
        name = type_match.group(2)
        supers = _parse_supers(seg[type_match.end():])
        return _Scope("type", name=name, supers=supers)

    close = seg.rfind(")")
    if close < 0 or not _THROWS_TAIL_RE.match(seg[close + 1 :]):
        return _Scope("block")
    open_paren = _matching_open(seg, close)
    if open_paren < 0:
        return _Scope("block")
    head = seg[:open_paren].rstrip()
    name_match = _NAME_BEFORE_PAREN_RE.search(head)
    if not name_match:
        return _Scope("block")
    name = name_match.group(1)
    before_name = head[: name_match.start(1)]
    if _NEW_TAIL_RE.search(before_name):
        return _Scope("anon")
    if name in CONTROL_NAMES or name in KEYWORDS:
        return _Scope("block")

    enclosing = _nearest_named_type(stack)
    in_type_body = bool(stack) and stack[-1].kind in ("type", "anon")
    if enclosing is None or not in_type_body:
        return _Scope("block")

    params = _parse_params(seg[open_paren + 1 : close])
    return _Scope(
        "method",
        pending={
            "name": name,
            "params": params,
            "type_name": enclosing.name,
            "supers": enclosing.supers,
        },
    )


def _matching_open(text: str, close_idx: int) -> int:
    depth = 0
    for j in range(close_idx, -1, -1):
        if text[j] == ")":
            depth += 1
        elif text[j] == "(":
            depth -= 1
            if depth == 0:
                return j
    return -1


def _finish_method(file_path, package, source, pending, close_idx, line_of, result: ParsedFile) -> None:
    body = source[pending["open"] : close_idx + 1]
    start_line = pending["seg_line"]
    end_line = line_of(close_idx)
    name = pending["name"]
    type_name = pending["type_name"]
    params = pending["params"]
    record = MethodRecord(
        method_id=method_id(file_path, type_name, name, [t for t, _ in params]),
        file_path=file_path,
        package=package,
        type_name=type_name,
        name=name,
        params=params,
        superclasses=pending["supers"],
        body_source=body,
        line_span=(start_line, end_line),
        is_test=_is_test(file_path, type_name, name),
    )
    result.methods.append(record)


def collect_types(parsed: list[ParsedFile]) -> dict[str, TypeDecl]:
    """Simple-name type table for hierarchy resolution (first declaration wins
    per sorted package for determinism)."""
    table: dict[str, TypeDecl] = {}
    decls = sorted(
        (t for p in parsed for t in p.types), key=lambda t: (t.name, t.package)
    )
    for decl in decls:
        table.setdefault(decl.name, decl)
    return table


def transitive_superclasses(direct: tuple[str, ...], table: dict[str, TypeDecl]) -> tuple[str, ...]:
    """Expand a declared supertype list to the transitive chain, nearest
    first, excluding the universal root."""
    chain: list[str] = []
    seen: set[str] = set()
    queue = list(direct)
    while queue:
        name = queue.pop(0)
        if name in seen or name in ("Object",):
            continue
        seen.add(name)
        chain.append(name)
        decl = table.get(name)
        if decl is not None:
            queue.extend(decl.supers)
    return tuple(chain)
