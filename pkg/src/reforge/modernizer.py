"""Source-to-source modernization of legacy (pre-0.8) contracts.

Transforms are targeted text splices driven by the token stream, so
untouched code keeps its exact bytes. Inputs that already carry a >=0.8
pragma are returned unchanged (byte-for-byte fixpoint). Each transform
preserves the reentrancy label; the detector verdict is computed before
and after as a check.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .detector import analyze
from .sol import ParseError, parse
from .sol.lexer import Token, tokenize

TARGET_PRAGMA = "^0.8.19"
SUCCESS_REQUIRE_MESSAGE = "Transfer failed"

# canonical order for the transforms_applied list
TRANSFORM_ORDER = [
    "pragma_rewrite",
    "constructor_keyword",
    "call_value_braces",
    "transfer_to_call",
    "send_to_call",
    "visibility_added",
    "safemath_stripped",
]

SAFEMATH_OPS = {"add": "+", "sub": "-", "mul": "*", "div": "/", "mod": "%"}
VISIBILITY = {"public", "external", "internal", "private"}


class UnsupportedConstruct(ValueError):
    """A rewrite would be needed inside a construct the modernizer does
    not model; the contract is flagged instead of silently altered."""


@dataclass
class ModernizationResult:
    source: str
    transforms_applied: list[str] = field(default_factory=list)
    label_preserved: bool = True


def _pragma_is_modern(pragma_req: str) -> bool:
    m = re.search(r"(\d+)\.(\d+)", pragma_req)
    if not m:
        return False
    major, minor = int(m.group(1)), int(m.group(2))
    return (major, minor) >= (0, 8)


def modernize(source: str) -> ModernizationResult:
    """Rewrite a legacy contract to 0.8.x conventions, preserving its
    reentrancy label. Raises ParseError on unparseable input and
    UnsupportedConstruct when a needed rewrite is out of model."""
    unit = parse(source)
    if _pragma_is_modern(unit.pragma_req):
        return ModernizationResult(source=source, transforms_applied=[])

    verdict_before = analyze(unit)
    applied: set[str] = set()
    text = source

    text, did = _rewrite_pragma(text)
    if did:
        applied.add("pragma_rewrite")
    text, did = _rewrite_constructors(text)
    if did:
        applied.add("constructor_keyword")
    text, did = _rewrite_call_value(text)
    if did:
        applied.add("call_value_braces")
    text, transfer_done, send_done = _rewrite_value_transfers(text)
    if transfer_done:
        applied.add("transfer_to_call")
    if send_done:
        applied.add("send_to_call")
    text, did = _strip_safemath(text)
    if did:
        applied.add("safemath_stripped")
    text, did = _add_visibility(text)
    if did:
        applied.add("visibility_added")

    _check_no_deprecated_transfers(text)

    new_unit = parse(text)  # output must stay parseable
    verdict_after = analyze(new_unit)
    return ModernizationResult(
        source=text,
        transforms_applied=[t for t in TRANSFORM_ORDER if t in applied],
        label_preserved=verdict_before.classification == verdict_after.classification,
    )


# ---------------------------------------------------------------------------
# individual transforms


def _apply_edits(text: str, edits: list[tuple[int, int, str]]) -> str:
    for start, end, replacement in sorted(edits, reverse=True):
        text = text[:start] + replacement + text[end:]
    return text


def _rewrite_pragma(text: str) -> tuple[str, bool]:
    tokens = tokenize(text)
    for i, t in enumerate(tokens):
        if t.value == "pragma":
            j = i
            while j < len(tokens) and tokens[j].value != ";":
                j += 1
            end = tokens[j].end if j < len(tokens) else len(text)
            return (
                _apply_edits(text, [(t.offset, end, f"pragma solidity {TARGET_PRAGMA};")]),
                True,
            )
    return f"pragma solidity {TARGET_PRAGMA};\n\n" + text, True


def _contract_names(tokens: list[Token]) -> list[str]:
    names = []
    for i, t in enumerate(tokens):
        if t.value in ("contract", "library", "interface") and i + 1 < len(tokens):
            names.append(tokens[i + 1].value)
    return names


def _rewrite_constructors(text: str) -> tuple[str, bool]:
    """`function <ContractName>(...)` becomes `constructor(...)`, with any
    visibility keyword dropped (obsolete for constructors)."""
    tokens = tokenize(text)
    names = set(_contract_names(tokens))
    edits: list[tuple[int, int, str]] = []
    for i, t in enumerate(tokens):
        if (
            t.value == "function"
            and i + 2 < len(tokens)
            and tokens[i + 1].value in names
            and tokens[i + 2].value == "("
        ):
            edits.append((t.offset, tokens[i + 1].end, "constructor"))
            j = _skip_group(tokens, i + 2)
            if j < len(tokens) and tokens[j].value in VISIBILITY:
                edits.append((tokens[j - 1].end, tokens[j].end, ""))
        elif t.value == "constructor" and i + 1 < len(tokens) and tokens[i + 1].value == "(":
            # visibility on constructors is obsolete since 0.7
            j = _skip_group(tokens, i + 1)
            if j < len(tokens) and tokens[j].value in ("public", "internal"):
                edits.append((tokens[j - 1].end, tokens[j].end, ""))
    return _apply_edits(text, edits), bool(edits)


def _skip_group(tokens: list[Token], start: int) -> int:
    """Index just past the balanced group opening at tokens[start]."""
    depth = 0
    for j in range(start, len(tokens)):
        if tokens[j].value in "([{":
            depth += 1
        elif tokens[j].value in ")]}":
            depth -= 1
            if depth == 0:
                return j + 1
    return len(tokens)


def _rewrite_call_value(text: str) -> tuple[str, bool]:
    """Legacy `x.call.value(a)(b)` becomes `x.call{value: a}(b)`."""
    tokens = tokenize(text)
    edits: list[tuple[int, int, str]] = []
    i = 0
    while i + 4 < len(tokens):
        if (
            tokens[i].value == "."
            and tokens[i + 1].value == "call"
            and tokens[i + 2].value == "."
            and tokens[i + 3].value == "value"
            and tokens[i + 4].value == "("
        ):
            close = _skip_group(tokens, i + 4)
            inner = text[tokens[i + 4].end : tokens[close - 1].offset]
            edits.append(
                (tokens[i + 2].offset, tokens[close - 1].end, "{value: " + inner.strip() + "}")
            )
            i = close
        else:
            i += 1
    return _apply_edits(text, edits), bool(edits)


def _enclosing_function_span(tokens: list[Token], index: int) -> tuple[int, int]:
    """Token range of the function body containing tokens[index]."""
    depth = 0
    start = 0
    for j in range(index, -1, -1):
        v = tokens[j].value
        if v == "}":
            depth += 1
        elif v == "{":
            if depth == 0:
                start = j
                break
            depth -= 1
    depth = 0
    end = len(tokens)
    for j in range(start, len(tokens)):
        v = tokens[j].value
        if v == "{":
            depth += 1
        elif v == "}":
            depth -= 1
            if depth == 0:
                end = j
                break
    return start, end


def _fresh_success_name(tokens: list[Token], index: int, used: set[str]) -> str:
    start, end = _enclosing_function_span(tokens, index)
    existing = {t.value for t in tokens[start:end]} | used
    if "success" not in existing:
        return "success"
    n = 2
    while f"success{n}" in existing:
        n += 1
    return f"success{n}"


def _line_indent(text: str, offset: int) -> str:
    bol = text.rfind("\n", 0, offset) + 1
    indent = ""
    for ch in text[bol:offset]:
        if ch in " \t":
            indent += ch
        else:
            break
    return indent


def _rewrite_value_transfers(text: str) -> tuple[str, bool, bool]:
    """Replace one-argument `.transfer(a)` / `.send(a)` value transfers
    with a low-level call plus success require. Supported contexts:
    bare statement, and `require(x.send(a)[, msg])`. Anything else raises
    UnsupportedConstruct."""
    transfer_done = send_done = False
    used_names: set[str] = set()
    while True:
        tokens = tokenize(text)
        match = _find_value_transfer(tokens)
        if match is None:
            return text, transfer_done, send_done
        i, member = match  # index of the '.' token
        recv_start = _receiver_start(tokens, i)
        args_open = i + 2
        args_close = _skip_group(tokens, args_open) - 1
        arg_text = text[tokens[args_open].end : tokens[args_close].offset].strip()
        receiver = text[tokens[recv_start].offset : tokens[i].offset].strip()

        prev = tokens[recv_start - 1].value if recv_start > 0 else "{"
        next_after = tokens[args_close + 1].value if args_close + 1 < len(tokens) else ""

        name = _fresh_success_name(tokens, i, used_names)
        indent = _line_indent(text, tokens[recv_start].offset)
        if prev in ("{", "}", ";") and next_after == ";":
            # bare statement
            replacement = (
                f'(bool {name},) = {receiver}.call{{value: {arg_text}}}("");\n'
                f'{indent}require({name}, "{SUCCESS_REQUIRE_MESSAGE}");'
            )
            start = tokens[recv_start].offset
            end = tokens[args_close + 1].end
        elif (
            member == "send"
            and recv_start >= 2
            and tokens[recv_start - 2].value == "require"
            and tokens[recv_start - 1].value == "("
        ):
            # require(x.send(a)[, msg]);
            req_close = _skip_group(tokens, recv_start - 1) - 1
            stmt_end = req_close + 1
            if stmt_end >= len(tokens) or tokens[stmt_end].value != ";":
                raise UnsupportedConstruct(
                    f"unsupported send context at line {tokens[i].line}"
                )
            msg_tokens = tokens[args_close + 1 : req_close]
            message = f'"{SUCCESS_REQUIRE_MESSAGE}"'
            if msg_tokens and msg_tokens[0].value == ",":
                message = text[msg_tokens[1].offset : tokens[req_close].offset].strip()
            replacement = (
                f'(bool {name},) = {receiver}.call{{value: {arg_text}}}("");\n'
                f"{indent}require({name}, {message});"
            )
            start = tokens[recv_start - 2].offset
            end = tokens[stmt_end].end
        else:
            raise UnsupportedConstruct(
                f".{member}() in unsupported context at line {tokens[i].line}"
            )
        used_names.add(name)
        if member == "transfer":
            transfer_done = True
        else:
            send_done = True
        text = _apply_edits(text, [(start, end, replacement)])


def _find_value_transfer(tokens: list[Token]):
    for i, t in enumerate(tokens):
        if t.value != "." or i + 2 >= len(tokens):
            continue
        member = tokens[i + 1].value
        if member not in ("transfer", "send") or tokens[i + 2].value != "(":
            continue
        close = _skip_group(tokens, i + 2)
        inner = tokens[i + 3 : close - 1]
        depth = 0
        has_comma = False
        for x in inner:
            if x.value in "([{":
                depth += 1
            elif x.value in ")]}":
                depth -= 1
            elif x.value == "," and depth == 0:
                has_comma = True
        if has_comma:  # two-argument transfer: token-style interface call
            continue
        if not inner:
            continue
        return i, member
    return None


def _receiver_start(tokens: list[Token], dot_index: int) -> int:
    j = dot_index - 1
    start = dot_index
    while j >= 0:
        v = tokens[j].value
        if v in (")", "]"):
            depth = 0
            while j >= 0:
                if tokens[j].value in (")", "]"):
                    depth += 1
                elif tokens[j].value in ("(", "["):
                    depth -= 1
                    if depth == 0:
                        break
                j -= 1
            start = j
            j -= 1
            continue
        if v and (v[0].isalnum() or v[0] == "_"):
            start = j
            j -= 1
            if j >= 0 and tokens[j].value == ".":
                j -= 1
                continue
            break
        break
    return start


def _add_visibility(text: str) -> tuple[str, bool]:
    """Explicit `public` on functions and `internal` on state variables
    that lack a visibility keyword."""
    tokens = tokenize(text)
    edits: list[tuple[int, int, str]] = []
    depth = 0
    in_interface = False
    contract_depth = -1
    i = 0
    names = set(_contract_names(tokens))
    while i < len(tokens):
        t = tokens[i]
        v = t.value
        if v in ("contract", "library", "interface"):
            in_interface = v == "interface"
            contract_depth = depth
        elif v == "{":
            depth += 1
        elif v == "}":
            depth -= 1
        elif v == "function" and not in_interface:
            name = tokens[i + 1].value if i + 1 < len(tokens) else ""
            if name in names or tokens[i + 1].value == "(":
                i += 1
                continue
            j = _skip_group(tokens, i + 2) if i + 2 < len(tokens) else i + 2
            header_end = j
            seen_visibility = False
            while header_end < len(tokens) and tokens[header_end].value not in ("{", ";"):
                if tokens[header_end].value in VISIBILITY:
                    seen_visibility = True
                header_end += 1
            if not seen_visibility and j - 1 < len(tokens):
                edits.append((tokens[j - 1].end, tokens[j - 1].end, " public"))
            i = header_end
            continue
        elif (
            depth == contract_depth + 1
            and not in_interface
            and v in ("mapping",)
        ):
            j = _skip_group(tokens, i + 1)
            if j < len(tokens) and tokens[j].value not in VISIBILITY | {"constant"}:
                if tokens[j].is_ident and j + 1 < len(tokens) and tokens[j + 1].value in (";", "="):
                    edits.append((tokens[j - 1].end, tokens[j - 1].end, " internal"))
            i = j
            continue
        elif (
            depth == contract_depth + 1
            and not in_interface
            and t.is_ident
            and _looks_like_type(v)
            and i + 1 < len(tokens)
            and tokens[i + 1].is_ident
            and tokens[i + 1].value not in VISIBILITY | {"constant", "immutable", "is"}
            and i + 2 < len(tokens)
            and tokens[i + 2].value in (";", "=")
            and (i == 0 or tokens[i - 1].value in ("{", "}", ";"))
        ):
            edits.append((t.end, t.end, " internal"))
            i += 2
            continue
        i += 1
    return _apply_edits(text, edits), bool(edits)


_TYPE_RE = re.compile(r"^(uint\d*|int\d*|bool|address|bytes\d*|string)$")


def _looks_like_type(value: str) -> bool:
    return bool(_TYPE_RE.match(value)) or (value[0].isupper() and value not in ("SafeMath",))


def _strip_safemath(text: str) -> tuple[str, bool]:
    """Drop SafeMath imports and using-directives; rewrite method-call
    arithmetic to native checked operators."""
    if "SafeMath" not in text:
        return text, False
    changed = False
    lines = text.split("\n")
    kept: list[str] = []
    for line in lines:
        stripped = line.strip()
        if stripped.startswith("import") and "SafeMath" in stripped:
            changed = True
            continue
        if stripped.startswith("using") and "SafeMath" in stripped:
            changed = True
            continue
        kept.append(line)
    text = "\n".join(kept)

    for _ in range(200):
        tokens = tokenize(text)
        match = None
        for i, t in enumerate(tokens):
            if (
                t.value == "."
                and i + 2 < len(tokens)
                and tokens[i + 1].value in SAFEMATH_OPS
                and tokens[i + 2].value == "("
            ):
                match = i
                break
        if match is None:
            break
        i = match
        op = SAFEMATH_OPS[tokens[i + 1].value]
        recv_start = _receiver_start(tokens, i)
        close = _skip_group(tokens, i + 2) - 1
        inner = tokens[i + 3 : close]
        depth = 0
        for x in inner:
            if x.value in "([{":
                depth += 1
            elif x.value in ")]}":
                depth -= 1
            elif x.value == "," and depth == 0:
                raise UnsupportedConstruct(
                    f"multi-argument SafeMath call at line {tokens[i].line}"
                )
        receiver = text[tokens[recv_start].offset : tokens[i].offset].strip()
        arg = text[tokens[i + 2].end : tokens[close].offset].strip()
        text = _apply_edits(
            text,
            [(tokens[recv_start].offset, tokens[close].end, f"({receiver} {op} {arg})")],
        )
        changed = True
    else:
        raise UnsupportedConstruct("SafeMath rewrite did not converge")
    if "SafeMath" in text:
        raise UnsupportedConstruct("unrecognized SafeMath usage remains")
    return text, changed


def _check_no_deprecated_transfers(text: str) -> None:
    tokens = tokenize(text)
    if _find_value_transfer(tokens) is not None:
        raise UnsupportedConstruct("value transfer via transfer()/send() remains")


# ---------------------------------------------------------------------------
# batch driver


def modernize_batch(dir_in, dir_out, log_path=None) -> dict[str, int]:
    """Modernize every .sol file in dir_in into dir_out. Per-file failures
    are collected; the batch continues. Returns {"ok": n, "failed": m}."""
    dir_in = Path(dir_in)
    dir_out = Path(dir_out)
    dir_out.mkdir(parents=True, exist_ok=True)
    log_lines: list[dict] = []
    ok = failed = 0
    for path in sorted(dir_in.glob("*.sol")):
        entry: dict = {"file": path.name}
        try:
            result = modernize(path.read_text(encoding="utf-8"))
        except (ParseError, UnsupportedConstruct) as exc:
            failed += 1
            entry.update(status="failed", error=str(exc))
        else:
            ok += 1
            (dir_out / path.name).write_text(result.source, encoding="utf-8")
            entry.update(
                status="ok",
                transforms=result.transforms_applied,
                label_preserved=result.label_preserved,
            )
        log_lines.append(entry)
    if log_path is not None:
        with open(log_path, "w", encoding="utf-8") as fh:
            for entry in log_lines:
                fh.write(json.dumps(entry) + "\n")
    return {"ok": ok, "failed": failed}
