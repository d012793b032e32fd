"""Recursive-descent parser for the Solidity subset.

Intentionally narrow: the grammar covers the constructs the corpus
templates and pre-0.8 legacy contracts use. Anything else that is
brace-balanced is captured as an opaque expression statement (or an
unknown contract member) instead of being rejected.
"""

from __future__ import annotations

from typing import Optional

from .ast import (
    AssignStmt,
    CalleeKind,
    CallStmt,
    ContractDef,
    EmitStmt,
    EventDef,
    ExprStmt,
    ExternalCall,
    FunctionDef,
    IfStmt,
    LocalDecl,
    ModifierDef,
    Mutability,
    ParseError,
    RequireStmt,
    ReturnStmt,
    SourceUnit,
    StateVarDef,
    Statement,
    Visibility,
)
from .lexer import Token, TokenCursor, join_tokens, tokenize

ELEMENTARY_TYPES = {
    "uint", "uint8", "uint16", "uint32", "uint64", "uint128", "uint256",
    "int", "int8", "int256", "bool", "address", "bytes", "bytes4", "bytes32",
    "string",
}
VISIBILITY_KEYWORDS = {"public", "external", "internal", "private"}
MUTABILITY_KEYWORDS = {"payable", "view", "pure", "constant"}
# identifiers never counted as variable reads in conditions/expressions
BUILTIN_NAMES = {
    "msg", "block", "tx", "this", "now", "true", "false", "gasleft",
    "require", "assert", "revert", "keccak256", "payable", "address",
    "uint", "uint256", "int", "bool", "bytes", "bytes32", "string", "type",
    "abi", "super", "selfdestruct", "wei", "gwei", "ether",
}

ASSIGN_OPS = {"=", "+=", "-=", "*=", "/="}


def parse(source: str) -> SourceUnit:
    """Parse source text into a SourceUnit. Raises ParseError (with line
    and column) for unbalanced input, malformed pragma, or no contracts."""
    tokens = tokenize(source)
    _check_balanced(tokens)
    cur = TokenCursor(tokens)
    pragma_req = ""
    imports: list[str] = []
    contracts: list[ContractDef] = []
    while not cur.at_end():
        v = cur.peek_value()
        if v == "pragma":
            pragma_req = _parse_pragma(cur)
        elif v == "import":
            imports.append(_parse_import(cur))
        elif v in ("contract", "interface", "library", "abstract"):
            contracts.append(_parse_contract(cur))
        else:
            t = cur.peek()
            raise ParseError(f"unexpected top-level token {v!r}", t.line, t.column)
    if not contracts:
        raise ParseError("no contract definition found", 1, 1)
    return SourceUnit(
        pragma_req=pragma_req, imports=tuple(imports), contracts=tuple(contracts)
    )


def _check_balanced(tokens: list[Token]) -> None:
    stack: list[Token] = []
    pairs = {")": "(", "]": "[", "}": "{"}
    for t in tokens:
        if t.value in "([{":
            stack.append(t)
        elif t.value in pairs:
            if not stack or stack[-1].value != pairs[t.value]:
                raise ParseError(f"unbalanced {t.value!r}", t.line, t.column)
            stack.pop()
    if stack:
        t = stack[-1]
        raise ParseError(f"unclosed {t.value!r}", t.line, t.column)


def _parse_pragma(cur: TokenCursor) -> str:
    start = cur.expect("pragma")
    kind = cur.advance()
    if kind.value != "solidity":
        raise ParseError(f"unsupported pragma {kind.value!r}", kind.line, kind.column)
    body = cur.take_until(";")
    cur.expect(";")
    if not body:
        raise ParseError("malformed pragma: empty version constraint", start.line, start.column)
    return join_tokens([t.value for t in body])


def _parse_import(cur: TokenCursor) -> str:
    start = cur.expect("import")
    body = cur.take_until(";")
    cur.expect(";")
    if len(body) != 1 or not body[0].is_string:
        raise ParseError("unsupported import form", start.line, start.column)
    return body[0].value.strip("\"'")


def _parse_contract(cur: TokenCursor) -> ContractDef:
    if cur.peek_value() == "abstract":
        cur.advance()
    kw = cur.advance()  # contract / interface / library
    kind = "interface" if kw.value == "interface" else "contract"
    name = cur.advance().value
    bases: list[str] = []
    if cur.peek_value() == "is":
        cur.advance()
        while True:
            bases.append(cur.advance().value)
            if cur.peek_value() == ",":
                cur.advance()
            else:
                break
    cur.expect("{")
    state_vars: list[StateVarDef] = []
    functions: list[FunctionDef] = []
    modifiers: list[ModifierDef] = []
    events: list[EventDef] = []
    unknown: list[str] = []
    while cur.peek_value() != "}":
        if cur.at_end():
            raise ParseError(f"unclosed contract {name}", kw.line, kw.column)
        v = cur.peek_value()
        if v in ("function", "constructor", "receive", "fallback"):
            functions.append(_parse_function(cur, kind))
        elif v == "modifier":
            modifiers.append(_parse_modifier(cur))
        elif v == "event":
            events.append(_parse_event(cur))
        elif v == "using":
            unknown.append(_consume_simple_member(cur))
        elif v in ("struct", "enum"):
            unknown.append(_consume_block_member(cur))
        else:
            sv = _try_parse_state_var(cur)
            if sv is not None:
                state_vars.append(sv)
            else:
                unknown.append(_consume_simple_member(cur))
    cur.expect("}")
    return ContractDef(
        name=name,
        bases=tuple(bases),
        state_vars=tuple(state_vars),
        functions=tuple(functions),
        modifiers=tuple(modifiers),
        events=tuple(events),
        kind=kind,
        unknown_members=tuple(unknown),
    )


def _consume_simple_member(cur: TokenCursor) -> str:
    body = cur.take_until(";")
    cur.expect(";")
    return join_tokens([t.value for t in body]) + ";"


def _consume_block_member(cur: TokenCursor) -> str:
    head: list[Token] = []
    while cur.peek_value() != "{":
        head.append(cur.advance())
    inner = cur.take_group()
    text = join_tokens([t.value for t in head])
    return text + " { " + join_tokens([t.value for t in inner]) + " }"


def _parse_event(cur: TokenCursor) -> EventDef:
    cur.expect("event")
    name = cur.advance().value
    params = cur.take_group()
    cur.expect(";")
    return EventDef(name=name, params_text=join_tokens([t.value for t in params]))


def _parse_type(cur: TokenCursor) -> Optional[str]:
    """Consume a type at the cursor, or return None if it doesn't look
    like one. Covers elementary types, mapping(...), and contract names."""
    v = cur.peek_value()
    if v == "mapping":
        cur.advance()
        inner = cur.take_group()
        return "mapping(" + join_tokens([t.value for t in inner]) + ")"
    t = cur.peek()
    if t is None or not t.is_ident:
        return None
    if v in ELEMENTARY_TYPES or (v[0].isupper()):
        cur.advance()
        type_text = v
        if v == "address" and cur.peek_value() == "payable" and cur.peek(1) and cur.peek(1).is_ident:
            cur.advance()
            type_text = "address payable"
        while cur.peek_value() == "[":
            cur.advance()
            cur.expect("]")
            type_text += "[]"
        return type_text
    return None


def _try_parse_state_var(cur: TokenCursor) -> Optional[StateVarDef]:
    mark = cur.pos
    type_text = _parse_type(cur)
    if type_text is None:
        cur.pos = mark
        return None
    qualifiers: list[str] = []
    while cur.peek_value() in VISIBILITY_KEYWORDS | {"constant", "immutable"}:
        qualifiers.append(cur.advance().value)
    name_tok = cur.peek()
    if name_tok is None or not name_tok.is_ident:
        cur.pos = mark
        return None
    name = cur.advance().value
    initializer = None
    if cur.peek_value() == "=":
        cur.advance()
        init = cur.take_until(";")
        initializer = join_tokens([t.value for t in init])
    if cur.peek_value() != ";":
        cur.pos = mark
        return None
    cur.expect(";")
    visibility = ""
    for q in qualifiers:
        if q in VISIBILITY_KEYWORDS:
            visibility = q
    if "constant" in qualifiers:
        visibility = (visibility + " constant").strip()
    if "immutable" in qualifiers:
        visibility = (visibility + " immutable").strip()
    return StateVarDef(
        name=name, type_text=type_text, visibility=visibility, initializer=initializer
    )


def _parse_params(cur: TokenCursor) -> tuple[tuple[str, str], ...]:
    inner = cur.take_group()
    if not inner:
        return ()
    params: list[tuple[str, str]] = []
    group: list[str] = []
    depth = 0
    for t in inner:
        if t.value in "([{":
            depth += 1
        elif t.value in ")]}":
            depth -= 1
        if t.value == "," and depth == 0:
            params.append(_split_param(group))
            group = []
        else:
            group.append(t.value)
    if group:
        params.append(_split_param(group))
    return tuple(params)


def _split_param(values: list[str]) -> tuple[str, str]:
    if not values:
        return ("", "")
    if len(values) == 1:
        return (values[0], "")
    # drop data-location keywords from the middle
    last = values[-1]
    head = [v for v in values[:-1] if v not in ("memory", "calldata", "storage")]
    return (join_tokens(head), last)


def _parse_function(cur: TokenCursor, contract_kind: str) -> FunctionDef:
    kw = cur.advance()  # function / constructor / receive / fallback
    if kw.value == "function":
        name = cur.advance().value
    else:
        name = kw.value
    params = _parse_params(cur) if cur.peek_value() == "(" else ()
    visibility = Visibility.UNSPECIFIED
    mutability = Mutability.NONPAYABLE
    modifiers: list[str] = []
    returns_text: Optional[str] = None
    while cur.peek_value() not in ("{", ";"):
        t = cur.advance()
        v = t.value
        if v in VISIBILITY_KEYWORDS:
            visibility = Visibility(v)
        elif v in ("payable", "view", "pure"):
            mutability = Mutability(v)
        elif v == "constant":
            mutability = Mutability.VIEW
        elif v == "returns":
            inner = cur.take_group()
            returns_text = join_tokens([x.value for x in inner])
        elif v in ("virtual", "override"):
            continue
        elif t.is_ident:
            mod = v
            if cur.peek_value() == "(":
                inner = cur.take_group()
                mod += "(" + join_tokens([x.value for x in inner]) + ")"
            modifiers.append(mod)
        else:
            raise ParseError(f"unexpected token {v!r} in function header", t.line, t.column)
    if cur.peek_value() == ";":
        cur.advance()
        body: tuple[Statement, ...] = ()
        has_body = False
    else:
        body = _parse_block(cur)
        has_body = True
    return FunctionDef(
        name=name,
        visibility=visibility,
        mutability=mutability,
        modifiers=tuple(modifiers),
        params=params,
        returns_text=returns_text,
        body=body,
        has_body=has_body,
    )


def _parse_modifier(cur: TokenCursor) -> ModifierDef:
    cur.expect("modifier")
    name = cur.advance().value
    params_text = ""
    if cur.peek_value() == "(":
        inner = cur.take_group()
        params_text = join_tokens([t.value for t in inner])
    body = _parse_block(cur)
    return ModifierDef(name=name, params_text=params_text, body=body)


def _parse_block(cur: TokenCursor) -> tuple[Statement, ...]:
    cur.expect("{")
    stmts: list[Statement] = []
    while cur.peek_value() != "}":
        if cur.at_end():
            raise ParseError("unclosed block", 0, 0)
        stmts.append(_parse_statement(cur))
    cur.expect("}")
    return tuple(stmts)


def _parse_statement(cur: TokenCursor) -> Statement:
    v = cur.peek_value()
    if v == "if":
        return _parse_if(cur)
    if v == "require":
        return _parse_require(cur)
    if v == "emit":
        start = cur.advance()
        rest = cur.take_until(";")
        cur.expect(";")
        return EmitStmt(text="emit " + join_tokens([t.value for t in rest]))
    if v == "return":
        cur.advance()
        rest = cur.take_until(";")
        cur.expect(";")
        text = "return" if not rest else "return " + join_tokens([t.value for t in rest])
        return ReturnStmt(text=text)
    if v == "_" and cur.peek_value(1) == ";":
        cur.advance()
        cur.expect(";")
        return ExprStmt(text="_")
    # generic statement: consume to ';' then classify
    body = cur.take_until(";")
    cur.expect(";")
    return _classify_simple(body)


def _parse_if(cur: TokenCursor) -> IfStmt:
    cur.expect("if")
    cond = cur.take_group()
    if cur.peek_value() == "{":
        body = _parse_block(cur)
    else:
        body = (_parse_statement(cur),)
    else_body: tuple[Statement, ...] = ()
    if cur.peek_value() == "else":
        cur.advance()
        if cur.peek_value() == "{":
            else_body = _parse_block(cur)
        else:
            else_body = (_parse_statement(cur),)
    cond_values = [t.value for t in cond]
    return IfStmt(
        condition=join_tokens(cond_values),
        reads=_collect_reads(cond_values),
        body=body,
        else_body=else_body,
        call=_find_external_call(cond_values),
    )


def _parse_require(cur: TokenCursor) -> RequireStmt:
    cur.expect("require")
    inner = cur.take_group()
    cur.expect(";")
    values = [t.value for t in inner]
    # condition = tokens before the top-level comma (message excluded)
    depth = 0
    cond_values = values
    for i, x in enumerate(values):
        if x in "([{":
            depth += 1
        elif x in ")]}":
            depth -= 1
        elif x == "," and depth == 0:
            cond_values = values[:i]
            break
    call = _find_external_call(cond_values)
    return RequireStmt(
        text="require(" + join_tokens(values) + ")",
        condition=join_tokens(cond_values),
        reads=_collect_reads(cond_values),
        call=call,
    )


def _classify_simple(tokens: list[Token]) -> Statement:
    values = [t.value for t in tokens]
    text = join_tokens(values)
    if not values:
        return ExprStmt(text="")

    # tuple declaration: (bool ok,) = rhs
    if values[0] == "(":
        depth = 0
        close = -1
        for i, x in enumerate(values):
            if x in "([{":
                depth += 1
            elif x in ")]}":
                depth -= 1
                if depth == 0:
                    close = i
                    break
        if close > 0 and close + 1 < len(values) and values[close + 1] == "=":
            names = _tuple_decl_names(values[1:close])
            rhs = values[close + 2 :]
            call = _find_external_call(rhs)
            if call is not None:
                return CallStmt(text=text, call=call, declared_locals=names)
            return LocalDecl(
                text=text, names=names, init=join_tokens(rhs), init_reads=_collect_reads(rhs)
            )

    # local declaration: <type> name [= init]
    decl = _match_local_decl(values)
    if decl is not None:
        names, init_values = decl
        call = _find_external_call(init_values) if init_values else None
        if call is not None:
            return CallStmt(text=text, call=call, declared_locals=names)
        return LocalDecl(
            text=text,
            names=names,
            init=join_tokens(init_values) if init_values else None,
            init_reads=_collect_reads(init_values) if init_values else (),
        )

    # assignment at depth 0
    split = _find_assign(values)
    if split is not None:
        i, op = split
        lhs, rhs = values[:i], values[i + 1 :]
        path = join_tokens(lhs)
        base = _path_base(lhs)
        call = _find_external_call(rhs)
        if call is not None:
            return CallStmt(text=text, call=call, assign_path=path, assign_base=base)
        if base is not None:
            return AssignStmt(
                text=text,
                target_path=path,
                target_base=base,
                op=op,
                rhs=join_tokens(rhs),
                rhs_reads=_collect_reads(rhs),
            )
        return ExprStmt(text=text)

    call = _find_external_call(values)
    if call is not None:
        return CallStmt(text=text, call=call)
    return ExprStmt(text=text)


def _tuple_decl_names(values: list[str]) -> tuple[str, ...]:
    names: list[str] = []
    group: list[str] = []
    for x in values + [","]:
        if x == ",":
            if group:
                names.append(group[-1])
            group = []
        else:
            group.append(x)
    return tuple(n for n in names if n not in ELEMENTARY_TYPES)


def _match_local_decl(values: list[str]) -> Optional[tuple[tuple[str, ...], list[str]]]:
    if not values:
        return None
    first = values[0]
    idx = 1
    if first in ELEMENTARY_TYPES or (first[0].isupper() and first not in BUILTIN_NAMES):
        if first == "address" and idx < len(values) and values[idx] == "payable":
            idx += 1
        if idx < len(values) and values[idx] in ("memory", "calldata", "storage"):
            idx += 1
        if idx < len(values) and (values[idx][0].isalpha() or values[idx][0] == "_"):
            name = values[idx]
            if idx + 1 == len(values):
                return ((name,), [])
            if values[idx + 1] == "=":
                return ((name,), values[idx + 2 :])
    return None


def _find_assign(values: list[str]) -> Optional[tuple[int, str]]:
    depth = 0
    for i, x in enumerate(values):
        if x in "([{":
            depth += 1
        elif x in ")]}":
            depth -= 1
        elif depth == 0 and x in ASSIGN_OPS:
            return (i, x)
    return None


def _path_base(values: list[str]) -> Optional[str]:
    if values and (values[0][0].isalpha() or values[0][0] == "_"):
        return values[0]
    return None


def _find_external_call(values: list[str]) -> Optional[ExternalCall]:
    """Scan an expression token sequence for the first external call."""
    n = len(values)
    for i, x in enumerate(values):
        if x != ".":
            continue
        if i + 1 >= n:
            continue
        member = values[i + 1]
        target = _receiver_text(values, i)
        if member == "call" or member == "delegatecall" or member == "staticcall":
            kind = (
                CalleeKind.DELEGATECALL
                if member == "delegatecall"
                else CalleeKind.LOW_LEVEL_CALL
            )
            j = i + 2
            value_arg = None
            if j < n and values[j] == "{":
                opts, j = _balanced_span(values, j)
                value_arg = _call_option(opts, "value")
            elif j + 1 < n and values[j] == "." and values[j + 1] == "value":
                # legacy obj.call.value(x)(...) form
                args, k = _balanced_span(values, j + 2)
                value_arg = join_tokens(args)
                j = k
            if j < n and values[j] == "(":
                return ExternalCall(callee_kind=kind, target=target, value_arg=value_arg)
            continue
        if member in ("transfer", "send"):
            if i + 2 < n and values[i + 2] == "(":
                args, _ = _balanced_span(values, i + 2)
                # two-argument transfer is a token-style interface call
                if member == "transfer" and _top_level_comma(args):
                    return ExternalCall(
                        callee_kind=CalleeKind.INTERFACE_CALL, target=target, method=member
                    )
                kind = CalleeKind.TRANSFER if member == "transfer" else CalleeKind.SEND
                return ExternalCall(
                    callee_kind=kind, target=target, value_arg=join_tokens(args)
                )
            continue
        # member call on a cast/contract expression: Foo(x).bar(...),
        # or on a non-builtin identifier: vault.sync(...)
        if i + 2 < n and values[i + 2] in ("(", "{"):
            base_is_cast = target.endswith(")") and target[0].isupper()
            base_ident = target.split(".")[0].split("(")[0].split("[")[0]
            if base_is_cast or (
                base_ident not in BUILTIN_NAMES
                and base_ident == target  # plain identifier receiver
                and member not in ("push", "pop", "add", "sub", "mul", "div", "mod")
            ):
                j = i + 2
                value_arg = None
                if values[j] == "{":
                    opts, j = _balanced_span(values, j)
                    value_arg = _call_option(opts, "value")
                if j < n and values[j] == "(":
                    return ExternalCall(
                        callee_kind=CalleeKind.INTERFACE_CALL,
                        target=target,
                        value_arg=value_arg,
                        method=member,
                    )
    return None


def _balanced_span(values: list[str], start: int) -> tuple[list[str], int]:
    """Inner tokens of the group opening at `start`; returns (inner, index
    just past the closing delimiter)."""
    pairs = {"(": ")", "[": "]", "{": "}"}
    close = pairs[values[start]]
    depth = 0
    for j in range(start, len(values)):
        if values[j] in pairs:
            depth += 1
        elif values[j] in pairs.values():
            depth -= 1
            if depth == 0 and values[j] == close:
                return values[start + 1 : j], j + 1
    return values[start + 1 :], len(values)


def _top_level_comma(values: list[str]) -> bool:
    depth = 0
    for x in values:
        if x in "([{":
            depth += 1
        elif x in ")]}":
            depth -= 1
        elif x == "," and depth == 0:
            return True
    return False


def _call_option(values: list[str], option: str) -> Optional[str]:
    """Extract `option: expr` from call-option tokens like value: x."""
    depth = 0
    for i, x in enumerate(values):
        if x in "([{":
            depth += 1
        elif x in ")]}":
            depth -= 1
        elif depth == 0 and x == option and i + 1 < len(values) and values[i + 1] == ":":
            rest = values[i + 2 :]
            out: list[str] = []
            d = 0
            for y in rest:
                if y in "([{":
                    d += 1
                elif y in ")]}":
                    d -= 1
                elif y == "," and d == 0:
                    break
                out.append(y)
            return join_tokens(out)
    return None


def _receiver_text(values: list[str], dot_index: int) -> str:
    """Longest postfix chain ending just before the `.` at dot_index:
    identifiers with member/index/call suffixes, e.g. payable(msg.sender)."""
    j = dot_index - 1
    start = dot_index
    while j >= 0:
        x = values[j]
        if x in (")", "]"):
            depth = 0
            while j >= 0:
                if values[j] in (")", "]"):
                    depth += 1
                elif values[j] in ("(", "["):
                    depth -= 1
                    if depth == 0:
                        break
                j -= 1
            start = j
            j -= 1
            continue
        if x[0].isalnum() or x[0] == "_":
            start = j
            j -= 1
            if j >= 0 and values[j] == ".":
                j -= 1
                continue
            break
        break
    return join_tokens(values[start:dot_index])


def _collect_reads(values: list[str]) -> tuple[str, ...]:
    """Base identifiers read by an expression, excluding builtins, member
    names after '.', and call-options. Order of first appearance."""
    reads: list[str] = []
    for i, x in enumerate(values):
        if not x or not (x[0].isalpha() or x[0] == "_"):
            continue
        if x in BUILTIN_NAMES:
            continue
        if i > 0 and values[i - 1] == ".":
            continue
        if i + 1 < len(values) and values[i + 1] == ":":
            continue
        if i + 1 < len(values) and values[i + 1] == "(":
            # function-style use: cast or call name
            continue
        if x not in reads:
            reads.append(x)
    return tuple(reads)
