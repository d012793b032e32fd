"""Render an AST back to source text.

Output is canonical (4-space indent, one blank line between members), so
parse(render(u)) is structurally equal to u for any parser-produced unit.
"""

from __future__ import annotations

from .ast import (
    ContractDef,
    FunctionDef,
    IfStmt,
    ModifierDef,
    Mutability,
    SourceUnit,
    Statement,
    StatementKind,
    Visibility,
)

INDENT = "    "


def render(unit: SourceUnit) -> str:
    lines: list[str] = []
    if unit.pragma_req:
        lines.append(f"pragma solidity {unit.pragma_req};")
        lines.append("")
    for imp in unit.imports:
        lines.append(f'import "{imp}";')
    if unit.imports:
        lines.append("")
    for idx, contract in enumerate(unit.contracts):
        if idx:
            lines.append("")
        lines.extend(_render_contract(contract))
    return "\n".join(lines) + "\n"


def _render_contract(c: ContractDef) -> list[str]:
    header = f"{c.kind} {c.name}"
    if c.bases:
        header += " is " + ", ".join(c.bases)
    lines = [header + " {"]
    members: list[list[str]] = []
    for sv in c.state_vars:
        decl = sv.type_text
        if sv.visibility:
            decl += f" {sv.visibility}"
        decl += f" {sv.name}"
        if sv.initializer is not None:
            decl += f" = {sv.initializer}"
        members.append([INDENT + decl + ";"])
    for ev in c.events:
        members.append([INDENT + f"event {ev.name}({ev.params_text});"])
    for um in c.unknown_members:
        members.append([INDENT + um])
    for m in c.modifiers:
        members.append(_render_modifier(m))
    for fn in c.functions:
        members.append(_render_function(fn))
    for i, member in enumerate(members):
        if i and (len(member) > 1 or len(members[i - 1]) > 1):
            lines.append("")
        lines.extend(member)
    lines.append("}")
    return lines


def _render_modifier(m: ModifierDef) -> list[str]:
    head = f"{INDENT}modifier {m.name}({m.params_text}) {{"
    lines = [head]
    for stmt in m.body:
        lines.extend(_render_statement(stmt, 2))
    lines.append(INDENT + "}")
    return lines


def _render_function(fn: FunctionDef) -> list[str]:
    params = ", ".join(f"{t} {n}".strip() for t, n in fn.params)
    if fn.name in ("constructor", "receive", "fallback"):
        head = f"{fn.name}({params})"
    else:
        head = f"function {fn.name}({params})"
    if fn.visibility is not Visibility.UNSPECIFIED:
        head += f" {fn.visibility.value}"
    if fn.mutability is not Mutability.NONPAYABLE:
        head += f" {fn.mutability.value}"
    for mod in fn.modifiers:
        head += f" {mod}"
    if fn.returns_text:
        head += f" returns ({fn.returns_text})"
    if not fn.has_body:
        return [INDENT + head + ";"]
    lines = [INDENT + head + " {"]
    for stmt in fn.body:
        lines.extend(_render_statement(stmt, 2))
    lines.append(INDENT + "}")
    return lines


def _render_statement(stmt: Statement, depth: int) -> list[str]:
    pad = INDENT * depth
    if stmt.kind is StatementKind.IF_BLOCK:
        assert isinstance(stmt, IfStmt)
        lines = [f"{pad}if ({stmt.condition}) {{"]
        for inner in stmt.body:
            lines.extend(_render_statement(inner, depth + 1))
        if stmt.else_body:
            lines.append(pad + "} else {")
            for inner in stmt.else_body:
                lines.extend(_render_statement(inner, depth + 1))
        lines.append(pad + "}")
        return lines
    return [pad + stmt.text + ";"]
