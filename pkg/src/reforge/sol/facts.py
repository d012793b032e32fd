"""Ordered external-call and state-write facts per function.

Statement indices come from a pre-order walk of the body in source order;
statements nested in if-blocks get their own indices right after their
enclosing if header, so indices are strictly increasing and consistent
with source line order.
"""

from __future__ import annotations

from typing import Iterator

from .ast import (
    AssignStmt,
    CallStmt,
    ContractDef,
    ExternalCall,
    FunctionDef,
    IfStmt,
    LocalDecl,
    RequireStmt,
    Statement,
    StatementKind,
)


def iter_statements(fn: FunctionDef) -> Iterator[tuple[int, Statement]]:
    """Yield (index, statement) in pre-order source order, descending into
    if-block bodies."""
    counter = 0

    def walk(stmts: tuple[Statement, ...]) -> Iterator[tuple[int, Statement]]:
        nonlocal counter
        for stmt in stmts:
            idx = counter
            counter += 1
            yield idx, stmt
            if isinstance(stmt, IfStmt):
                yield from walk(stmt.body)
                yield from walk(stmt.else_body)

    yield from walk(fn.body)


def call_sites(fn: FunctionDef) -> list[tuple[int, ExternalCall]]:
    """External calls in the function, ordered by statement index.
    Includes calls embedded in require/if conditions."""
    sites: list[tuple[int, ExternalCall]] = []
    for idx, stmt in iter_statements(fn):
        if isinstance(stmt, CallStmt):
            sites.append((idx, stmt.call))
        elif isinstance(stmt, (RequireStmt, IfStmt)) and stmt.call is not None:
            sites.append((idx, stmt.call))
    return sites


def state_writes(
    fn: FunctionDef, contract: ContractDef
) -> list[tuple[int, str]]:
    """Writes to state variables (mapping elements attributed to the
    mapping), ordered by statement index. Locals shadow state names."""
    state_names = contract.state_var_names()
    locals_seen = {name for _, name in fn.params if name}
    writes: list[tuple[int, str]] = []
    for idx, stmt in iter_statements(fn):
        if isinstance(stmt, LocalDecl):
            locals_seen.update(stmt.names)
        elif isinstance(stmt, CallStmt):
            locals_seen.update(stmt.declared_locals)
            if stmt.assign_base and stmt.assign_base in state_names and stmt.assign_base not in locals_seen:
                writes.append((idx, stmt.assign_path or stmt.assign_base))
        elif isinstance(stmt, AssignStmt):
            if stmt.target_base in state_names and stmt.target_base not in locals_seen:
                writes.append((idx, stmt.target_path))
    return writes


def guard_reads(
    fn: FunctionDef, contract: ContractDef
) -> list[tuple[int, frozenset[str]]]:
    """State variables read by require/if guards, per statement index.
    One level of local aliasing is resolved: a guard on a local that was
    initialized from state counts as reading that state."""
    state_names = contract.state_var_names()
    alias: dict[str, frozenset[str]] = {}
    guards: list[tuple[int, frozenset[str]]] = []
    for idx, stmt in iter_statements(fn):
        if isinstance(stmt, LocalDecl):
            state_reads = frozenset(r for r in stmt.init_reads if r in state_names)
            for name in stmt.names:
                alias[name] = state_reads
        elif isinstance(stmt, (RequireStmt, IfStmt)):
            direct = {r for r in stmt.reads if r in state_names}
            for r in stmt.reads:
                direct.update(alias.get(r, frozenset()))
            if direct:
                guards.append((idx, frozenset(direct)))
    return guards


def has_opaque(fn: FunctionDef) -> bool:
    """True when the body contains unmodeled statements (excluding the
    modifier placeholder `_`)."""
    for _, stmt in iter_statements(fn):
        if stmt.kind is StatementKind.EXPRESSION and stmt.text != "_":
            return True
    return False
