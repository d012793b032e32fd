"""Solidity-subset parsing, rendering, and per-function analysis facts."""

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
    StatementKind,
    Visibility,
)
from .facts import call_sites, guard_reads, has_opaque, iter_statements, state_writes
from .parser import parse
from .render import render

__all__ = [
    "AssignStmt",
    "CalleeKind",
    "CallStmt",
    "ContractDef",
    "EmitStmt",
    "EventDef",
    "ExprStmt",
    "ExternalCall",
    "FunctionDef",
    "IfStmt",
    "LocalDecl",
    "ModifierDef",
    "Mutability",
    "ParseError",
    "RequireStmt",
    "ReturnStmt",
    "SourceUnit",
    "StateVarDef",
    "Statement",
    "StatementKind",
    "Visibility",
    "call_sites",
    "guard_reads",
    "has_opaque",
    "iter_statements",
    "state_writes",
    "parse",
    "render",
]
