"""AST node types for the Solidity subset.

The tree covers exactly the constructs the corpus templates and the
legacy forms need: pragma, imports, contracts with inheritance, state
variables (including nested mappings), events, modifiers, functions, and
a small statement vocabulary. Anything the parser does not recognize is
preserved as an opaque expression statement so real-world inputs degrade
instead of failing.

Statements keep a canonical text form (re-serialized from tokens) next
to their structured payload; rendering therefore round-trips through the
parser without loss.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union


class Visibility(str, Enum):
    PUBLIC = "public"
    EXTERNAL = "external"
    INTERNAL = "internal"
    PRIVATE = "private"
    UNSPECIFIED = "unspecified"


class Mutability(str, Enum):
    PAYABLE = "payable"
    VIEW = "view"
    PURE = "pure"
    NONPAYABLE = "nonpayable"


class CalleeKind(str, Enum):
    LOW_LEVEL_CALL = "low_level_call"
    DELEGATECALL = "delegatecall"
    SEND = "send"
    TRANSFER = "transfer"
    INTERFACE_CALL = "interface_call"


class StatementKind(str, Enum):
    REQUIRE_GUARD = "require_guard"
    ASSIGNMENT = "assignment"
    EXTERNAL_CALL_STMT = "external_call_stmt"
    LOCAL_DECL = "local_decl"
    IF_BLOCK = "if_block"
    EMIT = "emit"
    RETURN_STMT = "return_stmt"
    EXPRESSION = "expression"


@dataclass(frozen=True)
class ExternalCall:
    callee_kind: CalleeKind
    target: str
    value_arg: Optional[str] = None
    method: Optional[str] = None  # interface calls only


@dataclass(frozen=True)
class RequireStmt:
    kind = StatementKind.REQUIRE_GUARD
    text: str
    condition: str
    reads: tuple[str, ...]
    # require(addr.send(x)) style: the guard wraps an external call
    call: Optional[ExternalCall] = None


@dataclass(frozen=True)
class AssignStmt:
    kind = StatementKind.ASSIGNMENT
    text: str
    target_path: str
    target_base: str
    op: str
    rhs: str
    rhs_reads: tuple[str, ...]


@dataclass(frozen=True)
class CallStmt:
    kind = StatementKind.EXTERNAL_CALL_STMT
    text: str
    call: ExternalCall
    # `(bool ok,) = ...` declares locals; `x = IVault(v).f()` assigns a path
    declared_locals: tuple[str, ...] = ()
    assign_path: Optional[str] = None
    assign_base: Optional[str] = None


@dataclass(frozen=True)
class LocalDecl:
    kind = StatementKind.LOCAL_DECL
    text: str
    names: tuple[str, ...]
    init: Optional[str]
    init_reads: tuple[str, ...]


@dataclass(frozen=True)
class IfStmt:
    kind = StatementKind.IF_BLOCK
    condition: str
    reads: tuple[str, ...]
    body: tuple["Statement", ...]
    else_body: tuple["Statement", ...] = ()
    # legacy `if (!addr.send(x)) ...` embeds the call in the condition
    call: Optional[ExternalCall] = None


@dataclass(frozen=True)
class EmitStmt:
    kind = StatementKind.EMIT
    text: str


@dataclass(frozen=True)
class ReturnStmt:
    kind = StatementKind.RETURN_STMT
    text: str


@dataclass(frozen=True)
class ExprStmt:
    """Opaque statement: recognized shape but unmodeled semantics."""

    kind = StatementKind.EXPRESSION
    text: str


Statement = Union[
    RequireStmt,
    AssignStmt,
    CallStmt,
    LocalDecl,
    IfStmt,
    EmitStmt,
    ReturnStmt,
    ExprStmt,
]


@dataclass(frozen=True)
class StateVarDef:
    name: str
    type_text: str
    visibility: str = ""
    initializer: Optional[str] = None


@dataclass(frozen=True)
class EventDef:
    name: str
    params_text: str = ""


@dataclass(frozen=True)
class ModifierDef:
    name: str
    params_text: str
    body: tuple[Statement, ...]


@dataclass(frozen=True)
class FunctionDef:
    name: str
    visibility: Visibility = Visibility.UNSPECIFIED
    mutability: Mutability = Mutability.NONPAYABLE
    modifiers: tuple[str, ...] = ()
    params: tuple[tuple[str, str], ...] = ()  # (type_text, name)
    returns_text: Optional[str] = None
    body: tuple[Statement, ...] = ()
    has_body: bool = True  # False for interface declarations


@dataclass(frozen=True)
class ContractDef:
    name: str
    bases: tuple[str, ...] = ()
    state_vars: tuple[StateVarDef, ...] = ()
    functions: tuple[FunctionDef, ...] = ()
    modifiers: tuple[ModifierDef, ...] = ()
    events: tuple[EventDef, ...] = ()
    kind: str = "contract"  # or "interface"
    unknown_members: tuple[str, ...] = ()

    def state_var_names(self) -> frozenset[str]:
        return frozenset(v.name for v in self.state_vars)

    def function(self, name: str) -> Optional[FunctionDef]:
        for fn in self.functions:
            if fn.name == name:
                return fn
        return None


@dataclass(frozen=True)
class SourceUnit:
    pragma_req: str
    imports: tuple[str, ...] = ()
    contracts: tuple[ContractDef, ...] = ()


@dataclass
class ParseError(Exception):
    message: str
    line: int = 0
    column: int = 0

    def __str__(self) -> str:
        return f"{self.message} (line {self.line}, col {self.column})"
