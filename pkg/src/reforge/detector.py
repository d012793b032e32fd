"""Rule-based static reentrancy analyzer.

Verification oracle for the corpus pipeline and a baseline classifier.
The positive class is `vulnerable` throughout. The analyzer is sound on
the forge's own template families (basic vulnerable, single/cross
function advanced, all basic secure patterns) and best-effort elsewhere:
cross-contract and read-only cases may come back inconclusive, and
deceptively hardened contracts may be flagged as false positives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .sol import (
    AssignStmt,
    CalleeKind,
    ContractDef,
    FunctionDef,
    IfStmt,
    ModifierDef,
    RequireStmt,
    SourceUnit,
    Visibility,
)
from .sol.facts import call_sites, guard_reads, has_opaque, iter_statements, state_writes
from .taxonomy import Classification, Defense, Subtype

# call kinds that forward enough gas to re-enter; transfer/send are
# capped at the 2300-gas stipend and cannot
REENTERABLE = {
    CalleeKind.LOW_LEVEL_CALL,
    CalleeKind.DELEGATECALL,
    CalleeKind.INTERFACE_CALL,
}


@dataclass(frozen=True)
class Finding:
    contract: str
    function: str
    subtype: Subtype
    call_index: int
    write_index: int
    guard_bypassed: bool = False
    partner_function: Optional[str] = None


@dataclass
class Verdict:
    classification: Classification
    findings: list[Finding] = field(default_factory=list)
    defenses_seen: list[Defense] = field(default_factory=list)


def _externally_callable(fn: FunctionDef) -> bool:
    if fn.name in ("constructor",):
        return False
    return fn.visibility in (
        Visibility.PUBLIC,
        Visibility.EXTERNAL,
        Visibility.UNSPECIFIED,  # pre-0.5 default is public
    )


def _bool_state_vars(contract: ContractDef) -> set[str]:
    return {v.name for v in contract.state_vars if v.type_text == "bool"}


def _mutex_modifiers(contract: ContractDef) -> set[str]:
    """Modifiers that gate on a bool state flag and toggle it around `_`."""
    flags = _bool_state_vars(contract)
    found: set[str] = set()
    for mod in contract.modifiers:
        guarded: set[str] = set()
        written: set[str] = set()
        for stmt in mod.body:
            if isinstance(stmt, RequireStmt):
                guarded.update(r for r in stmt.reads if r in flags)
            elif isinstance(stmt, AssignStmt) and stmt.target_base in flags:
                written.add(stmt.target_base)
        if guarded & written:
            found.add(mod.name)
    return found


def _has_nonreentrant(fn: FunctionDef) -> bool:
    return any(m.split("(")[0] == "nonReentrant" for m in fn.modifiers)


def _inline_mutex(fn: FunctionDef, contract: ContractDef) -> bool:
    """require(!flag) ... flag = true before the first re-enterable call,
    flag = false after it."""
    flags = _bool_state_vars(contract)
    calls = [i for i, c in call_sites(fn) if c.callee_kind in REENTERABLE]
    if not calls:
        return False
    first_call = calls[0]
    for flag in flags:
        guard_at = None
        set_true = None
        set_false = None
        for idx, stmt in iter_statements(fn):
            if isinstance(stmt, (RequireStmt, IfStmt)) and flag in stmt.reads:
                if guard_at is None:
                    guard_at = idx
            elif isinstance(stmt, AssignStmt) and stmt.target_base == flag:
                if stmt.rhs == "true" and set_true is None:
                    set_true = idx
                elif stmt.rhs == "false":
                    set_false = idx
        if (
            guard_at is not None
            and set_true is not None
            and set_false is not None
            and guard_at < first_call
            and set_true < first_call
            and set_false > first_call
        ):
            return True
    return False


def _function_defenses(
    fn: FunctionDef, contract: ContractDef, mutex_mods: set[str]
) -> tuple[set[Defense], bool]:
    """Defenses visible on one function. Returns (defenses, suppressing):
    `suppressing` means re-entry into this function is actually blocked."""
    defenses: set[Defense] = set()
    suppressing = False
    if _has_nonreentrant(fn):
        defenses.add(Defense.NONREENTRANT_MODIFIER)
        suppressing = True
    if any(m.split("(")[0] in mutex_mods for m in fn.modifiers):
        defenses.add(Defense.MUTEX_FLAG)
        suppressing = True
    if _inline_mutex(fn, contract):
        defenses.add(Defense.MUTEX_FLAG)
        suppressing = True

    state_names = contract.state_var_names()
    has_delegate = any(
        c.callee_kind is CalleeKind.DELEGATECALL for _, c in call_sites(fn)
    )
    for _, stmt in iter_statements(fn):
        if not isinstance(stmt, (RequireStmt, IfStmt)):
            continue
        cond = stmt.condition
        reads_state = any(r in state_names for r in stmt.reads)
        if "gasleft(" in cond:
            defenses.add(Defense.GAS_GUARD)
        if reads_state and "block.timestamp" in cond:
            defenses.add(Defense.TIMESTAMP_THROTTLE)
        if reads_state and "block.number" in cond:
            defenses.add(Defense.BLOCK_LIMIT)
        if has_delegate and "msg.sender ==" in cond and reads_state:
            defenses.add(Defense.DELEGATION_CHECK)

    calls = [i for i, c in call_sites(fn)]
    writes = state_writes(fn, contract)
    if calls and writes and max(i for i, _ in writes) < min(calls):
        defenses.add(Defense.CEI_ORDER)
    return defenses, suppressing


def _pull_payment(contract: ContractDef) -> bool:
    """Withdrawal of pre-credited balances: some function sends a value
    read from a mapping element that it zeroes/decrements before the call,
    while a different function credits the same mapping."""
    from .sol import LocalDecl

    mappings = {
        v.name for v in contract.state_vars if v.type_text.startswith("mapping(")
    }
    for fn in contract.functions:
        sites = call_sites(fn)
        value_calls = [(i, c) for i, c in sites if c.value_arg]
        if not value_calls:
            continue
        i, call = value_calls[0]
        alias_of: dict[str, str] = {}
        for _, stmt in iter_statements(fn):
            if isinstance(stmt, LocalDecl) and stmt.init:
                for m in mappings:
                    if m in stmt.init:
                        for name in stmt.names:
                            alias_of[name] = m
        value_arg = call.value_arg or ""
        sources = {m for m in mappings if m in value_arg}
        if value_arg in alias_of:
            sources.add(alias_of[value_arg])
        if not sources:
            continue
        debits = [
            (j, w) for j, w in state_writes(fn, contract)
            if j < i and any(w.startswith(m) for m in sources)
        ]
        if not debits:
            continue
        for other in contract.functions:
            if other.name == fn.name:
                continue
            for _, w in state_writes(other, contract):
                if any(w.startswith(m) for m in sources):
                    return True
    return False


def analyze(unit: SourceUnit) -> Verdict:
    """Classify a source unit as vulnerable, secure, or inconclusive."""
    findings: list[Finding] = []
    defenses: list[Defense] = []
    inconclusive = False

    for contract in unit.contracts:
        if contract.kind == "interface":
            continue
        mutex_mods = _mutex_modifiers(contract)
        per_fn: dict[str, tuple[set[Defense], bool]] = {}
        for fn in contract.functions:
            if not fn.has_body:
                continue
            fn_defenses, suppressing = _function_defenses(fn, contract, mutex_mods)
            per_fn[fn.name] = (fn_defenses, suppressing)
            for d in fn_defenses:
                if d not in defenses:
                    defenses.append(d)
        if _pull_payment(contract):
            if Defense.PULL_PAYMENT not in defenses:
                defenses.append(Defense.PULL_PAYMENT)

        findings.extend(_contract_findings(contract, per_fn))
        if _opaque_blocks_analysis(contract, per_fn, findings):
            inconclusive = True

    read_only = _read_only_findings(unit)
    findings.extend(read_only)

    if findings:
        classification = Classification.VULNERABLE
    elif inconclusive or _unconsumed_view_exposure(unit):
        classification = Classification.INCONCLUSIVE
    else:
        classification = Classification.SECURE
    return Verdict(classification=classification, findings=findings, defenses_seen=defenses)


def _contract_findings(
    contract: ContractDef, per_fn: dict[str, tuple[set[Defense], bool]]
) -> list[Finding]:
    findings: list[Finding] = []
    state_names = contract.state_var_names()

    # guard map across functions for the cross-function rule
    guard_holders: dict[str, list[str]] = {}  # state var -> functions guarding on it
    for fn in contract.functions:
        if not fn.has_body or not _externally_callable(fn):
            continue
        for _, vars_read in guard_reads(fn, contract):
            for v in vars_read:
                guard_holders.setdefault(v, []).append(fn.name)

    for fn in contract.functions:
        if not fn.has_body or not _externally_callable(fn):
            continue
        fn_defenses, suppressing = per_fn.get(fn.name, (set(), False))
        calls = [(i, c) for i, c in call_sites(fn) if c.callee_kind in REENTERABLE]
        if not calls:
            continue
        writes = state_writes(fn, contract)
        guards = guard_reads(fn, contract)
        opaque_after: list[int] = [
            idx
            for idx, stmt in iter_statements(fn)
            if stmt.kind.value == "expression" and stmt.text not in ("_", "")
        ]
        if suppressing:
            continue

        seen_vars: set[str] = set()
        for i, _call in calls:
            prior_guard_vars: set[str] = set()
            for g, vars_read in guards:
                if g < i:
                    prior_guard_vars.update(vars_read)
            # definite write after the call to a guard-read variable
            for j, path in writes:
                if j <= i:
                    continue
                base = path.split("[")[0].split(".")[0]
                if base in prior_guard_vars and base not in seen_vars:
                    findings.append(
                        Finding(
                            contract=contract.name,
                            function=fn.name,
                            subtype=Subtype.SINGLE_FUNCTION,
                            call_index=i,
                            write_index=j,
                            guard_bypassed=bool(fn_defenses),
                        )
                    )
                    seen_vars.add(base)
            # opaque statements after the call conservatively count as writes
            for j in opaque_after:
                if j <= i or not prior_guard_vars:
                    continue
                base = sorted(prior_guard_vars)[0]
                if base not in seen_vars:
                    findings.append(
                        Finding(
                            contract=contract.name,
                            function=fn.name,
                            subtype=Subtype.SINGLE_FUNCTION,
                            call_index=i,
                            write_index=j,
                            guard_bypassed=bool(fn_defenses),
                        )
                    )
                    seen_vars.add(base)

            # cross-function: write after call to state guarded elsewhere
            for j, path in writes:
                if j <= i:
                    continue
                base = path.split("[")[0].split(".")[0]
                if base in seen_vars:
                    continue
                for partner_name in guard_holders.get(base, []):
                    if partner_name == fn.name:
                        continue
                    partner = contract.function(partner_name)
                    if partner is None:
                        continue
                    p_defenses, p_suppressing = per_fn.get(partner_name, (set(), False))
                    if p_suppressing:
                        continue
                    if not _moves_value(partner, contract, base):
                        continue
                    findings.append(
                        Finding(
                            contract=contract.name,
                            function=fn.name,
                            subtype=Subtype.CROSS_FUNCTION,
                            call_index=i,
                            write_index=j,
                            guard_bypassed=bool(fn_defenses),
                            partner_function=partner_name,
                        )
                    )
                    seen_vars.add(base)
                    break
    return findings


def _moves_value(fn: FunctionDef, contract: ContractDef, state_var: str) -> bool:
    """A partner function is exploitable if it moves value: makes an
    external call or shifts the shared state variable."""
    if call_sites(fn):
        return True
    return any(
        path.split("[")[0] == state_var for _, path in state_writes(fn, contract)
    )


def _opaque_blocks_analysis(
    contract: ContractDef,
    per_fn: dict[str, tuple[set[Defense], bool]],
    findings: list[Finding],
) -> bool:
    """Opaque statements only block analysis when a function mixes them
    with a re-enterable call and no finding was produced for it."""
    flagged = {f.function for f in findings if f.contract == contract.name}
    for fn in contract.functions:
        if not fn.has_body or not _externally_callable(fn):
            continue
        if fn.name in flagged:
            continue
        _, suppressing = per_fn.get(fn.name, (set(), False))
        if suppressing:
            continue
        calls = [c for _, c in call_sites(fn) if c.callee_kind in REENTERABLE]
        if calls and has_opaque(fn):
            return True
    return False


def _view_exposures(unit: SourceUnit) -> list[tuple[str, str, str]]:
    """(contract, view_function, state_var) triples where a view function
    reads a state variable that some function writes only after an
    external call (a mid-transaction inconsistency window)."""
    exposures: list[tuple[str, str, str]] = []
    for contract in unit.contracts:
        if contract.kind == "interface":
            continue
        state_names = contract.state_var_names()
        stale: set[str] = set()
        for fn in contract.functions:
            calls = [i for i, c in call_sites(fn) if c.callee_kind in REENTERABLE]
            if not calls:
                continue
            for j, path in state_writes(fn, contract):
                if j > calls[0]:
                    stale.add(path.split("[")[0])
        for fn in contract.functions:
            if fn.mutability.value != "view" or not fn.has_body:
                continue
            reads: set[str] = set()
            for _, stmt in iter_statements(fn):
                for r in getattr(stmt, "reads", ()) or ():
                    reads.add(r)
                text = getattr(stmt, "text", "")
                for name in state_names:
                    if name in text:
                        reads.add(name)
            for v in reads & stale:
                exposures.append((contract.name, fn.name, v))
    return exposures


def _read_only_findings(unit: SourceUnit) -> list[Finding]:
    exposures = _view_exposures(unit)
    if not exposures or len(unit.contracts) < 2:
        return []
    findings = []
    for contract_name, view_fn, state_var in exposures:
        for consumer in unit.contracts:
            if consumer.name == contract_name or consumer.kind == "interface":
                continue
            for fn in consumer.functions:
                for _, call in call_sites(fn):
                    if call.callee_kind is CalleeKind.INTERFACE_CALL and call.method == view_fn:
                        findings.append(
                            Finding(
                                contract=contract_name,
                                function=view_fn,
                                subtype=Subtype.READ_ONLY,
                                call_index=0,
                                write_index=0,
                                partner_function=f"{consumer.name}.{fn.name}",
                            )
                        )
                        return findings
    return findings


def _unconsumed_view_exposure(unit: SourceUnit) -> bool:
    """Inconsistency window exposed through a view with no consumer in the
    unit: cannot be decided locally."""
    return bool(_view_exposures(unit))


# ---------------------------------------------------------------------------
# corpus verification


@dataclass
class AgreementEntry:
    id: str
    file: str
    label: str
    verdict: str
    status: str  # agree / disagree / inconclusive / error
    decidable: bool
    detail: str = ""


@dataclass
class AgreementReport:
    entries: list[AgreementEntry] = field(default_factory=list)
    fatal: bool = False

    @property
    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for e in self.entries:
            out[e.status] = out.get(e.status, 0) + 1
        return out


def _enum_value(x) -> str:
    if x is None:
        return ""
    return x.value if hasattr(x, "value") else str(x)


def _record_decidable(record) -> bool:
    """Strata on which the generator and detector must agree: all basic
    synthetics, plus advanced vulnerables of the two locally decidable
    subtypes."""
    provenance = _enum_value(record.provenance)
    label = _enum_value(record.label)
    subtype = _enum_value(record.subtype)
    if provenance == "synthetic_basic":
        return True
    if provenance == "synthetic_advanced" and label == "vulnerable":
        return subtype in ("single_function", "cross_function")
    return False


def verify_corpus(manifest, root, strict: bool = False, jobs: int = 1) -> AgreementReport:
    """Re-analyze every contract in the manifest and compare verdicts to
    labels. Disagreements on decidable strata mark the report fatal;
    `strict` makes every non-agreement fatal."""
    from pathlib import Path

    from .sol import parse

    root = Path(root)
    report = AgreementReport()

    def check(record) -> AgreementEntry:
        path = root / record.file
        decidable = _record_decidable(record)
        if not path.exists():
            return AgreementEntry(
                id=record.id, file=record.file, label=_enum_value(record.label),
                verdict="", status="error", decidable=decidable, detail="missing file",
            )
        try:
            verdict = analyze(parse(path.read_text(encoding="utf-8")))
        except Exception as exc:  # parse failures are per-record errors
            return AgreementEntry(
                id=record.id, file=record.file, label=_enum_value(record.label),
                verdict="", status="error", decidable=decidable, detail=str(exc),
            )
        label = _enum_value(record.label)
        cls = verdict.classification.value
        if cls == "inconclusive":
            status = "inconclusive"
        elif cls == label:
            status = "agree"
        else:
            status = "disagree"
        return AgreementEntry(
            id=record.id, file=record.file, label=label, verdict=cls,
            status=status, decidable=decidable,
        )

    records = list(manifest.records)
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            report.entries = list(pool.map(check, records))
    else:
        report.entries = [check(r) for r in records]

    for e in report.entries:
        if e.status == "error":
            continue
        if e.status != "agree" and (strict or e.decidable):
            report.fatal = True
    return report
