"""Generator behavior: determinism, label soundness, surface diversity."""

import re

import pytest

from reforge.detector import analyze
from reforge.generator import (
    GenParams,
    InvalidParams,
    draw_params,
    gen_identifier,
    gen_secure,
    gen_secure_advanced,
    gen_vulnerable_advanced,
    gen_vulnerable_basic,
    generate,
)
from reforge.rng import Stream, derive_stream
from reforge.sol import parse
from reforge.taxonomy import Kind, Label, SecurePattern, Subtype


def _params(kind, index=0, master=404, **overrides):
    stream = derive_stream(master, index)
    params = draw_params(
        kind,
        stream.next_u64(),
        stream,
        subtype=overrides.pop("subtype", None),
        secure_pattern=overrides.pop("secure_pattern", None),
    )
    params.structural_knobs.update(overrides)
    return params


# ---------------------------------------------------------------------------
# gen_identifier


def test_contract_identifier_shape():
    stream = Stream(1)
    for _ in range(50):
        ident = gen_identifier(stream, "contract")
        match = re.fullmatch(r"([A-Za-z]+)(\d{4})", ident)
        assert match, ident
        assert 1000 <= int(match.group(2)) <= 9999


def test_identifier_determinism():
    a = gen_identifier(Stream(99), "function")
    b = gen_identifier(Stream(99), "function")
    assert a == b


def test_identifier_collision_rate():
    # oracle: brute-force distinct count over 10,000 contract-name draws
    stream = Stream(7)
    drawn = {gen_identifier(stream, "contract") for _ in range(10_000)}
    assert len(drawn) >= 8_000


def test_identifier_unknown_role():
    with pytest.raises(InvalidParams):
        gen_identifier(Stream(0), "planet")


# ---------------------------------------------------------------------------
# parameter validation


def test_knob_out_of_range_rejected():
    params = _params(Kind.VULN_BASIC)
    params.structural_knobs["extra_functions"] = 9
    with pytest.raises(InvalidParams):
        gen_vulnerable_basic(params)


def test_subtype_only_for_advanced():
    params = _params(Kind.VULN_BASIC)
    params.subtype = Subtype.SINGLE_FUNCTION
    with pytest.raises(InvalidParams):
        gen_vulnerable_basic(params)
    with pytest.raises(InvalidParams):
        gen_vulnerable_advanced(_params(Kind.VULN_ADVANCED))  # subtype missing


def test_pattern_only_for_secure_basic():
    with pytest.raises(InvalidParams):
        gen_secure(_params(Kind.SECURE_BASIC))  # pattern missing
    params = _params(Kind.SECURE_ADVANCED)
    params.secure_pattern = SecurePattern.CEI
    with pytest.raises(InvalidParams):
        gen_secure_advanced(params)


def test_wrong_kind_dispatch_rejected():
    with pytest.raises(InvalidParams):
        gen_vulnerable_basic(_params(Kind.SECURE_ADVANCED))


# ---------------------------------------------------------------------------
# determinism and structure


@pytest.mark.parametrize(
    "kind,subtype,pattern",
    [
        (Kind.VULN_BASIC, None, None),
        (Kind.VULN_ADVANCED, Subtype.READ_ONLY, None),
        (Kind.SECURE_BASIC, None, SecurePattern.MUTEX),
        (Kind.SECURE_ADVANCED, None, None),
    ],
)
def test_fixed_seed_is_byte_identical(kind, subtype, pattern):
    a = generate(_params(kind, subtype=subtype, secure_pattern=pattern))
    b = generate(_params(kind, subtype=subtype, secure_pattern=pattern))
    assert a.source == b.source
    assert a.id == b.id


def test_classic_template_knobs_match_canonical_shape(classic_vulnerable):
    """family 0 with all-zero structure knobs reproduces the canonical
    single-function shape modulo identifiers."""
    params = _params(
        Kind.VULN_BASIC, family=0, extra_functions=0, guard_style=0, shuffle=0
    )
    generated = parse(generate(params).source)
    canonical = parse(classic_vulnerable)

    def signature(unit):
        return [
            (
                len(unit.contracts),
                [len(c.state_vars) for c in unit.contracts],
                [
                    [tuple(s.kind.value for s in f.body) for f in c.functions]
                    for c in unit.contracts
                ],
            )
        ]

    assert signature(generated) == signature(canonical)
    assert generated.pragma_req == canonical.pragma_req


def test_guarded_pattern_matches_canonical_shape(guarded_secure):
    params = _params(
        Kind.SECURE_BASIC,
        secure_pattern=SecurePattern.REENTRANCY_GUARD,
        extra_functions=0,
        guard_style=0,
        shuffle=0,
    )
    contract = gen_secure(params)
    unit = parse(contract.source)
    canonical = parse(guarded_secure)
    assert unit.pragma_req == "^0.8.19"
    assert unit.imports == canonical.imports
    ours = unit.contracts[0]
    theirs = canonical.contracts[0]
    assert ours.bases == theirs.bases
    assert [tuple(s.kind.value for s in f.body) for f in ours.functions] == [
        tuple(s.kind.value for s in f.body) for f in theirs.functions
    ]
    assert any("nonReentrant" in f.modifiers for f in ours.functions)


def test_vuln_basic_is_single_function_and_labeled():
    contract = gen_vulnerable_basic(_params(Kind.VULN_BASIC))
    assert contract.label is Label.VULNERABLE
    assert contract.subtype is Subtype.SINGLE_FUNCTION


# ---------------------------------------------------------------------------
# detector-consistency oracles


@pytest.mark.parametrize("family", [0, 1, 2, 3])
def test_basic_families_all_detected(family):
    for i in range(50):
        params = _params(Kind.VULN_BASIC, index=i, master=600 + family, family=family)
        contract = gen_vulnerable_basic(params)
        verdict = analyze(parse(contract.source))
        assert verdict.classification.value == "vulnerable"
        assert any(f.subtype is Subtype.SINGLE_FUNCTION for f in verdict.findings)


def test_advanced_single_function_detected():
    for i in range(50):
        params = _params(Kind.VULN_ADVANCED, index=i, subtype=Subtype.SINGLE_FUNCTION)
        verdict = analyze(parse(gen_vulnerable_advanced(params).source))
        assert verdict.classification.value == "vulnerable"


def test_advanced_cross_function_finding_spans_two_functions():
    for i in range(50):
        params = _params(Kind.VULN_ADVANCED, index=i, subtype=Subtype.CROSS_FUNCTION)
        verdict = analyze(parse(gen_vulnerable_advanced(params).source))
        assert verdict.classification.value == "vulnerable"
        pairs = [
            (f.function, f.partner_function)
            for f in verdict.findings
            if f.subtype is Subtype.CROSS_FUNCTION
        ]
        assert pairs and all(fn != partner for fn, partner in pairs)


def test_read_only_has_view_and_consumer_and_is_vulnerable():
    for i in range(20):
        params = _params(Kind.VULN_ADVANCED, index=i, subtype=Subtype.READ_ONLY)
        contract = gen_vulnerable_advanced(params)
        assert contract.label is Label.VULNERABLE
        unit = parse(contract.source)
        assert len(unit.contracts) == 2
        views = [
            f.name
            for c in unit.contracts
            for f in c.functions
            if f.mutability.value == "view"
        ]
        assert views


def test_cross_contract_has_two_contracts():
    params = _params(Kind.VULN_ADVANCED, subtype=Subtype.CROSS_CONTRACT)
    unit = parse(gen_vulnerable_advanced(params).source)
    assert len(unit.contracts) == 2


@pytest.mark.parametrize("pattern", list(SecurePattern))
def test_secure_patterns_all_secure(pattern):
    for i in range(50):
        params = _params(Kind.SECURE_BASIC, index=i, master=700, secure_pattern=pattern)
        contract = gen_secure(params)
        assert contract.label is Label.SECURE
        verdict = analyze(parse(contract.source))
        assert verdict.classification.value == "secure", (pattern, i)


def test_cei_write_precedes_call():
    from reforge.sol import call_sites, state_writes

    params = _params(Kind.SECURE_BASIC, secure_pattern=SecurePattern.CEI)
    unit = parse(gen_secure(params).source)
    contract = unit.contracts[0]
    for fn in contract.functions:
        sites = call_sites(fn)
        if not sites:
            continue
        writes = state_writes(fn, contract)
        if writes:
            assert max(i for i, _ in writes) < min(i for i, _ in sites)


def test_secure_advanced_has_lock_modifier_and_throttle():
    for i in range(25):
        params = _params(Kind.SECURE_ADVANCED, index=i, master=801)
        contract = gen_secure_advanced(params)
        assert contract.label is Label.SECURE
        unit = parse(contract.source)
        c = unit.contracts[0]
        state_names = c.state_var_names()
        lock_modifiers = []
        for mod in c.modifiers:
            guarded = set()
            written = set()
            for stmt in mod.body:
                reads = getattr(stmt, "reads", ())
                guarded.update(r for r in reads if r in state_names)
                base = getattr(stmt, "target_base", None)
                if base in state_names:
                    written.add(base)
            if guarded & written:
                lock_modifiers.append(mod.name)
        assert lock_modifiers, f"no custom lock modifier in sample {i}"
        throttles = [
            s
            for f in c.functions
            for s in f.body
            if getattr(s, "condition", None) and "block.timestamp" in s.condition
        ]
        assert throttles, f"no timestamp throttle in sample {i}"


def test_secure_advanced_may_be_flagged_but_label_stays_secure():
    flagged = 0
    for i in range(40):
        params = _params(Kind.SECURE_ADVANCED, index=i, master=802)
        contract = gen_secure_advanced(params)
        verdict = analyze(parse(contract.source))
        if verdict.classification.value == "vulnerable":
            flagged += 1
        assert contract.label is Label.SECURE
    # the deceptive-complexity family is supposed to fool naive ordering
    # rules on a subset of its variants
    assert flagged > 0


# ---------------------------------------------------------------------------
# surface diversity


def test_surface_diversity_thousand_outputs():
    seen = set()
    stems = set()
    for i in range(1000):
        stream = derive_stream(123, i)
        contract = generate(draw_params(Kind.VULN_BASIC, stream.next_u64(), stream))
        assert contract.id not in seen
        seen.add(contract.id)
        stems.update(re.findall(r"function (\w+)\(", contract.source))
    assert len(stems) >= 10


def test_everything_parses():
    kinds = [
        (Kind.VULN_BASIC, None, None),
        (Kind.VULN_ADVANCED, Subtype.CROSS_CONTRACT, None),
        (Kind.SECURE_BASIC, None, SecurePattern.PULL_PAYMENT),
        (Kind.SECURE_ADVANCED, None, None),
    ]
    for j, (kind, subtype, pattern) in enumerate(kinds):
        for i in range(25):
            params = _params(
                kind, index=i, master=900 + j, subtype=subtype, secure_pattern=pattern
            )
            parse(generate(params).source)
