"""Template-driven synthesis of labeled vulnerable and secure contracts.

Four basic vulnerable families (withdraw-all, partial-withdraw,
reward-claim, refund), four advanced vulnerability subtypes, four basic
security patterns, and a hardened "deceptively complex" secure family.
Every knob and identifier draw comes from the contract's own RNG stream,
so generation is a pure function of GenParams.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Optional

from .rng import Stream
from .taxonomy import Kind, Label, Provenance, SecurePattern, Subtype


class InvalidParams(ValueError):
    pass


# knob name -> (min, max), per kind
COMMON_KNOBS = {
    "extra_functions": (0, 3),
    "guard_style": (0, 2),
    "name_pool": (0, 7),
    "shuffle": (0, 5),
}
FAMILY_KNOB = {"family": (0, 3)}

KNOB_RANGES: dict[Kind, dict[str, tuple[int, int]]] = {
    Kind.VULN_BASIC: {**COMMON_KNOBS, **FAMILY_KNOB},
    Kind.VULN_ADVANCED: dict(COMMON_KNOBS),
    Kind.SECURE_BASIC: dict(COMMON_KNOBS),
    Kind.SECURE_ADVANCED: dict(COMMON_KNOBS),
}


@dataclass
class GenParams:
    seed: int
    kind: Kind
    subtype: Optional[Subtype] = None
    secure_pattern: Optional[SecurePattern] = None
    structural_knobs: dict[str, int] = field(default_factory=dict)

    def validate(self) -> None:
        if (self.subtype is not None) != (self.kind is Kind.VULN_ADVANCED):
            raise InvalidParams("subtype is set iff kind is vuln_advanced")
        if (self.secure_pattern is not None) != (self.kind is Kind.SECURE_BASIC):
            raise InvalidParams("secure_pattern is set iff kind is secure_basic")
        ranges = KNOB_RANGES[self.kind]
        for name, value in self.structural_knobs.items():
            if name not in ranges:
                raise InvalidParams(f"unknown knob {name!r} for {self.kind.value}")
            lo, hi = ranges[name]
            if not lo <= value <= hi:
                raise InvalidParams(f"knob {name}={value} outside [{lo}, {hi}]")
        for name in ranges:
            if name not in self.structural_knobs:
                raise InvalidParams(f"missing knob {name!r}")


@dataclass
class GeneratedContract:
    id: str
    source: str
    label: Label
    subtype: Optional[Subtype]
    provenance: Provenance
    params: GenParams


# ---------------------------------------------------------------------------
# identifier pools

VULN_PREFIXES = [
    "VulnContract", "EtherVault", "TokenBank", "PaymentHub",
    "EtherStore", "FundPool", "DonationJar", "SavingsCell",
]
SECURE_PREFIXES = [
    "SecureFund", "SafeVault", "GuardedBank", "TrustStore",
    "ShieldTreasury", "FortifiedKeep", "SolidDeposit", "WardenPool",
]
HARDENED_PREFIXES = [
    "HardenedVault", "LayeredSafe", "BulwarkFund", "CitadelBank",
    "AegisStore", "RampartPool", "BastionHub", "PalisadeCell",
]
HELPER_PREFIXES = [
    "RewardPool", "LendingDesk", "CreditBook", "OracleFeed",
    "StakeLedger", "MarginHouse", "QuoteBoard", "BorrowGate",
]

WITHDRAW_STEMS = [
    "withdrawFunds", "withdrawAll", "claimPayout", "claimRewards",
    "redeemBalance", "collectFunds", "cashOut", "takeEarnings",
    "pullFunds", "releasePayment", "extractDeposit", "drainBalance",
    "retrieveStake", "unlockFunds", "settleBalance", "exitPosition",
]
VAR_POOL = [
    "balances", "userBalances", "deposits", "funds",
    "credits", "ledger", "holdings", "accounts",
]
AUX_VAR_POOL = [
    "rewardPoints", "bonusUnits", "loyaltyScore", "accruedInterest",
    "pendingYield", "feeCredits", "stakeWeight", "dripAllowance",
]
EVENT_POOL = [
    "Withdrawal", "Payout", "FundsReleased", "BalanceCleared",
    "Claimed", "Refunded", "StakeExited", "CreditDrawn",
]
LOCK_POOL = [
    "locked", "busy", "entered", "engaged", "inFlight", "executing",
]
MODIFIER_POOL = [
    "noReentry", "exclusive", "serialized", "oneAtATime", "guarded", "atomic",
]

CONTRACT_PREFIXES = VULN_PREFIXES + SECURE_PREFIXES + HARDENED_PREFIXES + HELPER_PREFIXES


def gen_identifier(stream: Stream, role: str) -> str:
    """Random identifier for a role: contract names get a prefix plus a
    4-digit suffix in [1000, 9999]; function and variable names come from
    stem pools."""
    if role == "contract":
        prefix = stream.choice(CONTRACT_PREFIXES)
        return f"{prefix}{stream.randint(1000, 9999)}"
    if role == "function":
        return stream.choice(WITHDRAW_STEMS)
    if role == "variable":
        return stream.choice(VAR_POOL)
    raise InvalidParams(f"unknown identifier role {role!r}")


# ---------------------------------------------------------------------------
# text-assembly helpers


def _contract_name(stream: Stream, prefixes: list[str], pool: int) -> str:
    return f"{prefixes[pool % len(prefixes)]}{stream.randint(1000, 9999)}"


def _arrange(blocks: list[str], variant: int) -> list[str]:
    """Deterministic member-order variants; statement order inside a
    function is never touched."""
    if len(blocks) < 2:
        return blocks
    v = variant % 6
    if v == 0:
        return blocks
    if v == 1:
        return blocks[::-1]
    if v == 2:
        return blocks[1:] + blocks[:1]
    if v == 3:
        return blocks[-1:] + blocks[:-1]
    if v == 4:
        swapped = list(blocks)
        swapped[0], swapped[1] = swapped[1], swapped[0]
        return swapped
    mid = len(blocks) // 2
    return blocks[mid:] + blocks[:mid]


def _assemble(pragma: str, imports: list[str], bodies: list[str]) -> str:
    parts = [f"pragma solidity {pragma};", ""]
    for imp in imports:
        parts.append(f'import "{imp}";')
    if imports:
        parts.append("")
    parts.append("\n\n".join(bodies))
    return "\n".join(parts) + "\n"


def _contract_block(name: str, members: list[str], bases: str = "") -> str:
    header = f"contract {name}{bases} {{"
    body = "\n\n".join(members)
    indented = "\n".join(
        "    " + line if line else "" for line in body.split("\n")
    )
    return f"{header}\n{indented}\n}}"


def _deposit_fn(var: str, style: int = 0) -> str:
    if style == 1:
        return (
            "function deposit() public payable {\n"
            '    require(msg.value > 0, "Must send ETH");\n'
            f"    {var}[msg.sender] += msg.value;\n"
            "}"
        )
    return (
        "function deposit() public payable {\n"
        f"    {var}[msg.sender] += msg.value;\n"
        "}"
    )


def _extra_functions(stream: Stream, var: str, count: int, safe_only: bool) -> list[str]:
    """Benign helper functions; `safe_only` avoids views over the main
    mapping (used by the hardened family, where that state goes stale)."""
    getter = (
        f"function balanceOf(address account) public view returns (uint256) {{\n"
        f"    return {var}[account];\n"
        f"}}"
    )
    pure_helper = (
        "function previewFee(uint256 amount) public pure returns (uint256) {\n"
        "    return amount / 100;\n"
        "}"
    )
    pot_view = (
        "function totalHeld() public view returns (uint256) {\n"
        "    return address(this).balance;\n"
        "}"
    )
    version_const = (
        "function schemaVersion() public pure returns (uint256) {\n"
        f"    return {stream.randint(1, 9)};\n"
        "}"
    )
    pool = [pure_helper, pot_view, version_const] if safe_only else [
        getter, pure_helper, pot_view, version_const,
    ]
    picked = list(pool)
    stream.shuffle(picked)
    return picked[:count]


# ---------------------------------------------------------------------------
# basic vulnerable families


def _family_withdraw_all(stream: Stream, knobs: dict[str, int]) -> tuple[str, list[str], str]:
    pool = knobs["name_pool"]
    name = _contract_name(stream, VULN_PREFIXES, pool)
    var = VAR_POOL[pool]
    fname = stream.choice(WITHDRAW_STEMS)
    guard = {
        0: f'require({var}[msg.sender] > 0, "Insufficient balance");',
        1: f'require({var}[msg.sender] >= 1, "Nothing to withdraw");',
        2: f'require({var}[msg.sender] != 0, "Empty balance");',
    }[knobs["guard_style"]]
    withdraw = (
        f"function {fname}() public {{\n"
        f"    {guard}\n"
        f"    (bool success,) = msg.sender.call{{value: {var}[msg.sender]}}(\"\");\n"
        f'    require(success, "Transfer failed");\n'
        f"    {var}[msg.sender] = 0;\n"
        f"}}"
    )
    members = [f"mapping(address => uint256) public {var};", _deposit_fn(var), withdraw]
    return name, members, var


def _family_partial_withdraw(stream: Stream, knobs: dict[str, int]) -> tuple[str, list[str], str]:
    pool = knobs["name_pool"]
    name = _contract_name(stream, VULN_PREFIXES, pool)
    var = VAR_POOL[(pool + 1) % len(VAR_POOL)]
    fname = stream.choice(WITHDRAW_STEMS)
    guard = {
        0: f'require({var}[msg.sender] >= amount, "Insufficient balance");',
        1: f'require(amount <= {var}[msg.sender], "Amount too large");',
        2: f'require({var}[msg.sender] - amount >= 0, "Balance too low");',
    }[knobs["guard_style"]]
    withdraw = (
        f"function {fname}(uint256 amount) public {{\n"
        f"    {guard}\n"
        f"    (bool success,) = msg.sender.call{{value: amount}}(\"\");\n"
        f'    require(success, "Transfer failed");\n'
        f"    {var}[msg.sender] -= amount;\n"
        f"}}"
    )
    members = [
        f"mapping(address => uint256) public {var};",
        _deposit_fn(var, style=1),
        withdraw,
    ]
    return name, members, var


def _family_reward_claim(stream: Stream, knobs: dict[str, int]) -> tuple[str, list[str], str]:
    pool = knobs["name_pool"]
    name = _contract_name(stream, VULN_PREFIXES, pool)
    var = AUX_VAR_POOL[pool]
    event = EVENT_POOL[pool]
    fname = stream.choice(WITHDRAW_STEMS)
    guard = {
        0: 'require(reward > 0, "No rewards available");',
        1: 'require(reward >= 1, "Nothing accrued");',
        2: 'require(reward != 0, "Empty reward");',
    }[knobs["guard_style"]]
    accrue = (
        "function accrueReward() public payable {\n"
        '    require(msg.value > 0, "No reward sent");\n'
        f"    {var}[msg.sender] += msg.value;\n"
        f"    emit {event}(msg.sender, msg.value);\n"
        "}"
    )
    claim = (
        f"function {fname}() public {{\n"
        f"    uint256 reward = {var}[msg.sender];\n"
        f"    {guard}\n"
        f"    (bool success,) = msg.sender.call{{value: reward}}(\"\");\n"
        f'    require(success, "Transfer failed");\n'
        f"    {var}[msg.sender] = 0;\n"
        f"}}"
    )
    members = [
        f"mapping(address => uint256) public {var};",
        f"event {event}(address indexed user, uint256 amount);",
        accrue,
        claim,
    ]
    return name, members, var


def _family_refund(stream: Stream, knobs: dict[str, int]) -> tuple[str, list[str], str]:
    pool = knobs["name_pool"]
    name = _contract_name(stream, VULN_PREFIXES, pool)
    var = VAR_POOL[(pool + 2) % len(VAR_POOL)]
    fname = stream.choice(WITHDRAW_STEMS)
    guard = {
        0: (
            f"if ({var}[msg.sender] == 0) {{\n"
            f'        revert("No deposit to refund");\n'
            f"    }}"
        ),
        1: f'require({var}[msg.sender] > 0, "No deposit to refund");',
        2: f'require({var}[msg.sender] >= 1, "Nothing to refund");',
    }[knobs["guard_style"]]
    refund = (
        f"function {fname}() public {{\n"
        f"    {guard}\n"
        f"    uint256 owed = {var}[msg.sender];\n"
        f"    (bool success,) = msg.sender.call{{value: owed}}(\"\");\n"
        f'    require(success, "Transfer failed");\n'
        f"    {var}[msg.sender] = 0;\n"
        f"}}"
    )
    members = [
        f"mapping(address => uint256) public {var};",
        _deposit_fn(var),
        refund,
    ]
    return name, members, var


BASIC_FAMILIES: list[Callable] = [
    _family_withdraw_all,
    _family_partial_withdraw,
    _family_reward_claim,
    _family_refund,
]


def gen_vulnerable_basic(params: GenParams) -> GeneratedContract:
    """Elementary call-before-state-update contracts (single_function)."""
    if params.kind is not Kind.VULN_BASIC:
        raise InvalidParams("kind must be vuln_basic")
    params.validate()
    stream = Stream(params.seed)
    knobs = params.structural_knobs
    name, members, var = BASIC_FAMILIES[knobs["family"]](stream, knobs)
    members += _extra_functions(stream, var, knobs["extra_functions"], safe_only=False)
    state = [m for m in members if not m.startswith("function")]
    funcs = _arrange([m for m in members if m.startswith("function")], knobs["shuffle"])
    source = _assemble("^0.8.0", [], [_contract_block(name, state + funcs)])
    return _finish(source, Label.VULNERABLE, Subtype.SINGLE_FUNCTION, Provenance.SYNTHETIC_BASIC, params)


# ---------------------------------------------------------------------------
# advanced vulnerable subtypes


def _advanced_single(stream: Stream, knobs: dict[str, int]) -> list[str]:
    pool = knobs["name_pool"]
    name = _contract_name(stream, VULN_PREFIXES, pool)
    var = VAR_POOL[pool]
    aux = AUX_VAR_POOL[pool]
    event = EVENT_POOL[pool]
    fname = stream.choice(WITHDRAW_STEMS)
    deposit = (
        "function deposit() public payable {\n"
        '    require(msg.value > 0, "No value sent");\n'
        f"    {var}[msg.sender] += msg.value;\n"
        f"    {aux}[msg.sender] += msg.value / 100;\n"
        "}"
    )
    withdraw = (
        f"function {fname}(uint256 amount) public {{\n"
        f'    require(amount > 0, "Zero amount");\n'
        f'    require({var}[msg.sender] >= amount, "Insufficient balance");\n'
        f"    uint256 bonus = {aux}[msg.sender];\n"
        f"    if (bonus > amount) {{\n"
        f"        bonus = amount;\n"
        f"    }}\n"
        f"    (bool success,) = msg.sender.call{{value: amount + bonus}}(\"\");\n"
        f'    require(success, "Transfer failed");\n'
        f"    {var}[msg.sender] -= amount;\n"
        f"    {aux}[msg.sender] = 0;\n"
        f"    emit {event}(msg.sender, amount);\n"
        f"}}"
    )
    members = [
        f"mapping(address => uint256) public {var};",
        f"mapping(address => uint256) public {aux};",
        f"event {event}(address indexed user, uint256 amount);",
        deposit,
        withdraw,
    ]
    members += _extra_functions(stream, var, knobs["extra_functions"], safe_only=False)
    state = [m for m in members if not m.startswith("function")]
    funcs = _arrange([m for m in members if m.startswith("function")], knobs["shuffle"])
    return [_contract_block(name, state + funcs)]


def _advanced_cross_function(stream: Stream, knobs: dict[str, int]) -> list[str]:
    pool = knobs["name_pool"]
    name = _contract_name(stream, VULN_PREFIXES, pool)
    var = VAR_POOL[pool]
    f_move = ["transferTo", "moveFunds", "reassign"][knobs["guard_style"]]
    f_withdraw = stream.choice(WITHDRAW_STEMS)
    move = (
        f"function {f_move}(address to, uint256 amount) public {{\n"
        f'    require({var}[msg.sender] >= amount, "Insufficient balance");\n'
        f"    {var}[to] += amount;\n"
        f"    {var}[msg.sender] -= amount;\n"
        f"}}"
    )
    withdraw = (
        f"function {f_withdraw}() public {{\n"
        f"    uint256 amount = {var}[msg.sender];\n"
        f"    (bool success,) = msg.sender.call{{value: amount}}(\"\");\n"
        f'    require(success, "Transfer failed");\n'
        f"    {var}[msg.sender] = 0;\n"
        f"}}"
    )
    members = [
        f"mapping(address => uint256) public {var};",
        _deposit_fn(var),
        move,
        withdraw,
    ]
    members += _extra_functions(stream, var, knobs["extra_functions"], safe_only=False)
    state = [m for m in members if not m.startswith("function")]
    funcs = _arrange([m for m in members if m.startswith("function")], knobs["shuffle"])
    return [_contract_block(name, state + funcs)]


def _advanced_cross_contract(stream: Stream, knobs: dict[str, int]) -> list[str]:
    pool = knobs["name_pool"]
    vault = _contract_name(stream, VULN_PREFIXES, pool)
    helper = _contract_name(stream, HELPER_PREFIXES, pool)
    var = VAR_POOL[pool]
    f_exit = stream.choice(WITHDRAW_STEMS)
    f_borrow = ["borrowAgainst", "drawCredit", "leverageUp"][knobs["guard_style"]]
    vault_members = [
        f"mapping(address => uint256) public {var};",
        f"{helper} public pool;",
        "constructor(address poolAddr) {\n"
        f"    pool = {helper}(poolAddr);\n"
        "}",
        "function deposit() public payable {\n"
        f"    {var}[msg.sender] += msg.value;\n"
        f"    pool.recordStake(msg.sender, {var}[msg.sender]);\n"
        "}",
        f"function {f_exit}() public {{\n"
        f"    uint256 staked = {var}[msg.sender];\n"
        f'    require(staked > 0, "Nothing staked");\n'
        f"    (bool success,) = msg.sender.call{{value: staked}}(\"\");\n"
        f'    require(success, "Transfer failed");\n'
        f"    {var}[msg.sender] = 0;\n"
        f"    pool.recordStake(msg.sender, 0);\n"
        f"}}",
    ]
    helper_members = [
        "mapping(address => uint256) public stakes;",
        "function recordStake(address user, uint256 amount) public {\n"
        "    stakes[user] = amount;\n"
        "}",
        f"function {f_borrow}(uint256 amount) public {{\n"
        f'    require(stakes[msg.sender] >= amount, "Undercollateralized");\n'
        f"    (bool ok,) = msg.sender.call{{value: amount}}(\"\");\n"
        f'    require(ok, "Transfer failed");\n'
        f"}}",
    ]
    blocks = [_contract_block(vault, vault_members), _contract_block(helper, helper_members)]
    if knobs["shuffle"] % 2:
        blocks.reverse()
    return blocks


def _advanced_read_only(stream: Stream, knobs: dict[str, int]) -> list[str]:
    pool = knobs["name_pool"]
    vault = _contract_name(stream, VULN_PREFIXES, pool)
    consumer = _contract_name(stream, HELPER_PREFIXES, pool)
    var = VAR_POOL[pool]
    total = ["totalLocked", "totalStaked", "poolSize"][knobs["guard_style"]]
    f_exit = stream.choice(WITHDRAW_STEMS)
    f_price = "pricePerShare"
    vault_members = [
        f"mapping(address => uint256) public {var};",
        f"uint256 public {total};",
        "function deposit() public payable {\n"
        f"    {var}[msg.sender] += msg.value;\n"
        f"    {total} += msg.value;\n"
        "}",
        f"function {f_exit}(uint256 amount) public {{\n"
        f'    require({var}[msg.sender] >= amount, "Insufficient balance");\n'
        f"    (bool success,) = msg.sender.call{{value: amount}}(\"\");\n"
        f'    require(success, "Transfer failed");\n'
        f"    {var}[msg.sender] -= amount;\n"
        f"    {total} -= amount;\n"
        f"}}",
        f"function {f_price}() public view returns (uint256) {{\n"
        f"    if ({total} == 0) {{\n"
        f"        return 1000000;\n"
        f"    }}\n"
        f"    return address(this).balance * 1000000 / {total};\n"
        f"}}",
    ]
    consumer_members = [
        f"{vault} public vault;",
        "mapping(address => uint256) public creditLimit;",
        "constructor(address vaultAddr) {\n"
        f"    vault = {vault}(vaultAddr);\n"
        "}",
        "function refreshCredit() public {\n"
        f"    creditLimit[msg.sender] = vault.{f_price}() * 2;\n"
        "}",
    ]
    blocks = [_contract_block(vault, vault_members), _contract_block(consumer, consumer_members)]
    if knobs["shuffle"] % 2:
        blocks.reverse()
    return blocks


ADVANCED_BUILDERS = {
    Subtype.SINGLE_FUNCTION: _advanced_single,
    Subtype.CROSS_FUNCTION: _advanced_cross_function,
    Subtype.CROSS_CONTRACT: _advanced_cross_contract,
    Subtype.READ_ONLY: _advanced_read_only,
}


def gen_vulnerable_advanced(params: GenParams) -> GeneratedContract:
    """Taxonomy-guided vulnerable contracts across the four subtypes."""
    if params.kind is not Kind.VULN_ADVANCED:
        raise InvalidParams("kind must be vuln_advanced")
    params.validate()
    stream = Stream(params.seed)
    blocks = ADVANCED_BUILDERS[params.subtype](stream, params.structural_knobs)
    source = _assemble("^0.8.17", [], blocks)
    return _finish(source, Label.VULNERABLE, params.subtype, Provenance.SYNTHETIC_ADVANCED, params)


# ---------------------------------------------------------------------------
# secure patterns


def _pattern_cei(stream: Stream, knobs: dict[str, int]) -> tuple[str, list[str], str]:
    pool = knobs["name_pool"]
    name = _contract_name(stream, SECURE_PREFIXES, pool)
    var = VAR_POOL[pool]
    event = EVENT_POOL[pool]
    fname = stream.choice(WITHDRAW_STEMS)
    tail = {
        0: f"    emit {event}(msg.sender, amount);\n",
        1: "",
        2: f"    emit {event}(msg.sender, amount);\n",
    }[knobs["guard_style"]]
    withdraw = (
        f"function {fname}(uint256 amount) public {{\n"
        f'    require({var}[msg.sender] >= amount, "Insufficient balance");\n'
        f"    {var}[msg.sender] -= amount;\n"
        f"    (bool success,) = msg.sender.call{{value: amount}}(\"\");\n"
        f'    require(success, "Transfer failed");\n'
        f"{tail}}}"
    )
    members = [
        f"mapping(address => uint256) public {var};",
        f"event {event}(address indexed user, uint256 amount);",
        _deposit_fn(var, style=1),
        withdraw,
    ]
    return name, members, var


def _pattern_reentrancy_guard(stream: Stream, knobs: dict[str, int]) -> tuple[str, list[str], str]:
    pool = knobs["name_pool"]
    name = _contract_name(stream, SECURE_PREFIXES, pool)
    var = VAR_POOL[pool]
    interaction = {
        0: "payable(msg.sender).transfer(_amount);",
        1: '(bool success,) = msg.sender.call{value: _amount}("");\n'
        '    require(success, "Transfer failed");',
        2: 'require(payable(msg.sender).send(_amount), "Transfer failed");',
    }[knobs["guard_style"]]
    withdraw = (
        "function withdraw(uint256 _amount) external nonReentrant {\n"
        f'    require({var}[msg.sender] >= _amount, "Insufficient balance");\n'
        f"    {var}[msg.sender] -= _amount;\n"
        f"    {interaction}\n"
        "}"
    )
    deposit = (
        "function deposit() external payable {\n"
        '    require(msg.value > 0, "Must send ETH");\n'
        f"    {var}[msg.sender] += msg.value;\n"
        "}"
    )
    members = [
        f"mapping(address => uint256) private {var};",
        deposit,
        withdraw,
    ]
    return name, members, var


def _pattern_pull_payment(stream: Stream, knobs: dict[str, int]) -> tuple[str, list[str], str]:
    pool = knobs["name_pool"]
    name = _contract_name(stream, SECURE_PREFIXES, pool)
    var = ["credits", "owedPayments", "pendingPayouts"][knobs["guard_style"]]
    event = EVENT_POOL[pool]
    withdraw = (
        "function withdrawPayments() public {\n"
        f"    uint256 payment = {var}[msg.sender];\n"
        f'    require(payment > 0, "No pending payments");\n'
        f"    {var}[msg.sender] = 0;\n"
        "    (bool success,) = msg.sender.call{value: payment}(\"\");\n"
        '    require(success, "Transfer failed");\n'
        f"    emit {event}(msg.sender, payment);\n"
        "}"
    )
    credit = (
        "function recordPayment(address payee) public payable {\n"
        '    require(msg.value > 0, "Must send ETH");\n'
        f"    {var}[payee] += msg.value;\n"
        "}"
    )
    members = [
        f"mapping(address => uint256) public {var};",
        f"event {event}(address indexed payee, uint256 amount);",
        credit,
        withdraw,
    ]
    return name, members, var


def _pattern_mutex(stream: Stream, knobs: dict[str, int]) -> tuple[str, list[str], str]:
    pool = knobs["name_pool"]
    name = _contract_name(stream, SECURE_PREFIXES, pool)
    var = VAR_POOL[pool]
    lock = LOCK_POOL[pool % len(LOCK_POOL)]
    modname = MODIFIER_POOL[pool % len(MODIFIER_POOL)]
    fname = stream.choice(WITHDRAW_STEMS)
    if knobs["guard_style"] == 2:
        # inline lock handling instead of a modifier
        withdraw = (
            f"function {fname}(uint256 amount) public {{\n"
            f'    require(!{lock}, "Reentrant call blocked");\n'
            f'    require({var}[msg.sender] >= amount, "Insufficient balance");\n'
            f"    {lock} = true;\n"
            f"    {var}[msg.sender] -= amount;\n"
            f"    (bool success,) = msg.sender.call{{value: amount}}(\"\");\n"
            f'    require(success, "Transfer failed");\n'
            f"    {lock} = false;\n"
            f"}}"
        )
        members = [
            f"mapping(address => uint256) public {var};",
            f"bool private {lock};",
            _deposit_fn(var),
            withdraw,
        ]
        return name, members, var
    modifier = (
        f"modifier {modname}() {{\n"
        f'    require(!{lock}, "Reentrant call blocked");\n'
        f"    {lock} = true;\n"
        f"    _;\n"
        f"    {lock} = false;\n"
        f"}}"
    )
    withdraw = (
        f"function {fname}(uint256 amount) public {modname} {{\n"
        f'    require({var}[msg.sender] >= amount, "Insufficient balance");\n'
        f"    {var}[msg.sender] -= amount;\n"
        f"    (bool success,) = msg.sender.call{{value: amount}}(\"\");\n"
        f'    require(success, "Transfer failed");\n'
        f"}}"
    )
    members = [
        f"mapping(address => uint256) public {var};",
        f"bool private {lock};",
        modifier,
        _deposit_fn(var),
        withdraw,
    ]
    return name, members, var


SECURE_BUILDERS = {
    SecurePattern.CEI: _pattern_cei,
    SecurePattern.REENTRANCY_GUARD: _pattern_reentrancy_guard,
    SecurePattern.PULL_PAYMENT: _pattern_pull_payment,
    SecurePattern.MUTEX: _pattern_mutex,
}


def gen_secure(params: GenParams) -> GeneratedContract:
    """Vulnerability-free contracts realizing one defense pattern."""
    if params.kind is not Kind.SECURE_BASIC:
        raise InvalidParams("kind must be secure_basic")
    params.validate()
    stream = Stream(params.seed)
    knobs = params.structural_knobs
    name, members, var = SECURE_BUILDERS[params.secure_pattern](stream, knobs)
    members += _extra_functions(stream, var, knobs["extra_functions"], safe_only=False)
    split_at = [m.startswith("function") or m.startswith("modifier") for m in members]
    state = [m for m, is_fn in zip(members, split_at) if not is_fn]
    funcs = _arrange([m for m, is_fn in zip(members, split_at) if is_fn], knobs["shuffle"])
    if params.secure_pattern is SecurePattern.REENTRANCY_GUARD:
        pragma = "^0.8.19"
        imports = ["@openzeppelin/contracts/security/ReentrancyGuard.sol"]
        block = _contract_block(name, state + funcs, bases=" is ReentrancyGuard")
    else:
        pragma = "^0.8.19"
        imports = []
        block = _contract_block(name, state + funcs)
    source = _assemble(pragma, imports, [block])
    return _finish(source, Label.SECURE, None, Provenance.SYNTHETIC_BASIC, params)


def gen_secure_advanced(params: GenParams) -> GeneratedContract:
    """Deceptively complex secure contracts: a call textually precedes a
    state write, but layered defenses (custom lock, throttles, gas and
    block guards) actually block re-entry."""
    if params.kind is not Kind.SECURE_ADVANCED:
        raise InvalidParams("kind must be secure_advanced")
    params.validate()
    stream = Stream(params.seed)
    knobs = params.structural_knobs
    pool = knobs["name_pool"]
    name = _contract_name(stream, HARDENED_PREFIXES, pool)
    var = VAR_POOL[pool]
    lock = LOCK_POOL[pool % len(LOCK_POOL)]
    modname = MODIFIER_POOL[pool % len(MODIFIER_POOL)]
    last_ts = ["lastWithdrawAt", "lastExitTime", "cooldownAnchor"][knobs["guard_style"]]
    fname = stream.choice(WITHDRAW_STEMS)
    cooldown = stream.choice([30, 60, 120, 300])

    if knobs["guard_style"] == 2:
        # phase counter lock: equally effective, but shaped unlike the
        # textbook bool mutex so naive ordering rules misfire on it
        lock_decl = f"uint256 private {lock}Phase;"
        modifier = (
            f"modifier {modname}() {{\n"
            f'    require({lock}Phase == 0, "Execution locked");\n'
            f"    {lock}Phase = 1;\n"
            f"    _;\n"
            f"    {lock}Phase = 0;\n"
            f"}}"
        )
    else:
        lock_decl = f"bool private {lock};"
        modifier = (
            f"modifier {modname}() {{\n"
            f'    require(!{lock}, "Execution locked");\n'
            f"    {lock} = true;\n"
            f"    _;\n"
            f"    {lock} = false;\n"
            f"}}"
        )

    extra_guards = []
    extra_writes = []
    extra_state = []
    if knobs["extra_functions"] % 2 == 0:
        extra_state.append("uint256 private lastActionBlock;")
        extra_guards.append('require(block.number > lastActionBlock, "One action per block");')
        extra_writes.append("lastActionBlock = block.number;")
    if knobs["extra_functions"] >= 2:
        extra_guards.append(f'require(gasleft() >= {stream.choice([20000, 30000, 50000])}, "Gas reserve too low");')

    guard_lines = "\n".join(f"    {g}" for g in extra_guards)
    write_lines = "\n".join(f"    {w}" for w in extra_writes)
    withdraw = (
        f"function {fname}(uint256 amount) public {modname} {{\n"
        f'    require({var}[msg.sender] >= amount, "Insufficient balance");\n'
        f'    require(block.timestamp >= {last_ts} + {cooldown}, "Withdrawal throttled");\n'
        + (guard_lines + "\n" if guard_lines else "")
        + f"    (bool success,) = msg.sender.call{{value: amount}}(\"\");\n"
        f'    require(success, "Transfer failed");\n'
        f"    {var}[msg.sender] -= amount;\n"
        f"    {last_ts} = block.timestamp;\n"
        + (write_lines + "\n" if write_lines else "")
        + f"}}"
    )
    members = [
        f"mapping(address => uint256) public {var};",
        lock_decl,
        f"uint256 public {last_ts};",
        *extra_state,
        modifier,
        _deposit_fn(var),
        withdraw,
    ]
    members += _extra_functions(stream, var, knobs["extra_functions"], safe_only=True)
    is_fn = [m.startswith("function") or m.startswith("modifier") for m in members]
    state = [m for m, f in zip(members, is_fn) if not f]
    funcs = _arrange([m for m, f in zip(members, is_fn) if f], knobs["shuffle"])
    source = _assemble("^0.8.19", [], [_contract_block(name, state + funcs)])
    return _finish(source, Label.SECURE, None, Provenance.SYNTHETIC_ADVANCED, params)


# ---------------------------------------------------------------------------


def _finish(
    source: str,
    label: Label,
    subtype: Optional[Subtype],
    provenance: Provenance,
    params: GenParams,
) -> GeneratedContract:
    return GeneratedContract(
        id=hashlib.sha256(source.encode("utf-8")).hexdigest(),
        source=source,
        label=label,
        subtype=subtype,
        provenance=provenance,
        params=params,
    )


GENERATORS = {
    Kind.VULN_BASIC: gen_vulnerable_basic,
    Kind.VULN_ADVANCED: gen_vulnerable_advanced,
    Kind.SECURE_BASIC: gen_secure,
    Kind.SECURE_ADVANCED: gen_secure_advanced,
}


def generate(params: GenParams) -> GeneratedContract:
    """Dispatch to the per-kind generator."""
    return GENERATORS[params.kind](params)


def draw_params(
    kind: Kind,
    seed: int,
    stream: Stream,
    subtype: Optional[Subtype] = None,
    secure_pattern: Optional[SecurePattern] = None,
    family: Optional[int] = None,
) -> GenParams:
    """Draw a full knob assignment from `stream` for the given kind."""
    knobs: dict[str, int] = {}
    for name, (lo, hi) in KNOB_RANGES[kind].items():
        knobs[name] = stream.randint(lo, hi)
    if family is not None and kind is Kind.VULN_BASIC:
        knobs["family"] = family
    return GenParams(
        seed=seed,
        kind=kind,
        subtype=subtype,
        secure_pattern=secure_pattern,
        structural_knobs=knobs,
    )
