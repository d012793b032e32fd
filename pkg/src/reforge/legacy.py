"""Deterministic legacy-style (0.4.x/0.5.x) contract stand-ins.

Used when the external study/exploit datasets are not on disk: these
fill the ingestion quota so the modernization pipeline and the corpus
census stay exercisable. They deliberately use deprecated constructs
(old constructors, missing visibility, SafeMath, transfer/send,
call.value) that the modernizer must rewrite.
"""

from __future__ import annotations

from .generator import VAR_POOL, VULN_PREFIXES, SECURE_PREFIXES, WITHDRAW_STEMS
from .rng import Stream
from .taxonomy import Label, Subtype

LEGACY_PRAGMAS = ["^0.4.24", "0.4.25", "^0.5.0", ">=0.4.21 <0.6.0"]


def gen_legacy(seed: int, label: Label, subtype: Subtype | None = None) -> str:
    """One legacy contract with the requested ground-truth label."""
    stream = Stream(seed)
    if label is Label.VULNERABLE:
        if subtype is Subtype.CROSS_FUNCTION:
            return _legacy_vulnerable_cross(stream)
        return _legacy_vulnerable_single(stream)
    return _legacy_secure(stream)


def _header(stream: Stream, use_safemath: bool) -> tuple[str, str]:
    pragma = stream.choice(LEGACY_PRAGMAS)
    lines = [f"pragma solidity {pragma};", ""]
    if use_safemath:
        lines.append('import "openzeppelin-solidity/contracts/math/SafeMath.sol";')
        lines.append("")
    return pragma, "\n".join(lines)


def _legacy_vulnerable_single(stream: Stream) -> str:
    name = f"{stream.choice(VULN_PREFIXES)}{stream.randint(1000, 9999)}"
    var = stream.choice(VAR_POOL)
    fname = stream.choice(WITHDRAW_STEMS)
    use_safemath = stream.randint(0, 1) == 1
    old_constructor = stream.randint(0, 1) == 1
    _, header = _header(stream, use_safemath)

    deposit_write = (
        f"{var}[msg.sender] = {var}[msg.sender].add(msg.value);"
        if use_safemath
        else f"{var}[msg.sender] += msg.value;"
    )
    debit = (
        f"{var}[msg.sender] = {var}[msg.sender].sub(amount);"
        if use_safemath
        else f"{var}[msg.sender] -= amount;"
    )
    body = []
    if use_safemath:
        body.append("    using SafeMath for uint256;")
    body.append(f"    mapping(address => uint256) {var};")
    body.append("    address owner;")
    body.append("")
    if old_constructor:
        body.append(f"    function {name}() public {{")
    else:
        body.append("    constructor() public {")
    body.append("        owner = msg.sender;")
    body.append("    }")
    body.append("")
    body.append("    function deposit() payable {")
    body.append(f"        {deposit_write}")
    body.append("    }")
    body.append("")
    body.append(f"    function {fname}(uint256 amount) {{")
    body.append(f"        require({var}[msg.sender] >= amount);")
    body.append('        msg.sender.call.value(amount)("");')
    body.append(f"        {debit}")
    body.append("    }")
    return header + f"contract {name} {{\n" + "\n".join(body) + "\n}\n"


def _legacy_vulnerable_cross(stream: Stream) -> str:
    name = f"{stream.choice(VULN_PREFIXES)}{stream.randint(1000, 9999)}"
    var = stream.choice(VAR_POOL)
    fname = stream.choice(WITHDRAW_STEMS)
    _, header = _header(stream, use_safemath=False)
    body = [
        f"    mapping(address => uint256) {var};",
        "",
        "    function deposit() payable {",
        f"        {var}[msg.sender] += msg.value;",
        "    }",
        "",
        "    function moveTo(address to, uint256 amount) {",
        f"        require({var}[msg.sender] >= amount);",
        f"        {var}[to] += amount;",
        f"        {var}[msg.sender] -= amount;",
        "    }",
        "",
        f"    function {fname}() {{",
        f"        uint256 amount = {var}[msg.sender];",
        '        msg.sender.call.value(amount)("");',
        f"        {var}[msg.sender] = 0;",
        "    }",
    ]
    return header + f"contract {name} {{\n" + "\n".join(body) + "\n}\n"


def _legacy_secure(stream: Stream) -> str:
    name = f"{stream.choice(SECURE_PREFIXES)}{stream.randint(1000, 9999)}"
    var = stream.choice(VAR_POOL)
    fname = stream.choice(WITHDRAW_STEMS)
    use_send = stream.randint(0, 1) == 1
    use_safemath = stream.randint(0, 1) == 1
    _, header = _header(stream, use_safemath)

    deposit_write = (
        f"{var}[msg.sender] = {var}[msg.sender].add(msg.value);"
        if use_safemath
        else f"{var}[msg.sender] += msg.value;"
    )
    debit = (
        f"{var}[msg.sender] = {var}[msg.sender].sub(amount);"
        if use_safemath
        else f"{var}[msg.sender] -= amount;"
    )
    interaction = (
        "require(msg.sender.send(amount));"
        if use_send
        else "msg.sender.transfer(amount);"
    )
    body = []
    if use_safemath:
        body.append("    using SafeMath for uint256;")
    body.append(f"    mapping(address => uint256) {var};")
    body.append("")
    body.append("    function deposit() public payable {")
    body.append(f"        {deposit_write}")
    body.append("    }")
    body.append("")
    body.append(f"    function {fname}(uint256 amount) public {{")
    body.append(f"        require({var}[msg.sender] >= amount);")
    body.append(f"        {debit}")
    body.append(f"        {interaction}")
    body.append("    }")
    return header + f"contract {name} {{\n" + "\n".join(body) + "\n}\n"
