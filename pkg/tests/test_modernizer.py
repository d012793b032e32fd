"""Legacy-to-0.8.x transformation behavior."""

import json

import pytest

from reforge.detector import analyze
from reforge.legacy import gen_legacy
from reforge.modernizer import (
    UnsupportedConstruct,
    modernize,
    modernize_batch,
)
from reforge.sol import parse
from reforge.taxonomy import Label, Subtype

LEGACY_TRANSFER = """\
pragma solidity ^0.4.24;

contract Wallet {
    mapping(address => uint256) public balances;

    function pay(uint256 amount) public {
        require(balances[msg.sender] >= amount);
        balances[msg.sender] -= amount;
        msg.sender.transfer(amount);
    }
}
"""


def test_transfer_becomes_call_with_success_require():
    result = modernize(LEGACY_TRANSFER)
    assert '(bool success,) = msg.sender.call{value: amount}("");' in result.source
    assert 'require(success, "Transfer failed");' in result.source
    assert ".transfer(" not in result.source
    assert "transfer_to_call" in result.transforms_applied


def test_modern_input_is_byte_for_byte_fixpoint(guarded_secure):
    result = modernize(guarded_secure)
    assert result.transforms_applied == []
    assert result.source == guarded_secure


def test_pragma_rewritten_to_target():
    result = modernize(LEGACY_TRANSFER)
    assert parse(result.source).pragma_req == "^0.8.19"
    assert "pragma_rewrite" in result.transforms_applied


def test_missing_pragma_is_inserted():
    source = "contract A {\n    uint256 public x;\n    function f() public { x = 1; }\n}\n"
    result = modernize(source)
    assert parse(result.source).pragma_req == "^0.8.19"


def test_send_in_require_rewritten_with_message_kept():
    source = """\
pragma solidity ^0.5.0;

contract A {
    function pay(address payable to, uint256 amount) public {
        require(to.send(amount), "could not pay");
    }
}
"""
    result = modernize(source)
    assert '(bool success,) = to.call{value: amount}("");' in result.source
    assert 'require(success, "could not pay");' in result.source
    assert "send_to_call" in result.transforms_applied


def test_two_transfers_get_distinct_success_names():
    source = """\
pragma solidity ^0.4.24;

contract A {
    function payBoth(address payable x, address payable y) public {
        x.transfer(1);
        y.transfer(2);
    }
}
"""
    result = modernize(source)
    assert "(bool success,)" in result.source
    assert "(bool success2,)" in result.source
    parse(result.source)


def test_legacy_call_value_rewritten():
    source = """\
pragma solidity ^0.4.24;

contract A {
    mapping(address => uint256) public balances;
    function take(uint256 amount) public {
        require(balances[msg.sender] >= amount);
        msg.sender.call.value(amount)("");
        balances[msg.sender] -= amount;
    }
}
"""
    result = modernize(source)
    assert "msg.sender.call{value: amount}" in result.source
    assert "call_value_braces" in result.transforms_applied


def test_visibility_added_to_functions_and_state_vars():
    source = """\
pragma solidity ^0.4.24;

contract A {
    uint256 counter;
    mapping(address => uint256) balances;

    function bump() {
        counter += 1;
    }
}
"""
    result = modernize(source)
    assert "uint256 internal counter;" in result.source
    assert "mapping(address => uint256) internal balances;" in result.source
    assert "function bump() public {" in result.source
    assert "visibility_added" in result.transforms_applied


def test_old_constructor_rewritten():
    source = """\
pragma solidity ^0.4.24;

contract Bank {
    address internal owner;
    function Bank() public {
        owner = msg.sender;
    }
}
"""
    result = modernize(source)
    assert "constructor() {" in result.source
    assert "function Bank" not in result.source
    assert "constructor_keyword" in result.transforms_applied


def test_safemath_stripped_and_rewritten():
    source = """\
pragma solidity ^0.5.0;
import "openzeppelin-solidity/contracts/math/SafeMath.sol";

contract A {
    using SafeMath for uint256;
    uint256 public total;

    function add(uint256 x) public {
        total = total.add(x).mul(2);
    }
}
"""
    result = modernize(source)
    assert "SafeMath" not in result.source
    assert "total = ((total + x) * 2);" in result.source
    assert "safemath_stripped" in result.transforms_applied


def test_unsupported_send_context_is_flagged():
    source = """\
pragma solidity ^0.4.24;

contract A {
    function pay(address to, uint256 amount) public {
        bool ok = to.send(amount) && amount > 0;
    }
}
"""
    with pytest.raises(UnsupportedConstruct):
        modernize(source)


def test_erc20_transfer_untouched():
    source = """\
pragma solidity ^0.4.24;

contract A {
    function sweep(address token, address to, uint256 amount) public {
        Token(token).transfer(to, amount);
    }
}
"""
    result = modernize(source)
    assert "Token(token).transfer(to, amount);" in result.source


def test_idempotence_on_legacy_samples():
    for i in range(40):
        label = Label.VULNERABLE if i % 2 else Label.SECURE
        source = gen_legacy(3000 + i, label)
        first = modernize(source)
        second = modernize(first.source)
        assert second.transforms_applied == []
        assert second.source == first.source


def test_label_preserved_pre_and_post():
    for i in range(40):
        label = Label.VULNERABLE if i % 2 else Label.SECURE
        subtype = Subtype.CROSS_FUNCTION if i % 8 == 1 else None
        source = gen_legacy(4000 + i, label, subtype)
        before = analyze(parse(source)).classification.value
        result = modernize(source)
        after = analyze(parse(result.source)).classification.value
        assert result.label_preserved
        assert before == after == label.value


# ---------------------------------------------------------------------------
# batch driver


def test_batch_counts_and_log(tmp_path):
    src = tmp_path / "in"
    dst = tmp_path / "out"
    src.mkdir()
    (src / "a.sol").write_text(gen_legacy(1, Label.VULNERABLE), encoding="utf-8")
    (src / "b.sol").write_text(gen_legacy(2, Label.SECURE), encoding="utf-8")
    (src / "broken.sol").write_text("contract {", encoding="utf-8")
    log = tmp_path / "modernize.jsonl"
    summary = modernize_batch(src, dst, log_path=log)
    assert summary == {"ok": 2, "failed": 1}
    assert len(list(dst.glob("*.sol"))) == 2
    entries = [json.loads(line) for line in log.read_text().splitlines()]
    assert {e["file"] for e in entries} == {"a.sol", "b.sol", "broken.sol"}
    assert sum(e["status"] == "failed" for e in entries) == 1


def test_batch_empty_directory(tmp_path):
    src = tmp_path / "empty"
    src.mkdir()
    summary = modernize_batch(src, tmp_path / "out")
    assert summary == {"ok": 0, "failed": 0}


def test_batch_300_file_standin_set(tmp_path):
    src = tmp_path / "legacy"
    dst = tmp_path / "modern"
    src.mkdir()
    labels = {}
    for i in range(300):
        label = Label.VULNERABLE if i % 2 else Label.SECURE
        name = f"c{i:03d}.sol"
        (src / name).write_text(gen_legacy(5000 + i, label), encoding="utf-8")
        labels[name] = label.value
    summary = modernize_batch(src, dst)
    assert summary == {"ok": 300, "failed": 0}
    outputs = sorted(dst.glob("*.sol"))
    assert len(outputs) == 300
    for path in outputs:
        text = path.read_text(encoding="utf-8")
        unit = parse(text)  # all outputs parse
        assert unit.pragma_req == "^0.8.19"
        verdict = analyze(unit)
        assert verdict.classification.value == labels[path.name]
