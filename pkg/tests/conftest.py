import pytest

from reforge.corpus import CorpusManifest, assemble_full

MASTER_SEED = 20240801

# canonical template shapes the corpus is anchored on: a single-function
# call-before-update vulnerable contract and its guarded secure counterpart
CLASSIC_VULNERABLE = """\
pragma solidity ^0.8.0;

contract VulnContract4821 {
    mapping(address => uint256) public balances;

    function deposit() public payable {
        balances[msg.sender] += msg.value;
    }

    function withdrawFunds() public {
        require(balances[msg.sender] > 0, "Insufficient balance");
        (bool success,) = msg.sender.call{value: balances[msg.sender]}("");
        require(success, "Transfer failed");
        balances[msg.sender] = 0;
    }
}
"""

GUARDED_SECURE = """\
pragma solidity ^0.8.19;
import "@openzeppelin/contracts/security/ReentrancyGuard.sol";

contract SecureFund1 is ReentrancyGuard {
    mapping(address => uint256) private balances;

    function deposit() external payable {
        require(msg.value > 0, "Must send ETH");
        balances[msg.sender] += msg.value;
    }

    function withdraw(uint256 _amount) external nonReentrant {
        require(balances[msg.sender] >= _amount, "Insufficient balance");
        balances[msg.sender] -= _amount;
        payable(msg.sender).transfer(_amount);
    }
}
"""


@pytest.fixture(scope="session")
def classic_vulnerable() -> str:
    return CLASSIC_VULNERABLE


@pytest.fixture(scope="session")
def guarded_secure() -> str:
    return GUARDED_SECURE


@pytest.fixture(scope="session")
def corpus_root(tmp_path_factory):
    """One full assembly shared across the session (8,000 train + 120
    test records)."""
    root = tmp_path_factory.mktemp("corpus")
    assemble_full(MASTER_SEED, root)
    return root


@pytest.fixture(scope="session")
def corpus_manifest(corpus_root) -> CorpusManifest:
    return CorpusManifest.read(corpus_root)


def predictions_for_matrix(manifest, tn: int, fp: int, fn: int, tp: int) -> list[dict]:
    """Prediction records over the manifest's test split that realize the
    requested confusion matrix; leftover records abstain by omission."""
    test = sorted(
        (r for r in manifest.records if r.split == "test"), key=lambda r: r.id
    )
    vuln = [r for r in test if r.label.value == "vulnerable"]
    secure = [r for r in test if r.label.value == "secure"]
    assert len(vuln) >= tp + fn and len(secure) >= tn + fp
    out = []
    for r in vuln[:tp]:
        out.append({"id": r.id, "prediction": "vulnerable"})
    for r in vuln[tp : tp + fn]:
        out.append({"id": r.id, "prediction": "secure"})
    for r in secure[:tn]:
        out.append({"id": r.id, "prediction": "secure"})
    for r in secure[tn : tn + fp]:
        out.append({"id": r.id, "prediction": "vulnerable"})
    return out
