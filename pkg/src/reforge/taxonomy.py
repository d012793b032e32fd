"""Shared label, subtype, and provenance vocabulary."""

from __future__ import annotations

from enum import Enum


class Label(str, Enum):
    VULNERABLE = "vulnerable"
    SECURE = "secure"


class Kind(str, Enum):
    VULN_BASIC = "vuln_basic"
    VULN_ADVANCED = "vuln_advanced"
    SECURE_BASIC = "secure_basic"
    SECURE_ADVANCED = "secure_advanced"


class Subtype(str, Enum):
    SINGLE_FUNCTION = "single_function"
    CROSS_FUNCTION = "cross_function"
    CROSS_CONTRACT = "cross_contract"
    READ_ONLY = "read_only"


class SecurePattern(str, Enum):
    CEI = "cei"
    REENTRANCY_GUARD = "reentrancy_guard"
    PULL_PAYMENT = "pull_payment"
    MUTEX = "mutex"


class Provenance(str, Enum):
    SYNTHETIC_BASIC = "synthetic_basic"
    SYNTHETIC_ADVANCED = "synthetic_advanced"
    MODERNIZED_REAL = "modernized_real"
    REAL_EXPLOIT = "real_exploit"


class Defense(str, Enum):
    NONREENTRANT_MODIFIER = "nonreentrant_modifier"
    MUTEX_FLAG = "mutex_flag"
    CEI_ORDER = "cei_order"
    PULL_PAYMENT = "pull_payment"
    BLOCK_LIMIT = "block_limit"
    GAS_GUARD = "gas_guard"
    TIMESTAMP_THROTTLE = "timestamp_throttle"
    DELEGATION_CHECK = "delegation_check"


class Classification(str, Enum):
    VULNERABLE = "vulnerable"
    SECURE = "secure"
    INCONCLUSIVE = "inconclusive"
