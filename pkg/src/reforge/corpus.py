"""Corpus assembly: generate, ingest, deduplicate, split, persist.

Layout on disk:

    <root>/train/contracts/<id>.sol
    <root>/test/contracts/<id>.sol
    <root>/manifest.jsonl   one record per line, fixed key order
    <root>/meta.json        schema version, master seed, derived counts

External datasets are ingestion inputs, never vendored. When a directory
is missing or short, deterministic legacy-style stand-ins fill the quota
and are flagged `needs_review` so the full pipeline stays exercisable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .balancer import defeaturize, featurize, rebalance_subtypes, smote
from .detector import analyze
from .generator import GeneratedContract, GenParams, draw_params, generate
from .legacy import gen_legacy
from .modernizer import UnsupportedConstruct, modernize
from .rng import Stream, derive_stream
from .sol import ParseError, parse
from .taxonomy import Kind, Label, Provenance, SecurePattern, Subtype

SCHEMA_VERSION = "1"

MANIFEST_KEYS = [
    "id", "file", "label", "subtype", "provenance", "split", "seed",
    "solidity_version", "verified_by", "review_status",
]

# index bases partition the master seed's stream space per block
IDX_VULN_BASIC = 0
IDX_VULN_ADVANCED = 10_000_000
IDX_ADV_SYNTH = 15_000_000
IDX_SECURE_BASIC = 20_000_000
IDX_SECURE_ADVANCED = 30_000_000
IDX_TRAIN_VULN_REAL = 40_000_000
IDX_TRAIN_SECURE_REAL = 50_000_000
IDX_TEST_STUDY = 60_000_000
IDX_TEST_EXPLOIT = 70_000_000
IDX_TEST_SECURE = 80_000_000
RETRY_STRIDE = 1_000_000_000

TRAIN_COUNTS = {
    "vuln_real": 300,
    "vuln_basic": 2800,
    "vuln_advanced": 900,
    "secure_real": 400,
    "secure_basic": 2800,
    "secure_advanced": 800,
}
TEST_COUNTS = {"study_vuln": 44, "exploit_vuln": 13, "secure": 63}
ADVANCED_INITIAL_DRAWS = 600
SMOTE_K = 5


class ShortfallError(RuntimeError):
    """External directory supplied fewer contracts than requested and
    stand-ins are disabled."""


@dataclass
class ManifestRecord:
    id: str
    file: str
    label: Label
    subtype: Optional[Subtype]
    provenance: Provenance
    split: str
    seed: int
    solidity_version: str
    verified_by: str
    review_status: str

    def to_json(self) -> str:
        data = {
            "id": self.id,
            "file": self.file,
            "label": self.label.value,
            "subtype": self.subtype.value if self.subtype else None,
            "provenance": self.provenance.value,
            "split": self.split,
            "seed": self.seed,
            "solidity_version": self.solidity_version,
            "verified_by": self.verified_by,
            "review_status": self.review_status,
        }
        return json.dumps({k: data[k] for k in MANIFEST_KEYS})

    @classmethod
    def from_json(cls, line: str) -> "ManifestRecord":
        data = json.loads(line)
        return cls(
            id=data["id"],
            file=data["file"],
            label=Label(data["label"]),
            subtype=Subtype(data["subtype"]) if data["subtype"] else None,
            provenance=Provenance(data["provenance"]),
            split=data["split"],
            seed=data["seed"],
            solidity_version=data["solidity_version"],
            verified_by=data["verified_by"],
            review_status=data["review_status"],
        )


@dataclass
class CorpusManifest:
    schema_version: str = SCHEMA_VERSION
    master_seed: int = 0
    records: list[ManifestRecord] = field(default_factory=list)

    @property
    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.records:
            key = f"{r.label.value}/{r.provenance.value}/{r.split}"
            out[key] = out.get(key, 0) + 1
        return dict(sorted(out.items()))

    def manifest_bytes(self) -> bytes:
        return "".join(r.to_json() + "\n" for r in self.records).encode("utf-8")

    def content_hash(self) -> str:
        return hashlib.sha256(self.manifest_bytes()).hexdigest()

    def write(self, root) -> None:
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        (root / "manifest.jsonl").write_bytes(self.manifest_bytes())
        meta = {
            "schema_version": self.schema_version,
            "master_seed": self.master_seed,
            "counts": self.counts,
        }
        (root / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def read(cls, root) -> "CorpusManifest":
        root = Path(root)
        meta = json.loads((root / "meta.json").read_text(encoding="utf-8"))
        records = [
            ManifestRecord.from_json(line)
            for line in (root / "manifest.jsonl").read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        manifest = cls(
            schema_version=meta["schema_version"],
            master_seed=meta["master_seed"],
            records=records,
        )
        if meta["counts"] != manifest.counts:
            raise ValueError("manifest counts do not match records")
        ids = [r.id for r in records]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate ids in manifest")
        return manifest


# ---------------------------------------------------------------------------
# assembly helpers


def _pragma_of(source: str) -> str:
    try:
        return parse(source).pragma_req
    except ParseError:
        return ""


class _Dedup:
    def __init__(self):
        self.seen: set[str] = set()

    def fresh(self, contract: GeneratedContract) -> bool:
        if contract.id in self.seen:
            return False
        self.seen.add(contract.id)
        return True


def _gen_unique(
    master_seed: int,
    base_index: int,
    dedup: _Dedup,
    kind: Kind,
    subtype: Optional[Subtype] = None,
    secure_pattern: Optional[SecurePattern] = None,
    family: Optional[int] = None,
    params: Optional[GenParams] = None,
) -> GeneratedContract:
    """Generate at a stream index, retrying at strided indices on hash
    collision so output is deterministic."""
    for attempt in range(16):
        index = base_index + attempt * RETRY_STRIDE
        stream = derive_stream(master_seed, index)
        if params is not None and attempt == 0:
            p = params
        else:
            p = draw_params(
                kind, stream.next_u64(), stream,
                subtype=subtype, secure_pattern=secure_pattern, family=family,
            )
        contract = generate(p)
        if dedup.fresh(contract):
            return contract
    raise RuntimeError("could not generate a unique contract after 16 attempts")


def _verified_by(contract: GeneratedContract) -> str:
    verdict = analyze(parse(contract.source))
    agrees = verdict.classification.value == contract.label.value
    decidable = contract.provenance is Provenance.SYNTHETIC_BASIC or (
        contract.provenance is Provenance.SYNTHETIC_ADVANCED
        and contract.label is Label.VULNERABLE
        and contract.subtype in (Subtype.SINGLE_FUNCTION, Subtype.CROSS_FUNCTION)
    )
    if decidable and not agrees:
        raise RuntimeError(
            f"generator/detector disagreement on decidable contract {contract.id}"
        )
    return "both" if agrees else "generator"


def _record_for(
    contract: GeneratedContract, split: str, review_status: str = "auto_verified",
    provenance: Optional[Provenance] = None,
) -> tuple[ManifestRecord, str]:
    verified = _verified_by(contract)
    record = ManifestRecord(
        id=contract.id,
        file=f"{split}/contracts/{contract.id}.sol",
        label=contract.label,
        subtype=contract.subtype,
        provenance=provenance or contract.provenance,
        split=split,
        seed=contract.params.seed,
        solidity_version=_pragma_of(contract.source),
        verified_by=verified,
        review_status=review_status,
    )
    return record, contract.source


def _write_contract(root: Path, record: ManifestRecord, source: str) -> None:
    path = root / record.file
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(source, encoding="utf-8")


# ---------------------------------------------------------------------------
# synthetic blocks


def _assemble_vuln_basic(master_seed: int, dedup: _Dedup, n: int) -> list[GeneratedContract]:
    # uniform across the four template families
    out = []
    for i in range(n):
        out.append(
            _gen_unique(master_seed, IDX_VULN_BASIC + i, dedup, Kind.VULN_BASIC, family=i % 4)
        )
    return out


def _assemble_vuln_advanced(master_seed: int, dedup: _Dedup, n: int) -> list[GeneratedContract]:
    """Draw an uneven initial pool, then SMOTE the per-subtype shortfall
    so the four subtypes come out even."""
    subtypes = list(Subtype)
    allocation = rebalance_subtypes({s: 0 for s in subtypes}, n)

    initial: dict[Subtype, list[GenParams]] = {s: [] for s in subtypes}
    for i in range(ADVANCED_INITIAL_DRAWS):
        stream = derive_stream(master_seed, IDX_VULN_ADVANCED + i)
        seed = stream.next_u64()
        subtype = stream.choice(subtypes)
        initial[subtype].append(
            draw_params(Kind.VULN_ADVANCED, seed, stream, subtype=subtype)
        )

    contracts: list[GeneratedContract] = []
    synth_index = 0
    for subtype in subtypes:
        goal = allocation[subtype]
        pool = initial[subtype][:goal]
        shortfall = goal - len(pool)
        final_params = list(pool)
        if shortfall > 0:
            vectors = [featurize(p) for p in initial[subtype]]
            smote_stream = derive_stream(master_seed, IDX_ADV_SYNTH + subtypes.index(subtype))
            synthetic = smote(vectors, SMOTE_K, shortfall, smote_stream)
            for vec in synthetic:
                seed_stream = derive_stream(master_seed, IDX_ADV_SYNTH + 100 + synth_index)
                synth_index += 1
                final_params.append(
                    defeaturize(vec, kind=Kind.VULN_ADVANCED, seed=seed_stream.next_u64())
                )
        for k, p in enumerate(final_params):
            contracts.append(
                _gen_unique(
                    master_seed,
                    IDX_ADV_SYNTH + 10_000 + subtypes.index(subtype) * 10_000 + k,
                    dedup,
                    Kind.VULN_ADVANCED,
                    subtype=subtype,
                    params=p,
                )
            )
    return contracts


def _assemble_secure_basic(master_seed: int, dedup: _Dedup, n: int) -> list[GeneratedContract]:
    patterns = list(SecurePattern)
    out = []
    for i in range(n):
        out.append(
            _gen_unique(
                master_seed, IDX_SECURE_BASIC + i, dedup, Kind.SECURE_BASIC,
                secure_pattern=patterns[i % 4],
            )
        )
    return out


def _assemble_secure_advanced(master_seed: int, dedup: _Dedup, n: int) -> list[GeneratedContract]:
    return [
        _gen_unique(master_seed, IDX_SECURE_ADVANCED + i, dedup, Kind.SECURE_ADVANCED)
        for i in range(n)
    ]


# ---------------------------------------------------------------------------
# ingestion with stand-ins


def _ingest_dir(dirpath, needed: int, label: Label) -> list[tuple[str, int]]:
    """Modernized sources from an external directory, oldest-name-first,
    up to `needed`. Unparseable/unsupported files are skipped."""
    out: list[tuple[str, int]] = []
    if not dirpath:
        return out
    dirpath = Path(dirpath)
    if not dirpath.is_dir():
        return out
    for path in sorted(dirpath.glob("*.sol")):
        if len(out) >= needed:
            break
        try:
            result = modernize(path.read_text(encoding="utf-8"))
        except (ParseError, UnsupportedConstruct):
            continue
        out.append((result.source, 0))
    return out


def _standin_block(
    master_seed: int,
    base_index: int,
    count: int,
    label: Label,
    dedup: _Dedup,
    subtype_cycle: list[Optional[Subtype]],
) -> list[tuple[str, int, Optional[Subtype]]]:
    """Legacy-generated, modernized stand-ins for missing external data."""
    out = []
    attempt_base = 0
    i = 0
    while len(out) < count:
        index = base_index + i + attempt_base
        stream = derive_stream(master_seed, index)
        seed = stream.next_u64()
        subtype = subtype_cycle[len(out) % len(subtype_cycle)]
        source = gen_legacy(seed, label, subtype)
        modern = modernize(source).source
        digest = hashlib.sha256(modern.encode("utf-8")).hexdigest()
        i += 1
        if digest in dedup.seen:
            continue
        dedup.seen.add(digest)
        out.append((modern, seed, subtype))
    return out


def _real_records(
    sources_seeds: list[tuple[str, int, Optional[Subtype]]],
    split: str,
    label: Label,
    provenance: Provenance,
    review_status: str,
    verified_by: Optional[str] = None,
) -> list[tuple[ManifestRecord, str]]:
    out = []
    for source, seed, subtype in sources_seeds:
        digest = hashlib.sha256(source.encode("utf-8")).hexdigest()
        verdict = analyze(parse(source))
        vb = verified_by
        if vb is None:
            vb = "both" if verdict.classification.value == label.value else "generator"
        record = ManifestRecord(
            id=digest,
            file=f"{split}/contracts/{digest}.sol",
            label=label,
            subtype=subtype,
            provenance=provenance,
            split=split,
            seed=seed,
            solidity_version=_pragma_of(source),
            verified_by=vb,
            review_status=review_status,
        )
        out.append((record, source))
    return out


# ---------------------------------------------------------------------------
# public assembly API


def assemble_training(
    seed: int,
    out_dir,
    external_vuln_dir=None,
    external_secure_dir=None,
    allow_standins: bool = True,
) -> CorpusManifest:
    """Build the 8,000-contract training corpus: 300 + 2,800 + 900
    vulnerable and 400 + 2,800 + 800 secure, deduplicated, deterministic
    under `seed`."""
    root = Path(out_dir)
    dedup = _Dedup()
    pairs: list[tuple[ManifestRecord, str]] = []

    # ingested / stand-in modernized real contracts
    for dirpath, needed, label, base in (
        (external_vuln_dir, TRAIN_COUNTS["vuln_real"], Label.VULNERABLE, IDX_TRAIN_VULN_REAL),
        (external_secure_dir, TRAIN_COUNTS["secure_real"], Label.SECURE, IDX_TRAIN_SECURE_REAL),
    ):
        ingested = _ingest_dir(dirpath, needed, label)
        for source, _ in ingested:
            digest = hashlib.sha256(source.encode("utf-8")).hexdigest()
            dedup.seen.add(digest)
        pairs.extend(
            _real_records(
                [(s, 0, None) for s, _ in ingested],
                "train", label, Provenance.MODERNIZED_REAL,
                review_status="unreviewed", verified_by="external",
            )
        )
        missing = needed - len(ingested)
        if missing > 0:
            if not allow_standins:
                raise ShortfallError(
                    f"{label.value} external dir supplied {len(ingested)} of {needed}"
                )
            cycle = (
                [Subtype.SINGLE_FUNCTION, Subtype.SINGLE_FUNCTION, Subtype.CROSS_FUNCTION]
                if label is Label.VULNERABLE
                else [None]
            )
            standins = _standin_block(seed, base, missing, label, dedup, cycle)
            pairs.extend(
                _real_records(
                    standins, "train", label, Provenance.MODERNIZED_REAL,
                    review_status="needs_review",
                )
            )

    for contract in _assemble_vuln_basic(seed, dedup, TRAIN_COUNTS["vuln_basic"]):
        pairs.append(_record_for(contract, "train"))
    for contract in _assemble_vuln_advanced(seed, dedup, TRAIN_COUNTS["vuln_advanced"]):
        pairs.append(_record_for(contract, "train"))
    for contract in _assemble_secure_basic(seed, dedup, TRAIN_COUNTS["secure_basic"]):
        pairs.append(_record_for(contract, "train"))
    for contract in _assemble_secure_advanced(seed, dedup, TRAIN_COUNTS["secure_advanced"]):
        pairs.append(_record_for(contract, "train"))

    manifest = CorpusManifest(master_seed=seed, records=[r for r, _ in pairs])
    for record, source in pairs:
        _write_contract(root, record, source)
    return manifest


def assemble_test(
    seed: int,
    out_dir,
    study_dir=None,
    exploit_dir=None,
    allow_standins: bool = True,
) -> CorpusManifest:
    """Build the 120-contract test set: 57 vulnerable (44 study-derived +
    13 production exploits) and 63 secure, covering all four subtypes."""
    root = Path(out_dir)
    dedup = _Dedup()
    pairs: list[tuple[ManifestRecord, str]] = []

    # the study dataset may be split into vulnerable/ and secure/ subdirs
    study_vuln_dir = study_dir
    study_secure_dir = None
    if study_dir is not None:
        base = Path(study_dir)
        if (base / "vulnerable").is_dir():
            study_vuln_dir = base / "vulnerable"
        if (base / "secure").is_dir():
            study_secure_dir = base / "secure"

    # 44 vulnerable from the study dataset (modernized)
    ingested = _ingest_dir(study_vuln_dir, TEST_COUNTS["study_vuln"], Label.VULNERABLE)
    for source, _ in ingested:
        dedup.seen.add(hashlib.sha256(source.encode("utf-8")).hexdigest())
    pairs.extend(
        _real_records(
            [(s, 0, None) for s, _ in ingested],
            "test", Label.VULNERABLE, Provenance.MODERNIZED_REAL,
            review_status="unreviewed", verified_by="external",
        )
    )
    missing = TEST_COUNTS["study_vuln"] - len(ingested)
    if missing > 0:
        if not allow_standins:
            raise ShortfallError(f"study dir supplied {len(ingested)} of 44")
        standins = _standin_block(
            seed, IDX_TEST_STUDY, missing, Label.VULNERABLE, dedup,
            [Subtype.SINGLE_FUNCTION, Subtype.CROSS_FUNCTION],
        )
        pairs.extend(
            _real_records(
                standins, "test", Label.VULNERABLE, Provenance.MODERNIZED_REAL,
                review_status="needs_review",
            )
        )

    # 13 vulnerable from documented production exploits
    exploit_ingested = _ingest_dir(exploit_dir, TEST_COUNTS["exploit_vuln"], Label.VULNERABLE)
    for source, _ in exploit_ingested:
        dedup.seen.add(hashlib.sha256(source.encode("utf-8")).hexdigest())
    pairs.extend(
        _real_records(
            [(s, 0, None) for s, _ in exploit_ingested],
            "test", Label.VULNERABLE, Provenance.REAL_EXPLOIT,
            review_status="unreviewed", verified_by="external",
        )
    )
    missing = TEST_COUNTS["exploit_vuln"] - len(exploit_ingested)
    if missing > 0:
        if not allow_standins:
            raise ShortfallError(f"exploit dir supplied {len(exploit_ingested)} of 13")
        subtypes = list(Subtype)
        for j in range(missing):
            contract = _gen_unique(
                seed, IDX_TEST_EXPLOIT + j, dedup, Kind.VULN_ADVANCED,
                subtype=subtypes[j % 4],
            )
            pairs.append(
                _record_for(
                    contract, "test",
                    review_status="needs_review",
                    provenance=Provenance.REAL_EXPLOIT,
                )
            )

    # 63 secure: study secure pool first, then basic secure stand-ins
    secure_ingested = _ingest_dir(study_secure_dir, TEST_COUNTS["secure"], Label.SECURE)
    for source, _ in secure_ingested:
        dedup.seen.add(hashlib.sha256(source.encode("utf-8")).hexdigest())
    pairs.extend(
        _real_records(
            [(s, 0, None) for s, _ in secure_ingested],
            "test", Label.SECURE, Provenance.MODERNIZED_REAL,
            review_status="unreviewed", verified_by="external",
        )
    )
    patterns = list(SecurePattern)
    for j in range(TEST_COUNTS["secure"] - len(secure_ingested)):
        contract = _gen_unique(
            seed, IDX_TEST_SECURE + j, dedup, Kind.SECURE_BASIC,
            secure_pattern=patterns[j % 4],
        )
        pairs.append(_record_for(contract, "test", review_status="needs_review"))

    manifest = CorpusManifest(master_seed=seed, records=[r for r, _ in pairs])
    for record, source in pairs:
        _write_contract(root, record, source)
    return manifest


def assemble_full(
    seed: int,
    out_dir,
    external_vuln_dir=None,
    external_secure_dir=None,
    study_dir=None,
    exploit_dir=None,
    allow_standins: bool = True,
) -> CorpusManifest:
    """Train + test assembly with one combined manifest at the root."""
    train = assemble_training(
        seed, out_dir,
        external_vuln_dir=external_vuln_dir,
        external_secure_dir=external_secure_dir,
        allow_standins=allow_standins,
    )
    test = assemble_test(
        seed, out_dir,
        study_dir=study_dir,
        exploit_dir=exploit_dir,
        allow_standins=allow_standins,
    )
    manifest = CorpusManifest(master_seed=seed, records=train.records + test.records)
    manifest.write(out_dir)
    return manifest


# ---------------------------------------------------------------------------
# stratified split


def stratified_split(records, fractions: dict[str, float], seed: int) -> dict[str, str]:
    """Assign records to named splits so that each (label, subtype)
    stratum deviates from the requested fractions by at most one record.
    Deterministic under `seed`."""
    total_fraction = sum(fractions.values())
    if abs(total_fraction - 1.0) > 1e-9:
        raise ValueError("fractions must sum to 1")
    strata: dict[tuple, list] = {}
    for r in records:
        key = (str(r.label), str(r.subtype) if r.subtype else "")
        strata.setdefault(key, []).append(r)

    assignment: dict[str, str] = {}
    names = list(fractions)
    for key in sorted(strata):
        group = sorted(strata[key], key=lambda r: r.id)
        stream = Stream(seed ^ len(group))
        stream.shuffle(group)
        n = len(group)
        quotas = [fractions[name] * n for name in names]
        floors = [int(q) for q in quotas]
        remainder = n - sum(floors)
        by_frac = sorted(
            range(len(names)), key=lambda i: (quotas[i] - floors[i], fractions[names[i]]),
            reverse=True,
        )
        for i in by_frac[:remainder]:
            floors[i] += 1
        pos = 0
        for name, take in zip(names, floors):
            for r in group[pos : pos + take]:
                assignment[r.id] = name
            pos += take
    return assignment
