"""Corpus assembly, manifest persistence, and stratified splitting."""

import collections
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reforge.corpus import (
    CorpusManifest,
    ManifestRecord,
    ShortfallError,
    assemble_test,
    stratified_split,
)
from reforge.rng import Stream
from reforge.taxonomy import Label, Provenance, Subtype
from tests.conftest import MASTER_SEED


def test_census_training_counts(corpus_manifest):
    train = [r for r in corpus_manifest.records if r.split == "train"]
    assert len(train) == 8000
    by = collections.Counter((r.label.value, r.provenance.value) for r in train)
    assert by[("vulnerable", "synthetic_basic")] == 2800
    assert by[("vulnerable", "synthetic_advanced")] == 900
    assert by[("vulnerable", "modernized_real")] == 300
    assert by[("secure", "synthetic_basic")] == 2800
    assert by[("secure", "synthetic_advanced")] == 800
    assert by[("secure", "modernized_real")] == 400


def test_census_test_counts(corpus_manifest):
    test = [r for r in corpus_manifest.records if r.split == "test"]
    assert len(test) == 120
    vuln = [r for r in test if r.label is Label.VULNERABLE]
    secure = [r for r in test if r.label is Label.SECURE]
    assert len(vuln) == 57
    assert len(secure) == 63
    assert sum(r.provenance is Provenance.MODERNIZED_REAL for r in vuln) == 44
    assert sum(r.provenance is Provenance.REAL_EXPLOIT for r in vuln) == 13


def test_advanced_subtypes_even(corpus_manifest):
    sub = collections.Counter(
        r.subtype
        for r in corpus_manifest.records
        if r.split == "train"
        and r.provenance is Provenance.SYNTHETIC_ADVANCED
        and r.label is Label.VULNERABLE
    )
    assert all(sub[s] == 225 for s in Subtype)


def test_test_set_covers_all_subtypes(corpus_manifest):
    covered = {
        r.subtype
        for r in corpus_manifest.records
        if r.split == "test" and r.subtype is not None
    }
    assert covered == set(Subtype)


def test_real_exploit_records_are_test_split(corpus_manifest):
    for r in corpus_manifest.records:
        if r.provenance is Provenance.REAL_EXPLOIT:
            assert r.split == "test"


def test_standins_flagged_for_review(corpus_manifest):
    standins = [
        r
        for r in corpus_manifest.records
        if r.provenance is Provenance.MODERNIZED_REAL and r.split == "train"
    ]
    assert len(standins) == 700
    assert all(r.review_status == "needs_review" for r in standins)


def test_no_duplicate_hashes(corpus_manifest):
    ids = [r.id for r in corpus_manifest.records]
    assert len(ids) == len(set(ids))


def test_files_exist_and_parse_sample(corpus_root, corpus_manifest):
    from reforge.sol import parse

    sample = corpus_manifest.records[:: len(corpus_manifest.records) // 64]
    for r in sample:
        path = corpus_root / r.file
        assert path.exists()
        parse(path.read_text(encoding="utf-8"))


def test_manifest_round_trip(corpus_root, corpus_manifest):
    again = CorpusManifest.read(corpus_root)
    assert again.content_hash() == corpus_manifest.content_hash()
    assert again.master_seed == MASTER_SEED
    assert again.records == corpus_manifest.records


def test_manifest_key_order(corpus_root):
    first = (corpus_root / "manifest.jsonl").read_text(encoding="utf-8").splitlines()[0]
    assert list(json.loads(first)) == [
        "id", "file", "label", "subtype", "provenance", "split", "seed",
        "solidity_version", "verified_by", "review_status",
    ]


def test_shortfall_without_standins(tmp_path):
    with pytest.raises(ShortfallError):
        assemble_test(1, tmp_path / "c", allow_standins=False)


def test_exploit_dir_ingestion(tmp_path, corpus_root):
    # hand the assembler 13 existing vulnerable files as the exploit set
    exploits = tmp_path / "exploits"
    exploits.mkdir()
    manifest = CorpusManifest.read(corpus_root)
    vuln_sources = [
        (corpus_root / r.file).read_text(encoding="utf-8")
        for r in manifest.records
        if r.split == "train" and r.label is Label.VULNERABLE
    ][:13]
    for i, source in enumerate(vuln_sources):
        (exploits / f"exploit_{i:02d}.sol").write_text(source, encoding="utf-8")
    out = tmp_path / "corpus"
    test_manifest = assemble_test(2, out, exploit_dir=exploits)
    exploit_records = [
        r for r in test_manifest.records if r.provenance is Provenance.REAL_EXPLOIT
    ]
    assert len(exploit_records) == 13
    assert all(r.split == "test" for r in exploit_records)
    assert all(r.verified_by == "external" for r in exploit_records)


# ---------------------------------------------------------------------------
# stratified_split


def _fake_records(n, stream, labels=("vulnerable", "secure"), subtypes=(None,)):
    records = []
    for i in range(n):
        records.append(
            ManifestRecord(
                id=f"r{i:05d}",
                file=f"x/{i}.sol",
                label=Label(stream.choice(list(labels))),
                subtype=stream.choice(list(subtypes)),
                provenance=Provenance.SYNTHETIC_BASIC,
                split="train",
                seed=i,
                solidity_version="^0.8.0",
                verified_by="both",
                review_status="auto_verified",
            )
        )
    return records


def test_split_even_classes():
    stream = Stream(3)
    records = _fake_records(50, stream, labels=("vulnerable",)) + _fake_records(
        50, Stream(4), labels=("secure",)
    )
    for i, r in enumerate(records):
        r.id = f"r{i:05d}"
    assignment = stratified_split(records, {"train": 0.8, "test": 0.2}, seed=1)
    by = collections.Counter(
        (r.label.value, assignment[r.id]) for r in records
    )
    assert by[("vulnerable", "train")] == 40
    assert by[("vulnerable", "test")] == 10
    assert by[("secure", "train")] == 40
    assert by[("secure", "test")] == 10


def test_split_single_record_stratum_goes_to_larger_fraction():
    records = _fake_records(1, Stream(9))
    assignment = stratified_split(records, {"train": 0.8, "test": 0.2}, seed=5)
    assert assignment[records[0].id] == "train"


def test_split_deterministic():
    records = _fake_records(200, Stream(11), subtypes=(None, Subtype.READ_ONLY))
    a = stratified_split(records, {"train": 0.7, "test": 0.3}, seed=2)
    b = stratified_split(records, {"train": 0.7, "test": 0.3}, seed=2)
    assert a == b


def test_split_rejects_bad_fractions():
    with pytest.raises(ValueError):
        stratified_split([], {"train": 0.5, "test": 0.2}, seed=0)


@given(st.integers(min_value=0, max_value=2**31))
@settings(max_examples=20, deadline=None)
def test_split_deviation_within_one_record(seed):
    stream = Stream(seed)
    n = stream.randint(1, 1000)
    records = _fake_records(
        n, stream, subtypes=(None, Subtype.SINGLE_FUNCTION, Subtype.CROSS_FUNCTION)
    )
    fractions = {"train": 0.8, "test": 0.2}
    assignment = stratified_split(records, fractions, seed=seed)
    strata = collections.defaultdict(list)
    for r in records:
        strata[(r.label.value, r.subtype)].append(r)
    for key, group in strata.items():
        got_train = sum(assignment[r.id] == "train" for r in group)
        expect = 0.8 * len(group)
        assert abs(got_train - expect) <= 1 + 1e-9
