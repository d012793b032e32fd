#!/usr/bin/env python3
"""Emit a predictions file over a corpus manifest that realizes the
reference confusion matrix {tn 47, fp 4, fn 26, tp 15, 28 abstentions},
for exercising the eval pipeline end to end.

Usage: make_sample_predictions.py MANIFEST_JSONL OUT_JSONL
"""

import json
import sys


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    manifest_path, out_path = sys.argv[1], sys.argv[2]
    test = []
    with open(manifest_path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            if record["split"] == "test":
                test.append(record)
    test.sort(key=lambda r: r["id"])
    vuln = [r for r in test if r["label"] == "vulnerable"]
    secure = [r for r in test if r["label"] == "secure"]
    tp, fn = 15, 26
    tn, fp = 47, 4
    if len(vuln) < tp + fn or len(secure) < tn + fp:
        print("error: manifest test split too small for the reference matrix", file=sys.stderr)
        return 1
    out = []
    out += [{"id": r["id"], "prediction": "vulnerable"} for r in vuln[:tp]]
    out += [{"id": r["id"], "prediction": "secure"} for r in vuln[tp : tp + fn]]
    out += [{"id": r["id"], "prediction": "secure"} for r in secure[:tn]]
    out += [{"id": r["id"], "prediction": "vulnerable"} for r in secure[tn : tn + fp]]
    with open(out_path, "w", encoding="utf-8") as fh:
        for record in out:
            fh.write(json.dumps(record) + "\n")
    print(f"wrote {len(out)} predictions ({len(test) - len(out)} abstain by omission)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
