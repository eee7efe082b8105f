"""Independent mAP reference for the three-video fixture.

  ap_reference.py --write FIXTURE   recompute and store "expected"
  ap_reference.py --check FIXTURE   recompute and compare with the stored values
"""

import argparse
import json
import sys


def average_precision(scores, labels):
    ranked = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    positives = sum(labels)
    if positives == 0:
        return None
    total, seen = 0.0, 0
    for k, i in enumerate(ranked, start=1):
        if labels[i]:
            seen += 1
            total += seen / k
    return total / positives


def split_mean(classes, ap):
    values = [ap[c] for c in classes if c in ap]
    return sum(values) / len(values) if values else None


def compute(fixture):
    per_ratio = {}
    for ratio, block in sorted(fixture["ratios"].items(), key=lambda kv: int(kv[0])):
        n_classes = len(block["scores"][0])
        ap = {}
        for c in range(n_classes):
            labels = [c in remaining for remaining in block["remaining"]]
            value = average_precision([row[c] for row in block["scores"]], labels)
            if value is not None:
                ap[c] = value
        per_ratio[ratio] = {name: split_mean(classes, ap) for name, classes in fixture["splits"].items()}

    def over_ratios(name):
        values = [r[name] for r in per_ratio.values() if r[name] is not None]
        return sum(values) / len(values) if values else None

    return {
        "all": over_ratios("all"),
        "freq": over_ratios("freq"),
        "rare": over_ratios("rare"),
        "per_ratio": per_ratio,
    }


def sklearn_crosscheck(fixture):
    try:
        from sklearn.metrics import average_precision_score
    except ImportError:
        return
    for block in fixture["ratios"].values():
        for c in range(len(block["scores"][0])):
            labels = [int(c in remaining) for remaining in block["remaining"]]
            if not any(labels):
                continue
            scores = [row[c] for row in block["scores"]]
            ours = average_precision(scores, labels)
            theirs = average_precision_score(labels, scores)
            assert abs(ours - theirs) < 1e-12, (c, ours, theirs)


def main():
    parser = argparse.ArgumentParser()
    mode = parser.add_mutually_exclusive_group(required=True)
    mode.add_argument("--write", action="store_true")
    mode.add_argument("--check", action="store_true")
    parser.add_argument("fixture")
    args = parser.parse_args()

    with open(args.fixture) as f:
        fixture = json.load(f)
    sklearn_crosscheck(fixture)
    expected = compute(fixture)
    if args.write:
        fixture["expected"] = expected
        with open(args.fixture, "w") as f:
            json.dump(fixture, f, indent=2)
            f.write("\n")
        return 0

    stored = fixture["expected"]
    for key in ("all", "freq", "rare"):
        if abs(stored[key] - expected[key]) > 1e-12:
            print(f"{key}: stored {stored[key]} recomputed {expected[key]}")
            return 1
    print("ok", json.dumps({k: expected[k] for k in ("all", "freq", "rare")}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
