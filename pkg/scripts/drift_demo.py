#!/usr/bin/env python3
"""Drift-monitoring demo: build a reference window from the fixture corpus,
shift the current window's class proportions, and print the combined verdict."""

import argparse

from taxonomist.drift import distributional_drift, evaluate_drift, make_window
from taxonomist.fixtures import fruit_corpus, fruit_profile, fruit_prompt, fruit_schema
from taxonomist.gateway import BackendConfig, ClassificationResult, classify_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=200)
    parser.add_argument("--shift", type=int, default=40,
                        help="documents reassigned to the first class")
    args = parser.parse_args()

    schema = fruit_schema()
    spec = fruit_prompt(schema)
    config = BackendConfig(kind="mock", mock_profile=fruit_profile())
    corpus = fruit_corpus(n=args.docs)
    results = classify_corpus(corpus, spec, schema, config)

    ref = make_window("w-ref", "", "", results, schema)
    shifted = [
        ClassificationResult(doc_id=r.doc_id, parent="Red Fruits", child="Cranberry",
                             raw_response=r.raw_response, prompt_hash=r.prompt_hash,
                             backend_id=r.backend_id)
        if i < args.shift else r
        for i, r in enumerate(results)
    ]
    cur = make_window("w-cur", "", "", shifted, schema)

    chi2, alerts = distributional_drift(ref, cur)
    report = evaluate_drift(chi2, alerts)
    print(f"chi2 = {chi2.statistic:.4f}, p = {chi2.p_value:.4f}")
    for alert in alerts:
        print(f"  p-chart alert: {alert.class_name} at {alert.proportion:.3f} "
              f"outside [{alert.lower:.3f}, {alert.upper:.3f}]")
    print(f"verdict: {report.verdict}")


if __name__ == "__main__":
    main()
