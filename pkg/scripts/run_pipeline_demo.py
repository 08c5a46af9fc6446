#!/usr/bin/env python3
"""End-to-end demo on the synthetic fruit corpus: classify with the mock
backend, discover topics, build the alignment matrix, diagnose each class,
and print the validation metrics against the golden set."""

import argparse

from taxonomist.alignment import build_alignment, diagnose, export_heatmap
from taxonomist.drift import golden_eval
from taxonomist.fixtures import fruit_corpus, fruit_golden, fruit_profile, fruit_prompt, fruit_schema
from taxonomist.gateway import BackendConfig, classify_corpus, discover_topics, make_classifier
from taxonomist.gateway import DEFAULT_TOPIC_PROMPT


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=200)
    parser.add_argument("--heatmap", default=None, help="write an SVG heatmap here")
    args = parser.parse_args()

    schema = fruit_schema()
    spec = fruit_prompt(schema)
    config = BackendConfig(kind="mock", mock_profile=fruit_profile())
    corpus = fruit_corpus(n=args.docs)

    results = classify_corpus(corpus, spec, schema, config)
    print(f"classified {len(results)} documents, prompt {spec.hash}")

    topics, topic_assign = discover_topics(corpus, DEFAULT_TOPIC_PROMPT, 10, config)
    class_assign = {r.doc_id: r.parent for r in results}
    matrix = build_alignment(class_assign, topic_assign)
    print(f"alignment {len(matrix.rows)}x{len(matrix.cols)}, total {matrix.total()}")
    for diag in diagnose(matrix):
        print(f"  {diag.class_name}: {diag.verdict} (purity {diag.purity:.2f})")
    if args.heatmap:
        print(f"heatmap: {export_heatmap(matrix, args.heatmap, fmt='svg')}")

    report = golden_eval(fruit_golden(), make_classifier(schema, spec, config),
                         schema.parent_names())
    print(f"golden set: accuracy {report.accuracy:.3f}, macro-F1 {report.macro_f1:.3f}")


if __name__ == "__main__":
    main()
