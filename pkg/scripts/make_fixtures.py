#!/usr/bin/env python3
"""Write the bundled fruit-feedback fixtures (corpus, schema, mock profile,
golden set) to a directory for CLI experiments."""

import argparse

from taxonomist.fixtures import write_fixture_files


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="fixtures")
    parser.add_argument("--docs", type=int, default=200)
    args = parser.parse_args()
    paths = write_fixture_files(args.out_dir, n_docs=args.docs)
    for kind, path in paths.items():
        print(f"{kind}: {path}")


if __name__ == "__main__":
    main()
