"""Stand-in simulators speaking the line protocol used by ``tensorgpc adapt``.

Reads lines of space-separated physical coordinates on stdin and writes one
output per line on stdout::

    python -m tensorgpc.stub synthetic_100 < points.txt
"""

import sys

import numpy as np

from tensorgpc.bench import synthetic_100_batch


def _linear(X):
    return X.sum(axis=1)


STUBS = {
    "synthetic_100": synthetic_100_batch,
    "linear": _linear,
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1 or argv[0] not in STUBS:
        sys.stderr.write(f"usage: python -m tensorgpc.stub {{{','.join(sorted(STUBS))}}}\n")
        return 2
    rows = [line.split() for line in sys.stdin if line.strip()]
    if not rows:
        return 0
    try:
        X = np.array(rows, dtype=float)
        y = STUBS[argv[0]](X)
    except Exception as exc:  # report and fail like a real simulator would
        sys.stderr.write(f"stub simulator failed: {exc}\n")
        return 1
    sys.stdout.write("".join(f"{v!r}\n" for v in map(float, y)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
