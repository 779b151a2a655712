"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times each kernel on fixed random inputs, then one full oracle request per
domain with each backend swapped into ``exedec_lab.kernels``.
"""

import argparse
import random
import timeit
from contextlib import contextmanager

from exedec_lab import _pykernels, kernels
from exedec_lab.engine import OracleBackend
from exedec_lab.syntax import Domain
from exedec_lab.taskgen import build_corpus

try:
    from exedec_lab import _ckernels
except ImportError:
    _ckernels = None

NAMES = ("common_prefix", "lcs_length", "levenshtein", "scanl1", "zip_with")


@contextmanager
def use(impl):
    saved = {n: getattr(kernels, n) for n in NAMES}
    for n in NAMES:
        setattr(kernels, n, getattr(impl, n))
    try:
        yield
    finally:
        for n, f in saved.items():
            setattr(kernels, n, f)


def kernel_cases(rng):
    xs = tuple(rng.randint(-50, 50) for _ in range(12))
    ys = tuple(rng.randint(-50, 50) for _ in range(12))
    a = "".join(rng.choice("abcdef ,.") for _ in range(30))
    b = "".join(rng.choice("abcdef ,.") for _ in range(30))
    return {
        "lcs_length": lambda k: k.lcs_length(xs, ys),
        "levenshtein": lambda k: k.levenshtein(a, b),
        "common_prefix": lambda k: k.common_prefix(a, a[:20] + b),
        "scanl1": lambda k: k.scanl1(4, xs),
        "zip_with": lambda k: k.zip_with(0, xs, ys),
    }


def best(fn, number, repeat):
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    impls = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    if _ckernels is None:
        print("compiled kernels not built; timing the Python fallback only")

    print(f"{'kernel':<16}" + "".join(f"{name:>14}" for name, _ in impls) + "   speed-up")
    for name, case in kernel_cases(random.Random(0)).items():
        times = [best(lambda: case(impl), 2000, args.repeat) for _, impl in impls]
        ratio = f"{times[0] / times[-1]:9.1f}x" if len(times) > 1 else ""
        print(f"{name:<16}" + "".join(f"{t * 1e6:12.2f}us" for t in times) + "  " + ratio)

    print()
    print(f"{'oracle request':<16}" + "".join(f"{name:>14}" for name, _ in impls) + "   speed-up")
    for domain in (Domain.DEEPCODER, Domain.ROBUSTFILL):
        specs = [t.spec for t in build_corpus(domain, "length", "test", 5, 1)]
        times = []
        for _, impl in impls:
            with use(impl):
                oracle = OracleBackend()
                times.append(best(lambda: [oracle.subprogram(s, domain, 10) for s in specs], 1, args.repeat) / 5)
        ratio = f"{times[0] / times[-1]:9.1f}x" if len(times) > 1 else ""
        print(f"{domain.value:<16}" + "".join(f"{t * 1e3:12.2f}ms" for t in times) + "  " + ratio)


if __name__ == "__main__":
    main()
