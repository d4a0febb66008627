"""Benchmark the compiled kernel extension against the pure-Python twin.

Run as ``python3 benchmarks/bench_kernels.py``.  Both implementations are
imported side by side, so the comparison works regardless of which one
the package itself selected at import time.
"""

from __future__ import annotations

import random
import timeit

from cadaug import _kernel_py

try:
    from cadaug import _speedups
except ImportError:
    _speedups = None


def random_poly(rng: random.Random, n_terms: int, max_exp: int) -> dict[int, int]:
    out: dict[int, int] = {}
    while len(out) < n_terms:
        key = _kernel_py.pack(
            rng.randint(0, max_exp), rng.randint(0, max_exp), rng.randint(0, max_exp)
        )
        out[key] = rng.randint(-99, 99) or 1
    return out


def bench(label: str, make_args, ops, repeat: int = 5, number: int = 20) -> None:
    rows = []
    for name, impl in ops:
        args = make_args()
        best = min(
            timeit.repeat(lambda: impl(*args), repeat=repeat, number=number)
        )
        rows.append((name, best / number * 1e6))
    line = f"{label:<28}"
    for name, micros in rows:
        line += f"  {name}: {micros:9.1f} us"
    if len(rows) == 2 and rows[1][1] > 0:
        line += f"  speedup: {rows[0][1] / rows[1][1]:5.2f}x"
    print(line)


def main() -> None:
    print(f"pure-Python backend: {_kernel_py.__name__}")
    if _speedups is None:
        print("compiled backend unavailable; showing pure-Python timings only")
    rng = random.Random(20240817)

    small_a = random_poly(rng, 25, 6)
    small_b = random_poly(rng, 25, 6)
    big_a = random_poly(rng, 150, 10)
    big_b = random_poly(rng, 150, 10)

    impl_pairs = [("py", _kernel_py)]
    if _speedups is not None:
        impl_pairs.append(("c", _speedups))

    for label, a, b in (
        ("kadd 150x150", big_a, big_b),
        ("kmul 25x25", small_a, small_b),
        ("kmul 150x150", big_a, big_b),
    ):
        op = label.split()[0]
        bench(
            label,
            lambda a=a, b=b: (dict(a), dict(b)),
            [(name, getattr(impl, op)) for name, impl in impl_pairs],
        )

    product = _kernel_py.kmul(big_a, big_b)
    bench(
        "kdiv_exact (150-term divisor)",
        lambda: (dict(product), dict(big_a)),
        [(name, impl.kdiv_exact) for name, impl in impl_pairs],
        number=5,
    )


if __name__ == "__main__":
    main()
