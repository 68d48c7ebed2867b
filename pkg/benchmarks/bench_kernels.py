"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--sizes 1000,100000] [--repeat 5]

Reports the best-of-N wall time per call for each elementwise kernel, and
for one 7x128 GELU classifier training step on a 128-example batch.
"""

import argparse
import time

import numpy as np

from gelu_lab import _backend
from gelu_lab.activations import Gelu
from gelu_lab.nn import AdamState, DenseNet, adam_step, softmax_cross_entropy


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_cases(x):
    return {
        "erf": lambda: _backend.erf(x),
        "normal_cdf": lambda: _backend.normal_cdf(x),
        "gelu_forward": lambda: _backend.gelu_forward(x, 0.0, 1.0),
        "gelu_grad": lambda: _backend.gelu_grad(x, 0.0, 1.0),
    }


def train_step_case():
    rng = np.random.default_rng(0)
    net = DenseNet.build([784] + [128] * 7 + [10], Gelu(), seed=0)
    opt = AdamState()
    x = rng.normal(size=(128, 784))
    y = rng.integers(0, 10, 128)

    def step():
        _, d = softmax_cross_entropy(net.forward(x), y)
        adam_step(opt, net.params(), net.backward(d))

    return step


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", default="1000,100000,1000000")
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    names = sorted(_backend.BACKENDS)
    if "compiled" not in names:
        print("compiled kernels not built; timing the numpy fallback only")
    rng = np.random.default_rng(0)
    header = f"{'case':<24}{'n':>10}" + "".join(f"{n + ' [ms]':>16}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    rows = []
    for size in (int(s) for s in args.sizes.split(",")):
        x = rng.normal(scale=2.0, size=size)
        for case in kernel_cases(x):
            rows.append((case, size))
    rows.append(("train_step_7x128_gelu", 128))
    for case, size in rows:
        times = {}
        for name in names:
            _backend.use(name)
            if case.startswith("train_step"):
                fn = train_step_case()
            else:
                fn = kernel_cases(rng.normal(scale=2.0, size=size))[case]
            fn()
            times[name] = best_time(fn, args.repeat) * 1e3
        line = f"{case:<24}{size:>10}" + "".join(f"{times[n]:>16.3f}" for n in names)
        if len(names) == 2:
            line += f"{times['python'] / times['compiled']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
