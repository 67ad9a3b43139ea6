"""Compare the compiled kernels against the pure-numpy fallback.

Run from the repository root:

    python3 benchmarks/benchmark_backends.py

Times the two hot kernels (EC2 creep curve, SE Gram matrix) and a full
log-marginal-likelihood evaluation under each backend in a subprocess
(the backend is chosen at import time via CREEPGP_PURE_PYTHON).
"""

import json
import os
import subprocess
import sys
import timeit

WORKER = r"""
import json
import timeit

import numpy as np

from creepgp import backend, data, ec2, gp

env = ec2.Environment(65.0, 38.0, 28.0)
params = ec2.CreepParameters(32.5, 50.0, 0.34)
hyper = gp.KernelHyperparameters(0.1, 30.0, 0.05)

elapsed = np.geomspace(0.01, 1e4, 2000)
alphas = ec2.alpha_factors(env.mean_compressive_strength)
phi0 = ec2.phi_notional(env, params)
bh = ec2.beta_h(env.relative_humidity, params.h0, alphas)

t = np.geomspace(0.01, 100.0, 400)
sqdist = (t[:, None] - t[None, :]) ** 2

ds = data.synthesize(env, params, hyper, data.SamplingScheme("logarithmic", 100), seed=0)
theta = np.array([32.5, 50.0, 0.34, 0.05, 0.1, 30.0])
variant = ec2.ModelVariant(free=("t0_eff", "h0", "n"), fixed={})
evaluator = gp.GPEvaluator(ds, env, variant)

def best(stmt, number):
    return min(timeit.repeat(stmt, repeat=5, number=number)) / number

results = {
    "backend": backend.BACKEND,
    "creep_curve_2000pts_us": 1e6 * best(
        lambda: backend.creep_curve(elapsed, phi0, bh, params.n), 200),
    "se_kernel_400x400_us": 1e6 * best(
        lambda: backend.se_kernel_from_sqdist(sqdist, 0.01, 1.0 / 1800.0), 50),
    "lml_100pts_us": 1e6 * best(
        lambda: evaluator.log_marginal_likelihood(theta), 50),
}
print(json.dumps(results))
"""


def run(force_python: bool) -> dict:
    env = dict(os.environ)
    if force_python:
        env["CREEPGP_PURE_PYTHON"] = "1"
    else:
        env.pop("CREEPGP_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", WORKER], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    compiled = run(force_python=False)
    python = run(force_python=True)
    if compiled["backend"] != "cython":
        print("warning: compiled extension unavailable; comparing python with itself")
    rows = [k for k in compiled if k != "backend"]
    width = max(len(r) for r in rows)
    print(f"{'kernel':<{width}}  {'cython':>10}  {'numpy':>10}  speedup")
    for key in rows:
        c, p = compiled[key], python[key]
        print(f"{key:<{width}}  {c:>8.1f}us  {p:>8.1f}us  {p / c:6.2f}x")


if __name__ == "__main__":
    main()
