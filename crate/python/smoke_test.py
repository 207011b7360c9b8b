"""Smoke test for the `xbouss` extension module.

Uses an installed module when there is one; otherwise builds the
extension with cargo and loads it from a temporary directory.
"""

import importlib
import math
import os
import shutil
import subprocess
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    try:
        return importlib.import_module("xbouss")
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--release", "-p", "xbouss-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = os.path.join(ROOT, "target", "release", "libxbouss.so")
    if sys.platform == "darwin":
        lib = lib[:-3] + ".dylib"
    tmp = tempfile.mkdtemp(prefix="xbouss-")
    shutil.copy(lib, os.path.join(tmp, "xbouss.so"))
    sys.path.insert(0, tmp)
    return importlib.import_module("xbouss")


def main():
    xb = load()

    p = xb.ModelParams.traveling(1.0, 1.025)
    assert abs(p.gn_amplitude - 0.050625) < 1e-15
    prof = xb.solve_profile(1.025)
    assert abs(prof.amplitude / 0.050761707526104684 - 1) < 1e-9, prof.amplitude
    assert max(prof.zeta) == prof.zeta[len(prof.zeta) // 2]
    assert prof.max_ode_residual() < 1e-8

    gn = xb.solve_profile(1.01, gn_mode=True)
    exact = [xb.gn_profile(gn.params, x) for x in gn.xi]
    assert max(abs(a - b) for a, b in zip(gn.zeta, exact)) < 1e-6

    q = xb.ModelParams.from_alpha(0.1, 1.0)
    z1, v1 = xb.boussinesq_solitary(q, 0.0, 0.0)
    assert z1 == 1.0 and abs(v1 - q.celerity / 1.1) < 1e-15
    sol = xb.CorrectedSolution(q)
    z, v = sol.eval(0.0, 0.0)
    assert abs(z - (1.0 + 0.01)) < 1e-15
    sol.corrector(1.0, 0.5)

    sweep = xb.residual_sweep([1e-1, 1e-2, 1e-3], n=1024, workers=3)
    for r in sweep["reports"]:
        ratio = r["r1_l2"] / r["epsilon"] ** 3
        assert 10 < ratio < 40, ratio
    assert abs(sweep["slopes"]["r1_inf"] - 3.0) < 0.1

    grid = xb.Grid1D(-20.0, 20.0, 128, True)
    zeta = [0.5 / math.cosh(x) ** 2 for x in grid.points()]
    ctx = xb.OperatorContext(grid, 0.1, zeta)
    w = [math.sin(2 * math.pi * 3 * x / 40) for x in grid.points()]
    back, iterations, residual = ctx.invert(ctx.apply(w), 1e-13)
    assert max(abs(a - b) for a, b in zip(back, w)) < 1e-10
    assert iterations > 0 and residual <= 1e-12

    for bad in (lambda: xb.ModelParams.traveling(1.0, 1.0), lambda: xb.solve_profile(0.9)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("xbouss", xb.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
