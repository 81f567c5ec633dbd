"""Smoke test for the `squeeze` extension module.

Uses an installed `squeeze` if there is one; otherwise builds the extension
with cargo and imports it from a temporary directory.
"""

import importlib
import json
import math
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        return importlib.import_module("squeeze")
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--release", "-p", "squeeze-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libsqueeze.so"
    tmp = pathlib.Path(tempfile.mkdtemp())
    shutil.copy(lib, tmp / "squeeze.so")
    sys.path.insert(0, str(tmp))
    return importlib.import_module("squeeze")


def main():
    sq = load()

    tree = sq.enumerate_tree(10**4)
    assert all(a * a + b * b + c * c == 3 * a * b * c for a, b, c in tree)
    assert sq.branch_sequence(6) == [1, 1, 1, 2, 5, 29, 433]

    fit = sq.find_fitting_triple("29/10")
    assert fit["kind"] == "Fit"
    assert fit["fit"]["height"] == "841/866"
    assert fit["triangle"]["triple"] == ["5", "29", "433"]
    assert sq.find_fitting_triple("3")["kind"] == "NoFit"

    tri = sq.markov_triangle(1, 2, 5, "2")
    assert tri["area"] == "2" and tri["affine_perimeter"] == "6"

    plan = sq.FoldingPlan(1.0, 8.0)
    assert plan.cells == 4
    assert plan.stages()[0] == "linear_symplectic"
    p = (0.3, -0.2, 0.1, 0.4)
    assert plan.symplectic_residual(p) < 1e-9
    q = plan.eval(p)
    assert len(q) == 4
    assert json.loads(plan.to_json())["cells"] == 4
    defect = plan.defect_volume(1.0, 20000, 7)
    assert 0.0 < defect["value"] < 3.75 + 3 * defect["std_error"]
    assert defect == plan.defect_volume(1.0, 20000, 7)
    try:
        sq.FoldingPlan(1.0, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("L < 2 must be rejected")

    for x in (0.0, 0.3, 0.99, 1.0):
        assert abs(x * sq.ou_f(x) - math.tan(0.5 * math.asin(x))) < 1e-12
    z = sq.ou_map([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    assert abs(sum(c * c for c in z)) < 1e-12
    assert sq.ou_check(200, 20, 1e-5, 1)["pullback_residual"] < 1e-6

    zt = sq.toric_coords([1.0, 1.0], [0.0, 0.0])
    assert abs(zt[0] - 1 / math.sqrt(math.pi)) < 1e-15
    rep = sq.triangle_torus_containment("2", 5000, 3)
    assert rep["all_inside"] and rep["max_second_action"] < 0.8

    curve = sq.disk_minkowski_curve([0.1, 0.05, 0.02, 0.01], n=200000, seed=9)
    assert abs(curve["fitted_dimension"] - 2.0) < 0.15
    assert abs(curve["content_at_2"] / (2 * math.pi) - 1) < 0.05

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
