"""Smoke test for the Python extension module.

Uses an installed `ncsphere` module when present; otherwise loads the shared
library built by `cargo build -p ncsphere-py` from target/debug or
target/release. Run from anywhere: `python3 python/smoke_test.py`.
"""

import importlib.util
import json
import os
import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    try:
        import ncsphere  # noqa: F401

        return sys.modules["ncsphere"]
    except ImportError:
        pass
    candidates = [Path(os.environ["NCSPHERE_LIB"])] if "NCSPHERE_LIB" in os.environ else []
    for profile in ("release", "debug"):
        for name in ("libncsphere_py.so", "libncsphere_py.dylib", "ncsphere_py.dll"):
            candidates.append(ROOT / "target" / profile / name)
    lib = next((c for c in candidates if c.exists()), None)
    if lib is None:
        sys.exit("extension not built: run `cargo build -p ncsphere-py` first")
    tmp = Path(tempfile.mkdtemp())
    target = tmp / ("ncsphere.pyd" if lib.suffix == ".dll" else "ncsphere.so")
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("ncsphere", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    nc = load_module()
    failures = []

    def check(label, ok):
        print(f"{'ok  ' if ok else 'FAIL'} {label}")
        if not ok:
            failures.append(label)

    p = nc.DeformParams("3/5,4/5,0")
    check("parameters echo", p.u == ("3/5", "4/5", "0"))
    check("exact phase", p.phase() == ("-7/25", "24/25"))
    check("irrational phase is None", nc.DeformParams("1/3,2/3,2/3").phase() is None)
    conditions = p.check_conditions()
    check("R-matrix conditions", all(v[0] and v[1] == 0.0 for v in conditions.values()))

    alg = nc.Algebra(p)
    check("PBW dimensions", alg.hilbert_dims(3) == [8, 36, 120])
    check("x^2 central", alg.is_central(" + ".join(f"x1_{i}*x1_{i} + x2_{i}*x2_{i}" for i in range(4))))
    check("star is an involution", alg.star(alg.star("x1_0*x2_1")) == alg.normal_form("x1_0*x2_1"))
    check("five Y elements", len(alg.y()) == 5)

    s7 = nc.SphereAlgebra(p)
    norm = " + ".join(f"x1_{i}*x1_{i} + x2_{i}*x2_{i}" for i in range(4))
    check("x^2 reduces to 1", s7.reduce(norm) == s7.reduce("1"))

    report = json.loads(nc.run("3/5,4/5,0"))
    check("full run passes", report["all_pass"])
    theta = report["theta"]
    check("theta phase", Fraction(-7, 25) == Fraction(theta["phase_re"]).limit_denominator(1000))

    schema = json.loads((ROOT / "schema" / "report.schema.json").read_text())
    try:
        import jsonschema

        jsonschema.validate(report, schema)
        check("report matches schema", True)
    except ImportError:
        print("skip schema validation (jsonschema not installed)")
    except Exception as e:  # validation error
        print(e)
        check("report matches schema", False)

    float_report = json.loads(nc.run("0.6,0.64,0.48", backend="float", tasks=["conditions"]))
    residuals = [c["max_residual"] for c in float_report["tasks"]["conditions"]["checks"].values()]
    check("float residuals", float_report["all_pass"] and max(residuals) <= 1e-9)

    sweep_json, csv_text = nc.sweep(["1,0,0", "3/5,0,4/5"], tasks=["conditions", "algebra"])
    check("sweep rows", len(csv_text.strip().splitlines()) == 3 and len(json.loads(sweep_json)) == 2)
    check("catalog", nc.catalog()[0] == "1,0,0")

    try:
        nc.DeformParams("1,1,0")
        check("off-sphere rejected", False)
    except ValueError:
        check("off-sphere rejected", True)

    print(f"{len(failures)} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
