"""Smoke test for the rse_lab extension.

Build it first with `python/build.sh`, then run `python3 python/smoke_test.py`.
"""

import cmath
import json
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import rse_lab  # noqa: E402


def check(name, ok, detail=""):
    print(f"{'ok  ' if ok else 'FAIL'} {name} {detail}")
    if not ok:
        check.failed += 1


check.failed = 0


def main():
    p = rse_lab.PhysParams(c=1.0, hbar=1.0, omega=1.0)
    g = rse_lab.Grid(256, 2 * math.pi * 8)
    f = rse_lab.Field.plane_wave(g, p, p.wavenumber).normalized()
    check("plane wave normalized", abs(f.norm() - 1.0) < 1e-14)

    chain = rse_lab.chain_consistency(f, p)
    check("chain residuals", max(chain.values()) < 1e-10, str(chain))

    later = rse_lab.rse_evolve(f, p, 1e-4)
    hj = rse_lab.hj_residuals(f, later, p)
    q_max = max(abs(q) for q in hj["q_field"] if q is not None)
    check("plane-wave Q vanishes", q_max < 1e-12, f"{q_max:.2e}")
    check("HJ residual", hj["hj_residual"] < 1e-10, f"{hj['hj_residual']:.2e}")

    e = rse_lab.expectations(f, later, p)
    check("energy = hbar omega", abs(e["energy"] - 1.0) < 1e-8, f"{e['energy']!r}")

    gauss = rse_lab.Field.gaussian(rse_lab.Grid(512, 40.0), 1.0, 20.0, 1.0, p.dispersion_coefficient)
    t = 1.0
    stepped = rse_lab.rse_evolve(gauss, p, t)
    oracle = rse_lab.Field.gaussian(rse_lab.Grid(512, 40.0), 1.0, 20.0, 1.0, p.dispersion_coefficient, t)
    err = stepped.relative_l2(oracle)
    check("RSE matches closed form", err < 1e-8, f"{err:.2e}")

    try:
        rse_lab.Field.plane_wave(g, p, 1.3)
        check("non-commensurate k rejected", False)
    except ValueError as exc:
        check("non-commensurate k rejected", "commensurate" in str(exc))

    plus, cross = rse_lab.basis_tensors()
    check("e+ . ex = 0", rse_lab.frobenius_inner(plus, cross) == 0.0)
    check("e+ is TT", rse_lab.tt_violation(plus) == 0.0)
    rotated = rse_lab.rotate_about_z(plus, math.pi / 4)
    check("quarter turn of e+ is ex", max(abs(a - b) for ra, rb in zip(rotated, cross) for a, b in zip(ra, rb)) < 1e-15)

    gw = rse_lab.GWState(f, f, p).normalized()
    n = gw.evolve(10 * 2 * math.pi).inner(gw.evolve(10 * 2 * math.pi))
    check("GW norm preserved", abs(n - 1.0) < 1e-13, f"{n!r}")

    names = rse_lab.list_scenarios()
    check("scenarios listed", names == sorted(names) and "complementarity" in names)
    report = json.loads(rse_lab.run_scenario("gw_helicity"))
    check("gw_helicity scenario passes", report["passed"] and report["schema_version"] == 1)

    phase = cmath.phase(f.samples()[1] / f.samples()[0])
    check("phase step = k dx", abs(phase - p.wavenumber * g.spacing) < 1e-14)

    print("smoke test:", "PASS" if check.failed == 0 else f"{check.failed} failures")
    return 1 if check.failed else 0


if __name__ == "__main__":
    sys.exit(main())
