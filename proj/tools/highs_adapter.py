#!/usr/bin/env python3
"""External MILP adapter for slicenet: solves a JSON model with scipy's HiGHS.

usage: highs_adapter.py MODEL.json SOLUTION.json [TIME_LIMIT_SECONDS]
"""
import json
import math
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix


def bound(v):
    if isinstance(v, str):
        return math.inf if v == "inf" else -math.inf
    return float(v)


def main(argv):
    if len(argv) < 3:
        print(__doc__, file=sys.stderr)
        return 2
    with open(argv[1]) as f:
        model = json.load(f)
    time_limit = float(argv[3]) if len(argv) > 3 else None

    variables = model["variables"]
    n = len(variables)
    c = np.asarray(model["objective"], dtype=float)
    lo = np.array([bound(v["lower"]) for v in variables])
    hi = np.array([bound(v["upper"]) for v in variables])
    integrality = np.array([1 if v["kind"] == "binary" else 0 for v in variables])

    rows, cols, vals, row_lo, row_hi = [], [], [], [], []
    for i, con in enumerate(model["constraints"]):
        for var, coef in con["terms"]:
            rows.append(i)
            cols.append(var)
            vals.append(coef)
        rhs = float(con["rhs"])
        rel = con["relation"]
        row_lo.append(rhs if rel in (">=", "=") else -math.inf)
        row_hi.append(rhs if rel in ("<=", "=") else math.inf)

    constraints = []
    m = len(model["constraints"])
    if m:
        a = coo_matrix((vals, (rows, cols)), shape=(m, n)).tocsr()
        constraints.append(LinearConstraint(a, row_lo, row_hi))

    options = {"mip_rel_gap": 1e-9}
    if time_limit is not None:
        options["time_limit"] = time_limit
    res = milp(c, integrality=integrality, bounds=Bounds(lo, hi),
               constraints=constraints, options=options)

    # scipy: 0 optimal, 1 iteration/time limit, 2 infeasible, 3 unbounded
    status = {0: "optimal", 1: "time_limit", 2: "infeasible", 3: "unbounded"}.get(
        res.status, "infeasible")
    out = {"status": status, "objective": None, "values": None}
    if res.x is not None:
        x = np.where(integrality == 1, np.round(res.x), res.x)
        out["values"] = [float(v) for v in x]
        out["objective"] = float(c @ x) + float(model.get("offset", 0.0))
    with open(argv[2], "w") as f:
        json.dump(out, f)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
