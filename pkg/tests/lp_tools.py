"""Test-side LP reader and MILP bridge.

Parses the LP text the exporter writes (a deliberately small dialect:
minimize section, named rows with +/- coefficient terms, Binary section)
and solves it with scipy's HiGHS-backed MILP, giving an external check of
the exported model.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.optimize import LinearConstraint, milp


def parse_lp(text: str):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    mode = None
    objective: dict[str, float] = {}
    rows = []  # (name, {var: coef}, sense, rhs)
    binaries: list[str] = []
    for ln in lines:
        low = ln.lower()
        if low == "minimize":
            mode = "obj"
            continue
        if low == "subject to":
            mode = "rows"
            continue
        if low == "binary":
            mode = "bin"
            continue
        if low == "end":
            break
        if mode == "obj":
            body = ln.split(":", 1)[1]
            objective = _parse_terms(body)[0]
        elif mode == "rows":
            name, body = ln.split(":", 1)
            coefs, sense, rhs = _parse_terms(body, with_rhs=True)
            rows.append((name.strip(), coefs, sense, rhs))
        elif mode == "bin":
            binaries.extend(ln.split())
    return objective, rows, binaries


def _parse_terms(body: str, with_rhs: bool = False):
    toks = body.split()
    coefs: dict[str, float] = {}
    sense, rhs = None, None
    sign, coef = 1.0, None
    k = 0
    while k < len(toks):
        tok = toks[k]
        if tok in ("<=", ">=", "="):
            sense = tok
            rhs = float(toks[k + 1])
            break
        if tok == "+":
            sign, coef = 1.0, None
        elif tok == "-":
            sign, coef = -1.0, None
        else:
            try:
                value = float(tok)
                coef = value
            except ValueError:
                c = sign * (coef if coef is not None else 1.0)
                coefs[tok] = coefs.get(tok, 0.0) + c
                sign, coef = 1.0, None
        k += 1
    if with_rhs:
        return coefs, sense, rhs
    return coefs, None, None


def solve_lp_text(text: str) -> float:
    """Exact binary-program optimum of the exported model via HiGHS."""
    objective, rows, binaries = parse_lp(text)
    var_index = {name: k for k, name in enumerate(binaries)}
    n = len(binaries)
    c = np.zeros(n)
    for name, coef in objective.items():
        c[var_index[name]] = coef

    data, ri, ci, lo, hi = [], [], [], [], []
    for r, (name, coefs, sense, rhs) in enumerate(rows):
        for var, coef in coefs.items():
            ri.append(r)
            ci.append(var_index[var])
            data.append(coef)
        if sense == "<=":
            lo.append(-np.inf)
            hi.append(rhs)
        elif sense == ">=":
            lo.append(rhs)
            hi.append(np.inf)
        else:
            lo.append(rhs)
            hi.append(rhs)
    a = sparse.csr_matrix((data, (ri, ci)), shape=(len(rows), n))
    res = milp(c=c, constraints=LinearConstraint(a, lo, hi),
               integrality=np.ones(n), bounds=(0, 1),
               options={"mip_rel_gap": 0.0})
    if not res.success:
        raise RuntimeError(f"MILP failed: {res.message}")
    return float(res.fun)
