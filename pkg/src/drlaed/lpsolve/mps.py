"""Fixed-format MPS export for cross-checking with external tools."""

from __future__ import annotations

import io

import numpy as np

from .model import LinearProgram


def _num(v):
    s = f"{v:.12g}"
    if len(s) > 12:
        s = f"{v:.6e}"
    return s


def _line(f1, f2, f3="", f4="", f5="", f6=""):
    # field columns 2-3, 5-12, 15-22, 25-36, 40-47, 50-61
    out = " " + f1.ljust(2) + " " + f2.ljust(8)
    if f3:
        out += "  " + f3.ljust(8) + "  " + f4.rjust(12)
    if f5:
        out += "   " + f5.ljust(8) + "  " + f6.rjust(12)
    return out.rstrip() + "\n"


def to_mps(lp: LinearProgram, name: str = "DRLAED") -> str:
    """Render ``lp`` as a fixed-format MPS string.

    Rows are named ``L0000001``/``E0000001`` and columns ``C0000001`` so
    every name fits the 8-character fields; the objective row is ``COST``.
    """
    buf = io.StringIO()
    buf.write(f"NAME          {name[:8]}\n")
    buf.write("ROWS\n")
    buf.write(_line("N", "COST"))
    ub_names = [f"L{i + 1:07d}" for i in range(lp.n_ub)]
    eq_names = [f"E{i + 1:07d}" for i in range(lp.n_eq)]
    for r in ub_names:
        buf.write(_line("L", r))
    for r in eq_names:
        buf.write(_line("E", r))
    buf.write("COLUMNS\n")
    for j in range(lp.n_vars):
        col = f"C{j + 1:07d}"
        entries = []
        if lp.c[j] != 0:
            entries.append(("COST", lp.c[j]))
        for i in np.flatnonzero(lp.A_ub[:, j]):
            entries.append((ub_names[i], lp.A_ub[i, j]))
        for i in np.flatnonzero(lp.A_eq[:, j]):
            entries.append((eq_names[i], lp.A_eq[i, j]))
        if not entries:
            entries.append(("COST", 0.0))
        for row, val in entries:
            buf.write(_line("", col, row, _num(val)))
    buf.write("RHS\n")
    for names, rhs in ((ub_names, lp.b_ub), (eq_names, lp.b_eq)):
        for r, val in zip(names, rhs):
            if val != 0:
                buf.write(_line("", "RHS", r, _num(val)))
    buf.write("BOUNDS\n")
    for j in range(lp.n_vars):
        col = f"C{j + 1:07d}"
        lo, hi = lp.lb[j], lp.ub[j]
        if lo == hi:
            buf.write(_line("FX", "BND", col, _num(lo)))
            continue
        if np.isneginf(lo) and np.isposinf(hi):
            buf.write(_line("FR", "BND", col))
            continue
        if np.isneginf(lo):
            buf.write(_line("MI", "BND", col))
        elif lo != 0:
            buf.write(_line("LO", "BND", col, _num(lo)))
        if np.isfinite(hi):
            buf.write(_line("UP", "BND", col, _num(hi)))
    buf.write("ENDATA\n")
    return buf.getvalue()


def write_mps(lp: LinearProgram, path, name: str = "DRLAED") -> None:
    with open(path, "w") as fh:
        fh.write(to_mps(lp, name))
