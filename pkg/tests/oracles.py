"""Independent reference implementations used only by the tests."""

import numpy as np
from scipy.optimize import linprog


def lp_cone_member(point, generators, tol=1e-9):
    """Is ``point`` a nonnegative combination of the rows of ``generators``?"""
    point = np.asarray(point, dtype=float)
    gens = np.asarray(generators, dtype=float).reshape(-1, len(point))
    if np.linalg.norm(point) <= tol:
        return True
    if len(gens) == 0:
        return False
    scale = np.linalg.norm(gens, axis=1)
    res = linprog(np.zeros(len(gens)), A_eq=(gens / scale[:, None]).T, b_eq=point / np.linalg.norm(point),
                  bounds=[(0, None)] * len(gens), method="highs")
    return res.status == 0


def dual_contains(generators, lam, tol=1e-9):
    return bool(np.all(np.asarray(generators) @ lam >= -tol))
