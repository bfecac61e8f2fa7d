"""Independent reference values for the unit tests (cvxpy / numpy).

Run: python3 tests/oracle/freeze.py
Paste the printed constants into tests/unit/frozen.hpp.
"""
import cvxpy as cp
import numpy as np

# d=3, n=4 trace Lasso instance; columns are normalized before solving.
TL_X = np.array([[1.0, 0.2, -0.5, 0.9],
                 [0.3, 1.0, 0.4, -0.2],
                 [-0.4, 0.1, 1.0, 0.6]])
TL_Y = np.array([0.7, -0.3, 0.5])
TL_LAMBDA = 0.1

# d=5, n=6 Lasso instance: ||y - Xw||^2 + lambda ||w||_1.
L_X = np.array([[0.5, -1.2, 0.3, 0.8, -0.1, 0.4],
                [1.1, 0.4, -0.7, 0.2, 0.9, -0.3],
                [-0.6, 0.3, 1.0, -0.4, 0.5, 0.2],
                [0.2, 0.9, 0.1, 1.3, -0.8, 0.6],
                [0.7, -0.5, 0.6, 0.1, 0.3, -1.1]])
L_Y = np.array([1.0, -0.4, 0.8, 0.3, -0.6])
L_LAMBDA = 0.3

# Ridge: ||y - Xw||^2 + lambda ||w||^2.
R_X = np.array([[1.0, 0.5, -0.2],
                [0.0, 1.0, 0.3],
                [0.4, -0.1, 1.0],
                [0.2, 0.2, 0.2]])
R_Y = np.array([1.0, 2.0, -1.0, 0.5])
R_LAMBDA = 0.5


def trace_lasso():
    X = TL_X / np.linalg.norm(TL_X, axis=0)
    w = cp.Variable(X.shape[1])
    obj = 0.5 * cp.sum_squares(TL_Y - X @ w) + TL_LAMBDA * cp.normNuc(X @ cp.diag(w))
    prob = cp.Problem(cp.Minimize(obj))
    # The interior-point solver stalls near 1e-9 on the nuclear norm cone here.
    prob.solve(solver=cp.SCS, eps=1e-12, max_iters=200000)
    return prob.value, w.value


def lasso():
    w = cp.Variable(L_X.shape[1])
    prob = cp.Problem(cp.Minimize(cp.sum_squares(L_Y - L_X @ w) + L_LAMBDA * cp.norm1(w)))
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    return prob.value, w.value


def ridge():
    n = R_X.shape[1]
    return np.linalg.solve(R_X.T @ R_X + R_LAMBDA * np.eye(n), R_X.T @ R_Y)


def fmt(v):
    return ", ".join(f"{x:.15g}" for x in np.atleast_1d(v))


if __name__ == "__main__":
    v, w = trace_lasso()
    print(f"trace_lasso objective = {v:.15g}; w = {{{fmt(w)}}}")
    v, w = lasso()
    print(f"lasso objective = {v:.15g}; w = {{{fmt(w)}}}")
    print(f"ridge w = {{{fmt(ridge())}}}")
