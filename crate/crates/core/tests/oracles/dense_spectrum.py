"""Dense eigenvalues of the conservative finite-difference operator
-(a u')' + q u for a_act, q_act at n = 2049 (independent of the
tridiagonal Sturm/inverse-iteration solver)."""
import numpy as np
import scipy.linalg as sl

n = 2049
x = np.linspace(0.0, 1.0, n)
h = x[1] - x[0]
a = 1 + 4 * x**2 * (1 - x) + 0.5 * np.sin(4 * np.pi * x)
q = 8 * x * np.exp(-3 * x)
ah = 0.5 * (a[1:] + a[:-1])


def full_matrix(gamma_left, gamma_right):
    A = np.zeros((n, n))
    for i in range(1, n - 1):
        A[i, i - 1] = -ah[i - 1] / h**2
        A[i, i + 1] = -ah[i] / h**2
        A[i, i] = (ah[i - 1] + ah[i]) / h**2 + q[i]
    A[0, 0] = 2 * ah[0] / h**2 + 2 * gamma_left / h + q[0]
    A[0, 1] = -2 * ah[0] / h**2
    A[-1, -1] = 2 * ah[-1] / h**2 + 2 * gamma_right / h + q[-1]
    A[-1, -2] = -2 * ah[-1] / h**2
    return A


# Dirichlet-Dirichlet: interior block, symmetric
A = full_matrix(0.0, 0.0)[1:-1, 1:-1]
dd = sl.eigh(A, eigvals_only=True, subset_by_index=[0, 9])
# impedance gamma = 1 at both ends: nonsymmetric rows, general solver
ev = np.sort(np.linalg.eigvals(full_matrix(1.0, 1.0)).real)[:10]
for name, vals in (("DIRICHLET", dd), ("IMPEDANCE", ev)):
    print(f"const {name}: [f64; 10] = [")
    for v in vals:
        print(f"    {float(v)!r},")
    print("];")
