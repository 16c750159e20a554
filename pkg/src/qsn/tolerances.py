"""Numerical tolerances and floors used across the package.

Every comparison threshold lives here so that tests and library code agree
on a single set of named constants.
"""

# State and operator hygiene.
NORM_TOL = 1e-12        # |sum(|amp|^2) - 1| for normalized state vectors
UNITARY_TOL = 1e-10     # max|uture u - I| for gate matrices
PSD_TOL = 1e-10         # density-matrix eigenvalues must exceed -PSD_TOL
HERMITIAN_TOL = 1e-10   # max|A - A^dagger| for Hermitian checks
TRACE_TOL = 1e-10       # |tr(rho) - 1| (and |tr(drho)| for derivatives)
KRAUS_TOL = 1e-12       # max|sum K^dagger K - I| for channel completeness
PROB_SUM_TOL = 1e-10    # |sum p - 1| for outcome distributions
DPROB_SUM_TOL = 1e-8    # |sum dp| for derivatives of outcome distributions

# Information quantities.
EIG_TOL = 1e-12         # eigenvalue-pair cutoff in the mixed-state information sum
P_FLOOR = 1e-12         # outcomes below this probability are skipped in the
                        # classical information sum (their exact derivatives
                        # vanish at the same rate, so the cutoff is safe)
Q_FLOOR = 1e-9          # quantum information below this marks a degenerate probe

# Optimizer stopping rule.
CONVERGENCE_TOL = 1e-10     # cost window spread that counts as converged
CONVERGENCE_WINDOW = 50     # number of trailing iterations in that window

# Dense simulation is exact and therefore exponential in qubit count.
MAX_QUBITS = 12
