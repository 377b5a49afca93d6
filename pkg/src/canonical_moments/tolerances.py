"""Default numerical tolerances shared across the package."""

# eigenvalues / Gram-Schmidt residuals below this (relative) count as zero
RANK = 1e-9
# minimum eigenvalue of the Gram matrix may dip to -PSD * (1 + ||Gamma||)
PSD = 1e-9
# atoms closer than this are merged
ATOM = 1e-8
# atoms lighter than MASS * s_0 are dropped
MASS = 1e-12
# eigenvalue clustering, relative to 1 + ||R||
EIG = 1e-7
# residual accepted for the commutation equations of a solved instance
SOLVE = 1e-8
# rank cutoff of the real linear systems in the solver, relative to ||system||
LINEAR = 1e-10
