"""Total-variation deblurring with matrix-variable ADMM and generalized
matrix Krylov subspace solves of the Sylvester subproblems."""

from .admm import (
    AdmmState,
    ConvergenceTrace,
    SolverParams,
    multichannel_solve,
    solve_tvl1,
    solve_tvl2,
    tv_norm,
    tv_objective,
)
from .exceptions import (
    DegenerateInputError,
    DimensionError,
    NumericFailureError,
    ParameterError,
    RankDeficiencyError,
    SingularMatrixError,
)
from .gmks import BlockBasis, GmksSolution, arnoldi_solve, expand_and_solve, global_arnoldi
from .linalg import (
    GlobalQR,
    diamond_product,
    frobenius_inner,
    frobenius_norm,
    global_qr_append,
    mat,
    upper_triangular_solve,
    vec,
)
from .operators import (
    DifferenceOperator,
    ImageGradient,
    KroneckerImageOperator,
    StackedImageGradient,
    SylvesterOperator,
    blur_operator,
    build_normal_operator,
    cross_channel_matrix,
    difference_adjoint_apply,
    difference_stack_apply,
    gaussian_toeplitz,
    phillips_f1,
    phillips_problem,
)
from .prox import shrink_anisotropic, shrink_isotropic, shrink_l1_residual, soft_threshold

__version__ = "0.1.0"
