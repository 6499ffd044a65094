"""Spectral fluctuation laws for kernel matrices and graphon-sampled graphs.

The package samples random kernel/adjacency matrices from finite-rank
symmetric kernels on [0,1]^2, extracts their largest eigenvalues, builds the
matching asymptotic laws (Gaussian in the non-degenerate regime, weighted
chi-squared combinations in the degenerate one), and scores empirical
distributions against them with seeded, worker-count-independent Monte
Carlo.
"""
from .basis import BasisFunction, callable_basis, shifted_legendre, shifted_legendre_eval
from .errors import (
    ConvergenceError,
    DimensionError,
    DomainError,
    ExperimentError,
    GraphonRangeError,
    GspmError,
    InvalidKernelError,
    NumericError,
    SizeError,
    UnsupportedDegreeError,
)
from .experiment import (
    ComparisonReport,
    ExperimentConfig,
    ExperimentRun,
    compare,
    compute_T_statistics,
    ks_distance,
    run_experiment,
)
from .kernels import (
    GraphonView,
    SpectralKernel,
    ValidationReport,
    builtin_kernel,
    constant_kernel,
    degree_function,
    eval_kernel,
    is_degenerate,
    make_spectral_kernel,
    read_kernel_file,
    validate_assumptions,
    validation_grid,
    write_kernel_file,
)
from .limits import (
    LimitLaw,
    StatisticSpec,
    apply_statistic,
    chisq_law_from_spectrum,
    chisq_weights,
    gaussian_variance,
    graph_limit_law,
    kernel_limit_law,
    law_moments,
    sample_limit_law,
    var_phi1_squared,
)
from .quadrature import QuadratureRule, gauss_legendre, integrate_1d, integrate_2d
from .sampling import (
    DenseSymMatrix,
    SampleBatch,
    build_adjacency_matrix,
    build_kernel_matrix,
    build_probability_matrix,
    read_matrix_binary,
    read_matrix_csv,
    sample_uniform,
    write_matrix_binary,
    write_matrix_csv,
)
from .spectra import (
    EigenPair,
    SpectrumEstimate,
    exact_spectrum,
    nystrom_spectrum,
    residual_check,
    spectral_norm,
    top_k_eigen,
)

__version__ = "0.1.0"
