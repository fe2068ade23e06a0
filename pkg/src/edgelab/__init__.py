"""edgelab: exact combinatorics and Monte Carlo checks for random-matrix
edge statistics.

The package couples three layers:

* exact machinery -- Chebyshev-family polynomials, non-backtracking path
  counts on complete and complete bipartite graphs, and the diagram census
  behind the genus expansion;
* numerical edge laws -- Airy function and kernel, the Hastings-McLeod
  solution of Painleve II, Tracy-Widom CDFs with an independent Fredholm
  determinant cross-check;
* a Monte Carlo harness that draws random-matrix ensembles, rescales
  extreme eigenvalues, and gates the empirical distributions against the
  edge laws with reproducible, worker-count-independent results.
"""

from .cheb import (
    PolyFamilyParams,
    UExpansion,
    cheb_u,
    cheb_v,
    matrix_poly_trace,
    matrix_poly_traces,
    poly_p,
    poly_q,
    quad_inner,
    snyder_expand,
)
from .diagrams import (
    AutomatonState,
    Diagram,
    WeightedDiagram,
    d_count,
    d_count_k,
    delta_count,
    enumerate_diagrams,
    phi,
    predict_cov_trace,
    vertex_type_split,
    weight_placement_count,
)
from .edge_laws import (
    AiryValues,
    EdgeLawTable,
    PainleveSolution,
    airy,
    airy_kernel,
    build_edge_law_table,
    fredholm_oracle,
    k1_blocks,
    painleve_hm,
    tw_cdf,
    tw_quantiles,
)
from .ensembles import (
    EnsembleSpec,
    HermitianSample,
    RectSample,
    exhaustive_sign_rect,
    exhaustive_sign_wigner,
    sample_rect,
    sample_wigner,
)
from .harness import (
    EmpiricalCdf,
    ExperimentConfig,
    ExperimentResult,
    ks_distance,
    run_experiment,
    write_result,
)
from .paths import (
    BipartitePathWord,
    KPathWord,
    Matching,
    PathWord,
    c_part,
    check_conditions,
    count_sigma,
    count_sigma_bipartite,
    expected_trace_exhaustive,
    forest_part,
    gamma_eval,
)
from .spectra import (
    RescaledPoint,
    SpectrumSample,
    eigvals_hermitian,
    rescale,
    singvals_rect,
)

__version__ = "0.1.0"
