from .core_order import (
    PointSet,
    CubeDecomposition,
    HullSizes,
    cube_cmp,
    cube_key,
    rank,
    unrank,
    decompose,
    initial_segment,
    iter_segment,
    is_closed,
    hull_sizes,
    previous_closed,
    next_closed,
    largest_edge,
    integer_root,
    compress,
    relabel,
)
from .projections import (
    ProjectionProfile,
    sigma_profile,
    lambda_profile,
    sigma_closed,
    sigma_segment,
    lambda_segment,
    lw_agm_holds,
)
from .rearrange import (
    Slab,
    RearrangeTrace,
    slab_decomposition,
    step1_normalize,
    step2_align_interiors,
    step3_fold,
    step4_finalize,
    find_relabelling,
    rearrange_to_segment,
)
from .oracle import (
    Law,
    LawReport,
    OracleResult,
    brute_force_min,
    is_cartesian_product,
    check_stability,
    check_lambda_uniqueness,
    check_non_closed_minimiser,
    check_lemma_sub,
    check_idt,
    check_lw_agm,
    check_restate,
    restate_suite,
    check_hz19,
    check_lambda_laws,
    random_lower_bound_suite,
)
from .pointset_io import parse_pointset, read_pointset_file, format_pointset

__all__ = [
    'PointSet',
    'CubeDecomposition',
    'HullSizes',
    'cube_cmp',
    'cube_key',
    'rank',
    'unrank',
    'decompose',
    'initial_segment',
    'iter_segment',
    'is_closed',
    'hull_sizes',
    'previous_closed',
    'next_closed',
    'largest_edge',
    'integer_root',
    'compress',
    'relabel',
    'ProjectionProfile',
    'sigma_profile',
    'lambda_profile',
    'sigma_closed',
    'sigma_segment',
    'lambda_segment',
    'lw_agm_holds',
    'Slab',
    'RearrangeTrace',
    'slab_decomposition',
    'step1_normalize',
    'step2_align_interiors',
    'step3_fold',
    'step4_finalize',
    'find_relabelling',
    'rearrange_to_segment',
    'Law',
    'LawReport',
    'OracleResult',
    'brute_force_min',
    'is_cartesian_product',
    'check_stability',
    'check_lambda_uniqueness',
    'check_non_closed_minimiser',
    'check_lemma_sub',
    'check_idt',
    'check_lw_agm',
    'check_restate',
    'restate_suite',
    'check_hz19',
    'check_lambda_laws',
    'random_lower_bound_suite',
    'parse_pointset',
    'read_pointset_file',
    'format_pointset',
]
