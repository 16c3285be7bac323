"""Chinese restaurant process and stick-breaking partition laws, samplers
and verification harness."""

__version__ = "0.1.0"

from .errors import InvalidInputError, ResourceLimitError, UnsupportedSizeError
from .laws import (
    ewens_log_prob,
    lemma_a_log_prob,
    lemma_a_quadrature_oracle,
    lemma_b_closed_form,
    lemma_b_truncated_sum,
    lemma_c_check,
    polya_seq_log_prob,
    size_biased_perm_log_prob,
    theorem1_recombination,
)
from .partition import Partition, block_sizes, enumerate_partitions, induced_partition
from .rng import RandomSource
from .samplers import (
    StickSequence,
    crp_sample,
    polya_urn_path,
    size_biased_permutation,
    stick_breaking_labels,
    stick_weights,
    table1_proportion,
)
from .stats import (
    EmpiricalDistribution,
    TestReport,
    accumulate,
    chi_square_statistic,
    ks_statistic,
    tv_distance,
)
