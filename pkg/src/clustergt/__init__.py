"""Two-step sampled group testing over probabilistic cluster formations.

Pick a sampling level of a cluster-formation ensemble, test one
representative per cluster with a zero-error non-adaptive matrix tailored to
the feasible infected sets, then propagate statuses cluster-wise. The
package covers ensemble enumeration from random connection graphs, formation
trees and their statistics, optimal representative selection, matrix
construction and decoding, exponentially split tree closed forms, adaptive
baselines, and exhaustive/Monte Carlo evaluation.
"""

from ._kernels import IMPL as kernel_impl
from .baselines import (
    PoolOracle,
    hwang_expected_tests_formula,
    hwang_generalized,
    individual_testing,
)
from .engine import SimReport, evaluate_exhaustive, evaluate_monte_carlo
from .errors import (
    ClusterGTError,
    KMismatch,
    NotATree,
    PreconditionViolated,
    ScenarioError,
    SearchExhausted,
    TooLarge,
    TooManyUncertainEdges,
    UnknownNode,
    UnrecognizedResultVector,
)
from .expsplit import (
    ExpSplitParams,
    check_lemma_binomsum,
    check_lemma_half_sum,
    closed_form_ef,
    expected_infections,
    generate,
    min_tests,
)
from .model import (
    ClusterFormation,
    FormationEnsemble,
    InfectionState,
    RandomConnectionGraph,
    enumerate_formations,
    realize_infection,
)
from .sampling import (
    SamplingPlan,
    all_plans,
    beta,
    expected_false,
    expected_false_general,
    expected_false_given,
    make_plan,
    optimal_sampling,
    optimal_sampling_general,
)
from .scenario import (
    Scenario,
    bundled_scenario_path,
    parse_ensemble_csv,
    parse_scenario,
    parse_scenario_text,
)
from .separable import (
    Construction,
    DecodeTable,
    TestMatrix,
    build_decode_table,
    construct_matrix,
    decode,
    empty_infected_achievable,
    encode,
    lower_bound_tests,
    possible_infected_sets,
    run_two_step,
    verify_separable,
)
from .tree import FormationTree, lambda_of_node, lambda_table, validate_tree

__version__ = "0.1.0"
