"""Seeded simulation of the CHSH and GHZ measurement protocols.

The package builds both protocols twice over: once from explicit
measurement operators on small Hilbert spaces (with the induced outcome
distribution computed from Born weights), and once from the closed-form
distributions, cross-checked entrywise.  Outcome sequences are drawn by a
deterministic counter-based generator standing in for a typical sequence
under the product measure, and the sequence toolkit (conditioning,
projection, zipping, frequency reports, a chi-square battery) turns
limit statements about infinite sequences into finite-scale checks with
explicit tolerances.

Local-hidden-variable baselines are included for contrast: exact and
simulated CHSH conditional averages for any distribution of pre-existing
values (always respecting the bound of 2), and the exhaustive 64-case
enumeration showing no value assignment reproduces the GHZ perfect
correlations.
"""

from .battery import (
    BatteryReport,
    FrequencyTest,
    block_frequency_test,
    run_battery,
)
from .chsh import (
    CHSH_OUTCOMES,
    ChshOutcome,
    ConditionalAverageReport,
    build_chsh_operators,
    chsh_distribution,
    chsh_initial_state,
    lhv_chsh_averages,
    lhv_chsh_simulate,
    lhv_sweep,
    random_h_spaces,
    run_chsh,
)
from .ghz import (
    GHZ_OUTCOMES,
    GhzEnumeration,
    GhzOutcome,
    GhzRunReport,
    LhvAssignment,
    PerfectCorrelationError,
    build_ghz_operators,
    ghz_distribution,
    ghz_initial_state,
    lhv_ghz_enumerate,
    lhv_ghz_feasibility,
    run_ghz,
)
from .linalg import (
    ATOL,
    I2,
    MeasurementOperatorSet,
    Pvm,
    X,
    Y,
    Z,
    basis,
    bell_singlet,
    check_completeness,
    controlled_unitary,
    expectation,
    ghz_state,
    involutory_pvm,
    ket_plus,
    max_tensor_dim,
    projector,
    tensor,
)
from .spaces import (
    FiniteProbabilitySpace,
    fair_coin,
    point_mass,
    product,
    uniform,
)
from .worlds import (
    EmpiricalStats,
    LlnReport,
    WorldPrefix,
    condition_seq,
    empirical,
    lln_report,
    project_seq,
    sample_world,
    zip_seqs,
)

__version__ = "0.1.0"
