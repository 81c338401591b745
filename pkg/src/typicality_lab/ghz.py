"""The GHZ protocol: perfect three-party correlations and their local-realist impossibility.

Each round, a source distributes the three qubits of the state
``(|000> - |111>)/sqrt(2)`` to three parties.  Each party tosses a fair
coin and measures ``X`` on 0 or ``Y`` on 1.  One round is a single
64-outcome measurement whose distribution is

    P(c1, c2, c3, m1, m2, m3) = [1 - m1*m2*m3 * cos(pi*(c1+c2+c3)/2)] / 64.

The cosine factor is evaluated by integer lookup on c1+c2+c3, never by
floating trigonometry, so the structural zeros of the distribution are
exact.  That exactness carries the whole argument: an outcome of weight
exactly zero can never be sampled, so for coin triples 011/101/110 the
product m1*m2*m3 is +1 on *every* round, and on 000 it is -1 on every
round -- perfect correlations, not statistical ones.

No assignment of pre-existing values to the six observables can
reproduce those correlations: the four parity constraints they impose on
(m1_0, m1_1, m2_0, m2_1, m3_0, m3_1) have no solution, which
:func:`lhv_ghz_enumerate` verifies by checking all 64 assignments.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg import MeasurementOperatorSet, X, Y, ghz_state, involutory_pvm, ket_plus, projector, tensor
from .spaces import FiniteProbabilitySpace
from .worlds import condition_seq, sample_world

__all__ = [
    "GhzOutcome",
    "GHZ_OUTCOMES",
    "LhvAssignment",
    "LHV_ASSIGNMENTS",
    "MIN_TRIALS",
    "COS_QUARTER_TURNS",
    "CONSTRAINTS",
    "PerfectCorrelationError",
    "party_observables",
    "build_ghz_operators",
    "ghz_initial_state",
    "ghz_distribution",
    "coin_event",
    "GhzRunReport",
    "run_ghz",
    "GhzEnumeration",
    "lhv_ghz_enumerate",
    "FeasibilityReport",
    "lhv_ghz_feasibility",
]


class GhzOutcome(NamedTuple):
    """One round's record: the three coins and the three measurement results."""

    c1: int
    c2: int
    c3: int
    m1: int
    m2: int
    m3: int


#: All 64 outcomes, in the canonical sampling order.
GHZ_OUTCOMES = tuple(
    GhzOutcome(*values)
    for values in itertools.product((0, 1), (0, 1), (0, 1), (1, -1), (1, -1), (1, -1))
)


class LhvAssignment(NamedTuple):
    """Pre-existing values of the six observables, ``m<i>_<coin>`` per party."""

    m1_0: int
    m1_1: int
    m2_0: int
    m2_1: int
    m3_0: int
    m3_1: int


#: All 64 value assignments, in lexicographic order over (+1, -1).
LHV_ASSIGNMENTS = tuple(
    LhvAssignment(*values) for values in itertools.product((1, -1), repeat=6)
)

#: Minimum run length, so each coin triple collects on the order of 10^3 samples.
MIN_TRIALS = 8000

#: cos(pi*k/2) for k = c1+c2+c3, as exact integers.
COS_QUARTER_TURNS = {0: 1, 1: 0, 2: -1, 3: 0}

#: The perfect-correlation constraints, keyed by coin triple in fixed
#: order: value product +1 on 011/101/110 and -1 on 000.
CONSTRAINTS = {
    "011": ((0, 3, 5), +1),
    "101": ((1, 2, 5), +1),
    "110": ((1, 3, 4), +1),
    "000": ((0, 2, 4), -1),
}


class PerfectCorrelationError(RuntimeError):
    """A sampled round violated a weight-zero constraint (sampler bug)."""


def party_observables() -> tuple[np.ndarray, np.ndarray]:
    """The per-party observables for coin 0 and coin 1: (X, Y)."""
    return X, Y


def build_ghz_operators() -> MeasurementOperatorSet:
    """The 64 projectors ``E_c1 (x) E_c2 (x) E_c3 (x) E^1 (x) E^2 (x) E^3`` on dimension 64."""
    a0, a1 = party_observables()
    e_coin = {0: projector([1, 0]), 1: projector([0, 1])}
    e_m = {0: involutory_pvm(a0), 1: involutory_pvm(a1)}
    elements = []
    for out in GHZ_OUTCOMES:
        op = tensor(
            e_coin[out.c1],
            e_coin[out.c2],
            e_coin[out.c3],
            e_m[out.c1].projector_for(out.m1),
            e_m[out.c2].projector_for(out.m2),
            e_m[out.c3].projector_for(out.m3),
        )
        elements.append((out, op))
    return MeasurementOperatorSet(elements)


def ghz_initial_state() -> np.ndarray:
    """|+> (x) |+> (x) |+> (x) GHZ: the coin qubits plus the shared triple."""
    return tensor(ket_plus(), ket_plus(), ket_plus(), ghz_state())


def ghz_distribution(method: str = "analytic") -> FiniteProbabilitySpace:
    """The 64-outcome round distribution.

    ``"analytic"`` uses the closed form with the integer cosine lookup, so
    its 16 structural zeros are exactly 0.0.  ``"linear_algebra"``
    computes Born weights from the operator set in full complex
    arithmetic (the Y observable makes real-only shortcuts wrong).
    """
    if method == "analytic":
        weights = []
        for out in GHZ_OUTCOMES:
            cos_term = COS_QUARTER_TURNS[out.c1 + out.c2 + out.c3]
            weights.append((1 - out.m1 * out.m2 * out.m3 * cos_term) / 64.0)
        return FiniteProbabilitySpace(GHZ_OUTCOMES, weights)
    if method == "linear_algebra":
        probs = build_ghz_operators().outcome_probabilities(ghz_initial_state())
        return FiniteProbabilitySpace(GHZ_OUTCOMES, [probs[o] for o in GHZ_OUTCOMES])
    raise ValueError(f"unknown method {method!r}")


def coin_event(c1: int, c2: int, c3: int) -> tuple[GhzOutcome, ...]:
    """All outcomes with the given coin triple."""
    return tuple(o for o in GHZ_OUTCOMES if (o.c1, o.c2, o.c3) == (c1, c2, c3))


@dataclass(frozen=True)
class GhzRunReport:
    """Per-coin-triple results of a sampled run.

    ``constrained`` maps the four perfectly correlated triples to their
    sample count, required product and violation count (always zero short
    of a sampler bug); ``free`` maps the other four triples to their mean
    product, which converges to 0 within the recorded 4-sigma tolerance.
    """

    trials: int
    seed: int
    constrained: dict
    free: dict

    @property
    def total_violations(self) -> int:
        return sum(entry["violations"] for entry in self.constrained.values())

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "perfect_correlation": dict(self.constrained),
            "free_triples": dict(self.free),
        }


def run_ghz(trials: int, seed: int, threads: int = 1) -> GhzRunReport:
    """Sample a length-``trials`` world and verify the perfect correlations.

    For coin triples 011/101/110 every conditioned round must have
    product +1, and for 000 product -1; a single violation raises
    :class:`PerfectCorrelationError`, because such outcomes have weight
    exactly zero and the sampler cannot produce them.  The remaining four
    triples report their empirical mean product.
    """
    if trials < MIN_TRIALS:
        raise ValueError(f"trials must be at least {MIN_TRIALS}, got {trials}")
    fps = ghz_distribution("analytic")
    world = sample_world(fps, trials, seed, threads=threads)
    constrained: dict = {}
    free: dict = {}
    for coins in itertools.product((0, 1), repeat=3):
        key = "".join(str(c) for c in coins)
        cell = condition_seq(world, coin_event(*coins))
        products = np.array([o.m1 * o.m2 * o.m3 for o in cell.alphabet])
        values = products[cell.indices]
        coin_sum = sum(coins)
        if coin_sum in (0, 2):
            required = -1 if coin_sum == 0 else 1
            violations = int((values != required).sum())
            constrained[key] = {
                "count": len(cell),
                "required_product": required,
                "violations": violations,
            }
            if violations:
                raise PerfectCorrelationError(
                    f"coin triple {key}: {violations} rounds violated the "
                    f"required product {required:+d}"
                )
        else:
            mean = float(values.mean()) if len(cell) else 0.0
            free[key] = {
                "count": len(cell),
                "mean_product": mean,
                "tolerance": 4.0 / math.sqrt(len(cell)) if len(cell) else float("inf"),
            }
    return GhzRunReport(trials=trials, seed=seed, constrained=constrained, free=free)


def _constraint_satisfied(assignment: LhvAssignment, name: str) -> bool:
    coords, required = CONSTRAINTS[name]
    prod = assignment[coords[0]] * assignment[coords[1]] * assignment[coords[2]]
    return prod == required


@dataclass(frozen=True)
class GhzEnumeration:
    """Exhaustive check of all 64 value assignments against the four constraints.

    ``witnesses`` lists, for every assignment, the first constraint (in
    the fixed order 011, 101, 110, 000) it fails; no assignment satisfies
    all four, so the table always has 64 rows.
    """

    satisfying_count: int
    plus_only_count: int
    per_constraint_counts: dict
    witnesses: tuple

    def to_dict(self) -> dict:
        return {
            "satisfying_count": self.satisfying_count,
            "plus_only_count": self.plus_only_count,
            "per_constraint_counts": dict(self.per_constraint_counts),
            "witnesses": [
                {"assignment": list(a), "fails": name} for a, name in self.witnesses
            ],
        }


def lhv_ghz_enumerate() -> GhzEnumeration:
    """Count assignments meeting the perfect-correlation constraints (none do).

    The three +1 constraints alone are three independent parities on six
    values and admit exactly 8 assignments; adding the 000 constraint
    leaves none, since the product of the three +1 parities forces the
    000 product to +1.
    """
    per_constraint = {name: 0 for name in CONSTRAINTS}
    satisfying = 0
    plus_only = 0
    witnesses = []
    for assignment in LHV_ASSIGNMENTS:
        verdicts = {
            name: _constraint_satisfied(assignment, name) for name in CONSTRAINTS
        }
        for name, ok in verdicts.items():
            per_constraint[name] += int(ok)
        if all(verdicts.values()):
            satisfying += 1
        if all(verdicts[n] for n in ("011", "101", "110")):
            plus_only += 1
        for name in CONSTRAINTS:
            if not verdicts[name]:
                witnesses.append((assignment, name))
                break
    return GhzEnumeration(
        satisfying_count=satisfying,
        plus_only_count=plus_only,
        per_constraint_counts=per_constraint,
        witnesses=tuple(witnesses),
    )


@dataclass(frozen=True)
class FeasibilityReport:
    """Constraint-violation mass of a hidden-value distribution.

    ``violation_mass[name]`` is the total weight on assignments breaking
    that constraint.  Recovering the perfect correlations would need all
    four masses to vanish, but every assignment violates at least one
    constraint, so the masses sum to at least 1 for any distribution;
    ``feasible`` is therefore always False.
    """

    violation_mass: dict
    total_violation_mass: float

    @property
    def feasible(self) -> bool:
        return all(mass == 0.0 for mass in self.violation_mass.values())

    def to_dict(self) -> dict:
        return {
            "violation_mass": dict(self.violation_mass),
            "total_violation_mass": self.total_violation_mass,
            "feasible": self.feasible,
        }


def lhv_ghz_feasibility(p: FiniteProbabilitySpace) -> FeasibilityReport:
    """Per-constraint violation mass of a distribution over value assignments."""
    if set(p.alphabet) != set(LHV_ASSIGNMENTS):
        raise ValueError(
            "hidden-variable space must be over all 64 six-value assignments "
            "with entries +1/-1"
        )
    masses = {}
    for name in CONSTRAINTS:
        masses[name] = math.fsum(
            p.prob(x) for x in LHV_ASSIGNMENTS if not _constraint_satisfied(LhvAssignment(*x), name)
        )
    return FeasibilityReport(
        violation_mass=masses,
        total_violation_mass=math.fsum(masses.values()),
    )
