"""The CHSH protocol: quantum run, exact distribution, and local-realist baselines.

Each round, a referee distributes one half of a two-qubit singlet to each
of two parties.  Each party tosses a fair coin and measures one of two
single-qubit observables depending on the toss:

* party A measures ``R = X`` on coin 0 and ``Q = Z`` on coin 1,
* party B measures ``S = -(X+Z)/sqrt(2)`` on coin 0 and
  ``T = (-X+Z)/sqrt(2)`` on coin 1.

(Some textbook presentations swap which observable is called ``R`` and
which ``Q``; with the convention used here all four conditional averages
come out at +1/sqrt(2) except ``<QT>``.)

One full round is a single 16-outcome measurement on coin-A (x) coin-B
(x) qubit-A (x) qubit-B, whose operators are the projectors
``E_c (x) E_d (x) E^A_{c,m} (x) E^B_{d,n}``.  The induced outcome
distribution has the closed form

    P(c, d, m, n) = [1 + (-1)^(cd) * m * n / sqrt(2)] / 16,

and the module cross-checks this formula against the Born weights of the
operator construction.  Conditioning on the coin pair and averaging the
outcome product m*n gives <RS> + <QS> + <RT> - <QT> = 2*sqrt(2), whereas
any assignment of pre-existing values to R, Q, S, T -- however
distributed -- caps the same combination at 2 (the CHSH inequality).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import battery as battery_mod
from .linalg import (
    MeasurementOperatorSet,
    X,
    Z,
    bell_singlet,
    involutory_pvm,
    ket_plus,
    projector,
    tensor,
)
from .spaces import FiniteProbabilitySpace, point_mass, product, uniform
from .worlds import condition_seq, sample_world

__all__ = [
    "ChshOutcome",
    "CHSH_OUTCOMES",
    "RQST_TUPLES",
    "MIN_TRIALS",
    "S_TARGET",
    "alice_observables",
    "bob_observables",
    "build_chsh_operators",
    "chsh_initial_state",
    "chsh_distribution",
    "coin_event",
    "ConditionalAverageReport",
    "run_chsh",
    "lhv_chsh_averages",
    "lhv_chsh_simulate",
    "random_h_spaces",
    "lhv_sweep",
    "SweepReport",
]


class ChshOutcome(NamedTuple):
    """One round's record: both coins and both measurement results."""

    c: int  # party A coin, 0 or 1
    d: int  # party B coin, 0 or 1
    m: int  # party A result, +1 or -1
    n: int  # party B result, +1 or -1


#: All 16 outcomes, in the canonical sampling order.
CHSH_OUTCOMES = tuple(
    ChshOutcome(c, d, m, n)
    for c, d, m, n in itertools.product((0, 1), (0, 1), (1, -1), (1, -1))
)

#: Value tuples (r, q, s, t) for hidden-variable distributions.
RQST_TUPLES = tuple(itertools.product((1, -1), repeat=4))

#: Minimum run length, so each coin pair collects on the order of 10^3 samples.
MIN_TRIALS = 4000

S_TARGET = 2.0 * math.sqrt(2.0)

_SQRT2 = math.sqrt(2.0)

#: Which coin pair each conditional average draws from, and which
#: hidden-value coordinates it multiplies in the local-realist model.
_AVERAGES = {
    "rs": ((0, 0), (0, 2)),
    "qs": ((1, 0), (1, 2)),
    "rt": ((0, 1), (0, 3)),
    "qt": ((1, 1), (1, 3)),
}


def alice_observables() -> tuple[np.ndarray, np.ndarray]:
    """Party A's observables (R, Q) = (X, Z)."""
    return X, Z


def bob_observables() -> tuple[np.ndarray, np.ndarray]:
    """Party B's observables (S, T) = (-(X+Z)/sqrt2, (-X+Z)/sqrt2)."""
    s = -(X + Z) / _SQRT2
    t = (-X + Z) / _SQRT2
    return s, t


def build_chsh_operators() -> MeasurementOperatorSet:
    """The 16 projectors ``E_c (x) E_d (x) E^A_{c,m} (x) E^B_{d,n}`` on dimension 16."""
    r, q = alice_observables()
    s, t = bob_observables()
    e_coin = {0: projector([1, 0]), 1: projector([0, 1])}
    e_a = {0: involutory_pvm(r), 1: involutory_pvm(q)}
    e_b = {0: involutory_pvm(s), 1: involutory_pvm(t)}
    elements = []
    for out in CHSH_OUTCOMES:
        op = tensor(
            e_coin[out.c],
            e_coin[out.d],
            e_a[out.c].projector_for(out.m),
            e_b[out.d].projector_for(out.n),
        )
        elements.append((out, op))
    return MeasurementOperatorSet(elements)


def chsh_initial_state() -> np.ndarray:
    """|+> (x) |+> (x) singlet: both coin qubits plus the shared pair."""
    return tensor(ket_plus(), ket_plus(), bell_singlet())


def chsh_distribution(method: str = "analytic") -> FiniteProbabilitySpace:
    """The 16-outcome round distribution.

    ``method="analytic"`` evaluates the closed form; ``"linear_algebra"``
    computes Born weights ``<psi|M^dag M|psi>`` from the operator set.
    The two agree entrywise to within 1e-12 (cross-checked in tests).
    """
    if method == "analytic":
        weights = []
        for out in CHSH_OUTCOMES:
            sign = 1 if (out.c * out.d) % 2 == 0 else -1  # integer (-1)^(cd)
            weights.append((1.0 + sign * out.m * out.n / _SQRT2) / 16.0)
        return FiniteProbabilitySpace(CHSH_OUTCOMES, weights)
    if method == "linear_algebra":
        probs = build_chsh_operators().outcome_probabilities(chsh_initial_state())
        return FiniteProbabilitySpace(CHSH_OUTCOMES, [probs[o] for o in CHSH_OUTCOMES])
    raise ValueError(f"unknown method {method!r}")


def coin_event(c: int, d: int) -> tuple[ChshOutcome, ...]:
    """All outcomes with the given coin pair."""
    return tuple(o for o in CHSH_OUTCOMES if o.c == c and o.d == d)


@dataclass(frozen=True)
class ConditionalAverageReport:
    """The four coin-conditioned product averages and their combination.

    ``s_value`` is always ``rs + qs + rt - qt`` exactly as computed from
    the four stored averages.  For sampled runs, ``counts`` holds the
    per-average cell sizes, ``std_errors`` the binomial standard errors of
    each average, and ``tolerances`` the 4-sigma acceptance bands derived
    from the appropriate exact distribution.  ``exact`` carries the
    noise-free reference report when one exists.
    """

    rs: float
    qs: float
    rt: float
    qt: float
    s_value: float
    method: str
    trials: int | None = None
    seed: int | None = None
    counts: dict | None = None
    std_errors: dict | None = None
    tolerances: dict | None = None
    batteries: dict | None = None
    exact: "ConditionalAverageReport | None" = None

    @classmethod
    def from_averages(cls, averages: dict, method: str, **extra) -> "ConditionalAverageReport":
        s_value = averages["rs"] + averages["qs"] + averages["rt"] - averages["qt"]
        return cls(
            rs=averages["rs"],
            qs=averages["qs"],
            rt=averages["rt"],
            qt=averages["qt"],
            s_value=s_value,
            method=method,
            **extra,
        )

    @property
    def averages(self) -> dict:
        return {"rs": self.rs, "qs": self.qs, "rt": self.rt, "qt": self.qt}

    def to_dict(self) -> dict:
        out = {
            "averages": self.averages,
            "s_value": self.s_value,
            "method": self.method,
        }
        if self.trials is not None:
            out["trials"] = self.trials
        if self.seed is not None:
            out["seed"] = self.seed
        if self.counts is not None:
            out["counts"] = dict(self.counts)
        if self.std_errors is not None:
            out["std_errors"] = dict(self.std_errors)
        if self.tolerances is not None:
            out["tolerances"] = dict(self.tolerances)
        if self.batteries is not None:
            out["battery"] = {
                key: rep.to_dict() for key, rep in self.batteries.items()
            }
        if self.exact is not None:
            out["exact"] = self.exact.to_dict()
        return out


def _binomial_std_error(values: np.ndarray) -> float:
    """Standard error of the mean of a +/-1 sample, via the success fraction."""
    n = values.size
    p_hat = float((values > 0).mean())
    return 2.0 * math.sqrt(p_hat * (1.0 - p_hat) / n)


def run_chsh(
    trials: int,
    seed: int,
    threads: int = 1,
    battery_blocks: Sequence[int] | None = battery_mod.DEFAULT_BLOCK_LENS,
    significance: float = battery_mod.DEFAULT_SIGNIFICANCE,
) -> ConditionalAverageReport:
    """Sample a length-``trials`` world and compute the conditional averages.

    The world is drawn directly from the round distribution: the measure
    over outcome sequences is exactly the i.i.d. product of the Born
    weights, so per-round state collapse would produce identical
    statistics at far higher cost (and the distribution itself is
    cross-checked against the operator construction).

    Each coin pair's subsequence is also tested against its conditional
    distribution with the block-frequency battery (``battery_blocks``;
    pass ``None`` to skip).  Raises if any coin pair collected no samples.
    """
    if trials < MIN_TRIALS:
        raise ValueError(f"trials must be at least {MIN_TRIALS}, got {trials}")
    fps = chsh_distribution("analytic")
    world = sample_world(fps, trials, seed, threads=threads)
    averages: dict[str, float] = {}
    counts: dict[str, int] = {}
    std_errors: dict[str, float] = {}
    tolerances: dict[str, float] = {}
    batteries: dict[str, battery_mod.BatteryReport] = {}
    for name, ((c, d), _) in _AVERAGES.items():
        event = coin_event(c, d)
        cell = condition_seq(world, event)
        if len(cell) == 0:
            raise RuntimeError(f"coin pair ({c},{d}) collected no samples")
        products = np.array([o.m * o.n for o in cell.alphabet])
        values = products[cell.indices]
        averages[name] = float(values.mean())
        counts[name] = len(cell)
        std_errors[name] = _binomial_std_error(values)
        # 4 sigma under the exact conditional law: Var(m*n) = 1 - 1/2.
        tolerances[name] = 4.0 * math.sqrt(0.5 / len(cell))
        if battery_blocks is not None:
            conditional = fps.condition(event)
            # Only block lengths the cell is long enough for.
            usable = [
                k
                for k in battery_blocks
                if k * len(conditional.alphabet) ** k <= len(cell) / 10
            ]
            if usable:
                batteries[f"{c}{d}"] = battery_mod.run_battery(
                    cell, conditional, usable, significance
                )
    tolerances["s_value"] = 4.0 * math.sqrt(sum(0.5 / n for n in counts.values()))
    return ConditionalAverageReport.from_averages(
        averages,
        method="typical-sampling",
        trials=trials,
        seed=seed,
        counts=counts,
        std_errors=std_errors,
        tolerances=tolerances,
        batteries=batteries or None,
    )


def _require_rqst_space(h: FiniteProbabilitySpace) -> None:
    if set(h.alphabet) != set(RQST_TUPLES):
        raise ValueError(
            "hidden-variable space must be over all 16 value tuples (r, q, s, t) "
            "with entries +1/-1"
        )


def lhv_chsh_averages(h: FiniteProbabilitySpace) -> ConditionalAverageReport:
    """Exact conditional averages when (R, Q, S, T) carry pre-existing values.

    With values distributed as ``h``, each average is the weighted sum of
    the corresponding product, e.g. ``<RS> = sum_x h(x) * r * s``.  Every
    valid ``h`` satisfies ``|s_value| <= 2`` (each value tuple contributes
    rs + qs + rt - qt = +/-2); a violation here would be an internal bug
    and raises.
    """
    _require_rqst_space(h)
    averages = {}
    for name, (_, (i, j)) in _AVERAGES.items():
        averages[name] = math.fsum(
            h.prob(x) * x[i] * x[j] for x in h.alphabet
        )
    report = ConditionalAverageReport.from_averages(averages, method="lhv-exact")
    if abs(report.s_value) > 2.0 + 1e-12:
        raise RuntimeError(
            f"local-realist bound violated by exact averages: {report.s_value!r}"
        )
    return report


def lhv_chsh_simulate(
    h: FiniteProbabilitySpace, trials: int, seed: int, threads: int = 1
) -> ConditionalAverageReport:
    """Sampled counterpart of :func:`lhv_chsh_averages`.

    Draws rounds from the product of ``h`` with two fair coins, restricts
    to each coin pair, and averages the revealed products.  The report
    nests the exact averages; the empirical ones converge to them, within
    the recorded 4-sigma tolerances.
    """
    _require_rqst_space(h)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    exact = lhv_chsh_averages(h)
    coin = uniform((0, 1))
    joint = product(h, coin, coin)
    world = sample_world(joint, trials, seed, threads=threads)
    averages: dict[str, float] = {}
    counts: dict[str, int] = {}
    std_errors: dict[str, float] = {}
    tolerances: dict[str, float] = {}
    exact_avgs = exact.averages
    for name, ((c, d), (i, j)) in _AVERAGES.items():
        event = tuple(sym for sym in joint.alphabet if sym[1] == c and sym[2] == d)
        cell = condition_seq(world, event)
        if len(cell) == 0:
            raise RuntimeError(f"coin pair ({c},{d}) collected no samples")
        products = np.array([sym[0][i] * sym[0][j] for sym in cell.alphabet])
        values = products[cell.indices]
        averages[name] = float(values.mean())
        counts[name] = len(cell)
        std_errors[name] = _binomial_std_error(values)
        variance = max(0.0, 1.0 - exact_avgs[name] ** 2)
        tolerances[name] = 4.0 * math.sqrt(variance / len(cell))
    return ConditionalAverageReport.from_averages(
        averages,
        method="lhv-simulated",
        trials=trials,
        seed=seed,
        counts=counts,
        std_errors=std_errors,
        tolerances=tolerances,
        exact=exact,
    )


def random_h_spaces(count: int, seed: int) -> list[FiniteProbabilitySpace]:
    """Hidden-variable distributions drawn uniformly from the simplex.

    Uses normalized exponential draws (symmetric over the 16 vertices),
    from a Philox stream keyed on ``seed``.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    gen = np.random.Generator(np.random.Philox(key=seed))
    spaces = []
    for _ in range(count):
        w = gen.standard_exponential(len(RQST_TUPLES))
        spaces.append(FiniteProbabilitySpace(RQST_TUPLES, w / w.sum()))
    return spaces


@dataclass(frozen=True)
class SweepReport:
    """Bound check over random hidden-variable distributions plus all vertices."""

    max_s_value: float
    vertex_max_s_value: float
    num_random: int
    num_vertices: int
    seed: int
    bound: float = 2.0

    @property
    def bound_ok(self) -> bool:
        return self.max_s_value <= self.bound + 1e-12

    def to_dict(self) -> dict:
        return {
            "max_s_value": self.max_s_value,
            "vertex_max_s_value": self.vertex_max_s_value,
            "num_random": self.num_random,
            "num_vertices": self.num_vertices,
            "seed": self.seed,
            "bound": self.bound,
            "bound_ok": self.bound_ok,
        }


def lhv_sweep(count: int, seed: int) -> SweepReport:
    """Max ``s_value`` over ``count`` random distributions and the 16 point masses."""
    vertex_s = []
    for x in RQST_TUPLES:
        vertex_s.append(lhv_chsh_averages(point_mass(RQST_TUPLES, x)).s_value)
    random_s = [lhv_chsh_averages(h).s_value for h in random_h_spaces(count, seed)]
    all_s = vertex_s + random_s
    return SweepReport(
        max_s_value=max(all_s),
        vertex_max_s_value=max(vertex_s),
        num_random=count,
        num_vertices=len(RQST_TUPLES),
        seed=seed,
    )
