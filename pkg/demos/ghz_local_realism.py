"""Why no value assignment reproduces the GHZ correlations: all 64 cases, checked.

If each party's two observables had pre-existing values, a round would
just reveal six numbers (m1_0, m1_1, ..., m3_1) in {+1,-1}.  The
perfect correlations demand

    m1_0*m2_1*m3_1 = +1,  m1_1*m2_0*m3_1 = +1,
    m1_1*m2_1*m3_0 = +1,  m1_0*m2_0*m3_0 = -1.

Multiply the first three together and every squared value drops out,
forcing m1_0*m2_0*m3_0 = +1 -- the opposite of the fourth constraint.
The enumeration below confirms it by brute force: the three +1
constraints admit exactly 8 of the 64 assignments, and adding the
fourth leaves none.  Consequently *any* distribution over assignments
puts mass at least 1 on constraint violations.

=== EXAMPLE OUTPUT ===
assignments satisfying all four constraints: 0 / 64
assignments satisfying the three +1 constraints: 8
per-constraint satisfying counts: {'011': 32, '101': 32, '110': 32, '000': 32}
witness (all +1 values): fails constraint '000'
violation mass, uniform distribution: {'011': 0.5, '101': 0.5, '110': 0.5, '000': 0.5}
violation mass, best-effort support:  {'011': 0.0, '101': 0.0, '110': 0.0, '000': 1.0}
feasible distributions found: none (total violation mass >= 1 always)
"""

from typicality_lab import lhv_ghz_enumerate, lhv_ghz_feasibility
from typicality_lab.ghz import LHV_ASSIGNMENTS, LhvAssignment
from typicality_lab.spaces import FiniteProbabilitySpace, uniform


def main():
    result = lhv_ghz_enumerate()
    print(f"assignments satisfying all four constraints: {result.satisfying_count} / 64")
    print(f"assignments satisfying the three +1 constraints: {result.plus_only_count}")
    print(f"per-constraint satisfying counts: {result.per_constraint_counts}")
    witness = dict(result.witnesses)[LhvAssignment(1, 1, 1, 1, 1, 1)]
    print(f"witness (all +1 values): fails constraint '{witness}'")

    flat = lhv_ghz_feasibility(uniform(LHV_ASSIGNMENTS))
    print(f"violation mass, uniform distribution: {flat.violation_mass}")

    # The best local realism can do: spread mass over the 8 assignments
    # meeting the three +1 constraints; the 000 constraint then fails fully.
    plus_only = [
        x
        for x in LHV_ASSIGNMENTS
        if x.m1_0 * x.m2_1 * x.m3_1 == 1
        and x.m1_1 * x.m2_0 * x.m3_1 == 1
        and x.m1_1 * x.m2_1 * x.m3_0 == 1
    ]
    weights = [1 / len(plus_only) if x in plus_only else 0.0 for x in LHV_ASSIGNMENTS]
    best = lhv_ghz_feasibility(FiniteProbabilitySpace(LHV_ASSIGNMENTS, weights))
    print(f"violation mass, best-effort support:  {best.violation_mass}")
    print("feasible distributions found: none (total violation mass >= 1 always)")


if __name__ == "__main__":
    main()
