"""Chance-constraint handling for the spinning-reserve requirement.

The probabilistic requirement "total reserve covers the renewable shortfall
with probability at least alpha" is made deterministic by enumerating the
discretized output levels: one indicator binary per support point, a
two-sided big-M link tying each indicator to its shortfall threshold, and a
coverage constraint summing indicator-weighted masses against alpha.

:func:`min_reserve_bruteforce` is the independent oracle: it computes the
exact minimal reserve for a discrete output distribution by a cumulative
probability walk, with no MILP involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .milp import LinExpr, LinearModel, ModelError, solve
from .sequences import ProbSequence, expectation


@dataclass(frozen=True)
class ChanceSpec:
    """Per-period combined sequences and expectations, plus the confidence."""
    alpha: float
    sequences: tuple[ProbSequence, ...]
    expectations: tuple[float, ...]

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha {self.alpha} outside [0, 1]")
        if len(self.sequences) != len(self.expectations):
            raise ValueError("sequences and expectations length mismatch")
        for seq, e in zip(self.sequences, self.expectations):
            if abs(expectation(seq) - e) > 1e-6:
                raise ValueError(
                    f"expectation {e} does not match its sequence "
                    f"({expectation(seq)})")


@dataclass
class IndicatorBlock:
    """Bookkeeping of the binaries and big-M values added per period."""
    z_vars: dict[tuple[int, int], int] = field(default_factory=dict)
    big_m: dict[int, float] = field(default_factory=dict)
    n_constraints: int = 0


def attach_reserve_chance(model: LinearModel, spec: ChanceSpec,
                          reserve_exprs: list[LinExpr],
                          prefix: str = "dst") -> IndicatorBlock:
    """Add the deterministic equivalent of the reserve chance constraint.

    For period ``t`` and support index ``m`` (zero-mass points are skipped),
    the shortfall threshold is ``E_t - m*l`` and the big-M sandwich makes
    the binary equal to "reserve covers this threshold"; the coverage
    constraint then requires indicator-weighted mass at least alpha.
    """
    if len(reserve_exprs) != len(spec.sequences):
        raise ValueError("one reserve expression per period required")
    block = IndicatorBlock()
    if spec.alpha <= 0.0:
        return block  # vacuous: zero coverage is achievable with all z = 0

    for t, (seq, e_t, reserve) in enumerate(
            zip(spec.sequences, spec.expectations, reserve_exprs)):
        lo, hi = model.expr_bounds(reserve)
        if hi == float("inf"):
            raise ModelError(f"reserve expression at t={t} is unbounded")
        n = len(seq) - 1
        q = hi + e_t + n * seq.step_l + 1.0  # safe big-M for this period
        block.big_m[t] = q
        coverage = LinExpr()
        for m, mass in enumerate(seq.probs):
            if mass <= 0.0:
                continue
            thr = e_t - m * seq.step_l
            z = model.add_var(f"{prefix}_z_t{t + 1}_m{m}", kind="binary")
            block.z_vars[(t, m)] = z
            # z = 1 forces reserve >= thr
            model.add_constraint(reserve - model.var(z, q), ">=", thr - q,
                                 label=f"{prefix}_lo_t{t + 1}_m{m}")
            # reserve > thr forces z = 1
            model.add_constraint(reserve - model.var(z, q), "<=", thr,
                                 label=f"{prefix}_hi_t{t + 1}_m{m}")
            coverage.add_term(z, mass)
            block.n_constraints += 2
        model.add_constraint(coverage, ">=", spec.alpha,
                             label=f"{prefix}_cover_t{t + 1}")
        block.n_constraints += 1
    return block


def min_reserve_bruteforce(c: ProbSequence, alpha: float, e_t: float) -> float:
    """Exact minimal reserve covering the shortfall with probability >= alpha.

    Walk the support from the highest output down, accumulating mass; the
    lowest output level that must still be covered fixes the reserve.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha {alpha} outside [0, 1]")
    if alpha == 0.0:
        return 0.0
    tail = 0.0
    needed_level = None
    for m in range(len(c.probs) - 1, -1, -1):
        if c.probs[m] <= 0.0:
            continue
        tail += c.probs[m]
        needed_level = m * c.step_l
        if tail >= alpha - 1e-12:
            break
    if needed_level is None:
        return 0.0
    return max(0.0, e_t - needed_level)


def minimal_reserve_milp(c: ProbSequence, alpha: float,
                         reserve_cap: float | None = None,
                         fixed_reserve: float | None = None):
    """Solve the one-period reserve-only MILP (diagnostic / validation path).

    Minimizes a single reserve variable under the attached chance machinery.
    ``fixed_reserve`` pins the variable instead, turning the solve into a
    feasibility check.  Returns the :class:`~lcies.milp.SolveResult`.
    """
    if reserve_cap is None:
        reserve_cap = max(expectation(c), 0.0) + len(c.probs) * c.step_l + 1.0
    model = LinearModel("min_reserve")
    r = model.add_var("reserve", 0.0, reserve_cap)
    if fixed_reserve is not None:
        # pin via a constraint so the nonnegativity of reserve still applies
        model.add_constraint(model.var(r), "=", fixed_reserve, label="reserve_pin")
    spec = ChanceSpec(alpha, (c,), (expectation(c),))
    attach_reserve_chance(model, spec, [model.var(r)])
    model.set_objective(model.var(r))
    return solve(model, limits={"mip_gap": 0.0})
