"""SAT solver boosting: DIMACS parsing, WalkSAT, and meta-experiments.

Completion times are measured in flips, never wall-clock. The empirical
flip-count distribution of a solver/instance family becomes a bandit arm
with unit reward per solve, and the restart policies from this package are
run on top of it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import kernels
from .arms import ArmSpec, ConstantReward, Empirical, ZeroReset, empirical_from_samples
from .policies import DecisionGrid, LubyPolicy, Policy, UcbRbPolicy
from .sim import EpisodeTrace, episode_rngs, run_episode

log = logging.getLogger(__name__)


class DimacsError(ValueError):
    pass


class EmptyDistributionError(RuntimeError):
    pass


@dataclass(frozen=True)
class CnfFormula:
    """CNF over variables 1..n_vars; clauses are tuples of signed literals."""

    n_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n_vars < 0:
            raise DimacsError("variable count must be >= 0")
        for i, clause in enumerate(self.clauses):
            if not clause:
                raise DimacsError(f"clause {i} is empty")
            for lit in clause:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise DimacsError(f"literal {lit} out of range in clause {i}")

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    def flatten(self) -> tuple[np.ndarray, np.ndarray]:
        """(lits, offsets) arrays for the solver kernel."""
        lits = []
        offsets = [0]
        for clause in self.clauses:
            lits.extend(clause)
            offsets.append(len(lits))
        return np.asarray(lits, dtype=np.int32), np.asarray(offsets, dtype=np.int64)


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF; tolerates the SATLIB trailing '%' block and clause
    lines spanning multiple physical lines. Duplicate literals within a
    clause are dropped."""
    n_vars = None
    n_clauses = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    done = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            done = True  # SATLIB convention: '%' then a lone '0'
            continue
        if done:
            if line != "0":
                raise DimacsError(f"line {lineno}: content after '%' terminator")
            continue
        if line.startswith("p"):
            if n_vars is not None:
                raise DimacsError(f"line {lineno}: duplicate problem header")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                n_vars, n_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: non-integer header counts") from None
            continue
        if n_vars is None:
            raise DimacsError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                if not current:
                    raise DimacsError(f"line {lineno}: empty clause")
                clauses.append(tuple(dict.fromkeys(current)))
                current = []
            else:
                if abs(lit) > n_vars:
                    raise DimacsError(f"line {lineno}: literal {lit} out of range")
                current.append(lit)
    if n_vars is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("unterminated final clause (missing 0)")
    if n_clauses is not None and len(clauses) != n_clauses:
        raise DimacsError(
            f"header declares {n_clauses} clauses but {len(clauses)} were parsed"
        )
    return CnfFormula(n_vars=n_vars, clauses=tuple(clauses))


def serialize_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.n_vars} {formula.n_clauses}"]
    for clause in formula.clauses:
        lines.append(" ".join(str(lit) for lit in clause) + " 0")
    return "\n".join(lines) + "\n"


def generate_random_3sat(n_vars: int, n_clauses: int, seed: int) -> CnfFormula:
    """Uniform random 3-SAT: three distinct variables per clause, signs
    uniform; deterministic per seed."""
    if n_vars < 3:
        raise ValueError("need at least 3 variables")
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(n_clauses):
        vs = rng.choice(n_vars, size=3, replace=False) + 1
        signs = np.where(rng.random(3) < 0.5, -1, 1)
        clauses.append(tuple(int(v * s) for v, s in zip(vs, signs)))
    return CnfFormula(n_vars=n_vars, clauses=tuple(clauses))


def satisfies(formula: CnfFormula, assignment) -> bool:
    """assignment[v-1] in {0, 1} for variable v."""
    assignment = np.asarray(assignment)
    for clause in formula.clauses:
        if not any((lit > 0) == bool(assignment[abs(lit) - 1]) for lit in clause):
            return False
    return True


@dataclass(frozen=True)
class SolveAttempt:
    solved: bool
    flips: int
    assignment: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.flips < 0:
            raise ValueError("flip count must be >= 0")
        if self.solved != (self.assignment is not None):
            raise ValueError("assignment must be present exactly when solved")


class SolverStrategy:
    """Pluggable local-search heuristic; run() returns (solved, flips, assignment)."""

    name = "strategy"

    def run(self, formula: CnfFormula, noise: float, max_flips: int, rng):
        raise NotImplementedError


class SkcStrategy(SolverStrategy):
    """WalkSAT/SKC: random unsat clause, then noise-greedy break-count flip."""

    name = "skc"

    def run(self, formula: CnfFormula, noise: float, max_flips: int, rng):
        lits, offsets = formula.flatten()
        return kernels.walksat_run(formula.n_vars, lits, offsets, noise, max_flips, rng)


_STRATEGIES = {"skc": SkcStrategy()}


def walksat(
    formula: CnfFormula,
    noise: float = 0.5,
    max_flips: int = 10**5,
    rng=None,
    strategy: str = "skc",
) -> SolveAttempt:
    """One local-search run from a fresh random assignment.

    Any satisfying assignment is verified against every clause before being
    reported; a heuristic claiming an unsound solution is a hard error.
    """
    if not 0.0 <= noise <= 1.0:
        raise ValueError("noise must lie in [0, 1]")
    if max_flips < 0:
        raise ValueError("max_flips must be >= 0")
    if rng is None:
        rng = np.random.default_rng()
    solved, flips, assignment = _STRATEGIES[strategy].run(formula, noise, max_flips, rng)
    if solved:
        assignment = np.asarray(assignment)
        if not satisfies(formula, assignment):
            raise RuntimeError("solver reported an assignment that fails verification")
        return SolveAttempt(True, int(flips), tuple(int(b) for b in assignment))
    return SolveAttempt(False, int(flips))


@dataclass(frozen=True)
class CompletionSamples:
    """Flip counts of completed runs; censored runs are counted, not included."""

    flips: tuple[float, ...]
    censored: int
    cap: int

    @property
    def total_runs(self) -> int:
        return len(self.flips) + self.censored


def collect_completion_samples(
    formulas,
    noise: float = 0.5,
    cap: int = 10**5,
    reps: int = 1,
    rng=None,
    strategy: str = "skc",
) -> CompletionSamples:
    """reps independent runs per formula; uncompleted runs are recorded as
    right-censored at the cap and excluded from the sample list."""
    if rng is None:
        rng = np.random.default_rng()
    flips = []
    censored = 0
    for formula in formulas:
        for _ in range(reps):
            att = walksat(formula, noise, cap, rng, strategy=strategy)
            if att.solved:
                flips.append(float(att.flips))
            else:
                censored += 1
    if not flips:
        raise EmptyDistributionError("every run hit the flip cap; no samples")
    if censored:
        log.info("completion sampling: %d of %d runs censored at cap %d",
                 censored, censored + len(flips), cap)
    return CompletionSamples(flips=tuple(flips), censored=censored, cap=cap)


def arm_from_samples(samples: CompletionSamples) -> ArmSpec:
    """Empirical completion-time arm with unit reward per solve."""
    dist = empirical_from_samples(samples.flips)
    return ArmSpec(completion=dist, reward=ConstantReward(1.0), reset=ZeroReset())


def preset_grid(samples, i_max: int = 8, scale: float | None = None) -> DecisionGrid:
    """Cutoff grid scale * 10^(-0.5 + 0.125 i), i = 0..i_max.

    The exponent grid is dimensionless; the scale multiplier
    defaults to the empirical median flip count so the grid brackets the
    distribution's magnitude.
    """
    flips = samples.flips if isinstance(samples, CompletionSamples) else samples
    if scale is None:
        scale = float(np.median(np.asarray(flips, dtype=float)))
    if not scale > 0:
        raise ValueError("grid scale must be positive")
    cutoffs = tuple(scale * 10.0 ** (-0.5 + 0.125 * i) for i in range(i_max + 1))
    return DecisionGrid(cutoffs)


@dataclass(frozen=True)
class MetaExperimentConfig:
    tau: float
    grid: DecisionGrid | None = None
    luby_base: float | None = None
    fixed_cutoff: float | None = None
    max_restarts: int = 10  # data-collection cap, not a learning-loop limit
    noise: float = 0.5
    seed: int = 0
    alpha: float = 2.01
    kappa: float = 1.01
    init_pulls: int = 1

    def __post_init__(self):
        if not self.tau >= 0:
            raise ValueError("flip budget must be >= 0")
        specs = [self.grid, self.luby_base, self.fixed_cutoff]
        if sum(s is not None for s in specs) != 1:
            raise ValueError("exactly one of grid, luby_base, fixed_cutoff required")


@dataclass(frozen=True)
class MetaRunResult:
    solved: int
    policy: str
    trace: EpisodeTrace


def _meta_policy(arm: ArmSpec, config: MetaExperimentConfig) -> Policy:
    if config.grid is not None:
        return UcbRbPolicy(
            [arm], config.grid, alpha=config.alpha, kappa=config.kappa,
            init_pulls=config.init_pulls,
        )
    if config.luby_base is not None:
        return LubyPolicy(0, config.luby_base)
    from .policies import FixedPolicy

    return FixedPolicy(0, config.fixed_cutoff)


def meta_run(arm: ArmSpec, config: MetaExperimentConfig, record: bool = False) -> MetaRunResult:
    """One meta-episode: restart epochs over the empirical flip distribution
    until the flip budget is crossed. Solved count equals total reward since
    each solve pays 1."""
    policy = _meta_policy(arm, config)
    if config.tau == 0:
        return MetaRunResult(
            solved=0, policy=policy.name,
            trace=EpisodeTrace(policy=policy.name, tau=0.0),
        )
    rngs = episode_rngs(config.seed, 1)
    trace = run_episode([arm], policy, config.tau, rngs, record=record)
    return MetaRunResult(solved=int(round(trace.reward)), policy=policy.name, trace=trace)


def bundled_instances() -> list[CnfFormula]:
    """The satisfiable 3-SAT instances shipped with the package."""
    out = []
    root = resources.files("restartbandits").joinpath("data")
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".cnf"):
            out.append(parse_dimacs(entry.read_text()))
    if not out:
        raise FileNotFoundError("no bundled .cnf instances found")
    return out
