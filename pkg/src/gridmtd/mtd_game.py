"""Sensor-activation game between the grid operator and an attacker.

The defender commits to a probability mix over the disjoint code sets of a
configuration; the attacker observes the mix and knocks out one sensor site.
Payoffs follow residual identifiability: the defender collects the utility of
every transformer still uniquely identified, the attacker collects the rest
minus the attack cost. The optimal commitment is found by one LP per attacker
action.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from gridmtd.diverse_mdcs import ConfigurationSet
from gridmtd.graph_core import BipartiteGraph, CodeSet
from gridmtd.optim import Constraint, LinearProgram, SolverError, solve_lp

__all__ = [
    "UtilityProfile",
    "GameMatrix",
    "SseSolution",
    "TrialReport",
    "defender_payoff",
    "attacker_payoff",
    "build_game",
    "solve_sse",
    "best_response",
    "urs_value",
    "run_trials",
    "random_profile",
]

UTILITY_RANGE = (0.0, 10.0)


@dataclass(frozen=True)
class UtilityProfile:
    """Transformer importance and per-site attack cost, both on [0, 10]."""

    transformer_utility: Mapping[str, float]
    attack_cost: Mapping[str, float]

    def __post_init__(self):
        lo, hi = UTILITY_RANGE
        for name, table in (
            ("transformer utility", self.transformer_utility),
            ("attack cost", self.attack_cost),
        ):
            for key, v in table.items():
                if not lo <= v <= hi:
                    raise ValueError(f"{name} for {key!r} is {v}, outside [{lo}, {hi}]")


@dataclass(frozen=True)
class GameMatrix:
    """Defender rows are code sets of the configuration; attacker columns are
    the sensor sites used by any of them."""

    defender_actions: tuple[CodeSet, ...]
    attacker_actions: tuple[str, ...]
    defender_payoffs: np.ndarray  # (K, A)
    attacker_payoffs: np.ndarray  # (K, A)

    @property
    def n_defender(self) -> int:
        return len(self.defender_actions)

    @property
    def n_attacker(self) -> int:
        return len(self.attacker_actions)

    def payoffs(self, i: int, j: int) -> tuple[float, float]:
        return float(self.defender_payoffs[i, j]), float(self.attacker_payoffs[i, j])


@dataclass(frozen=True)
class SseSolution:
    defender_mix: np.ndarray
    attacker_response: int  # index into attacker_actions
    defender_value: float
    attacker_value: float


def _sensor_set(active: CodeSet | Iterable[str]) -> frozenset[str]:
    if isinstance(active, CodeSet):
        return active.sensors
    return frozenset(active)


def _identified(g: BipartiteGraph, residual_idx: frozenset[int]) -> list[bool]:
    codes = [nb & residual_idx for nb in g.adj]
    counts = Counter(codes)
    return [bool(code) and counts[code] == 1 for code in codes]


def _utility(u: UtilityProfile, t_id: str) -> float:
    try:
        return u.transformer_utility[t_id]
    except KeyError:
        raise ValueError(f"utility profile is missing transformer {t_id!r}") from None


def _cost(u: UtilityProfile, s_id: str) -> float:
    try:
        return u.attack_cost[s_id]
    except KeyError:
        raise ValueError(f"utility profile is missing attack cost for {s_id!r}") from None


def defender_payoff(
    g: BipartiteGraph,
    active: CodeSet | Iterable[str],
    attacked: str,
    u: UtilityProfile,
) -> float:
    """Total utility of transformers still uniquely identified after the
    attacked site is removed from the active set. A transformer whose residual
    code is empty, or collides with any other residual code, earns nothing."""
    sensors = _sensor_set(active)
    if attacked not in g.s_index:
        raise ValueError(f"unknown sensor site {attacked!r}")
    residual = g.site_indices(sensors - {attacked})
    flags = _identified(g, residual)
    return sum(_utility(u, g.t_ids[ti]) for ti, ok in enumerate(flags) if ok)


def attacker_payoff(
    g: BipartiteGraph,
    active: CodeSet | Iterable[str],
    attacked: str,
    u: UtilityProfile,
    cost_on_miss: bool = True,
) -> float:
    """Total utility of transformers no longer uniquely identified, minus the
    attack cost. With cost_on_miss=False an attack outside the active set is
    free; by default the cost is spent either way."""
    sensors = _sensor_set(active)
    if attacked not in g.s_index:
        raise ValueError(f"unknown sensor site {attacked!r}")
    residual = g.site_indices(sensors - {attacked})
    flags = _identified(g, residual)
    gained = sum(_utility(u, g.t_ids[ti]) for ti, ok in enumerate(flags) if not ok)
    if not cost_on_miss and attacked not in sensors:
        return gained
    return gained - _cost(u, attacked)


def build_game(
    g: BipartiteGraph,
    config: ConfigurationSet,
    u: UtilityProfile,
    cost_on_miss: bool = True,
) -> GameMatrix:
    """Payoff matrices over configuration sets x attackable sites.

    Attacker actions are the sites used by any set of the configuration, in
    graph order; disjointness makes that exactly K*l actions.
    """
    for tid in g.t_ids:
        _utility(u, tid)
    site_idx = sorted(g.site_indices(config.all_sites()))
    attacker_actions = tuple(g.s_ids[s] for s in site_idx)
    for sid in attacker_actions:
        _cost(u, sid)
    K = config.K
    if len(attacker_actions) != K * config.l:
        raise ValueError("configuration sets overlap; attacker action count broken")

    dm = np.zeros((K, len(attacker_actions)))
    am = np.zeros((K, len(attacker_actions)))
    for i, cs in enumerate(config.sets):
        for j, sid in enumerate(attacker_actions):
            dm[i, j] = defender_payoff(g, cs, sid, u)
            am[i, j] = attacker_payoff(g, cs, sid, u, cost_on_miss)
    return GameMatrix(config.sets, attacker_actions, dm, am)


# ---------------------------------------------------------------------------
# Equilibrium and baseline


def solve_sse(game: GameMatrix) -> SseSolution:
    """Strong Stackelberg commitment via one LP per attacker action: maximize
    defender expectation over mixes keeping that action a best response; the
    best feasible action wins, ties to the defender then to the lowest index.
    """
    K, A = game.n_defender, game.n_attacker
    if K < 1 or A < 1:
        raise ValueError("degenerate game shape")
    dm, am = game.defender_payoffs, game.attacker_payoffs
    ones = tuple(1.0 for _ in range(K))
    best: tuple[float, int, np.ndarray] | None = None
    for j in range(A):
        cons = [Constraint(ones, "=", 1.0)]
        for jp in range(A):
            if jp == j:
                continue
            cons.append(Constraint(tuple(am[:, j] - am[:, jp]), ">=", 0.0))
        lp = LinearProgram(
            tuple(dm[:, j]), tuple(cons), tuple((0.0, 1.0) for _ in range(K))
        )
        sol = solve_lp(lp)
        if sol.status != "optimal":
            continue
        if best is None or sol.objective_value > best[0] + 1e-9:
            best = (sol.objective_value, j, sol.assignment)
    if best is None:
        raise SolverError("no attacker action admitted a feasible best-response region")
    value, j, mix = best
    return SseSolution(mix, j, float(value), float(np.dot(mix, am[:, j])))


def best_response(game: GameMatrix, mix: np.ndarray) -> tuple[int, float, float]:
    """Attacker best response to a defender mix, ties broken in the defender's
    favor then by lowest index. Returns (action, attacker value, defender value)."""
    mix = np.asarray(mix, dtype=float)
    att = mix @ game.attacker_payoffs
    dfd = mix @ game.defender_payoffs
    top = float(att.max())
    best_j = -1
    for j in range(game.n_attacker):
        if att[j] >= top - 1e-9 and (best_j < 0 or dfd[j] > dfd[best_j] + 1e-9):
            best_j = j
    return best_j, float(att[best_j]), float(dfd[best_j])


def urs_value(game: GameMatrix) -> float:
    """Defender expectation under the uniform mix, attacker best-responding."""
    mix = np.full(game.n_defender, 1.0 / game.n_defender)
    return best_response(game, mix)[2]


# ---------------------------------------------------------------------------
# Randomized trials


@dataclass(frozen=True)
class TrialReport:
    """Per-trial defender values for the four movement strategies."""

    columns = ("urs_k", "urs_kmax", "sse_k", "sse_kmax")

    values: np.ndarray  # (n_trials, 4)
    seed: int

    @property
    def n_trials(self) -> int:
        return self.values.shape[0]

    def means(self) -> np.ndarray:
        return self.values.mean(axis=0)

    def stds(self) -> np.ndarray:
        if self.n_trials < 2:
            return np.zeros(4)
        return self.values.std(axis=0, ddof=1)

    def to_csv(self) -> str:
        lines = ["trial," + ",".join(self.columns)]
        for i in range(self.n_trials):
            row = ",".join(f"{v:.4f}" for v in self.values[i])
            lines.append(f"{i + 1},{row}")
        lines.append("mean," + ",".join(f"{v:.4f}" for v in self.means()))
        lines.append("std," + ",".join(f"{v:.4f}" for v in self.stds()))
        return "\n".join(lines) + "\n"


def random_profile(
    g: BipartiteGraph, rng: np.random.Generator, integer_utilities: bool = False
) -> UtilityProfile:
    """Draw transformer utilities then site costs, uniform on [0, 10], in
    graph order so a fixed seed fixes the profile."""
    lo, hi = UTILITY_RANGE
    if integer_utilities:
        t_vals = rng.integers(int(lo), int(hi) + 1, size=g.n_t).astype(float)
        s_vals = rng.integers(int(lo), int(hi) + 1, size=g.n_s).astype(float)
    else:
        t_vals = rng.uniform(lo, hi, size=g.n_t)
        s_vals = rng.uniform(lo, hi, size=g.n_s)
    return UtilityProfile(
        {tid: float(t_vals[i]) for i, tid in enumerate(g.t_ids)},
        {sid: float(s_vals[i]) for i, sid in enumerate(g.s_ids)},
    )


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Sub-seed rule: trial i uses default_rng([seed, i])."""
    return np.random.default_rng([seed, trial])


def run_trials(
    g: BipartiteGraph,
    config_greedy: ConfigurationSet,
    config_opt: ConfigurationSet,
    n_trials: int,
    seed: int,
    cost_on_miss: bool = True,
    integer_utilities: bool = False,
    parallel: bool = False,
) -> TrialReport:
    """Each trial draws a fresh utility profile and reports the defender value
    of URS and SSE play on the greedy (K) and optimal (K_max) configurations.
    Trials are sub-seeded independently, so results do not depend on execution
    order."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    config_greedy.validate(g)
    config_opt.validate(g)

    def one(trial: int) -> tuple[float, float, float, float]:
        u = random_profile(g, trial_rng(seed, trial), integer_utilities)
        game_k = build_game(g, config_greedy, u, cost_on_miss)
        game_kmax = build_game(g, config_opt, u, cost_on_miss)
        return (
            urs_value(game_k),
            urs_value(game_kmax),
            solve_sse(game_k).defender_value,
            solve_sse(game_kmax).defender_value,
        )

    if parallel:
        with ThreadPoolExecutor() as pool:
            rows = list(pool.map(one, range(n_trials)))
    else:
        rows = [one(i) for i in range(n_trials)]
    return TrialReport(np.array(rows, dtype=float), seed)
