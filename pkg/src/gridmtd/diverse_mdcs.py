"""Families of pairwise-disjoint minimum discriminating code sets.

A discriminating code set (DCS) gives every transformer a non-empty, unique
triggered-sensor signature; an MDCS is a smallest one. This module solves for
a single MDCS, for K equal-size pairwise-disjoint DCSs, and for the largest
such family, plus a faster greedy alternative and exhaustive oracles used to
validate the solvers on small graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from gridmtd.graph_core import BipartiteGraph, CodeSet, is_dcs, is_dcs_indices
from gridmtd.optim import BinaryProgram, Constraint, SolverError, solve_bilp

__all__ = [
    "ConfigurationSet",
    "InfeasibleError",
    "check_feasible",
    "is_feasible",
    "build_k_dcs_program",
    "solve_mdcs",
    "solve_k_dcs",
    "find_kmax",
    "greedy_k",
    "brute_force_mdcs",
    "brute_force_kmax",
    "enumerate_mdcs",
    "dump_configuration",
    "BRUTE_FORCE_SITE_LIMIT",
]

BRUTE_FORCE_SITE_LIMIT = 25


class InfeasibleError(Exception):
    """No discriminating code set (or no K disjoint ones) exists.

    pair names two transformers with identical neighborhoods; transformer
    names one with an empty neighborhood, when that is the cause.
    """

    def __init__(
        self,
        message: str,
        pair: tuple[str, str] | None = None,
        transformer: str | None = None,
    ):
        super().__init__(message)
        self.pair = pair
        self.transformer = transformer


@dataclass(frozen=True)
class ConfigurationSet:
    """K pairwise-disjoint discriminating code sets of common size l."""

    sets: tuple[CodeSet, ...]

    @property
    def K(self) -> int:
        return len(self.sets)

    @property
    def l(self) -> int:
        return self.sets[0].size if self.sets else 0

    def all_sites(self) -> frozenset[str]:
        out: set[str] = set()
        for cs in self.sets:
            out |= cs.sensors
        return frozenset(out)

    def validate(self, g: BipartiteGraph) -> None:
        """Raise ValueError unless every member is a DCS of g, sizes match,
        and the members are pairwise disjoint."""
        if not self.sets:
            raise ValueError("configuration set is empty")
        for cs in self.sets:
            if cs.size != self.l:
                raise ValueError("member code sets differ in size")
            if not is_dcs(g, cs.sensors):
                raise ValueError(f"member {sorted(cs.sensors)} is not a DCS")
        for a, b in combinations(self.sets, 2):
            if a.sensors & b.sensors:
                raise ValueError("member code sets are not pairwise disjoint")


# ---------------------------------------------------------------------------
# Feasibility pre-check


def check_feasible(g: BipartiteGraph) -> None:
    """Reject graphs with no DCS at all: a transformer nobody can hear, or a
    pair with identical neighborhoods (empty symmetric difference)."""
    for ti, nb in enumerate(g.adj):
        if not nb:
            tid = g.t_ids[ti]
            raise InfeasibleError(
                f"transformer {tid} has no sensor site in range", transformer=tid
            )
    for ti, tj in combinations(range(g.n_t), 2):
        if g.adj[ti] == g.adj[tj]:
            pair = (g.t_ids[ti], g.t_ids[tj])
            raise InfeasibleError(
                f"transformers {pair[0]} and {pair[1]} have identical neighborhoods "
                "and can never be told apart",
                pair=pair,
            )


def is_feasible(g: BipartiteGraph) -> bool:
    try:
        check_feasible(g)
    except InfeasibleError:
        return False
    return True


# ---------------------------------------------------------------------------
# Encoding


def build_k_dcs_program(
    g: BipartiteGraph,
    K: int,
    symmetry_break: bool = False,
    forbidden: frozenset[int] = frozenset(),
) -> BinaryProgram:
    """Binary program over x[k*n+s]: K equal-size, pairwise-disjoint DCSs of
    minimum common size.

    Disjointness is the linear form x_sk + x_sk' <= 1 per site and block pair,
    which on binary points matches requiring blocks to share no site. The
    optional symmetry break orders blocks by their smallest selected site,
    which for disjoint blocks is exactly bit-vector lexicographic order; it
    never changes the optimal size, only prunes permuted duplicates.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    n = g.n_s
    nv = n * K

    def var(k: int, s: int) -> int:
        return k * n + s

    cons: list[Constraint] = []

    def row(entries: dict[int, float], rel: str, rhs: float) -> None:
        coeffs = [0.0] * nv
        for j, a in entries.items():
            coeffs[j] = a
        cons.append(Constraint(tuple(coeffs), rel, rhs))

    for k in range(K):
        for nb in g.adj:
            row({var(k, s): 1.0 for s in nb}, ">=", 1.0)
        for ti, tj in combinations(range(g.n_t), 2):
            diff = g.adj[ti] ^ g.adj[tj]
            row({var(k, s): 1.0 for s in diff}, ">=", 1.0)

    if K > 1:
        for k in range(1, K):
            entries = {var(k, s): 1.0 for s in range(n)}
            for s in range(n):
                entries[var(0, s)] = -1.0
            row(entries, "=", 0.0)
        for s in range(n):
            for ka, kb in combinations(range(K), 2):
                row({var(ka, s): 1.0, var(kb, s): 1.0}, "<=", 1.0)
        # per-site capacity: implied by the pairwise rows on binary points but
        # far tighter on the relaxation, which keeps branch-and-bound honest
        # (for K=2 it coincides with the pairwise row, so skip it there)
        if K > 2:
            for s in range(n):
                row({var(k, s): 1.0 for k in range(K)}, "<=", 1.0)

    if symmetry_break and K > 1:
        for k in range(K - 1):
            for s in range(n):
                entries = {var(k + 1, s): 1.0}
                for sp in range(s):
                    entries[var(k, sp)] = -1.0
                row(entries, "<=", 0.0)

    for s in sorted(forbidden):
        for k in range(K):
            row({var(k, s): 1.0}, "=", 0.0)

    objective = [0.0] * nv
    for s in range(n):
        objective[var(0, s)] = 1.0
    return BinaryProgram(tuple(objective), "min", tuple(cons))


def _extract_sets(g: BipartiteGraph, K: int, assignment) -> tuple[CodeSet, ...]:
    n = g.n_s
    sets = []
    for k in range(K):
        chosen = frozenset(g.s_ids[s] for s in range(n) if assignment[k * n + s] > 0.5)
        sets.append(CodeSet(chosen))
    return tuple(sets)


# ---------------------------------------------------------------------------
# Solvers


def solve_mdcs(g: BipartiteGraph) -> CodeSet:
    """A minimum discriminating code set of g."""
    check_feasible(g)
    sol = solve_bilp(build_k_dcs_program(g, 1))
    if sol.status != "optimal":
        raise SolverError("single-DCS program reported infeasible on a feasible graph")
    return _extract_sets(g, 1, sol.assignment)[0]


def solve_k_dcs(
    g: BipartiteGraph, K: int, symmetry_break: bool = False
) -> ConfigurationSet:
    """K pairwise-disjoint equal-size DCSs minimizing the common size."""
    if K < 1:
        raise ValueError("K must be >= 1")
    check_feasible(g)
    sol = solve_bilp(build_k_dcs_program(g, K, symmetry_break))
    if sol.status != "optimal":
        raise InfeasibleError(f"no {K} pairwise-disjoint discriminating code sets exist")
    cfg = ConfigurationSet(_extract_sets(g, K, sol.assignment))
    cfg.validate(g)
    return cfg


def find_kmax(
    g: BipartiteGraph, mode: str = "linear", symmetry_break: bool = False
) -> ConfigurationSet:
    """Largest K whose K disjoint DCSs still have minimum-DCS size.

    The linear mode scans K = 1, 2, ... and stops at the first K that is
    infeasible or whose common size exceeds the minimum; the binary mode
    exploits that feasibility-at-minimum-size is monotone in K.
    """
    if mode not in ("linear", "binary"):
        raise ValueError(f"unknown K-search mode {mode!r}")
    best = solve_k_dcs(g, 1, symmetry_break)
    m = best.l
    if mode == "linear":
        K = 2
        while K <= g.n_s:
            try:
                cfg = solve_k_dcs(g, K, symmetry_break)
            except InfeasibleError:
                break
            if cfg.l > m:
                break
            best = cfg
            K += 1
        return best
    lo, hi = 1, max(1, g.n_s // m)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        try:
            cfg = solve_k_dcs(g, mid, symmetry_break)
        except InfeasibleError:
            cfg = None
        if cfg is not None and cfg.l == m:
            best = cfg
            lo = mid
        else:
            hi = mid - 1
    return best


def greedy_k(g: BipartiteGraph, k_target: int | None = None) -> ConfigurationSet:
    """Iterated single-MDCS solves: after each solution its sites are forced
    to zero, until the program goes infeasible, the size grows past the
    minimum, or k_target sets are collected. May stop short of the true
    maximum K."""
    if k_target is not None and k_target < 1:
        raise ValueError("k_target must be >= 1")
    check_feasible(g)
    first = solve_mdcs(g)
    m = first.size
    sets = [first]
    banned = set(g.site_indices(first.sensors))
    while k_target is None or len(sets) < k_target:
        sol = solve_bilp(build_k_dcs_program(g, 1, forbidden=frozenset(banned)))
        if sol.status != "optimal":
            break
        (cs,) = _extract_sets(g, 1, sol.assignment)
        if cs.size > m:
            break
        sets.append(cs)
        banned |= set(g.site_indices(cs.sensors))
    cfg = ConfigurationSet(tuple(sets))
    cfg.validate(g)
    return cfg


# ---------------------------------------------------------------------------
# Exhaustive oracles


def _guard(g: BipartiteGraph, max_sites: int) -> None:
    if g.n_s > max_sites:
        raise ValueError(
            f"refused: exhaustive search limited to {max_sites} sites, graph has {g.n_s}"
        )


def brute_force_mdcs(g: BipartiteGraph, max_sites: int = BRUTE_FORCE_SITE_LIMIT) -> CodeSet:
    """Smallest DCS by enumerating subsets in increasing size, lexicographic
    within a size. Ground truth for solver tests."""
    _guard(g, max_sites)
    check_feasible(g)
    for size in range(1, g.n_s + 1):
        for combo in combinations(range(g.n_s), size):
            if is_dcs_indices(g, frozenset(combo)):
                return CodeSet(frozenset(g.s_ids[s] for s in combo))
    raise SolverError("feasible graph yielded no DCS in exhaustive scan")


def enumerate_mdcs(
    g: BipartiteGraph, max_sites: int = BRUTE_FORCE_SITE_LIMIT
) -> list[frozenset[int]]:
    """All minimum-size DCSs, as site-index sets in lexicographic order."""
    _guard(g, max_sites)
    check_feasible(g)
    m = brute_force_mdcs(g, max_sites).size
    return [
        frozenset(combo)
        for combo in combinations(range(g.n_s), m)
        if is_dcs_indices(g, frozenset(combo))
    ]


def brute_force_kmax(
    g: BipartiteGraph, max_sites: int = BRUTE_FORCE_SITE_LIMIT
) -> ConfigurationSet:
    """Exhaustive maximum pairwise-disjoint family among all MDCSs."""
    _guard(g, max_sites)
    all_mdcs = enumerate_mdcs(g, max_sites)
    m = len(next(iter(all_mdcs)))
    best: list[int] = []

    def extend(start: int, chosen: list[int], used: frozenset[int]) -> None:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if len(chosen) + (g.n_s - len(used)) // m <= len(best):
            return
        for i in range(start, len(all_mdcs)):
            if not (all_mdcs[i] & used):
                chosen.append(i)
                extend(i + 1, chosen, used | all_mdcs[i])
                chosen.pop()

    extend(0, [], frozenset())
    sets = tuple(
        CodeSet(frozenset(g.s_ids[s] for s in all_mdcs[i])) for i in best
    )
    cfg = ConfigurationSet(sets)
    cfg.validate(g)
    return cfg


# ---------------------------------------------------------------------------
# Text dump


def dump_configuration(g: BipartiteGraph, cfg: ConfigurationSet) -> str:
    """`kmax <K> l <l>` header plus one `mdcs <k>: <site> ...` line per set,
    sites in graph order."""
    lines = [f"kmax {cfg.K} l {cfg.l}"]
    for k, cs in enumerate(cfg.sets, 1):
        ordered = sorted(g.site_indices(cs.sensors))
        lines.append(f"mdcs {k}: " + " ".join(g.s_ids[s] for s in ordered))
    return "\n".join(lines) + "\n"
