"""Disjoint minimum discriminating code sets and moving target defense
strategies for power-grid transformer monitoring."""

from gridmtd.graph_core import (
    BipartiteGraph,
    Branch,
    CodeSet,
    GraphFormatError,
    ParseError,
    PowerGrid,
    build_bipartite,
    code_of,
    graph_to_text,
    is_dcs,
    load_graph,
    parse_matpower,
    random_bipartite,
    save_graph,
)
from gridmtd.optim import (
    BinaryProgram,
    Constraint,
    LinearProgram,
    Solution,
    SolverError,
    solve_bilp,
    solve_lp,
    to_lp_text,
)
from gridmtd.diverse_mdcs import (
    ConfigurationSet,
    InfeasibleError,
    brute_force_kmax,
    brute_force_mdcs,
    build_k_dcs_program,
    check_feasible,
    dump_configuration,
    enumerate_mdcs,
    find_kmax,
    greedy_k,
    is_feasible,
    solve_k_dcs,
    solve_mdcs,
)
from gridmtd.mtd_game import (
    GameMatrix,
    SseSolution,
    TrialReport,
    UtilityProfile,
    attacker_payoff,
    best_response,
    build_game,
    defender_payoff,
    random_profile,
    run_trials,
    solve_sse,
    urs_value,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteGraph",
    "Branch",
    "CodeSet",
    "GraphFormatError",
    "ParseError",
    "PowerGrid",
    "build_bipartite",
    "code_of",
    "graph_to_text",
    "is_dcs",
    "load_graph",
    "parse_matpower",
    "random_bipartite",
    "save_graph",
    "BinaryProgram",
    "Constraint",
    "LinearProgram",
    "Solution",
    "SolverError",
    "solve_bilp",
    "solve_lp",
    "to_lp_text",
    "ConfigurationSet",
    "InfeasibleError",
    "brute_force_kmax",
    "brute_force_mdcs",
    "build_k_dcs_program",
    "check_feasible",
    "dump_configuration",
    "enumerate_mdcs",
    "find_kmax",
    "greedy_k",
    "is_feasible",
    "solve_k_dcs",
    "solve_mdcs",
    "GameMatrix",
    "SseSolution",
    "TrialReport",
    "UtilityProfile",
    "attacker_payoff",
    "best_response",
    "build_game",
    "defender_payoff",
    "random_profile",
    "run_trials",
    "solve_sse",
    "urs_value",
    "__version__",
]
