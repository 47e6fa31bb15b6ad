"""Executable models of the game circuits."""

from .newcomb import BreakerKind, NewcombResult, newcomb_exact, run_newcomb
from .wiesner import (Banknote, BasisPolicy, ForgeryEstimate, SubGameRecord, forgery_experiment,
                      hadamard_round_map, mint_banknote, state_to_z, verify_banknote, z_to_state)
from .zeno import (DAMAGED, WORKING, BombState, OutcomeDistribution, TesterEstimate, TesterResult,
                   bomb_tester_zeno_exact, estimate_tester, ev_breaker_exact, in_exp_not_class,
                   pauli_coefficients, run_bomb_tester_antizeno, run_bomb_tester_zeno,
                   run_ev_breaker, run_supply_demand, supply_demand_exact,
                   supply_demand_survival, zeno_survival)

__all__ = [
    "BreakerKind", "NewcombResult", "newcomb_exact", "run_newcomb",
    "Banknote", "BasisPolicy", "ForgeryEstimate", "SubGameRecord", "forgery_experiment",
    "hadamard_round_map", "mint_banknote", "state_to_z", "verify_banknote", "z_to_state",
    "DAMAGED", "WORKING", "BombState", "OutcomeDistribution", "TesterEstimate", "TesterResult",
    "bomb_tester_zeno_exact", "estimate_tester", "ev_breaker_exact", "in_exp_not_class",
    "pauli_coefficients", "run_bomb_tester_antizeno", "run_bomb_tester_zeno", "run_ev_breaker",
    "run_supply_demand", "supply_demand_exact", "supply_demand_survival", "zeno_survival",
]
