"""Ride sharing games: simulation, equilibrium analysis and signaling."""

from .allocation import FlowState, apportion, compute_flows, is_no_vehicle_loss
from .bayes import (BayesianGame, MatrixGame, RecommendationPolicy, bce_poa, enumerate_pbne,
                    evaluate_policy, expected_game, full_information_optimum, optimal_bce)
from .cost import FormulaCost, TableCost, formula_edge_cost, player_costs, social_cost
from .dynamics import (BudgetExceeded, NoEquilibrium, build_improvement_graph, check_ordinal_potential,
                       enumerate_pne, has_fip, is_pne, price_of_anarchy, run_dynamics)
from .gamefile import GameFileError, games_equal, parse_game_file
from .graph import (Edge, GameDefinitionError, PathSegment, RideShareGame, RoadGraph, TripPath,
                    enumerate_strategies)
from .lp import LinearProgram, solve_lp
from .scenarios import (build_fip_game, build_nonfip_game, build_signaling_game,
                        build_two_vehicle_game)

__all__ = [name for name in dir() if not name.startswith("_")]
