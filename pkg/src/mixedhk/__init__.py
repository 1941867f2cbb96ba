"""Deterministic simulator and property checker for the mixed Hegselmann-Krause
opinion model on finite and infinite bounded-degree graphs."""

from .dynamics import OpinionState, deffuant_step, profile, step_group, step_pair
from .engine import ConfigError, InitialRule, Trace, World, WorldConfig, init, run, step
from .graphs import (
    BiInfinitePath,
    Circulant,
    FiniteGraph,
    GraphError,
    HalfInfinitePath,
    ball,
    cocktail_party,
    complete_graph,
    finite_path,
    make_graph,
    regularity_margin,
)
from .monitors import StepContext, check_step_contracts, supermartingale_residual, z_group, z_pair
from .oracle import DenseInstance, naive_step
from .sampling import AlphaSchedule, MatchingSampler, draw_alpha, draw_matching, preset
from .scenarios import Scenario, check_scenario, library

__all__ = [
    "AlphaSchedule", "BiInfinitePath", "Circulant", "ConfigError", "DenseInstance", "FiniteGraph",
    "GraphError", "HalfInfinitePath", "InitialRule", "MatchingSampler", "OpinionState", "Scenario",
    "StepContext", "Trace", "World", "WorldConfig", "ball", "check_scenario", "check_step_contracts",
    "cocktail_party", "complete_graph", "deffuant_step", "draw_alpha", "draw_matching", "finite_path",
    "init", "library", "make_graph", "naive_step", "preset", "profile", "regularity_margin", "run",
    "step", "step_group", "step_pair", "supermartingale_residual", "z_group", "z_pair",
]
