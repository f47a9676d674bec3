"""Firebreak placement by simulation-based optimization.

Places rigid firebreak blocks on a gridded landscape to minimize the
expected burned area under stochastic ignition and weather, estimated by
Monte-Carlo replications of a cellular-automata fire spread model, and
searched with a genetic algorithm and GRASP against random and greedy
baselines.
"""

from .errors import (ConfigurationError, FirebreakOptError, FormatError,
                     IgnitionRejectedError, PlacementError, ValidationError)
from .fire_engine import (FireOutcome, ScenarioDraw, SpreadParams, WeatherRecord,
                          burn_frequency, run_fire, run_replications,
                          spread_probability)
from .harness import (ExperimentConfig, PatternReport, RunReport, RunRow,
                      assess_patterns, fixture_landscape, load_config,
                      run_comparison)
from .landscape import (FuelModel, Landscape, load_landscape, neighbors,
                        synthetic_landscape)
from .objective import (Estimate, LossEstimate, estimate_from_losses, evaluate,
                        evaluate_with_cost)
from .optimizers import (GAConfig, GRASPConfig, SearchTrace, ga_optimize,
                         grasp_optimize, greedy_baseline, random_baseline)
from .placement import (BlockShape, FirebreakBlock, Solution, budget_cells,
                        default_block_shape, is_feasible, load_solution,
                        random_solution, realize_block, scattered_solution,
                        write_solution)
from .scenarios import ScenarioSampler, make_sampler, sample_scenario

__version__ = "0.1.0"
