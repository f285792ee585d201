"""Greedy-crossover memetic solver for the symmetric TSP."""

__version__ = "0.1.0"

from .crossover import OPERATORS, get_operator, igx, reference_igx_oracle, vgx  # noqa: E402
from .ga import GAConfig, GAResult, run_ga  # noqa: E402
from .instance import Instance, fig1_fixture, load_tsplib, parse_tsplib  # noqa: E402
from .local_search import LocalSearchConfig, improve, three_opt, two_opt  # noqa: E402
from .tour import LinkedTourList, Tour, tour_length  # noqa: E402

__all__ = [
    "OPERATORS", "get_operator", "igx", "vgx", "reference_igx_oracle",
    "GAConfig", "GAResult", "run_ga",
    "Instance", "fig1_fixture", "load_tsplib", "parse_tsplib",
    "LocalSearchConfig", "improve", "two_opt", "three_opt",
    "LinkedTourList", "Tour", "tour_length",
]
