"""Personalized PageRank with bounded edge sensitivity and DP releases."""

from private_ppr.graph import Graph, load_edge_list, make_clique, make_random_regular, with_edge_toggled
from private_ppr.pushflow import CapConfig, Mode, PPRConfig, power_iteration_ppr, push_flow, push_flow_cap

__all__ = [
    "CapConfig",
    "Graph",
    "Mode",
    "PPRConfig",
    "load_edge_list",
    "make_clique",
    "make_random_regular",
    "power_iteration_ppr",
    "push_flow",
    "push_flow_cap",
    "with_edge_toggled",
]
