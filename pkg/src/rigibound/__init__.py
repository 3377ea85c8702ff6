"""Certified upper bounds on embedding counts of minimally rigid graphs."""

from .bounds import alpha_beta, borcea_streinu_bound, bregman_minc, new_closed_bound, table1
from .elimination import eliminate
from .graph import (
    Graph,
    Pseudograph,
    block_cut_tree,
    build_pseudograph,
    connected_components,
    find_cliques,
    henneberg1_generate,
    maxwell_check,
    parse_graph,
)
from .orient import count_valid_orientations, count_with_profile, incidence_permanent

__version__ = "0.1.0"
