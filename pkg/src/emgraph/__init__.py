"""External-memory network analysis for naturally sparse graphs.

A simulated block-I/O substrate with exact transfer accounting, plus three
analyses built on it: approximate degeneracy ordering, fixed-length cycle
detection through representative families, and maximal clique enumeration.
In-memory reference implementations ship alongside for verification.
"""

from .emio import (EmConfig, EmConfigError, ExternalRun, IoStats,
                   MemoryBudgetError, MemoryLedger, RunWriter, SortSpecError,
                   StorageError, Substrate)
from .graphs import (EdgeListParseError, ExternalGraph, PreconditionError,
                     VertexRangeError, compute_degrees, generate_erdos_renyi,
                     generate_named, generate_preferential, graph_from_edges,
                     load_edge_list, load_graph_binary, remove_vertices,
                     reorder_graph, save_graph_binary, total_degrees)
from .degeneracy import (DegeneracyOrdering, approx_degeneracy_order,
                         read_ordering, small_vertices, verify_ordering,
                         write_ordering)
from .representatives import (PSetFamily, RepTree, build_representative,
                              find_disjoint, validate_representative_tree)
from .cycles import (CycleWitness, cycle_through, find_cycle_degenerate,
                     find_cycle_general, generate_paths,
                     generate_paths_degenerate, group_families,
                     validate_witness)
from .cliques import (CliqueContext, HSubgraph, bk_pivot,
                      enumerate_maximal_cliques, gen_h, gen_px, update_h)
from . import oracles

__version__ = "0.1.0"
