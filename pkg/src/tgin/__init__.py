"""Triangle-interest pipeline over item-item co-occurrence graphs.

Builds weighted co-occurrence graphs from click logs, enumerates k-order
triangles around every item, scores their relevance, selects small
relevant-yet-diverse triangle sets through determinantal point process
inference, and persists the result as a per-(item, order) index. Motif
statistics (triangle homophily, k-clique sampling, diversity counts)
validate the triangle-as-interest-unit structure on any catalog + graph.
"""

from .analytics import (
    CliqueReport,
    DiversityComparison,
    HomophilyReport,
    clique_probability,
    clique_report,
    diversity_comparison,
    diversity_metric,
    homophily_stats,
    shared_attributes,
)
from .bloom import BloomFilter
from .catalog import ItemCatalog, load_catalog, save_catalog
from .config import PipelineConfig
from .dpp import (
    DppKernel,
    GreedySelection,
    SelectedTriangle,
    build_kernel,
    greedy_map,
    kernel_from_arrays,
    select_triangles,
    subset_probability,
    weight_sample,
)
from .errors import (
    IntegrityError,
    InternalInvariantError,
    InvalidInputError,
    InvalidParameterError,
    ParseError,
    TginError,
    UnknownItemError,
)
from .graph import (
    BehaviorLog,
    BehaviorRecord,
    CooccurrenceGraph,
    build_graph,
    load_behavior_log,
    load_graph,
    save_behavior_log,
    save_graph,
)
from .index_io import IndexRow, TriangleIndex, read_index, write_index
from .pipeline import build_index
from .triangles import (
    CenterMining,
    Triangle,
    TriangleSet,
    extract_triangles,
    mine_center,
    pseudo_triangle,
    score_triangle,
    triangle_feature,
    triangles_of_order,
)

__version__ = "0.1.0"
