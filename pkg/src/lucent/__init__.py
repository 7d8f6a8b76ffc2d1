"""Lucency, home clusters and related analyses of marked Petri nets."""

__version__ = "0.1.0"

from .net import (  # noqa: E402
    Cluster,
    InvalidNet,
    InvalidPath,
    Marking,
    NotInNet,
    PetriNet,
    PetriNetError,
    classify_structure,
    check_path,
    path_predicates,
)
from .semantics import (  # noqa: E402
    NotEnabled,
    ReachabilityGraph,
    StateSpaceExceeded,
    Unbounded,
    behavior,
    enabled,
    explore,
    fire,
    fire_sequence,
    home_markings,
)
from .lucency import (  # noqa: E402
    ConflictPair,
    agreement_split,
    check_lucency,
    find_conflict_pairs,
    is_transparent,
    lucency_of,
    transparency,
)
from .structural import (  # noqa: E402
    FiringSequence,
    check_no_domination,
    disentangle,
    expedite_apply,
    expedite_check,
    expedite_closure,
    path_max_tokens,
    rooted_disentangled_paths,
    rooted_path_from_place,
)
from .home_cluster import (  # noqa: E402
    clean_net,
    cleaned_short_circuit,
    conn_nodes,
    find_home_clusters,
    short_circuit,
    verify_relating_theorem,
)
from .generator import GenConfig, GenerationFailed, generate  # noqa: E402
from .netfile import NetDocument, parse_document, parse_net, serialize, serialize_net  # noqa: E402
from .dot import export_dot  # noqa: E402
