"""Decide whether a graph has a complete minor rooted at four nominated
vertices, producing machine-checkable witnesses and obstruction
certificates."""

__version__ = "0.1.0"

from .graph_core import (
    Graph,
    PlanarEmbedding,
    RootedInstance,
    Separation,
    connectivity,
    contract_edge,
    cut_vertices,
    enumerate_separations,
    find_cycle_through,
    is_k_connected,
    menger_fan,
    planar_embed,
)
from .minors import (
    K3Certificate,
    MinorWitness,
    oracle_rooted_minor,
    rooted_k3,
    verify_k3_certificate,
    verify_witness,
)
from .obstructions import (
    CLASS_MINIMUM_SIZE,
    CLASS_NAMES,
    Obstruction,
    PlusGraph,
    VertexType,
    build_class,
    classify_vertex,
    cofacial_obstruction,
    random_obstruction,
    random_web,
    strip_pendant_pair,
    verify_obstruction,
    verify_web,
    web_completion,
)
from .linkage import (
    Linkage,
    WebCertificate,
    find_linkage,
    verify_linkage,
    verify_web_certificate,
)
from .decider import (
    Decision,
    ResourceLimitError,
    cycle_linkage_to_minor,
    decide,
    decide_3connected,
    decide_3connected_planar,
    decide_4connected,
    reduce_ear,
    reduce_plus,
    split_22_separation,
)

__all__ = [
    "Graph",
    "PlanarEmbedding",
    "RootedInstance",
    "Separation",
    "connectivity",
    "contract_edge",
    "cut_vertices",
    "enumerate_separations",
    "find_cycle_through",
    "is_k_connected",
    "menger_fan",
    "planar_embed",
    "K3Certificate",
    "MinorWitness",
    "oracle_rooted_minor",
    "rooted_k3",
    "verify_k3_certificate",
    "verify_witness",
    "CLASS_MINIMUM_SIZE",
    "CLASS_NAMES",
    "Obstruction",
    "PlusGraph",
    "VertexType",
    "build_class",
    "classify_vertex",
    "cofacial_obstruction",
    "random_obstruction",
    "random_web",
    "strip_pendant_pair",
    "verify_obstruction",
    "verify_web",
    "web_completion",
    "Linkage",
    "WebCertificate",
    "find_linkage",
    "verify_linkage",
    "verify_web_certificate",
    "Decision",
    "ResourceLimitError",
    "cycle_linkage_to_minor",
    "decide",
    "decide_3connected",
    "decide_3connected_planar",
    "decide_4connected",
    "reduce_ear",
    "reduce_plus",
    "split_22_separation",
]
