"""MCFL reachability toolkit.

Multiple context-free grammars over labeled graphs: a text format with a
brute-force derivation oracle, a normal-form transformation, a saturation
reachability engine with witness extraction, generators for the
interleaved-Dyck approximation families, and lower-bound gadget builders.
"""

from .grammar import (
    EPSILON,
    Grammar,
    Rule,
    Term,
    Var,
    classify_flags,
    format_grammar,
    make_grammar,
    parse_grammar,
    validate,
)
from .oracle import derive_oracle, oracle_member, oracle_strings
from .normalform import (
    NormalGrammar,
    as_normal,
    classify_rule,
    is_normal_form,
    normalize,
    reverse_index,
)
from .graphs import (
    ContractionMap,
    LabeledGraph,
    PathWitness,
    add_epsilon_selfloops,
    contract,
    format_graph,
    parse_graph,
    plain_reachability,
    string_to_path_graph,
)
from .engine import (
    EngineConfig,
    ReachResult,
    cycle_eliminate,
    extract_witness,
    member,
    solve,
)
from .dyck import (
    DyckSpec,
    Variant,
    count_in_language,
    enumerate_interleaved,
    gen_dyck_cfg,
    gen_family,
    interleaved_oracle,
)
from .gadgets import (
    OVInstance,
    TriangleInstance,
    ov_brute,
    ov_encode,
    ov_grammar,
    triangle_brute,
    triangle_instance,
)

__version__ = "0.1.0"
