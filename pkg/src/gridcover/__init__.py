"""Covers of permutation classes by unique-gridding rules.

Typical use::

    from gridcover import RunConfig, conjecture, counting_sequence
    res = conjecture(RunConfig("231"))
    counting_sequence(res.cover, 10)
"""

from .blocks import Block, BlockPoset, BlockSet, block_set, build_poset
from .cover import Cover, CoverInstance, build_instance, export_cnf, solve_min_cover, verify_cover
from .enumeration import (
    ClassRegistry,
    CountingSequence,
    EquationSystem,
    GFTerm,
    counting_sequence,
    evaluate_term_numeric,
    functional_equations,
    sample_uniform,
)
from .peg import ConvexVectorSet, PegPermutation, fill, peg_cover_to_struct_cover, peg_to_rule, peg_to_rules, vector_contained
from .perms import Basis, Perm, avoiders, canonical_basis, contains, count_symmetry_classes
from .pipeline import RunConfig, conjecture
from .rulegen import CompatTable, GenConfig, generate_rules, pairwise_compat
from .rules import Rule, count_rule, grid_perms, is_struct_rule, render_rule, rule_avoids

__version__ = "0.1.0"

__all__ = [
    "avoiders",
    "Basis",
    "Block",
    "block_set",
    "BlockPoset",
    "BlockSet",
    "build_instance",
    "build_poset",
    "canonical_basis",
    "ClassRegistry",
    "CompatTable",
    "conjecture",
    "contains",
    "ConvexVectorSet",
    "count_rule",
    "count_symmetry_classes",
    "counting_sequence",
    "CountingSequence",
    "Cover",
    "CoverInstance",
    "EquationSystem",
    "evaluate_term_numeric",
    "export_cnf",
    "fill",
    "functional_equations",
    "GenConfig",
    "generate_rules",
    "GFTerm",
    "grid_perms",
    "is_struct_rule",
    "pairwise_compat",
    "peg_cover_to_struct_cover",
    "peg_to_rule",
    "peg_to_rules",
    "PegPermutation",
    "Perm",
    "render_rule",
    "Rule",
    "rule_avoids",
    "RunConfig",
    "sample_uniform",
    "solve_min_cover",
    "vector_contained",
    "verify_cover",
]
