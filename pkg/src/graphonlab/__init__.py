"""Exact-rational toolkit for step graphons: metrics with certificates,
subgraph densities, sampling, convergent-sequence names, and the halting
and fractal constructions."""

from .core import (
    FiniteGraph,
    StepGraphon,
    average,
    blow_up,
    common_refinement,
    evaluate,
    finite_graph,
    graphon_of_graph,
    make_step_graphon,
    part_index,
    permute_parts,
    reduce_step_graphon,
    stepping,
)
from .metrics import (
    DeltaBound,
    cut_norm,
    cut_norm_full_enumeration,
    d1,
    d2,
    d_square,
    d_w_truncated,
    delta_bound,
    hat_delta,
)
from .densities import (
    counting_bound,
    enumerate_graph,
    graph_index,
    t_ind_exact,
    t_ind_mc,
)
from .sampling import (
    RandomSource,
    answers_to_point,
    empirical_graphon,
    questionnaire_sample,
    sample_graph,
)
from .names import (
    GraphonName,
    Inconclusive,
    MartingaleStream,
    MetricTag,
    NotRandomFree,
    Ok,
    SectionStage,
    Undecided,
    Violation,
    canonical_name,
    constant_name,
    d1_name_with_ground_truth,
    martingale_from_dsquare_name,
    name_delta_to_dw,
    name_dw_to_delta,
    randomfree_d1_distance,
    randomfree_d1_name,
    randomfree_defect,
    randomfree_semidecide,
    section_delta_to_dsquare,
    validate_name_prefix,
    weaken_name,
)
from .constructions import (
    FractalStage,
    HaltingTable,
    MatchingReport,
    RectangleProbe,
    SpectrumEntry,
    constant_graphon,
    decode_halting,
    direct_sum,
    fractal_stage,
    fractal_white_limit,
    halting_chain_certificate,
    halting_graphon,
    halting_tail_measure,
    level_constants,
    prop46_gadget,
    rectangle_bound_probe,
    render_dense,
    twin_parts,
    value_spectrum,
    verify_diagonal_matching,
)
from . import errors, formats

__all__ = [
    "FiniteGraph",
    "StepGraphon",
    "average",
    "blow_up",
    "common_refinement",
    "evaluate",
    "finite_graph",
    "graphon_of_graph",
    "make_step_graphon",
    "part_index",
    "permute_parts",
    "reduce_step_graphon",
    "stepping",
    "DeltaBound",
    "cut_norm",
    "cut_norm_full_enumeration",
    "d1",
    "d2",
    "d_square",
    "d_w_truncated",
    "delta_bound",
    "hat_delta",
    "counting_bound",
    "enumerate_graph",
    "graph_index",
    "t_ind_exact",
    "t_ind_mc",
    "RandomSource",
    "answers_to_point",
    "empirical_graphon",
    "questionnaire_sample",
    "sample_graph",
    "GraphonName",
    "Inconclusive",
    "MartingaleStream",
    "MetricTag",
    "NotRandomFree",
    "Ok",
    "SectionStage",
    "Undecided",
    "Violation",
    "canonical_name",
    "constant_name",
    "d1_name_with_ground_truth",
    "martingale_from_dsquare_name",
    "name_delta_to_dw",
    "name_dw_to_delta",
    "randomfree_d1_distance",
    "randomfree_d1_name",
    "randomfree_defect",
    "randomfree_semidecide",
    "section_delta_to_dsquare",
    "validate_name_prefix",
    "weaken_name",
    "FractalStage",
    "HaltingTable",
    "MatchingReport",
    "RectangleProbe",
    "SpectrumEntry",
    "constant_graphon",
    "decode_halting",
    "direct_sum",
    "fractal_stage",
    "fractal_white_limit",
    "halting_chain_certificate",
    "halting_graphon",
    "halting_tail_measure",
    "level_constants",
    "prop46_gadget",
    "rectangle_bound_probe",
    "render_dense",
    "twin_parts",
    "value_spectrum",
    "verify_diagonal_matching",
    "errors",
    "formats",
]
