"""Simulate systematic edge omission in attributed networks and measure its
effect on minority representation in degree rankings."""

from .graph import MAJORITY, MINORITY, Graph, GraphError, GroupStats, from_edges, group_stats
from .netgen import GenParams, generate, label_assignment
from .noise import (
    Attribute,
    Baseline,
    Centrality,
    Jaccard,
    NoiseSpec,
    OmegaPreset,
    RetainProbabilities,
    apply_noise,
    centrality_score,
    expected_retained,
    jaccard_similarity,
    retain_probs,
)
from .ranking import (
    CcdfCurve,
    RankingResult,
    degree_ranking,
    group_ccdf,
    minority_fraction_curve,
    topk_minority_fraction,
)
from .metrics import PartitionReport, attribute_assortativity, edge_fraction_retained, label_modularity
from .experiment import SweepConfig, SweepRecord, aggregate, derive_seed, run_sweep

__version__ = "0.1.0"
