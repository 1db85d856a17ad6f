"""Patched cluster detection through one-dimensional slices of feature spaces."""
from .core import (
    Dataset,
    LeafBranch,
    MergeTree,
    PrunedTree,
    RelevanceReport,
    Slice1D,
    SliceSpec,
    ValidationError,
    validate_dataset,
)
from .linkage import Cut, SingleLinkage1D, cut, single_linkage_1d, single_linkage_naive
from .pipeline import (
    FeatureReportRow,
    FeatureSelectionConfig,
    InterstitialPatch,
    IntersticeDetector,
    SliceRelevanceSelector,
    detect_interstices,
    select_features,
    slice_population_histogram,
)
from .relevance import Interstice, find_interstices, prune_and_contract, relevance
from .slicer import ColumnStats, Standardizer, add_uniform_noise, grid_anchors, standardize, take_slice

__version__ = "0.1.0"
