"""Lossless compression and local statistics of marked graphs."""

from .codec import CodecConfig, CompressedBlob, compress, decompress, query_pattern_count, triangle_count
from .empirical import Distribution, empirical, lp_distance, lp_distance_oracle, type_vector
from .errors import MGZError
from .graph import MarkSets, MarkedGraph, build, parse_graph_text, format_graph_text
from .rooted import RootedMarkedGraph, canonical_code, class_code, truncate

__version__ = "0.1.0"

__all__ = [
    "CodecConfig", "CompressedBlob", "Distribution", "MGZError", "MarkSets", "MarkedGraph",
    "RootedMarkedGraph", "build", "canonical_code", "class_code", "compress", "decompress",
    "empirical", "format_graph_text", "lp_distance", "lp_distance_oracle", "parse_graph_text",
    "query_pattern_count", "triangle_count", "truncate", "type_vector",
]
