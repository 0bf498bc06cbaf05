"""Fundamental polytopes, graph covers and pseudo-codewords of binary LDPC codes."""

from .code_model import ParityCheckMatrix, TannerGraph, from_rows, load_alist
from .decoders import DecodeResult, lpd, mld, msa, spa
from .fundamental_polytope import build_cone, build_polytope, minimal_pseudocodewords, polytope_vertices
from .graph_covers import MCover, brute_force_gcd, realize_cover
from .limits import DEFAULT_LIMITS, Limits
from .pseudoweights import minimum_weights, wp_awgnc, wp_bec, wp_bsc

__all__ = [
    "ParityCheckMatrix", "TannerGraph", "from_rows", "load_alist",
    "DecodeResult", "lpd", "mld", "msa", "spa",
    "build_cone", "build_polytope", "minimal_pseudocodewords", "polytope_vertices",
    "MCover", "brute_force_gcd", "realize_cover",
    "DEFAULT_LIMITS", "Limits",
    "minimum_weights", "wp_awgnc", "wp_bec", "wp_bsc",
]
__version__ = "0.1.0"
