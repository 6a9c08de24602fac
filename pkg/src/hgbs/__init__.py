"""Hierarchical grid-based pairwise key pre-distribution for sensor networks."""

__version__ = "0.1.0"

from .field import MERSENNE_61, FieldElement, PrimeField, UniPoly, horner_eval, lagrange_interpolate
from .keying import (
    DegreePolicy,
    Deployment,
    assign_keying_material,
    establish_key,
    establish_path_key,
    load_deployment,
    truncate_rings,
)
from .polynomial import SymBivarPoly, derive_share, eval_bivar, eval_share, gen_sym_bivar, recover_from_shares
from .topology import GridParams, NodeId, common_order, decode_id, encode_id, grid_index, make_grid

__all__ = [
    "MERSENNE_61", "FieldElement", "PrimeField", "UniPoly", "horner_eval", "lagrange_interpolate",
    "DegreePolicy", "Deployment", "assign_keying_material", "establish_key", "establish_path_key",
    "load_deployment", "truncate_rings", "SymBivarPoly", "derive_share", "eval_bivar", "eval_share",
    "gen_sym_bivar", "recover_from_shares", "GridParams", "NodeId", "common_order", "decode_id",
    "encode_id", "grid_index", "make_grid",
]
