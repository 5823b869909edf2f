"""The final chain of the finite powerset functor, materialized as a transition system."""

from .bisim import SimVerdict, approximant, bisim_at, bisimilar, sim_level
from .chain import LevelElem, audit, connect, level_enumerate, parse, project, session, to_system, zero
from .omega import BranchSet, OmegaBranch, branch_eq, branch_of, konig_extract, range_channel, succ_check
from .system import FinSystem, GenSystem, PointedSystem, parent, von_neumann, von_omega, von_set, zermelo
from .trees import beta_embedding, bits_encode, complete_binary, pad_embedding

__all__ = [
    "BranchSet", "FinSystem", "GenSystem", "LevelElem", "OmegaBranch", "PointedSystem", "SimVerdict",
    "approximant", "audit", "beta_embedding", "bisim_at", "bisimilar", "bits_encode", "branch_eq",
    "branch_of", "complete_binary", "connect", "konig_extract", "level_enumerate", "pad_embedding",
    "parent", "parse", "project", "range_channel", "session", "sim_level", "succ_check", "to_system",
    "von_neumann", "von_omega", "von_set", "zermelo", "zero",
]
