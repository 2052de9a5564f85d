"""Cycle structure of standardized random permutations."""

from .core import Permutation, cycle_decomposition, major_index, run_function, standardize
from .dist import DiscreteDist, parse_dist
from .errors import (CapExceeded, Degenerate, GroundSetMismatch, InternalInvariant, NonPrimitive,
                     NoSuchCycle, ParseError, RViolation, StdPermError, UnknownSymbol)
from .exact import (TypedTailQuery, expected_ck, joint_moment_D, joint_tail, marginal_pmf_D,
                    pd_joint_moment, uniform_joint_moment)
from .sampling import RngStream, sample_pd, sample_sequence, sample_std_perm
from .surgery import census_by_type, insert_cycle, remove_cycle, unique_cycle_generator
from .words import Necklace, canonical_rotation, is_primitive, necklace_count, necklace_of

__version__ = "0.1.0"
