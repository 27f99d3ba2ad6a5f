"""Stability, unitarization weights and balanced metrics for representations
of finite posets by subspaces."""

from .linalg import RationalMatrix, Subspace, span
from .poset import Poset, make_poset, primitive, n_poset, critical_poset
from .reps import SubspaceRep, make_rep, dim_vector, classify, linearly_equivalent
from .stability import (Weight, SubdimVector, lambda_chi, restrict, is_stable,
                        search_subdims, build_A_matrix, extremal_rays, cone_membership,
                        extend_weight)
from .notation import parse_space, parse_poset, parse_row, render_space

__version__ = "0.1.0"
