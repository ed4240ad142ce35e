"""Finite n-ary polygroupoids with regular abelian group actions."""
from __future__ import annotations

from .amalgamation import (AmalgamationProblem, FailureWitness, UniquenessVerdict,
                           nonuniqueness_witness, solve, uniqueness_check)
from .core import (AxiomReport, Cell, ExplicitPolygroupoid, Polygroupoid, Verdict, check_axioms,
                   closure_of, fiber_of, is_compatible, q_holds, support_of)
from .errors import (CapacityError, ParseError, PolygroupoidError, PreconditionError,
                     StructuralError, UnfillableError)
from .filling import (CompatibleSystem, SimplexFamily, build_simplex_family, defect_of_family,
                      defect_of_tuple, extend_to_maximal, horn_fill, structure_defect, twist)
from .groups import GroupAutomorphism, GroupSpec, enumerate_group_automorphisms, group_arith, sign_scale
from .morphisms import (AutomorphismRep, Star, StructureMap, automorphism_census, certify,
                        factor_automorphism, is_isomorphic, star_isomorphism)
from .pgx import parse, serialize
from .recovery import RecoveredGroup, check_standard_action, recover_group, transport
from .standard import StandardPolygroupoid, act, build_standard, iota_apply, to_explicit

__all__ = [name for name, obj in dict(globals()).items()
           if not name.startswith("_") and name != "annotations" and not hasattr(obj, "__path__")
           and type(obj).__name__ != "module"]
