"""Exact quasi-heredity decisions and heredity-chain certificates for finite-dimensional algebras."""

from .algebra import Algebra, Idempotent, TwoSidedIdeal, make_algebra, validate_algebra
from .constructions import (
    BlockSpec,
    MoritaContext,
    block_extension_chain,
    build_block_extension,
    build_morita_ring,
    build_triangular,
    check_fac_ring_iso,
    check_morita_hypotheses,
    morita_context,
    morita_qh_chain,
    triangular_chain,
    validate_morita_context,
)
from .errors import QHAlgError, UnsupportedInput
from .exactmath import GF, QQ, Subspace
from .heredity import (
    HeredityChainCertificate,
    QHRefusal,
    assemble_chain,
    decide_qh,
    is_heredity_ideal,
    verify_chain,
)
from .quiver import QuiverPresentation, compile_bound_quiver

__version__ = "0.1.0"
