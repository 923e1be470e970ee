import logging
logging.getLogger("complementary_mubs").addHandler(logging.NullHandler())

from .utils import __version__, configure_logging
from .errors import ComplementarityError
from .residue import Gl2Matrix, ResidueScalar, Subspace2, Vec4
from .subalgebra import SubalgebraDesc, SubalgebraKind, classify, commutant, phi, phi_inverse
from .constructions import (
    Decomposition,
    Family,
    build_ab_decomposition,
    build_galois_decomposition,
    find_galois_subgroup,
    recombine_extension,
)
from .analysis import (
    CertificateReport,
    MubFamily,
    SearchResult,
    Verdict,
    certify_strong_unextendibility,
    extract_mub_family,
    unbiased_vector_search,
)
from .certify import CertifySession, PipelineConfig, PipelineResult, run_pipeline, verify_external

__all__ = [
    '__version__',
    'configure_logging',
    'ComplementarityError',
    'Gl2Matrix',
    'ResidueScalar',
    'Subspace2',
    'Vec4',
    'SubalgebraDesc',
    'SubalgebraKind',
    'classify',
    'commutant',
    'phi',
    'phi_inverse',
    'Decomposition',
    'Family',
    'build_ab_decomposition',
    'build_galois_decomposition',
    'find_galois_subgroup',
    'recombine_extension',
    'CertificateReport',
    'MubFamily',
    'SearchResult',
    'Verdict',
    'certify_strong_unextendibility',
    'extract_mub_family',
    'unbiased_vector_search',
    'CertifySession',
    'PipelineConfig',
    'PipelineResult',
    'run_pipeline',
    'verify_external',
]
