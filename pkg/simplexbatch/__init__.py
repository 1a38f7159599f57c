from .abelian_group import GroupSpec, binary_group, parse_group_spec
from .service import (Service, SpecialService, build_full_service,
                      build_numbering_with_zero_anchor, build_service,
                      extend_service, translate_service,
                      try_extend_special_service, verify_service,
                      verify_special_service)
from .simplex import (ColumnAssignment, SimplexCode, build_phi,
                      serve_affine_requests, serve_batch_requests,
                      serve_odd_requests, serve_pir_requests,
                      verify_assignment)
from .search import (check_conjecture_strong, check_snevily,
                     find_snevily_numbering, find_special_service_bruteforce,
                     greedy_special_service, oracle_can_serve,
                     serve_via_special_service)
__version__ = "0.1.0"

__all__ = [
    'GroupSpec', 'binary_group', 'parse_group_spec',
    'Service', 'SpecialService', 'build_full_service',
    'build_numbering_with_zero_anchor', 'build_service', 'extend_service',
    'translate_service', 'try_extend_special_service', 'verify_service',
    'verify_special_service',
    'ColumnAssignment', 'SimplexCode', 'build_phi', 'serve_affine_requests',
    'serve_batch_requests', 'serve_odd_requests', 'serve_pir_requests',
    'verify_assignment',
    'check_conjecture_strong', 'check_snevily', 'find_snevily_numbering',
    'find_special_service_bruteforce', 'greedy_special_service',
    'oracle_can_serve', 'serve_via_special_service',
]
