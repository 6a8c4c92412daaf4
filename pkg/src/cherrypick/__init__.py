"""Cherry-picking sequences on rooted phylogenetic networks."""
from .algorithms import (NotCPN, PreconditionError, ReduciblePairSet, TaxonOrder, find_tcs,
                         isomorphic, smallest_cps, tcn_contains)
from .construction import ALL_CLASSES, RECONSTRUCTIBLE_CLASSES, CpnClass, add_pair, build_from_cps
from .network import (ClassReport, Network, NetworkError, NodeKind, Pair, PairKind,
                      all_reducible_pairs, classify, find_rc_1st, find_rp_2nd, pair, reduce_pair)
from .sequences import (Sequence, apply, check_cps, check_tcs, cps_reduces_network,
                        is_fully_reduced, is_minimal_for)

__version__ = "0.1.0"
