"""Transport-map preprocessing of snapshots for POD-based model reduction."""
from .grid import (ContractError, Field, Grid, Snapshot, SnapshotSet, SubdomainMask,
                   axpy, inner_product, norm, restrict)
from .maps import (ParamTrace, TransportMap, mobius_inverse, pullback, pullback_set,
                   rotation_inverse, translation_inverse)
from .alignment import build_trace, detect_front_abscissa, detect_peak_abscissa, detect_wake_angle
from .pod import (GreedyState, PODResult, decay_report, modes_to_reach, nwidth_surrogate,
                  orthogonalize, pod, pod_greedy, projection_error)
from .bundle import read_bundle, read_decay_csv, write_bundle, write_decay_csv

__version__ = "0.1.0"
