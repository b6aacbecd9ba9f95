"""Poisson-Voronoi typical-cell toolkit: point-process sampling, cell
membership and statistics, sum/product expectation identities, downlink
SINR simulation, and the matching closed forms.

The package is organized bottom-up:

* :mod:`ppvt.geometry`, :mod:`ppvt.rng`, :mod:`ppvt.ppp` — primitives.
* :mod:`ppvt.voronoi` — typical-cell membership (two equivalent routes)
  and replicated cell statistics.
* :mod:`ppvt.quadrature`, :mod:`ppvt.fields`, :mod:`ppvt.identities` —
  adaptive integration and the closed-form/Monte-Carlo identity pairs.
* :mod:`ppvt.netsim` — the downlink Monte Carlo.
* :mod:`ppvt.analysis` — closed-form consumption, coverage, and curves.
* :mod:`ppvt.cli` — the ``ppvt`` command.

Heavy membership kernels run through numba when it is importable; set
``PPVT_BACKEND=numpy`` to force the pure-NumPy path (``numba`` to require
the compiled one), and ``PPVT_THREADS`` to cap replication parallelism.
"""
from ._kernels import BACKEND as _kernel_backend
from .analysis import (
    BandwidthCurve,
    G,
    G_prime,
    T,
    T_prime,
    W_approx,
    W_closed_form,
    W_closed_form_direct,
    W_double_gate,
    W_double_gate_direct,
    coverage_closed_form,
    divergence_scan,
    eta,
    mean_ues_closed_form,
    w_threshold,
)
from .fields import ScalarField, constant, disk_indicator, disk_patch, far_ring, gaussian
from .geometry import ORIGIN, Disk, Point2, Rect, Window, in_Bc_exterior, in_half_plane_M0
from .identities import (
    Estimate,
    lemma1_closed_form,
    lemma1_monte_carlo,
    remark_product_closed_form,
    remark_product_monte_carlo,
    remark_sum_closed_form,
    remark_sum_monte_carlo,
    typical_cell_window,
)
from .netsim import (
    NetworkRealization,
    NetworkScenario,
    allocated_bandwidth,
    estimate_W_mc,
    estimate_coverage_mc,
    estimate_mean_ues,
    realize_network,
    sinr,
    typical_cell_consumption,
)
from .ppp import PppSample, expected_count, sample_ppp, write_points_csv
from .quadrature import QuadratureError, QuadratureSpec, central_difference, integrate_1d, integrate_radial_2d
from .voronoi import (
    CellStats,
    GammaCellModel,
    count_ues_in_typical_cell,
    is_in_cell_direct,
    is_in_cell_product,
    membership_agreement,
    typical_cell_area_mc,
    typical_cell_stats,
    write_cell_stats_csv,
)

__version__ = "0.1.0"


def active_backend() -> str:
    """Which membership-kernel implementation is live: 'numba' or 'numpy'."""
    return _kernel_backend


__all__ = [
    "__version__",
    "active_backend",
    # geometry
    "Point2", "Disk", "Rect", "Window", "ORIGIN",
    "in_half_plane_M0", "in_Bc_exterior",
    # ppp
    "PppSample", "sample_ppp", "expected_count", "write_points_csv",
    # voronoi
    "CellStats", "GammaCellModel", "is_in_cell_direct", "is_in_cell_product",
    "membership_agreement", "count_ues_in_typical_cell",
    "typical_cell_stats", "typical_cell_area_mc", "write_cell_stats_csv",
    # quadrature
    "QuadratureSpec", "QuadratureError",
    "integrate_1d", "integrate_radial_2d", "central_difference",
    # fields / identities
    "ScalarField", "constant", "gaussian", "disk_indicator", "disk_patch", "far_ring",
    "Estimate", "typical_cell_window",
    "lemma1_closed_form", "lemma1_monte_carlo",
    "remark_sum_closed_form", "remark_sum_monte_carlo",
    "remark_product_closed_form", "remark_product_monte_carlo",
    # netsim
    "NetworkScenario", "NetworkRealization", "realize_network",
    "sinr", "allocated_bandwidth", "typical_cell_consumption",
    "estimate_W_mc", "estimate_coverage_mc", "estimate_mean_ues",
    # analysis
    "T", "T_prime", "eta", "w_threshold", "G", "G_prime",
    "W_closed_form", "W_closed_form_direct",
    "W_double_gate", "W_double_gate_direct", "W_approx",
    "coverage_closed_form", "mean_ues_closed_form",
    "divergence_scan", "BandwidthCurve",
]
