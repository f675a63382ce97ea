"""Streaming incomplete multi-view clustering."""

from ._core import (
    ConfigError,
    DataError,
    NumericalError,
    ProtocolError,
    ValidationError,
    ConsensusState,
    InitMethod,
    LabelConfig,
    MetricReport,
    Partition,
    SolveDiagnostics,
    SolverConfig,
    ViewBatch,
    __version__,
    acc,
    apply_missing,
    evaluate,
    final_labels,
    fscore,
    generate_synthetic,
    init_first_view,
    integrate_view,
    kmeans,
    load_checkpoint,
    lower_bound,
    nmi,
    purity,
    register_view,
    run_stream,
    save_checkpoint,
    solve_trace_max,
    thin_svd,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
