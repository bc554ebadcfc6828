"""Schmidl-Cox style OFDM start-of-frame detection with the bounded
(two-window energy) metric, plus the burst/channel simulation around it."""

from .channel import (ChannelModel, NoiseConvention, NoiseSpec, add_awgn, apply_multipath,
                      derive_seed, synthesize_scenario)
from .detector import (IndexConvention, MetricTrace, PeakReport, StreamingDetector,
                       compute_metrics, detector_push, find_peak, lagged_energy, metric_classic,
                       metric_delayed_r, metric_modified, sliding_correlation, sliding_energy,
                       window_energy)
from .experiments import (ExperimentSummary, HistogramResult, TraceResult, run_histogram,
                          run_trace, summarize)
from .frame import (BurstDescriptor, OfdmConfig, TimeDomainSymbol, assemble_burst,
                    build_data_symbol, build_preamble_symbol, forward_transform,
                    inverse_transform, qpsk_map)

__version__ = "0.1.0"
