"""Per-step denoiser-output capture for diffusion pipelines."""

from trace_exporter.export import ExportSession, export
from trace_exporter.format import Record, TraceError, TraceWriter, read_trace
from trace_exporter.pipelines import PipelineLoadError, ToyFlowPipeline, load_pipeline

__version__ = "0.1.0"

__all__ = [
    "ExportSession", "export",
    "Record", "TraceError", "TraceWriter", "read_trace",
    "PipelineLoadError", "ToyFlowPipeline", "load_pipeline",
    "__version__",
]
