"""Export sessions: drive a pipeline and stream its outputs to a trace file."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from trace_exporter.format import TraceError, TraceWriter
from trace_exporter.pipelines import StepCapture, load_pipeline


@dataclass
class ExportSession:
    pipeline_id: str
    T: int
    out_path: Path
    d: int | None = None  # fixed by the first captured output
    records_written: int = 0
    _writer: TraceWriter | None = field(default=None, repr=False)

    def capture(self, _pipe, step: StepCapture) -> None:
        flat = step.model_output.reshape(-1)
        if self._writer is None:
            self.d = flat.size
            self._writer = TraceWriter(self.out_path, self.T, self.d)
        self._writer.write(step.step, step.s, flat)
        self.records_written += 1

    def finish(self) -> None:
        if self._writer is None:
            raise TraceError("pipeline produced no steps")
        self._writer.close()
        if self.records_written != self.T:
            raise TraceError(f"captured {self.records_written} steps, expected {self.T}")

    def abort(self) -> None:
        if self._writer is not None:
            self._writer.abort()


def export(model_id: str, prompt: str, steps: int, seed: int, out_path: str | Path) -> dict:
    """Run the pipeline once, capturing every pre-solver model output.

    Writes the trace plus a sidecar JSON (parameterization, model id,
    scheduler name) next to it; returns the header summary.
    """
    out_path = Path(out_path)
    pipe = load_pipeline(model_id)
    session = ExportSession(pipeline_id=model_id, T=steps, out_path=out_path)
    try:
        pipe(prompt, num_inference_steps=steps, seed=seed, callback_on_step_end=session.capture)
        session.finish()
    except Exception:
        session.abort()
        raise
    sidecar = {
        "parameterization": pipe.parameterization,
        "model_id": model_id,
        "scheduler": pipe.scheduler_name,
        "prompt": prompt,
        "seed": seed,
    }
    sidecar_path = out_path.with_name(out_path.name + ".json")
    sidecar_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return {
        "trace": str(out_path),
        "sidecar": str(sidecar_path),
        "T": session.T,
        "d": session.d,
        "parameterization": pipe.parameterization,
    }
