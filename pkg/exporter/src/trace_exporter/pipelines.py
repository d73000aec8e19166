"""Pipelines the exporter can drive.

Two sources:

- ``toy:<name>`` ids resolve to a self-contained deterministic pipeline (a
  tiny flow-matching sampler with a fixed random MLP as the "model"),
  exposing the same per-step callback surface as a diffusers pipeline.
  Useful for tests and for CI machines without model weights.
- any other id is loaded through HuggingFace diffusers when installed; the
  capture point is scheduler.step's model_output argument, i.e. the
  post-guidance tensor the solver actually consumes.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np


class PipelineLoadError(RuntimeError):
    pass


def _seeded(label: str, seed: int) -> np.random.Generator:
    digest = hashlib.blake2s(f"{label}:{seed}".encode(), digest_size=8).digest()
    return np.random.Generator(np.random.Philox(key=[seed, int.from_bytes(digest, "little") >> 1]))


@dataclass
class StepCapture:
    step: int          # sampling-order index, T..1
    s: float           # normalized time in [0, 1]
    model_output: np.ndarray


class ToyFlowPipeline:
    """Deterministic stand-in for a flow-matching diffusers pipeline.

    The "model" is a fixed two-layer tanh network whose weights are derived
    from the pipeline name; sampling is Euler on dx = v ds over the uniform
    grid s_t = t/T from s=1 to s=0.  The per-step callback receives the raw
    model output before the solver update, mirroring the diffusers
    callback_on_step_end convention.
    """

    parameterization = "flow"
    scheduler_name = "uniform-euler-flow"

    def __init__(self, name: str = "flow", latent_dim: int = 16, hidden: int = 32):
        self.name = name
        self.latent_dim = latent_dim
        rng = _seeded(f"toy-weights:{name}:{latent_dim}", 0)
        self.w1 = rng.standard_normal((hidden, latent_dim + 1)) / np.sqrt(latent_dim + 1)
        self.b1 = rng.standard_normal(hidden) * 0.1
        self.w2 = rng.standard_normal((latent_dim, hidden)) / np.sqrt(hidden)
        self.b2 = rng.standard_normal(latent_dim) * 0.1

    def model(self, x: np.ndarray, s: float) -> np.ndarray:
        h = np.tanh(self.w1 @ np.concatenate([x, [s]]) + self.b1)
        return self.w2 @ h + self.b2

    def __call__(self, prompt: str, num_inference_steps: int, seed: int, callback_on_step_end=None):
        T = num_inference_steps
        x = _seeded(f"toy-init:{prompt}", seed).standard_normal(self.latent_dim)
        for t in range(T, 0, -1):
            s_t = t / T
            v = self.model(x, s_t)
            if callback_on_step_end is not None:
                callback_on_step_end(self, StepCapture(step=t, s=s_t, model_output=v))
            x = x + ((t - 1) / T - s_t) * v
        return x


def _load_toy(model_id: str) -> ToyFlowPipeline:
    name = model_id.split(":", 1)[1] or "flow"
    if "-" in name:
        base, _, dim = name.partition("-")
        return ToyFlowPipeline(name=base, latent_dim=int(dim))
    return ToyFlowPipeline(name=name)


class DiffusersAdapter:
    """Wraps a diffusers pipeline, capturing scheduler.step inputs."""

    def __init__(self, pipe):
        self.pipe = pipe
        self.scheduler_name = type(pipe.scheduler).__name__
        self.parameterization = {
            "epsilon": "epsilon", "v_prediction": "v", "sample": "x0",
            "flow_prediction": "flow",
        }.get(getattr(pipe.scheduler.config, "prediction_type", "flow_prediction"), "flow")

    def __call__(self, prompt: str, num_inference_steps: int, seed: int, callback_on_step_end=None):
        import torch

        scheduler = self.pipe.scheduler
        original_step = scheduler.step
        train_T = getattr(scheduler.config, "num_train_timesteps", 1000)
        counter = {"t": num_inference_steps}

        def hooked(model_output, timestep, *args, **kwargs):
            if callback_on_step_end is not None:
                t_val = float(timestep) if not hasattr(timestep, "item") else float(timestep.item())
                callback_on_step_end(
                    self.pipe,
                    StepCapture(
                        step=counter["t"],
                        s=t_val / train_T,
                        model_output=model_output.detach().to(torch.float32).cpu().numpy(),
                    ),
                )
            counter["t"] -= 1
            return original_step(model_output, timestep, *args, **kwargs)

        scheduler.step = hooked
        try:
            generator = torch.Generator(device="cpu").manual_seed(seed)
            return self.pipe(
                prompt, num_inference_steps=num_inference_steps, generator=generator
            )
        finally:
            scheduler.step = original_step


def load_pipeline(model_id: str):
    if model_id.startswith("toy:"):
        return _load_toy(model_id)
    try:
        import diffusers  # noqa: F401
    except ImportError as exc:
        raise PipelineLoadError(
            f"model {model_id!r} needs the diffusers extra (pip install zeus-trace-exporter[diffusers])"
        ) from exc
    try:
        import torch
        from diffusers import DiffusionPipeline

        pipe = DiffusionPipeline.from_pretrained(model_id, torch_dtype=torch.float16)
        return DiffusersAdapter(pipe)
    except Exception as exc:
        raise PipelineLoadError(f"failed to load {model_id!r}: {exc}") from exc
