"""Experiment configuration: dataclass, presets, JSON round-trip.

A single config drives every CLI verb.  The process is either an explicit
spec (the JSON layout of ``dgp.spec_from_json``) or a constructed preset:
ARCH(1) coefficients rescaled to the target signal-to-noise ratio, regressor
means rescaled so their inner product with the coefficients hits
``mean_target``, geometric covariance r^|j-k|, unit error variance.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace

from . import dgp as dgp_mod
from .dgp import ARCH_NONSPARSE, ARCH_SPARSE, Dgp, GeometricCov, build_dgp
from .rng import substream

LOG2 = math.log(2.0)

# Pinned construction seeds.  The sparse seed is chosen so the coefficient
# bursts concentrate in a few blocks at both study sizes (long near-zero
# stretches, a few large adjacent groups); the nonsparse seed keeps every
# coefficient non-negligible.  The mean seed keeps the rescaling factor
# moderate for every preset/size combination.
SPARSE_BETA_SEED = 72
NONSPARSE_BETA_SEED = 2
GAMMA_SEED = 13


@dataclass(frozen=True)
class ExperimentConfig:
    # process: explicit spec payload wins over the constructed preset
    dgp: dict | None = None
    preset: str = "sparse"            # sparse | nonsparse coefficient shape
    cov_r: float = 0.5                # geometric covariance parameter
    snr: float = 5.0                  # (Var(y) - Var(u)) / Var(u)
    mean_target: float = math.sqrt(2.0)
    beta_seed: int = SPARSE_BETA_SEED
    gamma_seed: int = GAMMA_SEED
    # study geometry
    n: int = 500
    p: int = 250
    block_count: int = 25
    block_width: int = 10
    # inference
    alpha: float = 0.05
    # verification-campaign geometry
    m_size: int = 15                  # fixed-mask campaigns
    coll_n: int = 120                 # collection campaigns
    coll_count: int = 16
    coll_max_size: int = 20
    # replication
    reps: int = 100
    seed: int = 20250809
    eps_grid: tuple = (0.25, 0.5, LOG2)
    t_grid: tuple = (0.25, 0.5, LOG2)
    workers: int | None = None
    out_dir: str | None = None

    def validate(self) -> None:
        if self.preset not in ("sparse", "nonsparse"):
            raise ValueError(f"preset must be 'sparse' or 'nonsparse', got {self.preset!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")
        if self.block_count * self.block_width > self.p:
            raise ValueError(
                f"block structure {self.block_count}x{self.block_width} exceeds p={self.p}"
            )
        if 1 + self.block_count * self.block_width >= self.n - 1:
            raise ValueError(
                f"full model size {1 + self.block_count * self.block_width} "
                f"must be < n-1 = {self.n - 1}"
            )
        if not 1 <= self.m_size < self.n - 1:
            raise ValueError(f"m_size={self.m_size} must satisfy 1 <= |m| < n-1")
        if self.coll_max_size >= self.coll_n - 1:
            raise ValueError("collection max size must be < coll_n - 1")
        if any(e <= 0 for e in self.eps_grid) or any(t < 0 for t in self.t_grid):
            raise ValueError("eps_grid entries must be > 0 and t_grid entries >= 0")


def study_config(preset: str = "sparse", scale: str = "reduced", **overrides) -> ExperimentConfig:
    """Block-search study presets: reduced runs in minutes, full mirrors the
    2000-observation, 50x20-block setting."""
    if scale == "reduced":
        base = dict(n=500, p=250, block_count=25, block_width=10, reps=100)
    elif scale == "full":
        base = dict(n=2000, p=1000, block_count=50, block_width=20, reps=100)
    else:
        raise ValueError(f"scale must be 'reduced' or 'full', got {scale!r}")
    base["beta_seed"] = SPARSE_BETA_SEED if preset == "sparse" else NONSPARSE_BETA_SEED
    cfg = ExperimentConfig(preset=preset, **{**base, **overrides})
    cfg.validate()
    return cfg


def prop21_config(**overrides) -> ExperimentConfig:
    cfg = ExperimentConfig(
        **{
            **dict(n=60, p=20, m_size=15, block_count=4, block_width=5, reps=20_000),
            **overrides,
        }
    )
    cfg.validate()
    return cfg


def bounds_config(**overrides) -> ExperimentConfig:
    cfg = ExperimentConfig(
        **{
            **dict(n=60, p=25, m_size=15, block_count=5, block_width=5,
                   coll_n=120, coll_count=16, coll_max_size=20, reps=10_000),
            **overrides,
        }
    )
    cfg.validate()
    return cfg


def build_study_dgp(cfg: ExperimentConfig) -> Dgp:
    """Process for a config: explicit spec if given, else the constructed preset."""
    if cfg.dgp is not None:
        return build_dgp(dgp_mod.spec_from_json(json.dumps(cfg.dgp)))
    params = ARCH_SPARSE if cfg.preset == "sparse" else ARCH_NONSPARSE
    cov = GeometricCov(cfg.cov_r)
    beta = dgp_mod.generate_beta_arch(cfg.p, cfg.beta_seed, params)
    beta = dgp_mod.scale_to_snr(beta, cov, 1.0, cfg.snr)
    gamma = substream(cfg.gamma_seed).standard_normal(cfg.p)
    gamma = dgp_mod.scale_means(gamma, beta, cfg.mean_target)
    spec = dgp_mod.DgpSpec(p=cfg.p, beta0=0.0, beta=beta, gamma=gamma,
                           sigma_x=cov, sigma_u=1.0)
    return build_dgp(spec)


def blocks_from_config(cfg: ExperimentConfig) -> list:
    """Consecutive design-column blocks (column 0 is the intercept)."""
    return [
        list(range(1 + b * cfg.block_width, 1 + (b + 1) * cfg.block_width))
        for b in range(cfg.block_count)
    ]


def config_to_json(cfg: ExperimentConfig) -> str:
    payload = asdict(cfg)
    payload["eps_grid"] = list(cfg.eps_grid)
    payload["t_grid"] = list(cfg.t_grid)
    return json.dumps(payload, indent=2, sort_keys=True)


def config_from_json(text: str) -> ExperimentConfig:
    payload = json.loads(text)
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(payload) - known
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    if "eps_grid" in payload:
        payload["eps_grid"] = tuple(payload["eps_grid"])
    if "t_grid" in payload:
        payload["t_grid"] = tuple(payload["t_grid"])
    cfg = ExperimentConfig(**payload)
    cfg.validate()
    return cfg


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_json(fh.read())


def apply_overrides(cfg: ExperimentConfig, **overrides) -> ExperimentConfig:
    clean = {k: v for k, v in overrides.items() if v is not None}
    if not clean:
        return cfg
    out = replace(cfg, **clean)
    out.validate()
    return out
