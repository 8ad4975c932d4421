"""Pipeline configuration and the run report.

All stage randomness derives from one master seed through labeled
sub-seeds, so a fixed config reproduces every artifact bit-for-bit. Values
loaded from a config file take precedence over command-line flags.
"""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Optional

from .generate.procedural import derive_seed


@dataclass
class PipelineConfig:
    seed: int = 42
    out_dir: str = "out"

    generator_backend: str = "procedural"  # procedural | remote
    generator_endpoint: Optional[str] = None
    generator_timeout_s: float = 30.0

    planner_backend: str = "rule"  # rule | llm
    planner_endpoint: Optional[str] = None
    planner_model: str = "gpt-4o"

    catalog_path: Optional[str] = None
    retrieval_weights: Optional[List[float]] = None
    top_k: int = 1

    prompt: str = "residential district"
    convergence_threshold: float = 0.05
    max_rounds: int = 10

    layout_size: int = 768
    ratios: Optional[List[float]] = None
    text: Optional[str] = None

    expand_width: int = 0  # 0 disables expansion in run-all
    expand_height: int = 0
    tile_size: int = 768
    overlap: int = 128
    blend_band: Optional[int] = None

    tree_density: float = 1.0
    lamp_spacing: float = 25.0

    def stage_seed(self, stage: str) -> int:
        return derive_seed(self.seed, f"stage:{stage}")

    @staticmethod
    def build(flags: Dict[str, object], config_file: Optional[Path] = None) -> "PipelineConfig":
        """Defaults, overlaid by set flags, overlaid by the config file (file wins)."""
        config = PipelineConfig()
        for key, value in flags.items():
            if value is not None:
                setattr(config, key, value)
        if config_file is not None:
            doc = json.loads(Path(config_file).read_text(encoding="utf-8"))
            unknown = set(doc) - set(asdict(config))
            if unknown:
                raise ValueError(f"unknown config keys: {sorted(unknown)}")
            for key, value in doc.items():
                setattr(config, key, value)
        return config


class RunReport:
    """Accumulates per-stage timings and warnings; written as report.json."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.stages: Dict[str, dict] = {}
        if self.path.exists():
            self.stages = json.loads(self.path.read_text(encoding="utf-8")).get("stages", {})

    def record(self, stage: str, elapsed_s: float, **details) -> None:
        entry = {"elapsed_s": round(elapsed_s, 3)}
        entry.update(details)
        self.stages[stage] = entry
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(
            json.dumps({"stages": self.stages}, indent=2, default=str) + "\n", encoding="utf-8"
        )


class StageTimer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        return False
