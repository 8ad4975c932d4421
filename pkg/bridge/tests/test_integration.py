"""End-to-end check against a manifest produced by the real pipeline CLI.

The producing toolkit is only touched through subprocesses and files, never
imported: the manifest format is the contract. Skipped when the CLI is not
installed.
"""
from __future__ import annotations

import shutil
import subprocess
import sys

import pytest

from citykit_bridge import BridgeConfig, import_scene


@pytest.mark.skipif(shutil.which("citykit") is None, reason="pipeline CLI not installed")
def test_import_pipeline_manifest(tmp_path):
    catalog = tmp_path / "catalog"
    subprocess.run(
        [
            sys.executable,
            "-c",
            "from citykit.assets import synth_catalog, write_catalog; "
            f"write_catalog(synth_catalog(40, seed=3), r'{catalog}')",
        ],
        check=True,
    )
    out = tmp_path / "run"
    subprocess.run(
        [
            "citykit", "run-all",
            "--out", str(out),
            "--seed", "8",
            "--catalog", str(catalog),
            "--size", "256",
        ],
        check=True,
        capture_output=True,
    )
    summary = import_scene(BridgeConfig(manifest_path=out / "manifest.json"))
    assert summary.counts.get("building", 0) > 0
    assert summary.total_objects == sum(summary.counts.values())
    # every imported object sits inside the layout extent (128 m at 0.5 m/px)
    assert summary.bounds_min[0] >= 0.0 and summary.bounds_max[0] <= 128.0
    assert summary.bounds_min[1] >= 0.0 and summary.bounds_max[1] <= 128.0
