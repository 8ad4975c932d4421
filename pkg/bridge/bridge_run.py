"""Launcher for headless Blender:

    blender --background --python bridge_run.py -- --manifest out/manifest.json \
        --asset-dir assets/ --summary out/scene_summary.json

Make citykit_bridge importable first (pip install it into Blender's Python,
or keep this file next to src/ as below).
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent / "src"))

from citykit_bridge.cli import main

main()
