"""Command-line / Blender entry point.

Headless Blender:
    blender --background --python -m is not supported by Blender; instead use
    blender --background --python bridge_run.py -- --manifest scene.json
where bridge_run.py does `from citykit_bridge.cli import main; main()`.
Outside Blender, run with --host stub for a dry-run import.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .importer import BridgeConfig, import_scene


def _argv() -> list[str]:
    argv = sys.argv[1:]
    if "--" in argv:  # Blender passes script args after a double dash
        argv = argv[argv.index("--") + 1 :]
    return argv


def main() -> None:
    parser = argparse.ArgumentParser(description="Import a scene manifest into a 3-D host.")
    parser.add_argument("--manifest", required=True, type=Path)
    parser.add_argument("--asset-dir", type=Path, default=None)
    parser.add_argument("--host", choices=("stub", "blender"), default="blender")
    parser.add_argument("--strict", action="store_true", help="fail on missing asset meshes")
    parser.add_argument("--ground-plane", action="store_true")
    parser.add_argument("--summary", type=Path, default=None, help="write the scene summary JSON here")
    args = parser.parse_args(_argv())

    config = BridgeConfig(
        manifest_path=args.manifest,
        asset_dir=args.asset_dir,
        placeholder_mode=not args.strict,
        ground_plane=args.ground_plane,
        host=args.host,
    )
    summary = import_scene(config)
    text = summary.to_json()
    if args.summary:
        args.summary.write_text(text, encoding="utf-8")
    sys.stdout.write(text)


if __name__ == "__main__":
    main()
