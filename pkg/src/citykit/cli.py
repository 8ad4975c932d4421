"""citykit command line: every pipeline stage as a subcommand.

Stages hand off through files in the output directory (layout.png +
ratios.csv, dossiers.jsonl, plans.jsonl, retrievals.jsonl,
placements.jsonl, manifest.json) plus a machine-readable report.json with
timings and warnings. Exit codes: 0 ok, 2 usage/config, 3 ingest,
4 generation, 5 analysis, 6 planning, 7 retrieval, 8 placement, 9 export.
"""
from __future__ import annotations

import json
import os
import sys
from pathlib import Path
from typing import Dict, Optional

import click
import numpy as np

from . import assets as assets_mod
from . import instances as inst_mod
from . import osm as osm_mod
from .config import PipelineConfig, RunReport, StageTimer
from .generate import (
    ExpansionSpec,
    ProceduralBackend,
    RemoteBackend,
    RemoteGeneratorConfig,
    expand,
    expansion_seams,
    generate,
    seam_discontinuity,
)
from .layout import (
    ClassRatios,
    GenerationCondition,
    average_class_error,
    compute_ratios,
    decode_png,
    encode_png,
    read_ratio_sidecar,
    write_ratio_sidecar,
)
from .palette import CLASS_NAMES
from .placement.fit import InstanceMask, place_asset, resolve_collisions
from .planner import (
    GlobalPrompt,
    HttpChatTransport,
    LlmPlannerBackend,
    RuleBasedBackend,
    function_distribution,
    read_plans,
    run_until_converged,
    write_plans,
)
from .planner.llm import LlmConfig
from .scene import PropScatterSpec, build_manifest, write_manifest

EXIT_INGEST = 3
EXIT_GENERATE = 4
EXIT_ANALYZE = 5
EXIT_PLAN = 6
EXIT_RETRIEVE = 7
EXIT_PLACE = 8
EXIT_EXPORT = 9


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _fail_stage(out_dir: Path, stage: str, code: int, exc: Exception) -> None:
    """Record the failure in the run report, then exit with the family code."""
    try:
        RunReport(out_dir / "report.json").record(
            stage, 0.0, error=f"{type(exc).__name__}: {exc}"
        )
    except OSError:
        pass
    _fail(code, str(exc))


def _parse_ratios(text: Optional[str]) -> Optional[ClassRatios]:
    if text is None:
        return None
    values = [float(v) for v in text.split(",")]
    return ClassRatios(np.asarray(values))


def _write_layout(out_dir: Path, layout) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "layout.png").write_bytes(encode_png(layout))
    (out_dir / "ratios.csv").write_text(write_ratio_sidecar(compute_ratios(layout)), encoding="utf-8")


def _read_layout(out_dir: Path, mpp: float = 0.5):
    path = out_dir / "layout.png"
    if not path.exists():
        _fail(2, f"no layout at {path}; run a generation stage first")
    return decode_png(path.read_bytes(), mpp)


def _generator_backend(config: PipelineConfig):
    if config.generator_backend == "procedural":
        return ProceduralBackend()
    if config.generator_backend == "remote":
        if not config.generator_endpoint:
            _fail(2, "remote generator selected but no endpoint configured")
        return RemoteBackend(
            RemoteGeneratorConfig(config.generator_endpoint, config.generator_timeout_s)
        )
    _fail(2, f"unknown generator backend {config.generator_backend!r}")


def _planner_backend(config: PipelineConfig):
    if config.planner_backend == "rule":
        return RuleBasedBackend()
    if config.planner_backend == "llm":
        if not config.planner_endpoint:
            _fail(2, "llm planner selected but no endpoint configured")
        transport = HttpChatTransport(
            config.planner_endpoint, api_key=os.environ.get("CITYKIT_LLM_API_KEY")
        )
        return LlmPlannerBackend(transport, LlmConfig(model=config.planner_model))
    _fail(2, f"unknown planner backend {config.planner_backend!r}")


@click.group()
def main() -> None:
    """Semantic city layouts: generate, plan, retrieve, place, export."""


@main.command()
@click.option("--osm", "osm_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--origin", default=None, help="x,y meters of the layout's NW corner (default: auto-center)")
@click.option("--size", default=768, show_default=True)
@click.option("--mpp", default=0.5, show_default=True, help="meters per pixel")
def ingest(osm_path: Path, out_dir: Path, origin: Optional[str], size: int, mpp: float) -> None:
    """Rasterize an OSM XML extract into a semantic layout."""
    try:
        doc = osm_mod.parse_osm(osm_path.read_bytes())
        features = osm_mod.classify_document(doc)
        if origin is None:
            half = size * mpp / 2.0
            origin_xy = (-half, half)
        else:
            x, y = (float(v) for v in origin.split(","))
            origin_xy = (x, y)
        layout = osm_mod.rasterize(features, origin_xy, size, mpp)
    except Exception as exc:
        _fail_stage(out_dir, "ingest", EXIT_INGEST, exc)
    with StageTimer() as timer:
        _write_layout(out_dir, layout)
    RunReport(out_dir / "report.json").record(
        "ingest", timer.elapsed, ways=len(doc.ways), features=len(features)
    )
    click.echo(f"ingested {len(doc.ways)} ways -> {out_dir / 'layout.png'}")


@main.command("generate")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--size", default=768, show_default=True)
@click.option("--ratios", default=None, help="7 comma-separated class fractions")
@click.option("--text", default=None)
@click.option("--backend", "backend_name", default="procedural", show_default=True)
@click.option("--endpoint", default=None)
def generate_cmd(out_dir, seed, size, ratios, text, backend_name, endpoint) -> None:
    """Generate one conditioned layout tile."""
    config = PipelineConfig.build(
        {"seed": seed, "generator_backend": backend_name, "generator_endpoint": endpoint}
    )
    backend = _generator_backend(config)
    try:
        condition = GenerationCondition(seed=seed, ratios=_parse_ratios(ratios), text=text)
        with StageTimer() as timer:
            layout = generate(backend, condition, size)
    except Exception as exc:
        _fail_stage(out_dir, "generate", EXIT_GENERATE, exc)
    _write_layout(out_dir, layout)
    RunReport(out_dir / "report.json").record("generate", timer.elapsed, seed=seed, size=size)
    click.echo(f"generated {size}x{size} layout -> {out_dir / 'layout.png'}")


@main.command("expand")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--width", default=1536, show_default=True)
@click.option("--height", default=1536, show_default=True)
@click.option("--tile", default=768, show_default=True)
@click.option("--overlap", default=128, show_default=True)
@click.option("--blend-band", default=None, type=int)
@click.option("--ratios", default=None)
@click.option("--text", default=None)
@click.option("--backend", "backend_name", default="procedural", show_default=True)
@click.option("--endpoint", default=None)
def expand_cmd(out_dir, seed, width, height, tile, overlap, blend_band, ratios, text, backend_name, endpoint) -> None:
    """Expand past one tile with seam blending."""
    config = PipelineConfig.build(
        {"seed": seed, "generator_backend": backend_name, "generator_endpoint": endpoint}
    )
    backend = _generator_backend(config)
    try:
        spec = ExpansionSpec(width, height, tile, overlap, blend_band)
        condition = GenerationCondition(seed=seed, ratios=_parse_ratios(ratios), text=text)
        with StageTimer() as timer:
            layout = expand(backend, condition, spec)
    except Exception as exc:
        _fail_stage(out_dir, "expand", EXIT_GENERATE, exc)
    _write_layout(out_dir, layout)
    seam = seam_discontinuity(layout, expansion_seams(spec))
    RunReport(out_dir / "report.json").record(
        "expand", timer.elapsed, seed=seed, seam_discontinuity=round(seam, 6)
    )
    click.echo(f"expanded to {width}x{height}; seam discontinuity {seam:.4f}")


@main.command()
@click.option("--out", "out_dir", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--mpp", default=0.5, show_default=True)
def analyze(out_dir: Path, mpp: float) -> None:
    """Isolate instances and write dossiers.jsonl."""
    layout = _read_layout(out_dir, mpp)
    try:
        with StageTimer() as timer:
            instances = inst_mod.isolate_instances(layout)
            dossiers = inst_mod.build_dossiers(layout, instances)
        (out_dir / "dossiers.jsonl").write_text(inst_mod.write_dossiers(dossiers), encoding="utf-8")
    except Exception as exc:
        _fail_stage(out_dir, "analyze", EXIT_ANALYZE, exc)
    RunReport(out_dir / "report.json").record("analyze", timer.elapsed, instances=len(dossiers))
    click.echo(f"isolated {len(dossiers)} instances -> {out_dir / 'dossiers.jsonl'}")


@main.command()
@click.option("--out", "out_dir", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--prompt", default="residential district", show_default=True)
@click.option("--backend", "backend_name", default="rule", show_default=True)
@click.option("--endpoint", default=None)
@click.option("--model", default="gpt-4o", show_default=True)
@click.option("--threshold", default=0.05, show_default=True)
@click.option("--max-rounds", default=10, show_default=True)
def plan(out_dir, prompt, backend_name, endpoint, model, threshold, max_rounds) -> None:
    """Run the planning loop until convergence; write plans.jsonl."""
    config = PipelineConfig.build(
        {"planner_backend": backend_name, "planner_endpoint": endpoint, "planner_model": model}
    )
    backend = _planner_backend(config)
    dossiers_path = out_dir / "dossiers.jsonl"
    if not dossiers_path.exists():
        _fail(2, f"no dossiers at {dossiers_path}; run analyze first")
    dossiers = inst_mod.read_dossiers(dossiers_path.read_text(encoding="utf-8"))
    try:
        with StageTimer() as timer:
            result = run_until_converged(
                dossiers, GlobalPrompt(prompt), backend, threshold, max_rounds
            )
    except Exception as exc:
        _fail_stage(out_dir, "plan", EXIT_PLAN, exc)
    (out_dir / "plans.jsonl").write_text(write_plans(result.state), encoding="utf-8")
    RunReport(out_dir / "report.json").record(
        "plan",
        timer.elapsed,
        converged=result.converged,
        rounds=result.rounds_run,
        change_history=result.state.change_history,
    )
    status = "converged" if result.converged else "did not converge"
    click.echo(f"planning {status} after {result.rounds_run} round(s)")


@main.command()
@click.option("--out", "out_dir", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--weights", default=None, help="comma-separated modality weights (normalized)")
@click.option("-k", "--top-k", default=1, show_default=True)
def retrieve(out_dir, catalog_path, weights, top_k) -> None:
    """Match each building plan to catalog assets; write retrievals.jsonl."""
    plans_path = out_dir / "plans.jsonl"
    if not plans_path.exists():
        _fail(2, f"no plans at {plans_path}; run plan first")
    try:
        catalog = assets_mod.load_catalog(catalog_path)
        weight_obj = (
            assets_mod.RetrievalWeights.normalized([float(v) for v in weights.split(",")])
            if weights
            else None
        )
        state = read_plans(plans_path.read_text(encoding="utf-8"))
        relaxation_count = 0
        lines = []
        with StageTimer() as timer:
            for instance_id in sorted(state.plans):
                ranked = assets_mod.retrieve(catalog, state.plans[instance_id], weight_obj, top_k)
                relaxation_count += len(ranked.relaxed)
                lines.append(
                    json.dumps(
                        {
                            "class_id": instance_id.class_id,
                            "index": instance_id.index,
                            "items": [[a, s] for a, s in ranked.items],
                            "relaxed": list(ranked.relaxed),
                        },
                        separators=(",", ":"),
                    )
                )
    except Exception as exc:
        _fail_stage(out_dir, "retrieve", EXIT_RETRIEVE, exc)
    (out_dir / "retrievals.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
    RunReport(out_dir / "report.json").record(
        "retrieve", timer.elapsed, plans=len(lines), relaxations=relaxation_count
    )
    click.echo(f"retrieved assets for {len(lines)} plans")


@main.command()
@click.option("--out", "out_dir", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--mpp", default=0.5, show_default=True)
def place(out_dir, catalog_path, mpp) -> None:
    """Fit retrieved footprints onto instance masks; write placements.jsonl."""
    layout = _read_layout(out_dir, mpp)
    retrievals_path = out_dir / "retrievals.jsonl"
    if not retrievals_path.exists():
        _fail(2, f"no retrievals at {retrievals_path}; run retrieve first")
    try:
        catalog = {rec.asset_id: rec for rec in assets_mod.load_catalog(catalog_path)}
        top_asset: Dict[inst_mod.InstanceId, str] = {}
        for line in retrievals_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            top_asset[inst_mod.InstanceId(rec["class_id"], rec["index"])] = rec["items"][0][0]
        instances = inst_mod.isolate_instances(layout)
        masks = {
            inst.id: InstanceMask.from_instance(inst)
            for inst in instances
            if inst.id in top_asset
        }
        placements = []
        with StageTimer() as timer:
            for instance_id in sorted(masks):
                asset = catalog[top_asset[instance_id]]
                placements.append(
                    place_asset(
                        masks[instance_id], asset.asset_id, asset.footprint_dims_m, instance_id, mpp
                    )
                )
            footprints = {aid: rec.footprint_dims_m for aid, rec in catalog.items()}
            placements, collisions = resolve_collisions(placements, masks, footprints, mpp)
    except Exception as exc:
        _fail_stage(out_dir, "place", EXIT_PLACE, exc)
    lines = [
        json.dumps(
            {
                "class_id": p.instance.class_id,
                "index": p.instance.index,
                "asset_id": p.asset_id,
                "scale": p.params.scale,
                "rotation": p.params.rotation,
                "tx": p.params.tx,
                "ty": p.params.ty,
                "iou": p.iou,
                "converged": p.converged,
            },
            separators=(",", ":"),
        )
        for p in placements
    ]
    (out_dir / "placements.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
    non_converged = sum(1 for p in placements if not p.converged)
    RunReport(out_dir / "report.json").record(
        "place",
        timer.elapsed,
        placements=len(placements),
        non_converged=non_converged,
        collision_shrinks=[
            {
                "instance": list(e.instance),
                "against": list(e.against) if e.against else None,
                "final_scale": e.final_scale,
                "resolved": e.resolved,
            }
            for e in collisions
        ],
    )
    click.echo(f"placed {len(placements)} assets ({non_converged} below IoU threshold)")


@main.command()
@click.option("--out", "out_dir", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--tree-density", default=1.0, show_default=True)
@click.option("--lamp-spacing", default=25.0, show_default=True)
@click.option("--mpp", default=0.5, show_default=True)
def export(out_dir, catalog_path, seed, tree_density, lamp_spacing, mpp) -> None:
    """Assemble the scene manifest."""
    layout = _read_layout(out_dir, mpp)
    try:
        catalog = assets_mod.load_catalog(catalog_path)
        dossiers = inst_mod.read_dossiers((out_dir / "dossiers.jsonl").read_text(encoding="utf-8"))
        state = read_plans((out_dir / "plans.jsonl").read_text(encoding="utf-8"))
        placements = _read_placements(out_dir)
        with StageTimer() as timer:
            manifest = build_manifest(
                layout,
                dossiers,
                state.plans,
                placements,
                [rec.asset_id for rec in catalog],
                PropScatterSpec(seed=seed, tree_density=tree_density, lamp_spacing=lamp_spacing),
                layout_ref="layout.png",
            )
        (out_dir / "manifest.json").write_bytes(write_manifest(manifest))
    except Exception as exc:
        _fail_stage(out_dir, "export", EXIT_EXPORT, exc)
    RunReport(out_dir / "report.json").record(
        "export",
        timer.elapsed,
        buildings=len(manifest.buildings),
        surfaces=len(manifest.surfaces),
        props=len(manifest.props),
    )
    click.echo(
        f"manifest: {len(manifest.buildings)} buildings, {len(manifest.surfaces)} surfaces, "
        f"{len(manifest.props)} props -> {out_dir / 'manifest.json'}"
    )


def _read_placements(out_dir: Path):
    from .placement.fit import Placement, PlacementParams

    placements = []
    for line in (out_dir / "placements.jsonl").read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        placements.append(
            Placement(
                instance=inst_mod.InstanceId(rec["class_id"], rec["index"]),
                asset_id=rec["asset_id"],
                params=PlacementParams(rec["scale"], rec["rotation"], rec["tx"], rec["ty"]),
                iou=rec["iou"],
                converged=rec["converged"],
            )
        )
    return placements


@main.command()
@click.option("--targets-dir", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--generated-dir", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--plans", "plans_path", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
def metrics(targets_dir, generated_dir, plans_path, out_path) -> None:
    """Average class error over ratio-sidecar pairs and/or plan distributions."""
    result: Dict[str, object] = {}
    if targets_dir and generated_dir:
        names = sorted(p.name for p in targets_dir.glob("*.csv"))
        if not names:
            _fail(2, f"no ratio sidecars in {targets_dir}")
        targets, generated = [], []
        for name in names:
            gen_path = generated_dir / name
            if not gen_path.exists():
                _fail(2, f"missing generated sidecar {gen_path}")
            targets.append(read_ratio_sidecar((targets_dir / name).read_text(encoding="utf-8")))
            generated.append(read_ratio_sidecar(gen_path.read_text(encoding="utf-8")))
        ace = average_class_error(targets, generated)
        result["ace_percent"] = {CLASS_NAMES[i]: float(ace[i]) for i in range(len(CLASS_NAMES))}
        click.echo("ACE (%): " + ", ".join(f"{CLASS_NAMES[i]} {ace[i]:.2f}" for i in range(7)))
    if plans_path:
        state = read_plans(Path(plans_path).read_text(encoding="utf-8"))
        dist = function_distribution(state)
        result["function_distribution"] = dist
        click.echo(
            "functions: " + ", ".join(f"{fn} {frac * 100:.1f}%" for fn, frac in dist.items())
        )
    if not result:
        _fail(2, "nothing to compute: pass --targets-dir/--generated-dir and/or --plans")
    if out_path:
        Path(out_path).write_text(json.dumps(result, indent=2) + "\n", encoding="utf-8")


@main.command("run-all")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=None)
@click.option("--seed", type=int, default=None)
@click.option("--catalog", "catalog_path", type=click.Path(path_type=Path), default=None)
@click.option("--prompt", default=None)
@click.option("--size", "layout_size", type=int, default=None)
@click.option("--generator-backend", default=None)
@click.option("--generator-endpoint", default=None)
@click.option("--planner-backend", default=None)
@click.option("--planner-endpoint", default=None)
@click.option("--tree-density", type=float, default=None)
@click.option("--lamp-spacing", type=float, default=None)
@click.option("--config", "config_file", type=click.Path(exists=True, path_type=Path), default=None)
@click.pass_context
def run_all(ctx, out_dir, seed, catalog_path, prompt, layout_size, generator_backend,
            generator_endpoint, planner_backend, planner_endpoint, tree_density,
            lamp_spacing, config_file) -> None:
    """Full pipeline: generate, analyze, plan, retrieve, place, export."""
    try:
        config = PipelineConfig.build(
            {
                "out_dir": str(out_dir) if out_dir else None,
                "seed": seed,
                "catalog_path": str(catalog_path) if catalog_path else None,
                "prompt": prompt,
                "layout_size": layout_size,
                "generator_backend": generator_backend,
                "generator_endpoint": generator_endpoint,
                "planner_backend": planner_backend,
                "planner_endpoint": planner_endpoint,
                "tree_density": tree_density,
                "lamp_spacing": lamp_spacing,
            },
            config_file,
        )
    except ValueError as exc:
        _fail(2, str(exc))
    if not config.catalog_path:
        _fail(2, "run-all needs a catalog (--catalog or config catalog_path)")
    out = Path(config.out_dir)
    ctx.invoke(
        generate_cmd,
        out_dir=out,
        seed=config.stage_seed("generate"),
        size=config.layout_size,
        ratios=",".join(str(v) for v in config.ratios) if config.ratios else None,
        text=config.text,
        backend_name=config.generator_backend,
        endpoint=config.generator_endpoint,
    )
    ctx.invoke(analyze, out_dir=out, mpp=0.5)
    ctx.invoke(
        plan,
        out_dir=out,
        prompt=config.prompt,
        backend_name=config.planner_backend,
        endpoint=config.planner_endpoint,
        model=config.planner_model,
        threshold=config.convergence_threshold,
        max_rounds=config.max_rounds,
    )
    ctx.invoke(
        retrieve,
        out_dir=out,
        catalog_path=Path(config.catalog_path),
        weights=",".join(str(v) for v in config.retrieval_weights) if config.retrieval_weights else None,
        top_k=config.top_k,
    )
    ctx.invoke(place, out_dir=out, catalog_path=Path(config.catalog_path), mpp=0.5)
    ctx.invoke(
        export,
        out_dir=out,
        catalog_path=Path(config.catalog_path),
        seed=config.stage_seed("export"),
        tree_density=config.tree_density,
        lamp_spacing=config.lamp_spacing,
        mpp=0.5,
    )
    click.echo("pipeline complete")


if __name__ == "__main__":
    main()
