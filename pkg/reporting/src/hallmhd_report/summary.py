"""Markdown run summaries: config echo, verification table, figures."""

from __future__ import annotations

import json
from pathlib import Path

from .bundle import SeriesBundle


def _config_block(bundle: SeriesBundle) -> list[str]:
    lines = [f"## Run `{bundle.label}`", ""]
    if bundle.summary:
        lines += [
            f"- status: **{bundle.summary.get('status', 'unknown')}**",
            f"- rows: {bundle.summary.get('rows', len(bundle))}",
            f"- final time: {bundle.summary.get('final_time', bundle.times[-1])}",
            "",
            "```json",
            json.dumps(bundle.summary.get("config", {}), indent=2, sort_keys=True),
            "```",
        ]
    else:
        lines += [f"- rows: {len(bundle)} (no summary file)"]
    lines.append("")
    return lines


def _verification_table(verify_dir) -> list[str]:
    """Pass/fail table from verify_<suite>_summary.json files."""
    verify_dir = Path(verify_dir)
    entries = sorted(verify_dir.glob("verify_*_summary.json"))
    if not entries:
        return []
    lines = ["## Verification suites", "", "| suite | result | details |", "|---|---|---|"]
    for path in entries:
        data = json.loads(path.read_text())
        name = data.get("suite", path.stem)
        ok = data.get("ok", False)
        details = ", ".join(
            f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}"
            for k, v in sorted(data.get("summary", {}).items())
        )
        lines.append(f"| {name} | {'PASS' if ok else 'FAIL'} | {details} |")
    lines.append("")
    return lines


def render_summary(
    bundles: list[SeriesBundle],
    out_path,
    figures: list[str] | None = None,
    verify_dir=None,
    title: str = "Simulation report",
) -> str:
    """Write a Markdown report; missing figures get a placeholder note."""
    lines = [f"# {title}", ""]
    for bundle in bundles:
        lines += _config_block(bundle)
    if verify_dir is not None:
        lines += _verification_table(verify_dir)
    if figures:
        lines += ["## Figures", ""]
        for fig in figures:
            fig_path = Path(fig)
            if fig_path.exists():
                lines.append(f"![{fig_path.stem}]({fig_path.name})")
            else:
                lines.append(f"*(figure missing: {fig_path.name})*")
        lines.append("")
    text = "\n".join(lines)
    Path(out_path).write_text(text)
    return text
