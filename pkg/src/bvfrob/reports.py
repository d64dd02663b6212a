"""Deterministic report rendering.

Reports are plain dicts of JSON primitives; rationals are rendered as exact
"p/q" strings and containers are emitted with sorted keys, so the same input
always produces byte-identical output.  No timestamps, no environment data.
"""
from __future__ import annotations

import json
from fractions import Fraction


def to_jsonable(obj):
    """Recursively convert a report object to JSON primitives."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if obj != int(obj):
            raise TypeError(f"non-integral float {obj!r} in a report")
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    raise TypeError(f"cannot render {type(obj).__name__} in a report")


def render_json(report: dict) -> str:
    return json.dumps(to_jsonable(report), indent=2, sort_keys=True) + "\n"


def _md_scalar(v) -> str:
    if v is True:
        return "pass"
    if v is False:
        return "FAIL"
    if v is None:
        return "-"
    return str(v)


def _md_checks(rows: list, out: list, indent: str) -> None:
    for c in rows:
        mark = "pass" if c.get("passed") else "FAIL"
        detail = c.get("detail") or ""
        line = f"{indent}- {c.get('name', '?')}: {mark}"
        if detail and not c.get("passed", True):
            line += f" ({detail})"
        out.append(line)


def _md_value(key, value, out: list, depth: int) -> None:
    indent = "  " * depth
    if isinstance(value, dict):
        out.append(f"{indent}- {key}:")
        for k in sorted(value):
            _md_value(k, value[k], out, depth + 1)
    elif isinstance(value, list):
        if value and all(isinstance(x, dict) and "name" in x and "passed" in x
                         for x in value):
            out.append(f"{indent}- {key}:")
            _md_checks(value, out, indent + "  ")
        else:
            out.append(f"{indent}- {key}: "
                       + json.dumps(to_jsonable(value), sort_keys=True))
    else:
        out.append(f"{indent}- {key}: {_md_scalar(value)}")


def render_markdown(report: dict) -> str:
    report = to_jsonable(report)
    out: list[str] = []
    title = report.get("instance") or report.get("stage") or "report"
    out.append(f"# {title}")
    out.append("")
    if "stages" in report:
        verdict = "pass" if report.get("passed") else "FAIL"
        out.append(f"Overall: **{verdict}**"
                   + (f" (failed at {report['failed_stage']})"
                      if report.get("failed_stage") else ""))
        out.append("")
        for st in report["stages"]:
            mark = "pass" if st.get("passed") else "FAIL"
            out.append(f"## {st.get('stage', '?')} — {mark}")
            for k in sorted(st):
                if k in ("stage", "passed"):
                    continue
                _md_value(k, st[k], out, 0)
            out.append("")
    else:
        for k in sorted(report):
            _md_value(k, report[k], out, 0)
        out.append("")
    return "\n".join(out) + "\n"


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return render_json(report)
    if fmt == "markdown":
        return render_markdown(report)
    raise ValueError(f"unknown format {fmt!r}")
