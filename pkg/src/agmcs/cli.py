"""Command-line front end for the inequality toolkit.

Subcommands:

* ``check``     — evaluate one checker on a stored or random instance
* ``sweep``     — batch random instances, stream reports plus a summary
* ``pipeline``  — run the constructive eigenvalue-bound reduction
* ``hunt``      — randomized counterexample search / robustness stress
* ``gen``       — write schema-valid random instance files

Every output artifact embeds the tool version, the full effective
configuration, and the seed, so results can be reproduced byte for
byte.  Seeds come only from explicit flags; environment variables are
deliberately ignored.  Nothing in any output depends on wall-clock
time or host state.

Exit codes (stable across subcommands): 0 = expectation met,
2 = inequality violation against expectation, 1 = operational error
(bad input, parse failure, domain error).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import math
import sys
from dataclasses import dataclass

from . import __version__
from .checks import (
    check_agm_singular,
    check_false_variant,
    check_majorization_chain,
    check_singular_form,
    check_sv_product_majorization,
    check_theorem1,
    check_theorem2,
    check_weyl_majorant,
)
from .config import DEFAULT_TOLS
from .gauge import SCHATTEN_GRID, GaugeSpec, holder_gauge_check
from .hunt import TARGETS, HuntConfig, Violation, hunt_counterexample, stress_sweep
from .linalg import LinalgError, random_psd, singular_values
from .pipeline import (
    PipelineStepError,
    TriviallyTrue,
    run_pipeline,
)
from .report import CheckReport
from . import sampling, serialize

_CHECK_TARGETS = TARGETS + (
    "weyl-majorant",
    "sv-product",
    "majorization-chain",
    "holder-gauge",
)

#: Matrix wrapper used when loading instance files, per target.
_PSD_INPUT_TARGETS = frozenset({"theorem2", "false-variant", "weyl-majorant"})

_FORMATS = ("json", "jsonl", "csv", "pretty")


@dataclass(frozen=True)
class RunConfig:
    """Full effective configuration of one invocation.

    Everything needed to reproduce the run is here (and is embedded in
    every output artifact); fields not applicable to the subcommand
    keep their defaults."""

    subcommand: str
    target: str | None = None
    instances: tuple[str, ...] = ()
    out: str | None = None
    fmt: str = "pretty"
    seed: int = 0
    random: bool = False
    n: int = 4
    rank: int | None = None
    field: str = "real"
    q: tuple[float, ...] | None = None
    k: int | str | None = None
    r: float = 1.0
    p: float = 2.0
    phi: str | None = None
    norms: tuple[str, ...] | None = None
    count: int | None = None
    dims: tuple[int, ...] | None = None
    budget: int | None = None
    restarts: int | None = None
    steps: int | None = None
    threshold: float = DEFAULT_TOLS.violation
    tol: float = DEFAULT_TOLS.check
    expect: str | None = None
    stress: bool = False

    def to_json_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for key, value in out.items():
            if isinstance(value, tuple):
                out[key] = list(value)
        return out


def _meta(cfg: RunConfig) -> dict:
    return {
        "tool": "agmcs",
        "version": __version__,
        "command": cfg.subcommand,
        "seed": cfg.seed,
        "config": cfg.to_json_dict(),
    }


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    """argparse that honors the exit-code contract (errors are 1, not 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _parse_floats(text: str) -> tuple[float, ...]:
    vals = tuple(float(tok) for tok in text.split(",") if tok.strip())
    if not vals:
        raise ValueError("empty list")
    return vals


def _parse_ints(text: str) -> tuple[int, ...]:
    vals = tuple(int(tok) for tok in text.split(",") if tok.strip())
    if not vals:
        raise ValueError("empty list")
    return vals


def _k_policy(text: str):
    return "all" if text == "all" else int(text)


def _norm_tokens(text: str) -> tuple[str, ...]:
    toks = tuple(tok.strip() for tok in text.split(",") if tok.strip())
    if not toks:
        raise ValueError("empty norm list")
    for tok in toks:
        if tok not in ("kyfan:*", "schatten:*"):
            GaugeSpec.parse(tok)  # raises ValueError on malformed specs
    return toks


def _expand_norms(tokens, n: int) -> tuple[GaugeSpec, ...]:
    specs: list[GaugeSpec] = []
    for tok in tokens:
        if tok == "kyfan:*":
            specs.extend(GaugeSpec.ky_fan(k) for k in range(1, n + 1))
        elif tok == "schatten:*":
            specs.extend(GaugeSpec.schatten(p) for p in SCHATTEN_GRID)
        else:
            specs.append(GaugeSpec.parse(tok))
    return tuple(specs)


def _add_common(sub, fmt_default: str):
    sub.add_argument("--seed", type=int, default=0, help="master seed (always recorded)")
    sub.add_argument("-o", "--out", help="write the primary artifact to this path")
    sub.add_argument(
        "--format",
        dest="fmt",
        choices=_FORMATS,
        default=fmt_default,
        help=f"output format (default {fmt_default})",
    )


def _add_expect(sub):
    group = sub.add_mutually_exclusive_group()
    group.add_argument(
        "--expect-violation",
        dest="expect",
        action="store_const",
        const="violation",
        help="exit 0 only if a violation is found",
    )
    group.add_argument(
        "--expect-none",
        dest="expect",
        action="store_const",
        const="none",
        help="exit 0 only if no violation is found",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="agmcs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"agmcs {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    chk = subs.add_parser("check", help="evaluate one checker on one or more instances")
    chk.add_argument("target", choices=_CHECK_TARGETS)
    chk.add_argument(
        "--instance",
        dest="instances",
        action="append",
        default=None,
        metavar="PATH",
        help="instance file (repeatable); accepts plain instances and violation fixtures",
    )
    chk.add_argument("--random", action="store_true", help="draw a random PSD pair instead")
    chk.add_argument("-n", type=int, default=4, help="dimension for --random")
    chk.add_argument("--rank", type=int, default=None, help="rank for --random (default full)")
    chk.add_argument("--field", choices=("real", "complex"), default="real")
    chk.add_argument("--q", type=_parse_floats, default=None, metavar="Q", help="mixing weight")
    chk.add_argument("--k", type=int, default=None, help="index (default: worst k)")
    chk.add_argument("--r", type=float, default=1.0, help="majorization exponent")
    chk.add_argument("--p", type=float, default=2.0, help="Hoelder split exponent")
    chk.add_argument("--phi", default=None, help="gauge, e.g. schatten:2 or kyfan:3")
    chk.add_argument("--tol", type=float, default=DEFAULT_TOLS.check)
    _add_expect(chk)
    _add_common(chk, "pretty")
    chk.set_defaults(func=cmd_check)

    swp = subs.add_parser("sweep", help="batch-check random instances")
    swp.add_argument("--target", choices=TARGETS, default="theorem2")
    swp.add_argument("--count", type=int, default=1000, help="number of instances")
    swp.add_argument("--dims", type=_parse_ints, default=None, help="dims, e.g. 1,2,3,4")
    swp.add_argument("--field", choices=("real", "complex", "both"), default="both")
    swp.add_argument(
        "--q", type=_parse_floats, default=None, help="q pool (default: fixed grid + 10 random)"
    )
    swp.add_argument(
        "--norms",
        type=_norm_tokens,
        default=None,
        help="norm selection for theorem1, e.g. kyfan:*,schatten:2",
    )
    swp.add_argument("--tol", type=float, default=DEFAULT_TOLS.check)
    _add_expect(swp)
    _add_common(swp, "jsonl")
    swp.set_defaults(func=cmd_sweep)

    pip = subs.add_parser("pipeline", help="run the constructive proof reduction")
    pip.add_argument("--instance", dest="instances", action="append", default=None, metavar="PATH")
    pip.add_argument("--random", action="store_true")
    pip.add_argument("-n", type=int, default=4)
    pip.add_argument("--rank", type=int, default=None)
    pip.add_argument("--field", choices=("real", "complex"), default="real")
    pip.add_argument("--q", type=_parse_floats, default=None, help="mixing weight in (0, 1)")
    pip.add_argument("--k", type=int, default=1, help="eigenvalue index")
    _add_common(pip, "pretty")
    pip.set_defaults(func=cmd_pipeline)

    hnt = subs.add_parser("hunt", help="randomized counterexample search")
    hnt.add_argument("target", choices=TARGETS)
    hnt.add_argument("--budget", type=int, default=None, help="max checker evaluations")
    hnt.add_argument("--restarts", type=int, default=None)
    hnt.add_argument("--steps", type=int, default=None, help="hill-climb steps per restart")
    hnt.add_argument("--dims", type=_parse_ints, default=None)
    hnt.add_argument("--field", choices=("real", "complex", "both"), default="both")
    hnt.add_argument("--q", type=_parse_floats, default=None, help="q line-search grid")
    hnt.add_argument("--k", type=_k_policy, default="all", help="'all' or a fixed k")
    hnt.add_argument("--threshold", type=float, default=DEFAULT_TOLS.violation)
    hnt.add_argument(
        "--stress", action="store_true", help="pure random sampling instead of hill climbing"
    )
    _add_expect(hnt)
    _add_common(hnt, "pretty")
    hnt.set_defaults(func=cmd_hunt)

    gen = subs.add_parser("gen", help="generate schema-valid instance files")
    gen.add_argument("-n", type=int, default=3)
    gen.add_argument("--rank", type=int, default=None, help="rank of both draws (default full)")
    gen.add_argument("--field", choices=("real", "complex"), default="real")
    gen.add_argument("--count", type=int, default=1)
    _add_common(gen, "json")
    gen.set_defaults(func=cmd_gen)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    kwargs = {}
    for fld in dataclasses.fields(RunConfig):
        if hasattr(args, fld.name):
            value = getattr(args, fld.name)
            if value is None:
                continue
            if isinstance(value, list):
                value = tuple(value)
            kwargs[fld.name] = value
    return RunConfig(**kwargs)


# ---------------------------------------------------------------------------
# instance plumbing


def _load_instance(path: str, kind: str, target: str) -> dict:
    try:
        raw = serialize.load_json(path)
    except OSError as exc:
        raise ValueError(f"{path}: {exc}") from exc
    except ValueError as exc:
        raise ValueError(f"{path}: invalid JSON: {exc}") from exc
    if raw.get("kind") != "violation" and isinstance(raw.get("result"), dict):
        # hunt artifacts wrap the violation record in {"meta", "result"}
        if raw["result"].get("kind") == "violation":
            raw = raw["result"]
    if raw.get("kind") == "violation":
        fixture = Violation.from_json_dict(raw)
        if fixture.target != target:
            raise ValueError(
                f"{path}: fixture targets {fixture.target!r}, command checks {target!r}"
            )
        return {
            "path": path,
            "a": fixture.a,
            "b": fixture.b,
            "q": fixture.q,
            "k": fixture.k,
            "phi": fixture.phi,
        }
    for key in ("a", "b"):
        if key not in raw:
            raise ValueError(f"{path}: instance is missing matrix {key!r}")
    try:
        a = serialize.matrix_from_dict(raw["a"], kind)
        b = serialize.matrix_from_dict(raw["b"], kind)
    except LinalgError as exc:
        raise ValueError(f"{path}: {exc}") from exc
    return {
        "path": path,
        "a": a,
        "b": b,
        "q": raw.get("q"),
        "k": raw.get("k"),
        "phi": raw.get("phi"),
    }


def _random_pair(cfg: RunConfig, index: int = 0):
    rank = cfg.rank if cfg.rank is not None else cfg.n
    a = random_psd(cfg.n, rank, sampling.substream(cfg.seed, 9, 2 * index), cfg.field)
    b = random_psd(cfg.n, rank, sampling.substream(cfg.seed, 9, 2 * index + 1), cfg.field)
    return a, b


def _gather_instances(cfg: RunConfig, target: str) -> list[dict]:
    kind = "psd" if target in _PSD_INPUT_TARGETS else "any"
    if cfg.instances:
        return [_load_instance(path, kind, target) for path in cfg.instances]
    if cfg.random:
        a, b = _random_pair(cfg)
        return [{"path": None, "a": a, "b": b, "q": None, "k": None, "phi": None}]
    raise ValueError("provide --instance file(s) or --random")


def _single_q(cfg: RunConfig, inst: dict, default: float = 0.5) -> float:
    if cfg.q is not None:
        if len(cfg.q) != 1:
            raise ValueError(f"this command takes a single q, got {list(cfg.q)}")
        return float(cfg.q[0])
    if inst.get("q") is not None:
        return float(inst["q"])
    return default


# ---------------------------------------------------------------------------
# rendering


def _record_from(report: CheckReport, index: int, extra: dict | None = None) -> dict:
    rec = {
        "index": index,
        "name": report.name,
        "holds": report.holds,
        "lhs": report.lhs,
        "rhs": report.rhs,
        "margin": report.margin,
        "rel_margin": report.rel_margin,
        "tol": report.tol,
        "instance": dict(report.instance),
    }
    if extra:
        rec.update(extra)
    return rec


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return f"{v:g}"
    return str(v)


def _render_reports(meta: dict, records: list[dict], summary: dict, fmt: str) -> str:
    if fmt == "json":
        return serialize.dumps_canonical(
            {"meta": meta, "records": records, "summary": summary}
        )
    if fmt == "jsonl":
        lines = [serialize.dumps_line({"kind": "meta", **meta})]
        lines.extend(serialize.dumps_line(rec) for rec in records)
        lines.append(serialize.dumps_line(summary))
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        inst_keys = sorted({key for rec in records for key in rec.get("instance", {})})
        base = ["index", "name", "holds", "lhs", "rhs", "margin", "rel_margin", "tol"]
        buf = io.StringIO()
        buf.write("# " + serialize.dumps_line({"kind": "meta", **meta}) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(base + inst_keys)
        for rec in records:
            row = [
                rec["index"],
                rec["name"],
                rec["holds"],
                repr(rec["lhs"]),
                repr(rec["rhs"]),
                repr(rec["margin"]),
                repr(rec["rel_margin"]),
                repr(rec["tol"]),
            ]
            inst = rec.get("instance", {})
            row.extend("" if key not in inst else _fmt_value(inst[key]) for key in inst_keys)
            writer.writerow(row)
        buf.write("# " + serialize.dumps_line(summary) + "\n")
        return buf.getvalue()
    # pretty
    lines = [
        f"agmcs {meta['version']} | {meta['command']} | seed {meta['seed']}",
        f"config {serialize.dumps_line(meta['config'])}",
    ]
    for rec in records:
        status = "PASS" if rec["holds"] else "FAIL"
        inst = " ".join(
            f"{key}={_fmt_value(val)}" for key, val in sorted(rec.get("instance", {}).items())
        )
        lines.append(
            f"[{status}] {rec['name']}  margin={rec['margin']:+.6e}"
            f"  rel={rec['rel_margin']:+.3e}  {inst}".rstrip()
        )
    lines.append(
        "summary: reports={reports} violations={violations}"
        " min_margin={min_margin} min_rel_margin={min_rel_margin}".format(
            reports=summary["reports"],
            violations=summary["violations"],
            min_margin=_fmt_value(summary["min_margin"]),
            min_rel_margin=_fmt_value(summary["min_rel_margin"]),
        )
    )
    return "\n".join(lines) + "\n"


def _summarize(records: list[dict]) -> dict:
    violations = sum(1 for rec in records if not rec["holds"])
    summary: dict = {
        "kind": "summary",
        "reports": len(records),
        "violations": violations,
    }
    if records:
        worst = min(records, key=lambda rec: rec["rel_margin"])
        summary["min_margin"] = min(rec["margin"] for rec in records)
        summary["min_rel_margin"] = worst["rel_margin"]
        summary["argmin"] = {
            "index": worst["index"],
            "name": worst["name"],
            "instance": worst.get("instance", {}),
        }
    else:
        summary["min_margin"] = math.inf
        summary["min_rel_margin"] = math.inf
        summary["argmin"] = {}
    return summary


def _deliver(cfg: RunConfig, text: str, record_count: int) -> None:
    """Send rendered output to -o (with a short stdout confirmation) or stdout."""
    if cfg.out:
        serialize.write_text(cfg.out, text)
        print(f"wrote {cfg.out} ({record_count} records)")
    else:
        sys.stdout.write(text)


def _expectation_exit(violation_found: bool, expect: str) -> int:
    wanted = expect == "violation"
    return 0 if violation_found == wanted else 2


# ---------------------------------------------------------------------------
# subcommands


def _run_single_check(cfg: RunConfig, inst: dict) -> list[CheckReport]:
    target = cfg.target
    a, b = inst["a"], inst["b"]
    k = cfg.k if cfg.k is not None else inst.get("k")
    if target == "theorem2":
        return [check_theorem2(a, b, _single_q(cfg, inst), k, cfg.tol)]
    if target == "false-variant":
        return [check_false_variant(a, b, _single_q(cfg, inst), k, cfg.tol)]
    if target == "singular-form":
        return [check_singular_form(a, b, _single_q(cfg, inst), k, cfg.tol)]
    if target == "agm-singular":
        return [check_agm_singular(a, b, k, cfg.tol)]
    if target == "theorem1":
        phi_text = cfg.phi if cfg.phi is not None else inst.get("phi")
        phi = None if phi_text is None else GaugeSpec.parse(phi_text)
        return [check_theorem1(a, b, _single_q(cfg, inst), phi, cfg.tol)]
    if target == "weyl-majorant":
        return [check_weyl_majorant(a, b, cfg.r, cfg.tol)]
    if target == "sv-product":
        return [check_sv_product_majorization(a, b, cfg.r, cfg.tol)]
    if target == "majorization-chain":
        return check_majorization_chain(a, b, _single_q(cfg, inst), cfg.r, cfg.tol)
    if target == "holder-gauge":
        phi = GaugeSpec.parse(cfg.phi if cfg.phi is not None else "schatten:1")
        return [
            holder_gauge_check(
                phi, singular_values(a).values, singular_values(b).values, cfg.p, cfg.tol
            )
        ]
    raise ValueError(f"unknown check target {target!r}")


def cmd_check(cfg: RunConfig) -> int:
    records: list[dict] = []
    for index, inst in enumerate(_gather_instances(cfg, cfg.target)):
        extra = {"path": inst["path"]} if inst["path"] else None
        for report in _run_single_check(cfg, inst):
            records.append(_record_from(report, index, extra))
    summary = _summarize(records)
    _deliver(cfg, _render_reports(_meta(cfg), records, summary, cfg.fmt), len(records))
    return _expectation_exit(summary["violations"] > 0, cfg.expect or "none")


def cmd_sweep(cfg: RunConfig) -> int:
    target = cfg.target or "theorem2"
    count = cfg.count if cfg.count is not None else 1000
    dims = cfg.dims if cfg.dims is not None else (1, 2, 3, 4, 5, 6, 7, 8)
    fields = ("real", "complex") if cfg.field == "both" else (cfg.field,)
    records: list[dict] = []
    for inst in sampling.sweep_instances(cfg.seed, count, dims=dims, fields=fields, qs=cfg.q):
        if target == "theorem2":
            reports = [check_theorem2(inst.a, inst.b, inst.q, inst.k, cfg.tol)]
        elif target == "false-variant":
            reports = [check_false_variant(inst.a, inst.b, inst.q, inst.k, cfg.tol)]
        elif target == "singular-form":
            reports = [check_singular_form(inst.a, inst.b, inst.q, inst.k, cfg.tol)]
        elif target == "agm-singular":
            reports = [check_agm_singular(inst.a, inst.b, inst.k, cfg.tol)]
        else:  # theorem1
            if cfg.norms is None:
                reports = [check_theorem1(inst.a, inst.b, inst.q, None, cfg.tol)]
            else:
                reports = [
                    check_theorem1(inst.a, inst.b, inst.q, phi, cfg.tol)
                    for phi in _expand_norms(cfg.norms, inst.n)
                ]
        for report in reports:
            records.append(_record_from(report, inst.index))
    summary = _summarize(records)
    summary["target"] = target
    summary["count"] = count
    _deliver(cfg, _render_reports(_meta(cfg), records, summary, cfg.fmt), len(records))
    return _expectation_exit(summary["violations"] > 0, cfg.expect or "none")


def _render_pipeline(meta: dict, payload: dict, fmt: str) -> str:
    if fmt == "json":
        return serialize.dumps_canonical({"meta": meta, **payload})
    if fmt == "jsonl":
        lines = [serialize.dumps_line({"kind": "meta", **meta})]
        trace = payload.get("trace")
        if trace is not None:
            for step in trace["steps"]:
                lines.append(serialize.dumps_line({"kind": "step", **step}))
            tail = {key: val for key, val in trace.items() if key not in ("steps", "matrices")}
            lines.append(serialize.dumps_line({"kind": "final", **tail}))
        else:
            lines.append(serialize.dumps_line(payload))
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        buf.write("# " + serialize.dumps_line({"kind": "meta", **meta}) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["step", "residual", "value", "pass"])
        trace = payload.get("trace")
        if trace is not None:
            for step in trace["steps"]:
                for rname, value in sorted(step["residuals"].items()):
                    writer.writerow([step["name"], rname, repr(value), step["pass"]])
        return buf.getvalue()
    # pretty
    lines = [
        f"agmcs {meta['version']} | pipeline | seed {meta['seed']}",
        f"config {serialize.dumps_line(meta['config'])}",
    ]
    trace = payload.get("trace")
    if trace is None:
        lines.append(serialize.dumps_line(payload))
    else:
        inp = trace["input"]
        lines.append(
            f"instance n={inp['n']} field={inp['field']} q={inp['q']:g}"
            f" k={inp['k']} scale={inp['scale']:.6e}"
        )
        for step in trace["steps"]:
            residuals = " ".join(
                f"{name}={value:.3e}" for name, value in sorted(step["residuals"].items())
            )
            flag = "ok" if step["pass"] else "FAIL"
            lines.append(f"step {step['name']:<15} {residuals} [{flag}]")
        chain = trace["chain"]
        lines.append(
            f"chain c={chain['c']:.9e} c_prime={chain['c_prime']:.9e}"
            f" c_dprime={chain['c_dprime']:.9e}"
        )
        lines.append(
            f"final_bound={trace['final_bound']:.12e}"
            f" degenerate={trace['degenerate']} cond_a11={trace['cond_a11']:.3e}"
        )
    return "\n".join(lines) + "\n"


def cmd_pipeline(cfg: RunConfig) -> int:
    if cfg.instances:
        inst = _load_instance(cfg.instances[0], "psd", "pipeline")
        if len(cfg.instances) > 1:
            raise ValueError("pipeline takes a single --instance")
    elif cfg.random:
        a, b = _random_pair(cfg)
        inst = {"path": None, "a": a, "b": b, "q": None, "k": None}
    else:
        raise ValueError("provide --instance or --random")
    q = _single_q(cfg, inst)
    k = int(cfg.k) if cfg.k is not None else int(inst.get("k") or 1)
    meta = _meta(cfg)
    try:
        trace = run_pipeline(inst["a"], inst["b"], q, k)
    except TriviallyTrue as exc:
        payload = {"trivially_true": True, "reason": str(exc), "q": q, "k": k}
        _deliver(cfg, _render_pipeline(meta, payload, cfg.fmt), 0)
        if cfg.out:
            serialize.write_text(cfg.out, serialize.dumps_canonical({"meta": meta, **payload}))
        return 0
    except PipelineStepError as exc:
        payload = {
            "step_failure": {
                "step": exc.step,
                "residual": exc.residual,
                "value": exc.value,
                "gate": exc.gate,
            },
            "q": q,
            "k": k,
        }
        sys.stderr.write(f"pipeline gate failed: {exc}\n")
        _deliver(cfg, _render_pipeline(meta, payload, cfg.fmt), 0)
        return 2
    payload = {"trace": trace.to_json_dict(include_matrices=True)}
    if cfg.out:
        serialize.write_text(cfg.out, serialize.dumps_canonical({"meta": meta, **payload}))
        # the step table still goes to stdout alongside the trace file
        sys.stdout.write(_render_pipeline(meta, payload, "pretty" if cfg.fmt == "json" else cfg.fmt))
        print(f"wrote {cfg.out}")
    else:
        sys.stdout.write(_render_pipeline(meta, payload, cfg.fmt))
    return 0 if trace.all_gates_pass else 2


def _hunt_config(cfg: RunConfig) -> HuntConfig:
    kwargs: dict = {
        "target": cfg.target,
        "seed": cfg.seed,
        "k_policy": cfg.k if cfg.k is not None else "all",
        "violation_threshold": cfg.threshold,
    }
    if cfg.dims is not None:
        kwargs["dims"] = cfg.dims
    if cfg.field:
        kwargs["field"] = cfg.field
    if cfg.q is not None:
        kwargs["q_grid"] = cfg.q
    defaults = HuntConfig()
    restarts = cfg.restarts
    steps = cfg.steps
    if cfg.budget is not None and (restarts is None or steps is None):
        # largest schedule with restarts * (steps + 1) <= budget
        if steps is not None:
            restarts = max(1, cfg.budget // (steps + 1))
        elif restarts is not None:
            steps = max(1, cfg.budget // restarts - 1)
        elif cfg.budget > defaults.steps_per_restart:
            restarts = max(1, cfg.budget // (defaults.steps_per_restart + 1))
            steps = defaults.steps_per_restart
        else:
            restarts = 1
            steps = max(1, cfg.budget - 1)
    kwargs["restarts"] = restarts if restarts is not None else defaults.restarts
    kwargs["steps_per_restart"] = steps if steps is not None else defaults.steps_per_restart
    return HuntConfig(**kwargs)


def cmd_hunt(cfg: RunConfig) -> int:
    hunt_cfg = _hunt_config(cfg)
    meta = _meta(cfg)
    meta["hunt_config"] = hunt_cfg.to_json_dict()
    if cfg.stress:
        result = stress_sweep(hunt_cfg)
        found = result["min_margin"] < -hunt_cfg.violation_threshold
        payload = {"result": result}
    else:
        outcome = hunt_counterexample(hunt_cfg)
        found = isinstance(outcome, Violation)
        payload = {"result": outcome.to_json_dict()}
        if found:
            payload["reverify"] = outcome.reverify(cfg.tol).to_json_dict()
    text = serialize.dumps_canonical({"meta": meta, **payload})
    if cfg.fmt == "jsonl":
        text = (
            serialize.dumps_line({"kind": "meta", **meta})
            + "\n"
            + serialize.dumps_line(payload)
            + "\n"
        )
    elif cfg.fmt == "pretty":
        lines = [
            f"agmcs {meta['version']} | hunt {hunt_cfg.target} | seed {meta['seed']}",
            f"hunt_config {serialize.dumps_line(meta['hunt_config'])}",
        ]
        result = payload["result"]
        if cfg.stress:
            lines.append(
                f"stress samples={result['samples']} min_margin={result['min_margin']:+.6e}"
            )
            lines.append(f"argmin {serialize.dumps_line(result['argmin'])}")
        elif found:
            lines.append(
                f"VIOLATION n={result['n']} field={result['field']} q={result['q']}"
                f" k={result['k']} margin={result['margin']:+.6e}"
                f" rel={result['rel_margin']:+.3e}"
            )
            lines.append(f"seed_path {result['seed_path']} evaluations {result['evaluations']}")
        else:
            lines.append(
                f"no violation in {result['evaluations']} evaluations;"
                f" min_rel_margin={result['min_rel_margin']:+.6e}"
            )
        text = "\n".join(lines) + "\n"
    if cfg.out:
        serialize.write_text(
            cfg.out, serialize.dumps_canonical({"meta": meta, **payload})
        )
        print(f"wrote {cfg.out}")
        if cfg.fmt == "pretty":
            sys.stdout.write(text)
    else:
        sys.stdout.write(text)
    expect = cfg.expect or ("violation" if cfg.target == "false-variant" else "none")
    return _expectation_exit(found, expect)


def cmd_gen(cfg: RunConfig) -> int:
    if cfg.fmt == "csv":
        raise ValueError("gen emits instance JSON; csv is not meaningful here")
    count = cfg.count if cfg.count is not None else 1
    rank = cfg.rank if cfg.rank is not None else cfg.n
    meta = _meta(cfg)
    docs = []
    for index in range(count):
        a, b = _random_pair(cfg, index)
        docs.append(
            serialize.instance_to_dict(
                meta={
                    "kind": "instance",
                    "index": index,
                    "n": cfg.n,
                    "rank": rank,
                    "field": cfg.field,
                    "seed": cfg.seed,
                    "meta": meta,
                },
                a=a,
                b=b,
            )
        )
    if count == 1 and cfg.fmt != "jsonl":
        text = serialize.dumps_canonical(docs[0])
    else:
        text = "\n".join(serialize.dumps_line(doc) for doc in docs) + "\n"
    _deliver(cfg, text, count)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    cfg = _config_from_args(args)
    try:
        return args.func(cfg)
    except (ValueError, OSError, KeyError) as exc:
        # LinalgError and PipelineDomainError are ValueError subclasses
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
