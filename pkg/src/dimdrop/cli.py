"""Harmonic measure and dimension drop for random walks on the free group F2.

Each subcommand reads one JSON config (``--config``), runs the matching
library operation and writes JSON (or CSV for tables, DOT/SVG for figures).
Exit status: 0 on success, 1 on invalid input, 2 when a solver does not
converge.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from . import analysis as A
from . import hidden_markov as HM
from . import hyperbolic as H
from . import prefix_graph as PG
from . import thermo as T
from . import words as W
from .config import COMMAND_FIELDS, SCHEMA_VERSION, RunConfig, parse_config, schema_json
from .errors import DimdropError, SchemaError
from .walk import last_letter_multiplicity, unique_last_letter, validate

SIG_DIGITS = 12

DESCRIPTIONS = {
    "validate": "check the step distribution and the unique-last-letter hypothesis",
    "graph": "write the weighted prefix graph as DOT",
    "measure": "exact cylinder masses, optionally against the raw-walk Monte Carlo oracle",
    "sample": "draw boundary words from the hidden-Markov chain",
    "hdim": "Hausdorff dimension of the limit set",
    "hmdim": "harmonic-measure dimension along sampled rays",
    "report": "dimension-drop report with the translation-length certificates",
    "additivity": "translation-length additivity test",
    "powerword": "cylinder masses of powers of a word against exp(-delta * l)",
    "gibbs": "spread of nu([w]) * exp(delta * dist(o, w o)) by word length",
    "figures": "SVG of the half-planes and limit-set cylinders",
}


def clean(obj):
    """Convert to JSON-ready values, rounding floats to 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(obj, complex):
        return [clean(obj.real), clean(obj.imag)]
    return obj


def to_json(payload: dict) -> str:
    return json.dumps(clean(payload), indent=2, ensure_ascii=False) + "\n"


def to_csv(rows: list) -> str:
    rows = clean(rows)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _boundary(cfg: RunConfig) -> HM.BoundaryChain:
    s = cfg.section("solver")
    return HM.solve(cfg.mu, s["tol"], s["max_iter"])


def _solver_info(B: HM.BoundaryChain, cfg: RunConfig) -> dict:
    F = B.first_passage
    return {"tol": cfg.section("solver")["tol"], "iterations": F.iterations, "residual": F.residual,
            "h_residual": B.h_residual, "h_spectral_radius": B.h_spectral_radius}


def _dimension(cfg: RunConfig) -> T.DimensionEstimate:
    d = cfg.section("dimension")
    return T.hausdorff_dimension(cfg.rep, d["depth"], d["tol"])


def cmd_validate(cfg, threads):
    cfg.require("mu")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = validate(cfg.mu, cfg.section("validate")["radius"])
    mult = {}
    for x in W.LETTERS:
        n, wit = last_letter_multiplicity(cfg.mu, x)
        mult[x] = {"count": n, "witnesses": wit}
    return {**rep.to_dict(), "last_letter_multiplicity": mult,
            "hypothesis_unique_last_a": unique_last_letter(cfg.mu, "a")}, None


def cmd_graph(cfg, threads):
    cfg.require("mu")
    return None, PG.export_dot(PG.build(cfg.mu))


def cmd_measure(cfg, threads):
    cfg.require("mu")
    opt, samp = cfg.section("measure"), cfg.section("sampling")
    B = _boundary(cfg)
    ws = opt["words"]
    if ws is None:
        ws = [w for n in range(1, opt["max_length"] + 1) for w in W.reduced_words(n)]
    rows = []
    for i, w in enumerate(ws):
        q = HM.cylinder_probability(B, w)
        row = {"word": W.format_word(w), "exact": q.value, "path_count": q.path_count}
        if opt["mc"]:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                est, se = HM.mc_cylinder_oracle(cfg.mu, w, samp["steps"], samp["mc_trials"], [samp["seed"], i], threads)
            row.update(mc_estimate=est, mc_stderr=se)
        rows.append(row)
    payload = {"solver": _solver_info(B, cfg), "rows": rows}
    if opt["mc"]:
        payload["mc"] = {"steps": samp["steps"], "trials": samp["mc_trials"], "seed": samp["seed"]}
    return payload, rows


def cmd_sample(cfg, threads):
    cfg.require("mu")
    opt = cfg.section("sample")
    B = _boundary(cfg)
    draws = HM.sample_boundary(B, opt["n"], cfg.section("sampling")["seed"], opt["draws"])
    return {"n": opt["n"], "seed": cfg.section("sampling")["seed"], "words": list(draws)}, None


def cmd_hdim(cfg, threads):
    cfg.require("rep")
    est = _dimension(cfg)
    od = cfg.section("dimension")["oracle_depth"]
    payload = {**est.to_dict(), "tol": cfg.section("dimension")["tol"],
               "oracle_depth": od, "oracle_value": T.box_counting_oracle(cfg.rep, od)}
    return payload, [{"depth": d, "delta": v} for d, v in est.convergence_table]


def cmd_hmdim(cfg, threads):
    cfg.require("mu", "rep")
    samp = cfg.section("sampling")
    B = _boundary(cfg)
    hd = A.harmonic_dimension_estimate(B, cfg.rep, samp["ray_length"], samp["trials"], samp["seed"])
    payload = {"estimate": hd.to_dict(), "seed": samp["seed"]}
    if cfg.section("hmdim")["stability"] and samp["ray_length"] // 2 >= 50:
        half = A.harmonic_dimension_estimate(B, cfg.rep, samp["ray_length"] // 2, samp["trials"], samp["seed"])
        sigma = math.hypot(hd.dim_se, half.dim_se)
        payload["half_length"] = half.to_dict()
        payload["stable"] = abs(hd.dim - half.dim) <= 3 * sigma
    return payload, None


def path_sum_certificate(B: HM.BoundaryChain, seed, pairs: int = 5, length: int = 4) -> dict:
    """Factorization residual of path sums over random (w1, w2) pairs."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    tested = []
    pinned = len(B.states_emitting("a")) == 1
    if pinned:
        for _ in range(pairs):
            w1 = A.random_inner_word(rng, int(rng.integers(0, length + 1)))
            w2 = A.random_inner_word(rng, int(rng.integers(0, length + 1)))
            lhs = A.path_sum(B, "a" + w1 + "a" + w2 + "a")
            rhs = A.path_sum(B, "a" + w1 + "a") * A.path_sum(B, "a" + w2 + "a")
            worst = max(worst, abs(lhs - rhs))
            tested.append([W.format_word(w1), W.format_word(w2)])
    return {"unique_state_for_a": pinned, "pairs": tested, "max_residual": worst if pinned else None,
            "path_sum_aa": A.path_sum(B, "aa")}


def cmd_report(cfg, threads):
    cfg.require("mu", "rep")
    samp, d = cfg.section("sampling"), cfg.section("dimension")
    B = _boundary(cfg)
    est = _dimension(cfg)
    rep = A.dimension_drop_report(cfg.mu, cfg.rep, d["depth"], d["tol"], samp["ray_length"], samp["trials"],
                                  samp["seed"], boundary=B, dimension=est)
    certs = {"additivity": A.additivity_test(cfg.rep).to_dict()}
    try:
        certs["powerword"] = A.power_word_rate(B, cfg.rep, "a", 20, est).to_dict()
    except DimdropError as exc:
        certs["powerword"] = {"error": exc.code, "message": str(exc)}
    certs["path_sum"] = path_sum_certificate(B, samp["seed"])
    payload = {**rep.to_dict(), "solver": _solver_info(B, cfg), "seed": samp["seed"], "certificates": certs}
    return payload, None


def cmd_additivity(cfg, threads):
    cfg.require("rep")
    opt = cfg.section("additivity")
    return A.additivity_test(cfg.rep, opt["w1"], opt["w2"]).to_dict(), None


def cmd_powerword(cfg, threads):
    cfg.require("mu", "rep")
    opt = cfg.section("powerword")
    B = _boundary(cfg)
    r = A.power_word_rate(B, cfg.rep, opt["word"], opt["n_max"], _dimension(cfg))
    rows = [{"n": n + 1, "root": r.roots[n], "ratio": r.ratios[n] if n < len(r.ratios) else None}
            for n in range(len(r.roots))]
    return r.to_dict(), rows


def cmd_gibbs(cfg, threads):
    cfg.require("mu", "rep")
    B = _boundary(cfg)
    est = _dimension(cfg)
    ws = [w for n in cfg.section("gibbs")["lengths"] for w in W.reduced_words(n)]
    diag = A.gibbs_comparison_diagnostic(B, cfg.rep, est.value, ws)
    return {**diag.to_dict(), "delta_uncertainty": est.uncertainty}, diag.rows()


def cmd_figures(cfg, threads):
    cfg.require("rep")
    opt = cfg.section("figures")
    return None, H.limit_set_svg(cfg.rep, opt["depth"], opt["size"])


COMMANDS = {
    "validate": cmd_validate,
    "graph": cmd_graph,
    "measure": cmd_measure,
    "sample": cmd_sample,
    "hdim": cmd_hdim,
    "hmdim": cmd_hmdim,
    "report": cmd_report,
    "additivity": cmd_additivity,
    "powerword": cmd_powerword,
    "gibbs": cmd_gibbs,
    "figures": cmd_figures,
}
TEXT_COMMANDS = {"graph", "figures"}


def run(command: str, cfg: RunConfig, threads: int = 1, fmt: str = "json") -> str:
    """Run one command and return its rendered output."""
    payload, extra = COMMANDS[command](cfg, threads)
    if command in TEXT_COMMANDS:
        return extra
    if fmt == "csv":
        if not isinstance(extra, list) or not extra:
            raise SchemaError(f"command '{command}' has no table to export as CSV", "--format")
        return to_csv(extra)
    return to_json({"schema_version": SCHEMA_VERSION, "command": command, "result": payload})


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file (default: empty config)")
    common.add_argument("--out", metavar="PATH", help="write output here instead of standard output")
    common.add_argument("--seed", type=int, metavar="N", help="override sampling.seed")
    common.add_argument("--threads", type=int, default=1, metavar="N", help="worker cap for Monte Carlo trials")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    parser = argparse.ArgumentParser(prog="dimdrop", description=__doc__.splitlines()[0])
    parser.add_argument("--schema", action="store_true", help="print the config JSON schema and exit")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name, desc in DESCRIPTIONS.items():
        sub.add_parser(
            name, parents=[common], help=desc, description=desc,
            epilog="config fields: " + ", ".join(COMMAND_FIELDS[name]),
        )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.schema:
        sys.stdout.write(schema_json())
        return 0
    if not args.command:
        parser.print_help(sys.stderr)
        return 1
    try:
        text = "{}"
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        cfg = parse_config(text)
        if args.seed is not None:
            cfg.options["sampling"]["seed"] = args.seed
        out = run(args.command, cfg, max(1, args.threads), args.format)
    except DimdropError as exc:
        where = ""
        if getattr(exc, "line", None):
            where = f" (line {exc.line}, column {exc.column})"
        sys.stderr.write(f"error[{exc.code}]: {exc}{where}\n")
        return exc.exit_status
    except OSError as exc:
        sys.stderr.write(f"error[io]: {exc}\n")
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
