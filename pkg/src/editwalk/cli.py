"""Batch front door: parse a run config, dispatch to the engines, emit
machine-readable artifacts.

Exit codes: 0 ok, 1 validation error, 2 cap exceeded, 3 verify failure.
Flags override config values. All outputs carry a provenance header.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .edits import parse_edit
from .errors import CapExceeded, EditWalkError, ValidationError
from .hostgraph import EdgeSet, HostGraph, host_from_json, is_acyclic
from .process import (
    WeightedEdits,
    block_probabilities,
    chung_lu_probabilities,
    erdos_renyi_probabilities,
    intersection_host,
    intersection_weights,
    moran_weights,
    simple_edit_weights,
    simulate,
)
from .serialize import artifact_meta, write_csv, write_json, write_jsonl
from .spectral import (
    build_chain,
    commute_time,
    eigenvalues_simple,
    hitting_time,
    mixing_bound_compound,
    mixing_bound_simple,
    recurrent_class,
    simple_tv_bound,
    spectrum,
    stationary_closed_form,
    stationary_numeric,
    to_dot,
    tv_decay,
)
from .verify import run_verification

DEFAULT_CAPS = {"states": 1 << 20, "commute_states": 256}


@dataclass
class RunConfig:
    host: HostGraph
    model: str
    params: dict
    weights: WeightedEdits
    p: object = None  # per-edge probabilities for the simple model
    steps: int = 0
    seed: int = 0
    thin: int = 1
    initial: EdgeSet | None = None
    mode: str = "double"
    caps: dict = field(default_factory=lambda: dict(DEFAULT_CAPS))
    out: Path = Path(".")
    fmt: str = "csv"


def _number(value, exact: bool):
    """Config scalars: rational mode reads decimals/'a/b' strings exactly."""
    if exact:
        return Fraction(str(value))
    if isinstance(value, str):
        return float(Fraction(value))
    return float(value)


def _parse_initial(spec, g: HostGraph) -> EdgeSet:
    if spec in (None, "empty"):
        return g.empty_set()
    if spec == "full":
        return g.full_set()
    if isinstance(spec, dict) and "hex" in spec:
        return EdgeSet(g.m, int(spec["hex"], 16))
    if isinstance(spec, int):
        return EdgeSet(g.m, spec)
    if isinstance(spec, list):
        return EdgeSet.from_indices(g.m, (g.index_of(u, v) for u, v in spec))
    raise ValidationError(f"cannot parse initial state spec {spec!r}")


def _simple_probabilities(g: HostGraph, params: dict, exact: bool):
    if "p" in params:
        p = params["p"]
        if isinstance(p, list):
            return [_number(x, exact) for x in p]
        return _number(p, exact)
    preset = params.get("p_preset")
    if not preset:
        raise ValidationError('model "simple" needs "p" or "p_preset" in model params')
    kind = preset.get("kind")
    if kind == "erdos_renyi":
        return erdos_renyi_probabilities(g, _number(preset["p"], exact))
    if kind == "chung_lu":
        return chung_lu_probabilities(g, [_number(x, exact) for x in preset["degrees"]])
    if kind == "block":
        return block_probabilities(
            g, preset["block"], _number(preset["p"], exact), _number(preset["q"], exact)
        )
    raise ValidationError(f"unknown p_preset kind {preset!r}")


def load_config(path: str | Path, overrides: argparse.Namespace) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ValidationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}") from None

    mode = overrides.mode or raw.get("mode", "double")
    if mode not in ("rational", "double"):
        raise ValidationError(f'config "mode" must be rational|double, got {mode!r}')
    exact = mode == "rational"

    model_spec = raw.get("model")
    if not isinstance(model_spec, dict) or "name" not in model_spec:
        raise ValidationError('config needs a single "model" object with a "name"')
    name = model_spec["name"]
    params = {k: v for k, v in model_spec.items() if k != "name"}

    if name == "intersection":
        n, N = int(params["n"]), int(params["N"])
        host = intersection_host(n, N)
        if "host" in raw:
            declared = host_from_json(raw["host"])
            if declared != host:
                raise ValidationError(
                    'config "host" disagrees with the intersection model host '
                    f"K_{{{n},{N}}}"
                )
    else:
        if "host" not in raw:
            raise ValidationError('config needs a "host" object')
        host = host_from_json(raw["host"])

    p = None
    if name == "simple":
        p = _simple_probabilities(host, params, exact)
        weights = simple_edit_weights(host, p)
    elif name == "moran":
        weights = moran_weights(host)
    elif name == "intersection":
        mu = [_number(x, exact) for x in params["mu"]]
        weights = intersection_weights(
            int(params["n"]), int(params["N"]), mu, mode=params.get("mode", "explicit")
        )
    elif name == "custom":
        edits_spec = params.get("edits")
        if not edits_spec:
            raise ValidationError('model "custom" needs a non-empty "edits" list')
        items = tuple(
            (parse_edit(entry["edit"], host.m), _number(entry["weight"], exact))
            for entry in edits_spec
        )
        weights = WeightedEdits(host.m, items)
    else:
        raise ValidationError(f"unknown model name {name!r}")

    caps = dict(DEFAULT_CAPS)
    caps.update(raw.get("caps", {}))
    if overrides.cap_states is not None:
        caps["states"] = overrides.cap_states
    elif caps["states"] > DEFAULT_CAPS["states"]:
        raise ValidationError(
            f'config raises caps.states to {caps["states"]}; pass --cap-states '
            "explicitly to confirm"
        )

    seed = overrides.seed if overrides.seed is not None else int(raw.get("seed", 0))
    default_initial = "full" if name == "moran" else "empty"
    initial = _parse_initial(raw.get("initial", default_initial), host)

    return RunConfig(
        host=host,
        model=name,
        params=params,
        weights=weights,
        p=p,
        steps=int(raw.get("T", 0)),
        seed=seed,
        thin=int(raw.get("thin", 1)),
        initial=initial,
        mode=mode,
        caps=caps,
        out=Path(overrides.out),
        fmt=overrides.format,
    )


def _warn_if_transient(cfg: RunConfig) -> None:
    """Compound-model mixing statements start from the recurrent class."""
    if cfg.model == "simple" or cfg.weights.is_lazy:
        return
    if cfg.host.m > 20 or (1 << cfg.host.m) > cfg.caps["states"]:
        return
    states = recurrent_class(cfg.weights, cfg.host, initial=cfg.initial, cap=cfg.caps["states"])
    if cfg.initial.mask not in {s.mask for s in states}:
        print(
            "warning: initial state is outside the recurrent class; "
            "mixing-time guarantees apply after the first covering update",
            file=sys.stderr,
        )


def cmd_simulate(cfg: RunConfig, args: argparse.Namespace) -> int:
    _warn_if_transient(cfg)
    traj = simulate(
        cfg.weights, cfg.initial, cfg.steps, seed=cfg.seed, thin=cfg.thin
    )
    meta = artifact_meta(cfg.host, cfg.seed, model=cfg.model, T=cfg.steps, thin=cfg.thin)
    cfg.out.mkdir(parents=True, exist_ok=True)

    summary = {
        "final_state": traj.states[-1].hex(),
        "edge_counts": traj.edge_counts(),
    }
    if cfg.model == "moran":
        summary["acyclic"] = [is_acyclic(cfg.host, s) for s in traj.states]
    write_json(cfg.out / "summary.json", meta, summary)
    if cfg.steps == 0:
        print(f"wrote {cfg.out / 'summary.json'} (no steps requested)")
        return 0

    records = []
    for k, state in enumerate(traj.states):
        t = min(k * cfg.thin, cfg.steps)
        record = {"t": t, "state": state.hex()}
        if args.state_format == "edges":
            record["edges"] = [list(cfg.host.edges[e]) for e in state.indices()]
        records.append(record)
    write_jsonl(cfg.out / "trajectory.jsonl", meta, records)
    print(f"wrote {cfg.out / 'trajectory.jsonl'} ({len(records)} snapshots)")
    return 0


def _spectrum_report(cfg: RunConfig):
    if cfg.model == "simple":
        return eigenvalues_simple(cfg.host.m)
    return spectrum(cfg.weights, cfg.host, initial=cfg.initial, cap=cfg.caps["states"])


def cmd_spectrum(cfg: RunConfig, args: argparse.Namespace) -> int:
    report = _spectrum_report(cfg)
    by_value = "; ".join(f"{v:g}x{mult}" for v, mult in report.by_value())
    meta = artifact_meta(cfg.host, cfg.seed, model=cfg.model, by_value=by_value)
    cfg.out.mkdir(parents=True, exist_ok=True)
    if cfg.fmt == "json":
        write_json(cfg.out / "spectrum.json", meta, report.to_json_obj())
        print(f"wrote {cfg.out / 'spectrum.json'}")
    else:
        write_csv(
            cfg.out / "spectrum.csv",
            meta,
            ["flat", "size", "eigenvalue", "multiplicity"],
            report.to_csv_rows(),
        )
        print(f"wrote {cfg.out / 'spectrum.csv'}")
    return 0


def _stationary_pairs(cfg: RunConfig):
    if cfg.model == "simple":
        pi = stationary_closed_form(cfg.host, cfg.p)
        states = [EdgeSet(cfg.host.m, mask) for mask in range(1 << cfg.host.m)]
        return states, list(pi)
    tm = build_chain(
        cfg.weights, cfg.host, restrict="recurrent", initial=cfg.initial,
        cap=cfg.caps["states"],
    )
    return list(tm.states), list(stationary_numeric(tm))


def cmd_stationary(cfg: RunConfig, args: argparse.Namespace) -> int:
    states, pi = _stationary_pairs(cfg)
    meta = artifact_meta(cfg.host, cfg.seed, model=cfg.model, mode=cfg.mode)
    rows = [(s.hex(), str(v)) for s, v in zip(states, pi)]
    cfg.out.mkdir(parents=True, exist_ok=True)
    if cfg.fmt == "json":
        write_json(cfg.out / "stationary.json", meta, [
            {"state": s, "pi": v} for s, v in rows
        ])
        print(f"wrote {cfg.out / 'stationary.json'}")
    else:
        write_csv(cfg.out / "stationary.csv", meta, ["state", "pi"], rows)
        print(f"wrote {cfg.out / 'stationary.csv'}")
    return 0


def cmd_mixing(cfg: RunConfig, args: argparse.Namespace) -> int:
    c = args.c
    m = cfg.host.m
    meta = artifact_meta(cfg.host, cfg.seed, model=cfg.model, c=c)

    if cfg.model == "simple":
        bound_steps = mixing_bound_simple(m, c)
        restrict = "all"
        pi = None
        bound_at = lambda t: simple_tv_bound(m, t)
    else:
        report = _spectrum_report(cfg)
        lam = report.second_largest()
        chambers = report.total_multiplicity
        bound_steps = mixing_bound_compound(lam, m, c, chamber_count=chambers)
        meta["lambda_star"] = lam
        meta["chambers"] = chambers
        restrict = "recurrent"
        pi = None
        bound_at = lambda t: chambers * lam**t
    meta["bound_steps"] = bound_steps

    t_max = args.t_max if args.t_max is not None else bound_steps
    cfg.out.mkdir(parents=True, exist_ok=True)
    if (1 << m) <= cfg.caps["states"] and m <= 20:
        tm = build_chain(
            cfg.weights, cfg.host, restrict=restrict, initial=cfg.initial,
            cap=cfg.caps["states"],
        )
        if pi is None:
            pi = (
                stationary_closed_form(cfg.host, cfg.p)
                if cfg.model == "simple"
                else stationary_numeric(tm)
            )
        start = cfg.initial
        if start.mask not in {s.mask for s in tm.states}:
            start = tm.states[0]  # fall back to a recurrent start
        curve = tv_decay(tm, start, pi, t_max)
        rows = [(t, f"{curve[t]:.12e}", f"{bound_at(t):.12e}") for t in range(t_max + 1)]
        write_csv(cfg.out / "mixing.csv", meta, ["t", "tv", "bound"], rows)
        print(f"wrote {cfg.out / 'mixing.csv'} (bound_steps={bound_steps})")
    else:
        write_json(cfg.out / "mixing.json", meta, {"bound_steps": bound_steps})
        print(f"wrote {cfg.out / 'mixing.json'} (bound_steps={bound_steps}; curve skipped)")
    return 0


def cmd_commute(cfg: RunConfig, args: argparse.Namespace) -> int:
    cap = cfg.caps["commute_states"]
    meta = artifact_meta(cfg.host, cfg.seed, model=cfg.model, mode=cfg.mode)
    cfg.out.mkdir(parents=True, exist_ok=True)
    if cfg.model == "simple":
        if (1 << cfg.host.m) > cap:
            raise CapExceeded(
                f"2^{cfg.host.m} states exceed the commute cap {cap}; "
                "raise caps.commute_states to override"
            )
        states = [EdgeSet(cfg.host.m, mask) for mask in range(1 << cfg.host.m)]
        matrix = [
            [str(commute_time(a, b, cfg.host, cfg.p)) for b in states] for a in states
        ]
    else:
        tm = build_chain(
            cfg.weights, cfg.host, restrict="recurrent", initial=cfg.initial,
            cap=cfg.caps["states"],
        )
        if tm.size > cap:
            raise CapExceeded(
                f"{tm.size} recurrent states exceed the commute cap {cap}"
            )
        states = list(tm.states)
        hit = np.zeros((tm.size, tm.size))
        for j in range(tm.size):
            for i in range(tm.size):
                if i != j:
                    hit[i, j] = hitting_time(tm, states[i], states[j], method="solve")
        matrix = [[str(hit[i, j] + hit[j, i]) for j in range(tm.size)] for i in range(tm.size)]
    rows = [[states[i].hex()] + matrix[i] for i in range(len(states))]
    write_csv(
        cfg.out / "commute.csv", meta, ["state"] + [s.hex() for s in states], rows
    )
    print(f"wrote {cfg.out / 'commute.csv'} ({len(states)} states)")
    return 0


def cmd_export_dot(cfg: RunConfig, args: argparse.Namespace) -> int:
    restrict = "all" if cfg.model == "simple" else "recurrent"
    tm = build_chain(
        cfg.weights, cfg.host, restrict=restrict, initial=cfg.initial,
        cap=cfg.caps["states"],
    )
    text = to_dot(tm, cfg.host, labels=args.labels)
    meta = artifact_meta(cfg.host, cfg.seed, model=cfg.model)
    header = "".join(f"// {k}: {v}\n" for k, v in meta.items())
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / "states.dot"
    path.write_text(header + text)
    print(f"wrote {path} ({tm.size} nodes)")
    return 0


def cmd_verify(cfg: RunConfig, args: argparse.Namespace) -> int:
    results = run_verification(
        cfg.host,
        cfg.weights,
        p=cfg.p if cfg.model == "simple" else None,
        rng=np.random.default_rng(cfg.seed),
    )
    for result in results:
        print(result.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 3 if failed else 0


COMMANDS = {
    "simulate": cmd_simulate,
    "spectrum": cmd_spectrum,
    "stationary": cmd_stationary,
    "mixing": cmd_mixing,
    "commute": cmd_commute,
    "export-dot": cmd_export_dot,
    "verify": cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors (2 is reserved for caps)
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="editwalk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the run config JSON")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--mode", choices=["rational", "double"], default=None)
        p.add_argument("--cap-states", type=int, default=None)
        p.add_argument("--format", choices=["csv", "json", "dot"], default="csv")
        if name == "simulate":
            p.add_argument("--state-format", choices=["hex", "edges"], default="hex")
        if name == "mixing":
            p.add_argument("--c", type=float, default=1.0)
            p.add_argument("--t-max", type=int, default=None)
        if name == "export-dot":
            p.add_argument("--labels", choices=["hex", "edges"], default="hex")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return COMMANDS[args.command](cfg, args)
    except CapExceeded as exc:
        print(f"error (cap): {exc}", file=sys.stderr)
        return 2
    except (ValidationError, EditWalkError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
