"""Command line interface.

Subcommands: sample, walk, enumerate, bin, diagnose, compare.  Every
output file carries the run manifest: delimited files as leading
``# key: value`` comment lines, JSON files under a ``manifest`` key.
Manifests contain no timestamps, so reruns with identical arguments
produce byte-identical data files.

Report-producing commands (walk, bin, diagnose, compare) also render PNG
figures next to their data outputs; pass --no-figures to skip that.

The default output directory is the current directory, overridable with
the ASCSAMPLER_OUTDIR environment variable; an explicit --out wins over
both.

Walk trace rows cover local and global (independence) steps in one
schema: global rows have direction=global, delta equal to the Hamming
distance between the states, and u_forward = u_backward = 0 since no
unconstrained pools are involved.

Usage examples:
    ascsampler sample --n 3 --algorithm balanced --count 10000 --seed 7 --out runs/b3
    ascsampler walk --n 6 --steps 5000 --start central --seed 3 --out runs/w6
    ascsampler enumerate --n 4 --out runs/e4
    ascsampler bin --input runs/b3/samples.csv --out runs/b3
    ascsampler diagnose --trace runs/w6/walk_trace.csv --observable delta --out runs/w6
    ascsampler compare --n 6 --budget 5000 --seed 1 --out runs/c6
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
from dataclasses import dataclass, field

from . import __version__
from .core import (
    LabeledComplex,
    format_state,
    mask_string,
    parse_state,
    read_state,
)
from .diagnostics import (
    DEFAULT_OBSERVABLE,
    OBSERVABLES,
    autocorr_report,
    displacement_series,
    multiplicity_residuals,
    unique_states_curve,
)
from .enumeration import ENUMERATE_N_MAX, enumerate_labeled
from .isomorphism import bin_samples, canonical_key
from .samplers import (
    KahleParams,
    balanced_sample,
    kahle_log_prob,
    kahle_sample,
)
from .walk import WalkConfig, central_start, corner_start, metropolis_step, mixture_step

OUTDIR_ENV = "ASCSAMPLER_OUTDIR"


@dataclass(frozen=True)
class RunManifest:
    """Run description embedded in every output artifact."""

    command: str
    n: int | None
    seed: int | None
    count: int | None
    params: dict = field(default_factory=dict)
    outputs: tuple[str, ...] = ()

    def header_lines(self) -> list[str]:
        lines = [f"# ascsampler {__version__}", f"# command: {self.command}"]
        if self.n is not None:
            lines.append(f"# n: {self.n}")
        if self.seed is not None:
            lines.append(f"# seed: {self.seed}")
        if self.count is not None:
            lines.append(f"# count: {self.count}")
        for k in sorted(self.params):
            lines.append(f"# {k}: {self.params[k]}")
        if self.outputs:
            lines.append(f"# outputs: {' '.join(self.outputs)}")
        return lines

    def as_dict(self) -> dict:
        return {
            "tool": "ascsampler",
            "version": __version__,
            "command": self.command,
            "n": self.n,
            "seed": self.seed,
            "count": self.count,
            "params": dict(self.params),
            "outputs": list(self.outputs),
        }


def _outdir(args) -> str:
    out = args.out or os.environ.get(OUTDIR_ENV) or "."
    os.makedirs(out, exist_ok=True)
    return out


def _write_csv(path: str, manifest: RunManifest, header: list[str], rows) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        for line in manifest.header_lines():
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=False)
        fh.write("\n")


def _data_lines(path: str) -> list[str]:
    with open(path, "r", encoding="ascii") as fh:
        return [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]


def cmd_sample(args) -> int:
    out = _outdir(args)
    n = args.n
    rng = random.Random(args.seed)
    if args.algorithm == "kahle":
        probs = args.p if args.p is not None else [0.5]
        if len(probs) == 1:
            params = KahleParams.uniform(n, probs[0])
        elif len(probs) == n - 1:
            params = KahleParams(n, tuple(probs))
        else:
            raise ValueError(f"--p takes one value or {n - 1} values p_2..p_{n}")
        manifest_params = {"algorithm": "kahle", "p": " ".join(repr(p) for p in params.probs)}
    else:
        params = None
        manifest_params = {"algorithm": "balanced"}

    manifest = RunManifest(
        command="sample",
        n=n,
        seed=args.seed,
        count=args.count,
        params=manifest_params,
        outputs=("samples.csv",),
    )
    rows = []
    for i in range(args.count):
        if params is None:
            state, trace = balanced_sample(n, rng)
            lp = trace.log_prob()
        else:
            state = kahle_sample(params, rng)
            lp = kahle_log_prob(state, params)
        rows.append((i, mask_string(state), repr(lp)))
    path = os.path.join(out, "samples.csv")
    _write_csv(path, manifest, ["index", "mask", "log_prob"], rows)
    print(f"[sample] algorithm={args.algorithm} n={n} count={args.count} -> {path}")
    return 0


def _resolve_start(args) -> LabeledComplex:
    spec = args.start
    if spec == "corner":
        return corner_start(args.n)
    if spec == "central":
        return central_start(args.n)
    if spec.startswith("file:"):
        state = read_state(spec[5:])
        if args.n is not None and state.n != args.n:
            raise ValueError(f"--n {args.n} disagrees with start file (n={state.n})")
        return state
    raise ValueError(f"--start must be corner, central, or file:PATH, got {spec!r}")


def _run_walk(start: LabeledComplex, cfg: WalkConfig, steps: int, rng: random.Random):
    """Yield (step, transition) pairs; uses the pure local kernel when
    mixture_lambda is 1 so the trace stream matches metropolis_step exactly."""
    state = start
    step_fn = metropolis_step if cfg.mixture_lambda >= 1.0 else mixture_step
    for i in range(steps):
        t = step_fn(state, cfg, rng)
        state = t.state
        yield i, t


def cmd_walk(args) -> int:
    if args.start.startswith("file:") and args.n is None:
        args.n = read_state(args.start[5:]).n
    if args.n is None:
        raise ValueError("--n is required unless --start is file:PATH")
    out = _outdir(args)
    start = _resolve_start(args)
    cfg = WalkConfig(n=args.n, mixture_lambda=args.lam)
    rng = random.Random(args.seed)

    outputs = ["walk_trace.csv", "walk_report.json", "walk_final_state.txt"]
    manifest = RunManifest(
        command="walk",
        n=args.n,
        seed=args.seed,
        count=args.steps,
        params={
            "start": args.start,
            "lambda": repr(args.lam),
            "observable": args.observable,
        },
        outputs=tuple(outputs),
    )

    rows = []
    displacements = []
    rejected = 0
    final = start
    for i, t in _run_walk(start, cfg, args.steps, rng):
        rows.append(
            (
                i,
                t.direction,
                t.delta,
                t.u_forward,
                t.u_backward,
                repr(t.ratio),
                int(t.accepted),
                t.displacement,
                t.state.popcount,
            )
        )
        displacements.append(t.displacement)
        rejected += not t.accepted
        final = t.state

    trace_path = os.path.join(out, "walk_trace.csv")
    _write_csv(
        trace_path,
        manifest,
        [
            "step",
            "direction",
            "delta",
            "u_forward",
            "u_backward",
            "ratio",
            "accepted",
            "displacement",
            "popcount",
        ],
        rows,
    )
    series = displacement_series(displacements)
    report = autocorr_report(series, observable=args.observable, k_max=args.k_max)
    rejection_rate = rejected / args.steps
    payload = {
        "manifest": manifest.as_dict(),
        "observable": report.observable,
        "mean": report.mean,
        "gamma": [float(g) for g in report.gamma],
        "Gamma": [float(g) for g in report.gamma_pairs],
        "cutoff_lag": report.cutoff_lag,
        "censored": report.censored,
        "rejection_rate": rejection_rate,
    }
    report_path = os.path.join(out, "walk_report.json")
    _write_json(report_path, payload)
    with open(os.path.join(out, "walk_final_state.txt"), "w", encoding="ascii") as fh:
        fh.write(format_state(final))

    if not args.no_figures:
        from . import figures

        figures.save_trajectory(os.path.join(out, "walk_trajectory.png"), series)
        figures.save_autocorr(os.path.join(out, "walk_autocorr.png"), report)

    cutoff = report.cutoff_lag if report.cutoff_lag is not None else "censored"
    print(
        f"[walk] n={args.n} steps={args.steps} start={args.start} "
        f"rejection_rate={rejection_rate:.3f} cutoff_lag={cutoff} -> {report_path}"
    )
    return 0


def cmd_enumerate(args) -> int:
    if args.n > ENUMERATE_N_MAX:
        raise ValueError(f"enumerate is capped at n <= {ENUMERATE_N_MAX}")
    out = _outdir(args)
    result = enumerate_labeled(args.n)
    manifest = RunManifest(
        command="enumerate",
        n=args.n,
        seed=None,
        count=result.labeled_count,
        params={},
        outputs=("enumeration_states.txt", "enumeration.json"),
    )
    states_path = os.path.join(out, "enumeration_states.txt")
    with open(states_path, "w", encoding="ascii") as fh:
        for line in manifest.header_lines():
            fh.write(line + "\n")
        fh.write(f"{args.n}\n")
        for c in result.states:
            fh.write(mask_string(c) + "\n")

    classes = sorted(result.classes.items(), key=lambda kv: kv[0].bits)
    payload = {
        "manifest": manifest.as_dict(),
        "n": args.n,
        "labeled_count": result.labeled_count,
        "geometric_count": result.geometric_count,
        "classes": [
            {
                "key": key.hex,
                "mask": key.mask_string,
                "orbit_size": key.orbit_size,
                "labeled_states": len(states),
            }
            for key, states in classes
        ],
    }
    json_path = os.path.join(out, "enumeration.json")
    _write_json(json_path, payload)
    print(
        f"[enumerate] n={args.n} labeled={result.labeled_count} "
        f"geometric={result.geometric_count} -> {json_path}"
    )
    return 0


def _read_mask_stream(path: str) -> list[LabeledComplex]:
    """Accept either a samples CSV (with a mask column) or a bare stream:
    first data line n, then one mask per line."""
    lines = _data_lines(path)
    if not lines:
        raise ValueError(f"no data in {path}")
    if "," in lines[0]:
        header = next(csv.reader([lines[0]]))
        if "mask" not in header:
            raise ValueError("CSV input needs a 'mask' column")
        col = header.index("mask")
        masks = [next(csv.reader([ln]))[col] for ln in lines[1:]]
        if not masks:
            raise ValueError("CSV input holds no rows")
        n = _infer_n(len(masks[0]))
    else:
        try:
            n = int(lines[0])
        except ValueError as exc:
            raise ValueError("bare mask stream must start with a line holding n") from exc
        masks = lines[1:]
        if not masks:
            raise ValueError("mask stream holds no masks")
    return [parse_state(f"{n}\n{m}") for m in masks]


def _infer_n(size: int) -> int:
    n = (size + 1).bit_length() - 1
    if (1 << n) - 1 != size:
        raise ValueError(f"mask length {size} is not 2**n - 1")
    return n


def cmd_bin(args) -> int:
    out = _outdir(args)
    states = _read_mask_stream(args.input)
    report = bin_samples(states)
    residuals = multiplicity_residuals([e.multiplicity for e in report.entries])
    manifest = RunManifest(
        command="bin",
        n=report.n,
        seed=None,
        count=report.total,
        params={"input": os.path.basename(args.input)},
        outputs=("bins.csv", "bin_residuals.csv"),
    )
    bins_path = os.path.join(out, "bins.csv")
    _write_csv(
        bins_path,
        manifest,
        ["key", "multiplicity", "orbit_size", "first_seen_index"],
        [
            (e.key.hex, e.multiplicity, e.key.orbit_size, e.first_seen_index)
            for e in report.entries
        ],
    )
    _write_csv(
        os.path.join(out, "bin_residuals.csv"),
        manifest,
        ["bin_index", "key", "residual"],
        [(i, e.key.hex, repr(float(r))) for i, (e, r) in enumerate(zip(report.entries, residuals))],
    )
    if not args.no_figures:
        from . import figures

        figures.save_residuals(os.path.join(out, "bin_residuals.png"), {"input": residuals})
    print(f"[bin] n={report.n} total={report.total} classes={len(report.entries)} -> {bins_path}")
    return 0


def _read_trace(path: str) -> tuple[list[int], list[int]]:
    lines = _data_lines(path)
    if not lines:
        raise ValueError(f"no data in {path}")
    reader = csv.DictReader(lines)
    displacements = []
    accepted = []
    for row in reader:
        try:
            displacements.append(int(row["displacement"]))
            accepted.append(int(row["accepted"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError("trace CSV needs displacement and accepted columns") from exc
    if not displacements:
        raise ValueError("trace CSV holds no rows")
    return displacements, accepted


def cmd_diagnose(args) -> int:
    out = _outdir(args)
    displacements, accepted = _read_trace(args.trace)
    series = displacement_series(displacements)
    report = autocorr_report(series, observable=args.observable, k_max=args.k_max)
    manifest = RunManifest(
        command="diagnose",
        n=None,
        seed=None,
        count=len(displacements),
        params={"trace": os.path.basename(args.trace), "observable": args.observable},
        outputs=("diagnose_report.json",),
    )
    payload = {
        "manifest": manifest.as_dict(),
        "observable": report.observable,
        "mean": report.mean,
        "gamma": [float(g) for g in report.gamma],
        "Gamma": [float(g) for g in report.gamma_pairs],
        "cutoff_lag": report.cutoff_lag,
        "censored": report.censored,
        "rejection_rate": 1.0 - sum(accepted) / len(accepted),
    }
    report_path = os.path.join(out, "diagnose_report.json")
    _write_json(report_path, payload)
    if not args.no_figures:
        from . import figures

        figures.save_trajectory(os.path.join(out, "diagnose_trajectory.png"), series)
        figures.save_autocorr(os.path.join(out, "diagnose_autocorr.png"), report)
    cutoff = report.cutoff_lag if report.cutoff_lag is not None else "censored"
    print(f"[diagnose] steps={len(displacements)} cutoff_lag={cutoff} -> {report_path}")
    return 0


def _walk_accepted_keys(n: int, budget: int, seed: int):
    """Keys of the first ``budget`` accepted candidate states of a local walk."""
    cfg = WalkConfig(n=n)
    rng = random.Random(seed)
    state = central_start(n)
    keys = []
    rejected = 0
    total = 0
    cap = 1000 * budget
    while len(keys) < budget:
        if total >= cap:
            raise RuntimeError("walk did not reach the accepted-transition budget")
        t = metropolis_step(state, cfg, rng)
        state = t.state
        total += 1
        if t.accepted:
            keys.append(canonical_key(t.state))
        else:
            rejected += 1
    return keys, rejected / total


def cmd_compare(args) -> int:
    out = _outdir(args)
    n = args.n
    budget = args.budget
    if n > 8:
        raise ValueError("compare is capped at n <= 8 (geometric binning)")

    walk_keys, walk_rejection = _walk_accepted_keys(n, budget, args.seed)
    rng_b = random.Random(args.seed + 1)
    balanced_keys = [canonical_key(balanced_sample(n, rng_b)[0]) for _ in range(budget)]
    rng_k = random.Random(args.seed + 2)
    params = KahleParams.uniform(n, 0.5)
    kahle_keys = [canonical_key(kahle_sample(params, rng_k)) for _ in range(budget)]

    step = max(1, budget // 200)
    checkpoints = list(range(step, budget + 1, step))
    if checkpoints[-1] != budget:
        checkpoints.append(budget)
    curves = {
        "walk": unique_states_curve(walk_keys, checkpoints),
        "balanced": unique_states_curve(balanced_keys, checkpoints),
        "kahle": unique_states_curve(kahle_keys, checkpoints),
    }
    residual_sets = {}
    spreads = {}
    for label, keys in (("walk", walk_keys), ("balanced", balanced_keys), ("kahle", kahle_keys)):
        res = multiplicity_residuals(_ordered_counts(keys))
        residual_sets[label] = res
        spreads[label] = float(res.max() - res.min())

    manifest = RunManifest(
        command="compare",
        n=n,
        seed=args.seed,
        count=budget,
        params={
            "walk_seed": args.seed,
            "balanced_seed": args.seed + 1,
            "kahle_seed": args.seed + 2,
            "kahle_p": "0.5",
        },
        outputs=("compare_curves.csv", "compare_summary.json"),
    )
    curves_path = os.path.join(out, "compare_curves.csv")
    _write_csv(
        curves_path,
        manifest,
        ["checkpoint", "walk", "balanced", "kahle"],
        [
            (cp, curves["walk"][i], curves["balanced"][i], curves["kahle"][i])
            for i, cp in enumerate(checkpoints)
        ],
    )
    payload = {
        "manifest": manifest.as_dict(),
        "unique_final": {label: curves[label][-1] for label in curves},
        "walk_rejection_rate": walk_rejection,
        "residual_spread": spreads,
    }
    summary_path = os.path.join(out, "compare_summary.json")
    _write_json(summary_path, payload)
    if not args.no_figures:
        from . import figures

        figures.save_unique_curves(
            os.path.join(out, "compare_unique.png"), checkpoints, curves
        )
        figures.save_residuals(
            os.path.join(out, "compare_residuals.png"),
            residual_sets,
            title=f"class residuals, n={n}, {budget} draws",
        )
    print(
        "[compare] n={} budget={} unique walk/balanced/kahle = {}/{}/{} -> {}".format(
            n,
            budget,
            curves["walk"][-1],
            curves["balanced"][-1],
            curves["kahle"][-1],
            summary_path,
        )
    )
    return 0


def _ordered_counts(keys) -> list[int]:
    """Multiplicities in first-encounter order."""
    counts: dict = {}
    for key in keys:
        counts[key] = counts.get(key, 0) + 1
    return list(counts.values())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ascsampler",
        description="Sample, walk, enumerate, and diagnose simplicial-complex state spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw labeled states from a sampler")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--algorithm", choices=["kahle", "balanced"], required=True)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, nargs="+", default=None, help="kahle inclusion probability (one value, or p_2..p_n)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("walk", help="run the local Metropolis walk")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--steps", type=int, default=5000)
    p.add_argument("--start", default="central", help="corner | central | file:PATH")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="local-step probability of the mixture kernel")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--observable", choices=list(OBSERVABLES), default=DEFAULT_OBSERVABLE)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("enumerate", help="enumerate every labeled state (small n)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("bin", help="bin sampled states into geometric classes")
    p.add_argument("--input", required=True, help="samples.csv or a bare mask stream")
    p.add_argument("--out", default=None)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_bin)

    p = sub.add_parser("diagnose", help="autocorrelation report from a walk trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--observable", choices=list(OBSERVABLES), default=DEFAULT_OBSERVABLE)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("compare", help="walk vs balanced vs kahle coverage at matched budgets")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--budget", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
