"""Batch command line: generate datasets, run models, compare, sweep.

Exit codes: 0 success, 2 usage error, 1 runtime error. Every command is
deterministic for a given seed; pass ``--timing off`` to zero the
wall-clock columns when byte-identical output is needed.
"""

from __future__ import annotations

import argparse
import io
import os
import sys
import tempfile
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

from . import warm_up
from .evaluation import (
    EvalRecord,
    Summary,
    drift_response,
    holdout_eval,
    interleaved_eval,
    prequential_eval,
    summarize,
    summarize_many,
    write_results_csv,
)
from .ozabag import OzaBag
from .pmu import NO_DRIFT, PMU_SCHEMA, SIGNATURES, DriftSpec, generate_signature, write_metadata
from .stream import ListStream, Schema, SchemaError, parse_csv_stream, write_csv_stream
from .transfer import transfer_chain
from .tree import HoeffdingTree, HtConfig, SplitCriterion

MODELS = ("that", "that-transfer", "ozabag")
EVALUATORS = ("prequential", "interleaved", "holdout")
SWEEP_DELTAS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
SWEEP_CRITERIA = ("gini", "info_gain")
SWEEP_KS = (5, 10, 15, 20)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- argument parsing ------------------------------------------------------------


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _drift(text: str) -> tuple[int, ...]:
    return () if text.strip().lower() == "none" else _ints(text)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, required=True, help="master seed (required)")
    common.add_argument("--out", type=Path, required=True, help="output directory")
    common.add_argument("--signatures", type=_ints, default=None,
                        help="comma list of 1-based signature numbers (default: all)")
    common.add_argument("--drift-at", type=_drift, default=None,
                        help="comma list of drift positions, or 'none' (default: 1/4 and 1/2 of each stream)")
    common.add_argument("--drift-width", type=float, default=DriftSpec().width, help="drift ramp width in instances")
    common.add_argument("--drift-shift", type=float, default=DriftSpec().shift, help="relative threshold change of the drifted concept")
    common.add_argument("--n-per-class", type=int, default=SIGNATURES[0].n_per_class, help="instances per class and signature")

    model = _Parser(add_help=False)
    model.add_argument("--delta", type=float, default=HtConfig.delta, help="split confidence")
    model.add_argument("--tau", type=float, default=HtConfig.tau, help="tie-breaking threshold")
    model.add_argument("--nmin", type=int, default=HtConfig.n_min, help="grace period between split attempts")
    model.add_argument("--criterion", default=HtConfig.criterion.value,
                       choices=[c.value for c in SplitCriterion])
    model.add_argument("--k", type=int, default=5, help="OzaBag ensemble size")
    model.add_argument("--window", type=int, default=500, help="prequential window")
    model.add_argument("--in", dest="inputs", type=Path, nargs="+", default=None,
                       help="signature CSV files (default: generate from --seed)")
    model.add_argument("--timing", choices=("on", "off"), default="on", help="off zeroes timings for byte-identical output")

    parser = _Parser(prog="thatstream", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("generate", parents=[common], help="write signature CSVs and metadata")

    run = sub.add_parser("run", parents=[common, model], help="evaluate one model")
    run.add_argument("--model", choices=MODELS, default="that")
    run.add_argument("--evaluator", choices=EVALUATORS, default="prequential")
    run.add_argument("--holdout-train", type=int, default=200, help="training instances per holdout cycle")
    run.add_argument("--holdout-test", type=int, default=50, help="test instances per holdout cycle")

    sub.add_parser("compare", parents=[common, model], help="transfer chain vs OzaBag")

    sweep = sub.add_parser("sweep", parents=[common, model], help="parameter grid")
    sweep.add_argument("--deltas", type=_floats, default=SWEEP_DELTAS, help="comma list of split confidences")
    sweep.add_argument("--criteria", type=lambda s: tuple(x for x in s.split(",") if x), default=SWEEP_CRITERIA, help="comma list of split criteria")
    sweep.add_argument("--ks", type=_ints, default=SWEEP_KS, help="comma list of OzaBag sizes")
    return parser


@dataclass
class Context:
    args: argparse.Namespace
    config: HtConfig
    drift: DriftSpec
    timed: bool
    out: object

    @classmethod
    def from_args(cls, args: argparse.Namespace, out) -> Context:
        try:
            positions = args.drift_at
            if positions is None:
                length = 2 * args.n_per_class
                positions = (length // 4, length // 2)
            drift = DriftSpec(positions, args.drift_width, args.drift_shift) if positions else NO_DRIFT
            if any(p > 2 * args.n_per_class for p in drift.positions):
                raise ValueError("--drift-at positions must lie within the stream")
            config = HtConfig()
            if hasattr(args, "delta"):
                config = HtConfig(delta=args.delta, tau=args.tau, n_min=args.nmin, criterion=args.criterion)
                if args.k < 1 or args.window < 1:
                    raise ValueError("--k and --window must be >= 1")
            if args.n_per_class < 1:
                raise ValueError("--n-per-class must be >= 1")
            if args.signatures is not None and not all(1 <= s <= len(SIGNATURES) for s in args.signatures):
                raise ValueError(f"--signatures must be within 1..{len(SIGNATURES)}")
        except ValueError as e:
            raise UsageError(str(e)) from None
        return cls(args, config, drift, getattr(args, "timing", "off") == "on", out)

    @property
    def which(self) -> list[int]:
        sig = self.args.signatures
        return list(range(len(SIGNATURES))) if sig is None else [s - 1 for s in sig]


# -- data -----------------------------------------------------------------------


@dataclass
class Dataset:
    name: str
    stream_factory: Callable[[], object]


def _specs(ctx: Context):
    return [replace(SIGNATURES[i], n_per_class=ctx.args.n_per_class) for i in ctx.which]


def _datasets(ctx: Context, materialize: bool = False) -> list[Dataset]:
    """Input files if ``--in`` was given, otherwise generated signatures."""
    inputs = ctx.args.inputs
    if inputs:
        missing = [str(p) for p in inputs if not p.is_file()]
        if missing:
            raise FileNotFoundError(f"input not found: {', '.join(missing)}")
        out = []
        for path in inputs:
            if materialize:
                with open(path, "rb") as fh:
                    items = list(parse_csv_stream(fh, PMU_SCHEMA))
                out.append(Dataset(path.stem, lambda items=items: ListStream(PMU_SCHEMA, items)))
            else:
                out.append(Dataset(path.stem, lambda path=path: _FileStream(path, PMU_SCHEMA)))
        return out
    out = []
    for i, spec in zip(ctx.which, _specs(ctx)):
        sig = generate_signature(spec, ctx.drift, ctx.args.seed, i)
        out.append(Dataset(f"signature_{i + 1}", sig.stream))
    return out


class _FileStream:
    """Parse a CSV lazily and close it at end of stream."""

    def __init__(self, path: Path, schema: Schema):
        self.schema = schema
        self._fh = open(path, "rb")
        self._src = parse_csv_stream(self._fh, schema)

    def __iter__(self):
        try:
            yield from self._src
        finally:
            self._fh.close()


# -- output ---------------------------------------------------------------------


class Outputs:
    """Collects output files and writes them only once every run succeeded."""

    def __init__(self, directory: Path):
        self.directory = directory
        self.files: dict[str, str] = {}

    def add(self, name: str, text: str) -> None:
        self.files[name] = text

    def commit(self) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        umask = os.umask(0)
        os.umask(umask)
        for name, text in self.files.items():
            target = self.directory / name
            fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=f".{name}.")
            try:
                with os.fdopen(fd, "w", newline="") as fh:
                    fh.write(text)
                os.chmod(tmp, 0o666 & ~umask)
                os.replace(tmp, target)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise


def _results_text(records: Sequence[EvalRecord]) -> str:
    buf = io.StringIO()
    write_results_csv(records, buf, PMU_SCHEMA.class_labels)
    return buf.getvalue()


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.6f}"


# -- commands -------------------------------------------------------------------


def cmd_generate(ctx: Context) -> Outputs:
    outs = Outputs(ctx.args.out)
    for i, spec in zip(ctx.which, _specs(ctx)):
        sig = generate_signature(spec, ctx.drift, ctx.args.seed, i)
        csv_buf, meta_buf = io.StringIO(), io.StringIO()
        write_csv_stream(sig.instances, PMU_SCHEMA, csv_buf)
        write_metadata(sig.metadata(), meta_buf)
        outs.add(f"signature_{i + 1}.csv", csv_buf.getvalue())
        outs.add(f"signature_{i + 1}.meta", meta_buf.getvalue())
        print(f"signature_{i + 1}.csv rows={len(sig)}", file=ctx.out)
    return outs


def _evaluator(ctx: Context) -> Callable:
    a = ctx.args
    if a.evaluator == "interleaved":
        return lambda m, s: interleaved_eval(m, s, timed=ctx.timed)
    if a.evaluator == "holdout":
        if a.holdout_train < 1 or a.holdout_test < 1:
            raise UsageError("--holdout-train and --holdout-test must be >= 1")
        return lambda m, s: holdout_eval(m, s, a.holdout_train, a.holdout_test, timed=ctx.timed)
    return lambda m, s: prequential_eval(m, s, a.window, timed=ctx.timed)


def _model_factory(ctx: Context, name: str) -> Callable[[], object]:
    if name == "that":
        return lambda: HoeffdingTree(PMU_SCHEMA, ctx.config)
    if name == "ozabag":
        return lambda: OzaBag(PMU_SCHEMA, ctx.config, k=ctx.args.k, seed=ctx.args.seed)
    raise UsageError(f"model {name!r} has no single-stream factory")


def cmd_run(ctx: Context) -> Outputs:
    a = ctx.args
    evaluate = _evaluator(ctx)
    data = _datasets(ctx)
    if ctx.timed:
        warm_up()
    outs = Outputs(a.out)
    lines = []
    if a.model == "that-transfer":
        chain = transfer_chain([d.stream_factory() for d in data], ctx.config, PMU_SCHEMA, evaluate=evaluate)
        grafts = [0] + [s.grafts_made for s in chain.sessions]
        runs = list(zip(data, chain.records, grafts))
    else:
        make = _model_factory(ctx, a.model)
        runs = [(d, evaluate(make(), d.stream_factory()), None) for d in data]
    for d, records, grafts in runs:
        if not records:
            raise ValueError(f"{d.name}: empty stream")
        outs.add(f"{a.model}_{d.name}.csv", _results_text(records))
        line = f"{d.name} {summarize(records).line()}"
        if grafts is not None:
            line += f" grafts={grafts}"
        lines.append(line)
    outs.add(f"{a.model}_summary.txt", "\n".join(lines) + "\n")
    print("\n".join(lines), file=ctx.out)
    return outs


def compare_models(ctx: Context, data: list[Dataset]) -> dict[str, tuple[Summary, list[Summary]]]:
    """Transfer chain vs OzaBag, both carried across all signatures in order."""
    a = ctx.args
    chain = transfer_chain([d.stream_factory() for d in data], ctx.config, PMU_SCHEMA, a.window, timed=ctx.timed)
    ens = OzaBag(PMU_SCHEMA, ctx.config, k=a.k, seed=a.seed)
    bag = [prequential_eval(ens, d.stream_factory(), a.window, timed=ctx.timed) for d in data]
    return {
        "that-transfer": (summarize_many(chain.records), [summarize(r) for r in chain.records]),
        f"ozabag-{a.k}": (summarize_many(bag), [summarize(r) for r in bag]),
    }


def cmd_compare(ctx: Context) -> Outputs:
    data = _datasets(ctx, materialize=True)
    if ctx.timed:
        warm_up()
    result = compare_models(ctx, data)
    table = ["model,avg_accuracy,avg_kappa,ms_per_instance"]
    detail = ["model,signature,avg_accuracy,avg_kappa,ms_per_instance"]
    for name, (pooled, per_sig) in result.items():
        table.append(f"{name},{_fmt(pooled.avg_accuracy)},{_fmt(pooled.avg_kappa)},{_fmt(pooled.ms_per_instance)}")
        for d, s in zip(data, per_sig):
            detail.append(f"{name},{d.name},{_fmt(s.avg_accuracy)},{_fmt(s.avg_kappa)},{_fmt(s.ms_per_instance)}")
    outs = Outputs(ctx.args.out)
    outs.add("compare.csv", "\n".join(table) + "\n")
    outs.add("compare_signatures.csv", "\n".join(detail) + "\n")
    width = max(len(n) for n in result)
    print(f"{'model':<{width}}  avg_accuracy  ms_per_instance", file=ctx.out)
    for name, (pooled, _) in result.items():
        print(f"{name:<{width}}  {pooled.avg_accuracy:12.4f}  {pooled.ms_per_instance:15.4f}", file=ctx.out)
    return outs


SWEEP_HEADER = (
    "model,delta,criterion,k,signature,avg_accuracy,avg_kappa,ms_per_instance,"
    "final_accuracy,drift_dips,drift_recoveries"
)


def _sweep_row(ctx, model, delta, criterion, k, name, records) -> str:
    s = summarize(records)
    positions = [p for p in ctx.drift.positions if 0 < p < len(records)]
    resp = drift_response(records, positions, ctx.drift.width) if positions else []
    dips = " ".join(f"{r.dip:.6f}" for r in resp)
    recs = " ".join(f"{r.recovery:.6f}" for r in resp)
    return (
        f"{model},{delta!r},{criterion},{k},{name},{_fmt(s.avg_accuracy)},{_fmt(s.avg_kappa)},"
        f"{_fmt(s.ms_per_instance)},{_fmt(records[-1].windowed_accuracy)},{dips},{recs}"
    )


def cmd_sweep(ctx: Context) -> Outputs:
    a = ctx.args
    if not (a.deltas and a.criteria) and not a.ks:
        raise UsageError("empty sweep grid")
    try:
        crits = [SplitCriterion.parse(c) for c in a.criteria]
        if any(not 0.0 <= d <= 1.0 for d in a.deltas) or any(k < 1 for k in a.ks):
            raise ValueError("sweep values out of range")
    except ValueError as e:
        raise UsageError(str(e)) from None
    data = _datasets(ctx, materialize=True)
    if ctx.timed:
        warm_up()
    rows = [SWEEP_HEADER]
    for crit in crits:
        for delta in a.deltas:
            cfg = ctx.config.with_(delta=delta, criterion=crit)
            for d in data:
                rec = prequential_eval(HoeffdingTree(PMU_SCHEMA, cfg), d.stream_factory(), a.window, timed=ctx.timed)
                rows.append(_sweep_row(ctx, "that", delta, crit.value, "", d.name, rec))
    for k in a.ks:
        for d in data:
            ens = OzaBag(PMU_SCHEMA, ctx.config, k=k, seed=a.seed)
            rec = prequential_eval(ens, d.stream_factory(), a.window, timed=ctx.timed)
            rows.append(_sweep_row(ctx, "ozabag", ctx.config.delta, ctx.config.criterion.value, k, d.name, rec))
    outs = Outputs(a.out)
    outs.add("sweep.csv", "\n".join(rows) + "\n")
    print(f"sweep.csv rows={len(rows) - 1}", file=ctx.out)
    return outs


COMMANDS = {"generate": cmd_generate, "run": cmd_run, "compare": cmd_compare, "sweep": cmd_sweep}


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        ctx = Context.from_args(args, out)
        outputs = COMMANDS[args.command](ctx)
        outputs.commit()
    except UsageError as e:
        print(f"usage error: {e}", file=err)
        return 2
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except (OSError, SchemaError, ValueError) as e:
        print(f"error: {e}", file=err)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
