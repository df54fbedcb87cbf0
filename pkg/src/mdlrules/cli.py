"""Command-line interface: binarize, mine, fit, predict, evaluate, cv, experiment."""
from __future__ import annotations

import csv
import logging
import os
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import __version__
from .data import DataError, binarize, encode_features, load_csv, make_folds, resolve_label
from .encoding import (baseline_code_length, data_code_length, model_code_length,
                       total_code_length)
from .metrics import (REPORT_COLUMNS, accuracy, auc_weighted, balanced_accuracy,
                      cross_validate)
from .mining import format_candidates, mine, remove_redundant
from .rulelist import ModelFormatError, from_machine, to_machine, to_text
from .search import GAIN_MODES, FitConfig, learn

SUPPORT_SWEEP = (0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.25)


class _Group(click.Group):
    """Turns expected runtime failures into a one-line message and exit code 1."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (DataError, ModelFormatError, OSError, ValueError) as exc:
            raise click.ClickException(str(exc)) from None


def _label(value):
    if value is None:
        return None
    return int(value) if value.lstrip("-").isdigit() else value


label_option = click.option("--label", default=None,
                            help="Label column name or 0-based index (default: last column).")
mining_options = [
    click.option("--min-support", type=click.FloatRange(0, 1, min_open=True), default=0.05,
                 show_default=True, help="Per-class minimum relative support."),
    click.option("--max-length", type=click.IntRange(min=1), default=4, show_default=True,
                 help="Maximum number of conditions per pattern."),
]
fit_options = [
    click.option("--gain", type=click.Choice(GAIN_MODES), default="normalized",
                 show_default=True),
    click.option("--epsilon", type=click.FloatRange(0, min_open=True), default=1.0,
                 show_default=True, help="Pseudocount of the plug-in code."),
]
cv_options = [
    click.option("--folds", type=click.IntRange(min=2), default=10, show_default=True),
    click.option("--repeats", type=click.IntRange(min=1), default=10, show_default=True),
    click.option("--seed", type=int, default=0, show_default=True),
    click.option("--threads", type=click.IntRange(min=1), default=None,
                 help="Worker processes (default: all cores)."),
]


def _apply(options):
    def decorate(f):
        for opt in reversed(options):
            f = opt(f)
        return f
    return decorate


def _load(path, label):
    return binarize(load_csv(path, _label(label)))


def _out_path(output, path, suffix):
    return Path(output) if output else Path(path).with_suffix(suffix)


def _threads(threads):
    return threads or os.cpu_count() or 1


@click.group(cls=_Group)
@click.version_option(__version__, prog_name="mdlrules")
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Learn compact probabilistic rule lists by compression."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)


@main.command("binarize")
@click.argument("input", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@label_option
def binarize_cmd(input, output, label):
    """Write the 0/1 item matrix of INPUT, label last."""
    table = load_csv(input, _label(label))
    data = binarize(table)
    path = _out_path(output, input, ".items.csv")
    X = data.to_matrix()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([str(it) for it in data.items] + [table.column_names[table.label_column]])
        for row, y in zip(X, data.labels):
            w.writerow([int(v) for v in row] + [data.class_names[y]])
    click.echo(f"{data.n} instances, {data.num_items} items, {data.num_classes} classes -> {path}")


@main.command("mine")
@click.argument("input", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@label_option
@_apply(mining_options)
@click.option("--keep-redundant", is_flag=True, help="Skip redundancy pruning.")
def mine_cmd(input, output, label, min_support, max_length, keep_redundant):
    """Write the candidate patterns of INPUT with their supports."""
    data = _load(input, label)
    cands = mine(data, min_support, max_length)
    if not keep_redundant:
        cands = remove_redundant(cands)
    path = _out_path(output, input, ".candidates.tsv")
    path.write_text(format_candidates(cands, data))
    click.echo(f"{len(cands)} candidates -> {path}")


def bits_report(rulelist, data) -> str:
    model = model_code_length(rulelist)
    labels = data_code_length(rulelist, data)
    total = total_code_length(rulelist, data)
    base = baseline_code_length(data, rulelist.epsilon)
    return (f"L(R)\t{model:.4f}\n"
            f"L(Y|X,R)\t{labels:.4f}\n"
            f"L(D,R)\t{total:.4f}\n"
            f"L(D,empty)\t{base:.4f}\n"
            f"L%\t{total / base:.4f}\n")


@main.command("fit")
@click.argument("input", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
              help="Model file (default: INPUT with .model.json).")
@label_option
@_apply(mining_options)
@_apply(fit_options)
@click.option("--trace", is_flag=True, help="Print one line per added rule.")
@click.option("--report-bits", is_flag=True, help="Print the code lengths of the fitted model.")
def fit_cmd(input, output, label, min_support, max_length, gain, epsilon, trace, report_bits):
    """Fit a rule list on INPUT; writes the model, its listing and a bits report."""
    data = _load(input, label)
    model, cands = learn(data, min_support, max_length, FitConfig(gain=gain, epsilon=epsilon))
    path = _out_path(output, input, ".model.json")
    stem = path.with_name(path.name.removesuffix(".json"))
    path.write_text(to_machine(model))
    Path(f"{stem}.txt").write_text(to_text(model))
    report = bits_report(model, data)
    Path(f"{stem}.bits.tsv").write_text(report)
    if trace:
        for s in model.trace:
            cond = " AND ".join(str(data.items[i]) for i in s.pattern)
            click.echo(f"{s.iteration}\t{{{cond}}}\tusage={s.usage}\tgain={s.gain:.4f}"
                       f"\tL={s.total_length:.4f}\tL%={s.relative_compression:.4f}")
    click.echo(to_text(model), nl=False)
    if report_bits:
        click.echo(report, nl=False)
    click.echo(f"{len(cands)} candidates, {len(model)} rules + default -> {path}")


@main.command("predict")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.argument("input", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@click.option("--label", default=None,
              help="Column holding the true class, copied to the output when given.")
def predict_cmd(model, input, output, label):
    """Per-instance firing rule, predicted class and class probabilities."""
    rules = from_machine(Path(model).read_text())
    with open(input, newline="", encoding="utf-8") as fh:
        rows = [[v.strip() for v in r] for r in csv.reader(fh) if r]
    if not rows:
        raise DataError(f"{input}: empty file")
    header, rows = [h.strip() for h in rows[0]], rows[1:]
    X = encode_features(rules.items, header, rows)
    fired = rules.assign_matrix(X)
    proba = rules.predict_proba_matrix(X)
    truth = None
    if label is not None:
        truth = [r[resolve_label(header, _label(label))] for r in rows]
    path = _out_path(output, input, ".predictions.tsv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["row", "rule", "class"] + (["label"] if truth else [])
                   + [f"Pr({c})" for c in rules.class_names])
        for i, (r, p) in enumerate(zip(fired, proba)):
            rule = "default" if r == len(rules) else str(r + 1)
            extra = [truth[i]] if truth else []
            w.writerow([i, rule, rules.class_names[int(np.argmax(p))]] + extra
                       + [f"{v:.6g}" for v in p])
    click.echo(f"{len(rows)} predictions -> {path}")


def _write_rows(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)


def _fmt(v):
    return f"{v:.6g}" if isinstance(v, float) else v


@main.command("evaluate")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.argument("input", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@label_option
def evaluate_cmd(model, input, output, label):
    """Score MODEL on the labelled data in INPUT."""
    rules = from_machine(Path(model).read_text())
    table = load_csv(input, _label(label))
    header = table.column_names
    X = encode_features(rules.items, header, table.rows)
    index = {c: k for k, c in enumerate(rules.class_names)}
    try:
        y = np.array([index[r[table.label_column]] for r in table.rows])
    except KeyError as exc:
        raise DataError(f"unknown class {exc.args[0]!r}") from None
    proba = rules.predict_proba_matrix(X)
    pred = np.argmax(proba, axis=1)
    row = {"accuracy": accuracy(pred, y),
           "balanced_accuracy": balanced_accuracy(pred, y, rules.num_classes),
           "auc_weighted": auc_weighted(proba, y),
           "num_rules": len(rules) + 1,
           "total_conditions": rules.num_conditions}
    path = _out_path(output, input, ".evaluation.tsv")
    _write_rows(path, list(row), [[_fmt(v) for v in row.values()]])
    for k, v in row.items():
        click.echo(f"{k}\t{_fmt(v)}")


@main.command("cv")
@click.argument("input", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@label_option
@_apply(mining_options)
@_apply(fit_options)
@_apply(cv_options)
@click.option("--std", "show_std", is_flag=True, help="Also report standard deviations.")
def cv_cmd(input, output, label, min_support, max_length, gain, epsilon, folds, repeats, seed,
           threads, show_std):
    """Repeated stratified cross-validation; per-fold rows plus the mean."""
    data = _load(input, label)
    plan = make_folds(data, folds, repeats, seed)
    res = cross_validate(data, plan, min_support, max_length,
                         FitConfig(gain=gain, epsilon=epsilon), _threads(threads))
    rows = [[str(r), str(f)] + [_fmt(rep.as_row()[c]) for c in REPORT_COLUMNS]
            for r, f, rep in res.folds]
    summary = res.summary()
    rows.append(["mean", ""] + [_fmt(summary[c][0]) for c in REPORT_COLUMNS])
    if show_std:
        rows.append(["std", ""] + [_fmt(summary[c][1]) for c in REPORT_COLUMNS])
    path = _out_path(output, input, ".cv.tsv")
    _write_rows(path, ["repeat", "fold"] + REPORT_COLUMNS, rows)
    for c in REPORT_COLUMNS:
        mean, std = summary[c]
        click.echo(f"{c}\t{mean:.4f}" + (f"\t{std:.4f}" if show_std else ""))


@main.command("experiment")
@click.argument("input", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@click.option("--supports", default=",".join(str(s) for s in SUPPORT_SWEEP), show_default=True,
              help="Comma-separated minimum supports to sweep.")
@label_option
@click.option("--max-length", type=click.IntRange(min=1), default=4, show_default=True)
@_apply(fit_options)
@_apply(cv_options)
def experiment_cmd(input, output, supports, label, max_length, gain, epsilon, folds, repeats,
                   seed, threads):
    """Sweep the minimum support: candidates, runtime, L%, AUC and rules per setting."""
    try:
        sweep = [float(s) for s in supports.split(",") if s.strip()]
    except ValueError:
        raise click.BadParameter(f"not a list of numbers: {supports!r}",
                                 param_hint="--supports") from None
    if not sweep or any(not 0 < s <= 1 for s in sweep):
        raise click.BadParameter("supports must lie in (0, 1]", param_hint="--supports")
    data = _load(input, label)
    plan = make_folds(data, folds, repeats, seed)
    config = FitConfig(gain=gain, epsilon=epsilon)
    columns = ["min_support", "num_candidates", "runtime", "relative_compression",
               "auc_weighted", "num_rules"]
    rows = []
    for s in sweep:
        t0 = time.perf_counter()
        res = cross_validate(data, plan, s, max_length, config, _threads(threads))
        row = [s, res.mean("num_candidates"), res.mean("runtime"),
               res.mean("relative_compression"), res.mean("auc_weighted"), res.mean("num_rules")]
        rows.append([_fmt(v) for v in row])
        click.echo("\t".join(str(v) for v in rows[-1])
                   + f"\t({time.perf_counter() - t0:.1f}s)")
    path = _out_path(output, input, ".experiment.tsv")
    _write_rows(path, columns, rows)
    click.echo(f"-> {path}")


if __name__ == "__main__":
    main()
