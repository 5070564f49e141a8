"""Command-line pipeline: synth, preprocess, train, extract, qrs, eval, sweep, report.

Every command is deterministic given its config and seed. Configs are JSON
documents validated strictly (unknown keys are rejected); signals travel as
``t,amplitude`` CSVs with JSON sidecars; reports are JSON on stdout.

Exit codes: 0 success, 2 usage/config/shape error, 3 data error, 4 numeric
failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import errors as err
from .cyclegan import (
    CycleGanModel,
    DiscriminatorSpec,
    GeneratorSpec,
    TrainConfig,
    build_model,
    extract_fecg,
    load_checkpoint,
    save_checkpoint,
    train,
)
from .metrics import agreement_report, bland_altman, wedd
from .preprocessing import PreprocessConfig, preprocess, slide, stitch
from .qrs import PeakList, match_beats, pan_tompkins, prf
from .signals import Signal, read_signal_csv, write_signal_csv
from .synth import (
    FETAL_HR_GRID,
    MATERNAL_HR_GRID,
    MixtureConfig,
    add_noise,
    grid_configs,
    mix_abdominal,
)

LAMBDA_SWEEP = (0.1, 1.0, 2.0, 4.0, 10.0, 20.0, 40.0)
ABLATION_VARIANTS = ("full", "no_attention_sine", "no_attention_leakyrelu")


# ---------------------------------------------------------------------------
# run configuration


def _from_dict(cls, data: dict, where: str):
    """Build a dataclass from a dict, rejecting unknown keys."""
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise err.BadConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    coerced = dict(data)
    for f in dataclasses.fields(cls):
        if f.name in coerced and isinstance(coerced[f.name], list):
            coerced[f.name] = tuple(coerced[f.name])
    return cls(**coerced)


@dataclass(frozen=True)
class GridConfig:
    """Heart-rate grid and mixture parameters for the synthetic dataset."""

    maternal_hrs: tuple[float, ...] = MATERNAL_HR_GRID
    fetal_hrs: tuple[float, ...] = FETAL_HR_GRID
    duration_s: float = 60.0
    fs: int = 200
    hrv_std: float = 0.02
    fetal_amp_ratio: float = 0.25
    noise_snr_db: float = 25.0
    noise_kind: str = "emg"

    def base_mixture(self, seed: int) -> MixtureConfig:
        return MixtureConfig(
            duration_s=self.duration_s,
            fs=self.fs,
            hrv_std=self.hrv_std,
            fetal_amp_ratio=self.fetal_amp_ratio,
            noise_snr_db=self.noise_snr_db,
            noise_kind=self.noise_kind,
            seed=seed,
        )


@dataclass(frozen=True)
class SplitConfig:
    """Which grid cells stay out of training for evaluation."""

    held_out: tuple[str, ...] = (
        "m65_f125",
        "m77_f145",
        "m89_f115",
        "m100_f160",
        "m77_f160",
        "m89_f135",
    )


@dataclass(frozen=True)
class RunConfig:
    """Top-level JSON config for the pipeline commands."""

    seed: int = 0
    dtype: str = "float32"
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    generator: GeneratorSpec = field(default_factory=GeneratorSpec)
    discriminator: DiscriminatorSpec = field(default_factory=DiscriminatorSpec)
    split: SplitConfig = field(default_factory=SplitConfig)
    snr_levels_db: tuple[float, ...] = (24.0, 12.0, 6.0, 3.0, 0.0)

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        sections = {
            "preprocess": PreprocessConfig,
            "grid": GridConfig,
            "train": TrainConfig,
            "generator": GeneratorSpec,
            "discriminator": DiscriminatorSpec,
            "split": SplitConfig,
        }
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise err.BadConfigError(f"unknown top-level keys: {sorted(unknown)}")
        kwargs = {}
        for key, value in data.items():
            if key in sections:
                if not isinstance(value, dict):
                    raise err.BadConfigError(f"section {key!r} must be an object")
                kwargs[key] = _from_dict(sections[key], value, key)
            elif isinstance(value, list):
                kwargs[key] = tuple(value)
            else:
                kwargs[key] = value
        return cls(**kwargs)


def load_run_config(path: str | None, seed_override: int | None = None) -> RunConfig:
    if path is None:
        cfg = RunConfig()
    else:
        try:
            data = json.loads(Path(path).read_text())
        except OSError as exc:
            raise err.IoError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise err.BadConfigError(f"config {path} is not valid JSON: {exc}") from exc
        cfg = RunConfig.from_json(data)
    if seed_override is not None:
        cfg = dataclasses.replace(cfg, seed=seed_override)
    return cfg


# ---------------------------------------------------------------------------
# shared pipeline helpers


def grid_cells(cfg: RunConfig, subset: str | None = None) -> dict[str, MixtureConfig]:
    """Named mixture configs for the configured grid, seeded per cell."""
    grid = cfg.grid
    maternal = grid.maternal_hrs
    fetal = grid.fetal_hrs
    if subset:
        try:
            rows, cols = (int(v) for v in subset.lower().split("x"))
        except ValueError as exc:
            raise err.BadConfigError(f"--grid must look like '2x3', got {subset!r}") from exc
        maternal = maternal[:rows]
        fetal = fetal[:cols]
    cells: dict[str, MixtureConfig] = {}
    idx = 0
    for mhr in maternal:
        for fhr in fetal:
            cells[f"m{mhr:g}_f{fhr:g}"] = dataclasses.replace(
                grid.base_mixture(cfg.seed + idx), maternal_hr=mhr, fetal_hr=fhr
            )
            idx += 1
    return cells


def write_dataset(cfg: RunConfig, out_dir: Path, subset: str | None = None) -> list[str]:
    """Generate the grid into per-cell directories of CSVs plus peaks.json."""
    out_dir.mkdir(parents=True, exist_ok=True)
    cells = grid_cells(cfg, subset)
    for name, mix_cfg in cells.items():
        cell_dir = out_dir / name
        cell_dir.mkdir(exist_ok=True)
        abdominal, fetal, maternal, f_peaks, m_peaks = mix_abdominal(mix_cfg)
        write_signal_csv(abdominal, cell_dir / "abdominal.csv")
        write_signal_csv(fetal, cell_dir / "fetal.csv")
        write_signal_csv(maternal, cell_dir / "maternal.csv")
        (cell_dir / "peaks.json").write_text(
            json.dumps(
                {
                    "fetal_r_peaks": [int(i) for i in f_peaks],
                    "maternal_r_peaks": [int(i) for i in m_peaks],
                    "fs": mix_cfg.fs,
                }
            )
        )
    manifest = {
        "cells": sorted(cells),
        "seed": cfg.seed,
        "grid": dataclasses.asdict(cfg.grid),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return sorted(cells)


def dataset_cells(data_dir: Path) -> list[str]:
    manifest = data_dir / "manifest.json"
    if manifest.exists():
        return list(json.loads(manifest.read_text())["cells"])
    cells = sorted(p.name for p in data_dir.iterdir() if (p / "abdominal.csv").exists())
    if not cells:
        raise err.EmptyDatasetError(f"no dataset cells under {data_dir}")
    return cells


def load_training_windows(
    data_dir: Path, pp: PreprocessConfig, held_out: tuple[str, ...]
) -> tuple[np.ndarray, np.ndarray]:
    """Window pools for the two domains from all non-held-out cells."""
    x_parts, y_parts = [], []
    for name in dataset_cells(data_dir):
        if name in held_out:
            continue
        cell = data_dir / name
        abdominal = read_signal_csv(cell / "abdominal.csv")
        fetal = read_signal_csv(cell / "fetal.csv")
        x_parts.append(slide(preprocess(abdominal, pp), pp.window_len, pp.stride).windows)
        y_parts.append(slide(preprocess(fetal, pp), pp.window_len, pp.stride).windows)
    if not x_parts:
        raise err.EmptyDatasetError("every cell is held out; nothing to train on")
    return np.concatenate(x_parts), np.concatenate(y_parts)


def conditioned_reference(fetal: Signal, pp: PreprocessConfig) -> Signal:
    """Ground-truth trace on the same footing as an extracted one."""
    sig = preprocess(fetal, pp)
    ws = slide(sig, pp.window_len, pp.window_len)
    return stitch(ws, ws.windows)


def evaluate_record(
    model: CycleGanModel,
    abdominal: Signal,
    fetal: Signal,
    fetal_peaks: np.ndarray,
    pp: PreprocessConfig,
    tol: int = 6,
) -> dict:
    """Per-record metrics: fidelity/agreement plus beat-matched QRS scores."""
    pred = extract_fecg(model, abdominal, pp)
    truth = conditioned_reference(fetal, pp)
    n = min(len(pred), len(truth))
    rep = agreement_report(truth.samples[:n], pred.samples[:n])
    wedd_res = wedd(truth.samples[:n], pred.samples[:n])
    cut = int(round(pp.truncate_s * abdominal.fs))
    ref = (np.asarray(fetal_peaks) - cut) * pp.target_fs // abdominal.fs
    ref = ref[(ref >= 0) & (ref < n)]
    detected = pan_tompkins(pred)
    m = match_beats(detected, PeakList(ref, pp.target_fs), tol=tol)
    se, ppv, f1 = prf(m)
    return {
        "r2": rep.r2,
        "icc": rep.icc,
        "wedd": wedd_res.wedd,
        "wedd_category": wedd_res.category,
        "bias": rep.bias,
        "loa_lo": rep.loa_lo,
        "loa_hi": rep.loa_hi,
        "t_stat": rep.t_stat,
        "p_value": rep.p_value,
        "tp": m.tp,
        "fp": m.fp,
        "fn": m.fn,
        "se": se,
        "ppv": ppv,
        "f1": f1,
    }


def evaluate_held_out(model: CycleGanModel, cfg: RunConfig, data_dir: Path) -> dict[str, dict]:
    records = {}
    for name in cfg.split.held_out:
        cell = data_dir / name
        if not cell.exists():
            continue
        abdominal = read_signal_csv(cell / "abdominal.csv")
        fetal = read_signal_csv(cell / "fetal.csv")
        peaks = np.array(json.loads((cell / "peaks.json").read_text())["fetal_r_peaks"])
        records[name] = evaluate_record(model, abdominal, fetal, peaks, cfg.preprocess)
    if not records:
        raise err.EmptyDatasetError("no held-out cells found in the dataset")
    return records


def bootstrap_ci(
    values: np.ndarray, n_boot: int = 1000, seed: int = 0, level: float = 0.95
) -> tuple[float, float]:
    """Percentile bootstrap confidence interval for the mean."""
    values = np.asarray(values, dtype=np.float64)
    rng = np.random.default_rng(seed)
    means = np.array(
        [values[rng.integers(0, len(values), len(values))].mean() for _ in range(n_boot)]
    )
    alpha = (1 - level) / 2
    return float(np.quantile(means, alpha)), float(np.quantile(means, 1 - alpha))


def aggregate_records(records: dict[str, dict], seed: int = 0) -> dict:
    """EvalReport aggregate: mean, sd, and bootstrap CI per numeric metric."""
    aggregate = {}
    numeric_keys = [
        k
        for k, v in next(iter(records.values())).items()
        if isinstance(v, (int, float)) and not isinstance(v, bool)
    ]
    for key in numeric_keys:
        values = np.array([rec[key] for rec in records.values()], dtype=np.float64)
        lo, hi = bootstrap_ci(values, seed=seed)
        aggregate[key] = {
            "mean": float(values.mean()),
            "sd": float(values.std(ddof=1)) if len(values) > 1 else 0.0,
            "ci95": [lo, hi],
        }
    return aggregate


def _build_model_from(cfg: RunConfig) -> CycleGanModel:
    return build_model(
        cfg.generator,
        cfg.discriminator,
        lam=cfg.train.lam,
        seed=cfg.train.seed,
        window_len=cfg.preprocess.window_len,
        dtype=np.dtype(cfg.dtype),
    )


def write_loss_csv(table: list[dict], path: Path) -> None:
    columns = ["epoch", "loss_g", "adv_g", "adv_f", "cycle", "loss_dx", "loss_dy"]
    with path.open("w") as fh:
        fh.write(",".join(columns) + "\n")
        for row in table:
            fh.write(",".join(repr(row[c]) if c != "epoch" else str(row[c]) for c in columns) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_synth(args) -> int:
    cfg = load_run_config(args.config, args.seed)
    out_dir = Path(args.out or "dataset")
    names = write_dataset(cfg, out_dir, args.grid)
    if not args.quiet:
        print(json.dumps({"cells": names, "out": str(out_dir)}, indent=2))
    return 0


def cmd_preprocess(args) -> int:
    cfg = load_run_config(args.config, args.seed)
    sig = read_signal_csv(args.infile, args.fs)
    out = preprocess(sig, cfg.preprocess)
    write_signal_csv(out, args.out or "preprocessed.csv")
    if not args.quiet:
        print(json.dumps({"fs": out.fs, "samples": len(out), "out": args.out}))
    return 0


def cmd_train(args) -> int:
    cfg = load_run_config(args.config, args.seed)
    data_dir = Path(args.data)
    out_dir = Path(args.out or "run")
    out_dir.mkdir(parents=True, exist_ok=True)
    x_windows, y_windows = load_training_windows(data_dir, cfg.preprocess, cfg.split.held_out)
    model = _build_model_from(cfg)
    model, table = train(model, x_windows, y_windows, cfg.train)
    save_checkpoint(model, out_dir / "checkpoint.ckpt")
    write_loss_csv(table, out_dir / "losses.csv")
    if not args.quiet:
        print(
            json.dumps(
                {
                    "epochs": model.epoch,
                    "final": table[-1] if table else None,
                    "checkpoint": str(out_dir / "checkpoint.ckpt"),
                }
            )
        )
    return 0


def cmd_extract(args) -> int:
    cfg = load_run_config(args.config, args.seed)
    model = load_checkpoint(args.model)
    sig = read_signal_csv(args.infile, args.fs)
    out = extract_fecg(model, sig, cfg.preprocess)
    write_signal_csv(out, args.out or "fecg.csv")
    if not args.quiet:
        print(json.dumps({"samples": len(out), "fs": out.fs, "out": args.out}))
    return 0


def _read_peaks(path: str, key: str, fs: int) -> PeakList:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        indices = data.get(key)
        if indices is None:
            raise err.BadConfigError(f"{path} has no {key!r} array")
        fs = int(data.get("fs", fs))
    else:
        indices = data
    return PeakList(np.asarray(indices, dtype=np.int64), fs)


def cmd_qrs(args) -> int:
    sig = read_signal_csv(args.infile, args.fs)
    detected = pan_tompkins(sig)
    tol = int(round(args.tol_ms / 1000 * sig.fs))
    ref = _read_peaks(args.ref, args.ref_key, sig.fs)
    if args.ref_offset_s:
        shifted = ref.indices - int(round(args.ref_offset_s * ref.fs))
        ref = PeakList(shifted[(shifted >= 0) & (shifted < len(sig))], ref.fs)
    m = match_beats(detected, ref, tol=tol)
    se, ppv, f1 = prf(m)
    print(
        json.dumps(
            {
                "detected": len(detected),
                "reference": len(ref),
                "tp": m.tp,
                "fp": m.fp,
                "fn": m.fn,
                "se": se,
                "ppv": ppv,
                "f1": f1,
                "tol_samples": tol,
            },
            indent=2,
        )
    )
    return 0


def cmd_eval(args) -> int:
    truth = read_signal_csv(args.truth, args.fs)
    pred = read_signal_csv(args.pred, args.fs)
    if len(truth) != len(pred):
        raise err.ShapeMismatchError(
            f"length mismatch: truth {len(truth)} vs pred {len(pred)}"
        )
    rep = agreement_report(truth.samples, pred.samples)
    wedd_res = wedd(truth.samples, pred.samples)
    out = {
        "r2": rep.r2,
        "icc": rep.icc,
        "bias": rep.bias,
        "loa_lo": rep.loa_lo,
        "loa_hi": rep.loa_hi,
        "t_stat": rep.t_stat,
        "p_value": rep.p_value,
        "wedd": wedd_res.wedd,
        "wedd_category": wedd_res.category,
        "wprd": list(wedd_res.wprd),
        "weights": list(wedd_res.weights),
    }
    if args.plot_data:
        _, _, _, means, diffs = bland_altman(truth.samples, pred.samples)
        with Path(args.plot_data).open("w") as fh:
            fh.write("mean,diff\n")
            for m_i, d_i in zip(means, diffs):
                fh.write(f"{float(m_i)!r},{float(d_i)!r}\n")
    print(json.dumps(out, indent=2))
    return 0


def _train_eval(
    cfg: RunConfig, data_dir: Path, gspec: GeneratorSpec, lam: float
) -> tuple[float, float]:
    """Train one variant and return mean held-out (r2, f1)."""
    model = build_model(
        gspec,
        cfg.discriminator,
        lam=lam,
        seed=cfg.train.seed,
        window_len=cfg.preprocess.window_len,
        dtype=np.dtype(cfg.dtype),
    )
    x_windows, y_windows = load_training_windows(data_dir, cfg.preprocess, cfg.split.held_out)
    train_cfg = dataclasses.replace(cfg.train, lam=lam)
    train(model, x_windows, y_windows, train_cfg)
    records = evaluate_held_out(model, cfg, data_dir)
    r2 = float(np.mean([r["r2"] for r in records.values()]))
    f1 = float(np.mean([r["f1"] for r in records.values()]))
    return r2, f1


def cmd_sweep(args) -> int:
    cfg = load_run_config(args.config, args.seed)
    data_dir = Path(args.data)
    out_path = Path(args.out or f"{args.kind}_sweep.csv")
    rows: list[str] = []
    if args.kind == "lambda":
        rows.append("lam,r2,f1")
        for lam in LAMBDA_SWEEP:
            r2, f1 = _train_eval(cfg, data_dir, cfg.generator, lam)
            rows.append(f"{lam!r},{r2!r},{f1!r}")
    elif args.kind == "ablation":
        rows.append("variant,r2,f1")
        variants = {
            "full": cfg.generator,
            "no_attention_sine": dataclasses.replace(cfg.generator, attention=False),
            "no_attention_leakyrelu": dataclasses.replace(
                cfg.generator, attention=False, activation="leaky_relu"
            ),
        }
        for name, gspec in variants.items():
            r2, f1 = _train_eval(cfg, data_dir, gspec, cfg.train.lam)
            rows.append(f"{name},{r2!r},{f1!r}")
    elif args.kind == "snr":
        if not args.model:
            raise err.BadConfigError("snr sweep needs --model CHECKPOINT")
        model = load_checkpoint(args.model)
        rows.append("snr_db,r2")
        for level in cfg.snr_levels_db:
            r2_values = []
            for name in cfg.split.held_out:
                cell = data_dir / name
                if not cell.exists():
                    continue
                abdominal = read_signal_csv(cell / "abdominal.csv")
                noisy = add_noise(abdominal, cfg.grid.noise_kind, level, cfg.seed + 1)
                fetal = read_signal_csv(cell / "fetal.csv")
                pred = extract_fecg(model, noisy, cfg.preprocess)
                truth = conditioned_reference(fetal, cfg.preprocess)
                n = min(len(pred), len(truth))
                r2_values.append(agreement_report(truth.samples[:n], pred.samples[:n]).r2)
            if not r2_values:
                raise err.EmptyDatasetError("no held-out cells for the snr sweep")
            rows.append(f"{level!r},{float(np.mean(r2_values))!r}")
    else:
        raise err.BadConfigError(f"unknown sweep kind {args.kind!r}")
    out_path.write_text("\n".join(rows) + "\n")
    if not args.quiet:
        print(json.dumps({"kind": args.kind, "rows": len(rows) - 1, "out": str(out_path)}))
    return 0


def cmd_report(args) -> int:
    cfg = load_run_config(args.config, args.seed)
    records: dict[str, dict] = {}
    for path in args.records:
        data = json.loads(Path(path).read_text())
        if isinstance(data, dict) and all(isinstance(v, dict) for v in data.values()):
            records.update(data)
        else:
            records[Path(path).stem] = data
    if not records:
        raise err.EmptyDatasetError("no records to aggregate")
    report = {
        "n_records": len(records),
        "per_record": records,
        "aggregate": aggregate_records(records, seed=cfg.seed),
    }
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2))
    print(json.dumps(report["aggregate"], indent=2))
    return 0


# ---------------------------------------------------------------------------
# entry point


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run config")
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.add_argument("--out", help="output file or directory")
    p.add_argument("--quiet", action="store_true", help="suppress status JSON")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fetalsep",
        description="Fetal ECG extraction pipeline: synthesis, training, scoring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the synthetic heart-rate grid")
    _add_common(p)
    p.add_argument("--grid", help="subset like 2x3 (maternal x fetal)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("preprocess", help="run the conditioning chain on a CSV")
    _add_common(p)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--fs", type=int, help="sample rate if no sidecar")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("train", help="train the translation model on a dataset")
    _add_common(p)
    p.add_argument("--data", required=True, help="dataset directory from synth")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("extract", help="extract the fetal trace from an abdominal CSV")
    _add_common(p)
    p.add_argument("--model", required=True, help="checkpoint path")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--fs", type=int)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("qrs", help="detect R peaks and score against a reference")
    _add_common(p)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--fs", type=int)
    p.add_argument("--ref", required=True, help="peaks.json or a JSON array")
    p.add_argument("--ref-key", default="fetal_r_peaks")
    p.add_argument("--ref-offset-s", type=float, default=0.0,
                   help="seconds trimmed from the signal start (shifts references)")
    p.add_argument("--tol-ms", type=float, default=30.0)
    p.set_defaults(func=cmd_qrs)

    p = sub.add_parser("eval", help="fidelity and agreement metrics between two CSVs")
    _add_common(p)
    p.add_argument("--truth", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--fs", type=int)
    p.add_argument("--plot-data", help="write Bland-Altman (mean, diff) CSV here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="lambda, snr, or ablation sweep")
    _add_common(p)
    p.add_argument("--kind", required=True, choices=["lambda", "snr", "ablation"])
    p.add_argument("--data", required=True)
    p.add_argument("--model", help="checkpoint (snr sweep)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="aggregate per-record metrics with bootstrap CIs")
    _add_common(p)
    p.add_argument("records", nargs="+", help="JSON record files")
    p.set_defaults(func=cmd_report)

    return parser


_EXIT_DATA = (err.IoError, err.TooShortError, err.EmptyDatasetError,
              err.FsMismatchError, err.CorruptFileError, err.VersionMismatchError)
_EXIT_NUMERIC = (err.DegenerateSignalError, err.ZeroNoiseError, err.ConstantReferenceError,
                 err.DegenerateVarianceError, err.ZeroEnergyError, err.AllTiedError)


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (err.BadConfigError, err.ShapeMismatchError, err.InvalidBandError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _EXIT_DATA as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _EXIT_NUMERIC as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
