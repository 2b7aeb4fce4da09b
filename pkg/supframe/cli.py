"""
Command-line front end.

    supframe analyze    signal -> coefficient JSON + spectrogram CSV
    supframe adapt      signal -> partition JSON + per-piece score CSV
    supframe synthesize coefficient JSON -> WAV (ola, dual, lapped or dyadic)
    supframe denoise    seeded Wiener experiments, or enhancement of a noisy WAV
    supframe bench      multiply counts and wall time against the closed forms

Every command is a thin shell over the library. Failures surface as
SupframeError and map to exit codes 2 (validation), 3 (mathematical
precondition) and 4 (I/O).
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from pydantic import ValidationError
from scipy import fft as sp_fft

from supframe.adapt.costs import SEGMENT_COSTS
from supframe.adapt.dynamic import dp_search
from supframe.adapt.greedy import DEFAULT_R_MAX, greedy_search
from supframe.config import Settings, configure_logging
from supframe.errors import ConfigError, SupframeError
from supframe.experiments.bench import run_bench, write_bench_csv
from supframe.experiments.models import DEFAULT_LENGTH, ExperimentConfig, MethodSpec, WindowSpec
from supframe.experiments.report import write_report_csv, write_report_pdf
from supframe.experiments.runner import enhance, run_experiment, system_for
from supframe.experiments.synthetic import synthetic_signal
from supframe.frames.gabor import GaborSystem
from supframe.frames.reconstruct import (
    canonical_dual,
    dual_reconstruct,
    dyadic_duals,
    gola_reconstruct,
    lapped_duals,
    ola_reconstruct,
)
from supframe.frames.superposition import CoefficientSet, OrderedPartition, Piece, make_selection, superposition_analyze
from supframe.io.audio import read_wav, write_wav
from supframe.io.files import (
    load_coefficients,
    load_experiment_config,
    load_partition,
    save_coefficients,
    save_dual_frame,
    save_partition,
    write_report_json,
    write_scores_csv,
    write_spectrogram_csv,
)

logger = logging.getLogger(__name__)

DEFAULT_SAMPLE_RATE = 8000
SYNTHESIS_METHODS = ("ola", "dual", "lapped", "dyadic")


# ============================
# Shared arguments
# ============================

def _add_signal_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", type=Path, help="mono WAV file (16-bit PCM or 32-bit float)")
    src.add_argument("--synthetic", action="store_true", help="use the built-in synthetic test signal")
    p.add_argument("--length", type=int, help="signal length L (synthetic default %d)" % DEFAULT_LENGTH)
    p.add_argument("--fit", action="store_true", help="crop or zero-pad the input to --length")
    p.add_argument("--sample-rate", type=int, default=DEFAULT_SAMPLE_RATE, help="sample rate of synthetic signals")


def _add_window_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window", choices=["hamming", "hann", "triangular", "rect"], default="hamming")
    p.add_argument("--winlen", type=int, default=64)
    p.add_argument("--hop", type=int, default=32, help="time lattice step a")
    p.add_argument("--modulations", type=int, help="modulation count M (default: winlen)")
    p.add_argument("--periodic", action="store_true", help="DFT-even window (constant overlap-add at 50%% hop)")


def _window_spec(args) -> WindowSpec:
    return WindowSpec(
        name=args.window,
        winlen=args.winlen,
        hop=args.hop,
        periodic=args.periodic,
        modulations=args.modulations,
    )


def _load_signal(args) -> Tuple[np.ndarray, int]:
    if args.synthetic:
        return synthetic_signal(args.length or DEFAULT_LENGTH), args.sample_rate
    return read_wav(args.input, args.length, args.fit)


def _sidecar(path: Path, explicit: Optional[Path]) -> Path:
    return explicit if explicit is not None else path.with_suffix(".csv")


# ============================
# Commands
# ============================

def cmd_analyze(args) -> int:
    x, rate = _load_signal(args)
    spec = _window_spec(args)
    g = system_for(spec, x.size)
    if args.partition is not None:
        partition, stored_mode = load_partition(args.partition)
    else:
        partition, stored_mode = OrderedPartition.uniform(g.N), None
    mode = args.mode or (stored_mode.value if stored_mode else "global")
    sel = make_selection(partition, g, mode)
    C = superposition_analyze(x, g, sel)

    window = spec.model_dump(include={"name", "winlen", "periodic"})
    save_coefficients(args.out, C, g, window_spec=window, sample_rate=rate)
    csv_path = write_spectrogram_csv(C, g, _sidecar(args.out, args.spectrogram))
    logger.info("analysis: L=%d, %d pieces, mode %s, M_g=%d", g.L, len(sel.pieces), sel.mode.value, sel.M_g)
    print(f"wrote {args.out} ({len(sel.pieces)} pieces) and {csv_path}")
    return 0


def cmd_adapt(args) -> int:
    x, _ = _load_signal(args)
    g = system_for(_window_spec(args), x.size)
    if args.algo == "greedy":
        result = greedy_search(x, g, args.rmax, args.reset)
    else:
        result = dp_search(x, g, cost=SEGMENT_COSTS[args.cost], r_max=args.rmax)
    save_partition(args.out, result.partition, mode=args.mode, scores=result.scores, algorithm=args.algo)
    csv_path = write_scores_csv(result.partition, result.scores, g, _sidecar(args.out, args.scores))
    print(f"wrote {args.out} ({len(result.partition.pieces)} pieces from {g.N} translates) and {csv_path}")
    return 0


def _stft_matrix(C: CoefficientSet, g: GaborSystem) -> np.ndarray:
    return np.column_stack([C.entries[Piece(n, 0)] for n in range(g.N)])


def synthesize(C: CoefficientSet, g: GaborSystem, method: str, dual_out: Optional[Path] = None) -> np.ndarray:
    sel = C.selection
    if method == "ola":
        if all(p.r == 0 for p in sel.pieces) and sel.M_g == g.M:
            return ola_reconstruct(_stft_matrix(C, g), g)
        return gola_reconstruct(C, g)

    if method == "dual":
        D = canonical_dual(sel, g)
    elif method == "lapped":
        D = lapped_duals(g.window, g.a, sel.M_g).restrict(sel, g)
    elif method == "dyadic":
        D = dyadic_duals(g.window, g.a, sel.M_g).restrict(sel, g)
    else:
        raise ConfigError(f"unknown synthesis method {method!r}")
    if dual_out is not None:
        save_dual_frame(dual_out, D)
    return dual_reconstruct(C, D)


def cmd_synthesize(args) -> int:
    C, g, stored_rate = load_coefficients(args.coeffs)
    x_hat = synthesize(C, g, args.method, args.dual_out)
    rate = args.sample_rate or stored_rate or DEFAULT_SAMPLE_RATE
    write_wav(args.out, x_hat, rate)
    logger.info("synthesis via %s: %d samples", args.method, x_hat.size)
    if args.reference is not None:
        x_ref, _ = read_wav(args.reference, g.L, fit=args.fit)
        print(f"max residual: {float(np.max(np.abs(x_hat - x_ref))):.3e}")
    print(f"wrote {args.out}")
    return 0


def _resolve_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    seed = int(np.random.SeedSequence().entropy % 2 ** 63)
    logger.warning("no --seed given; using generated seed %d", seed)
    print(f"seed: {seed}")
    return seed


def _experiment_config(args, length: Optional[int]) -> ExperimentConfig:
    base = load_experiment_config(args.config) if args.config is not None else ExperimentConfig()
    data = base.model_dump()
    data["seed"] = _resolve_seed(args.seed)
    if args.snr is not None:
        data["snr_db"] = args.snr
    if args.rule is not None:
        data["rules"] = args.rule
    if args.trials is not None:
        data["trials"] = args.trials
    if length is not None:
        data["length"] = length
    if args.methods:
        known = {m["name"]: m for m in data["methods"]}
        missing = [name for name in args.methods if name not in known]
        if missing:
            raise ConfigError(f"unknown methods {missing}; configured: {sorted(known)}")
        data["methods"] = [known[name] for name in args.methods]
    return ExperimentConfig.model_validate(data)


def cmd_denoise(args) -> int:
    if args.input is not None:
        return _enhance_file(args)

    x_clean = None
    length = args.length
    if args.clean is not None:
        x_clean, _ = read_wav(args.clean, args.length, args.fit)
        length = x_clean.size
    config = _experiment_config(args, length)
    report = run_experiment(config, threads=args.settings.threads, x=x_clean)

    if args.report is not None:
        write_report_json(report, args.report)
    if args.csv is not None:
        write_report_csv(report, args.csv)
    if args.pdf is not None:
        write_report_pdf(report, args.pdf)

    print(f"{'method':<12} {'snr':>6} {'rule':<10} {'gain dB':>9} {'std':>7}")
    for res in report.results:
        snr = "inf" if res.snr_db is None else f"{res.snr_db:g}"
        print(f"{res.method:<12} {snr:>6} {res.rule:<10} {res.mean_gain_db:9.3f} {res.std_gain_db:7.3f}")
    print(f"payload hash: {report.payload_hash}")
    return 0


def _enhance_file(args) -> int:
    y, rate = read_wav(args.input, args.length, args.fit)
    x_clean = None
    if args.reference is not None:
        x_clean, _ = read_wav(args.reference, y.size, args.fit)
    rule = args.rule[0] if args.rule else "two-stage"
    method = MethodSpec(name=args.algo, kind=args.algo, window=_window_spec(args), r_max=args.rmax)
    result = enhance(y, method, rule, sigma=args.noise_sigma, x_clean=x_clean)
    if args.out is not None:
        write_wav(args.out, result.x_hat, rate)
        print(f"wrote {args.out}")
    print(f"{len(result.partition.pieces)} pieces, noise sigma {result.sigma:.4g}")
    if result.gain_db is not None:
        print(f"SNR gain: {result.gain_db:.3f} dB")
    return 0


def cmd_bench(args) -> int:
    report = run_bench(args.sizes, seed=args.seed, r_max=args.rmax)
    print(f"{'L':>7} {'path':<15} {'measured':>12} {'formula':>12} {'ratio':>6} {'seconds':>9}")
    for row in report.rows:
        print(f"{row.L:>7} {row.path:<15} {row.measured:>12} {row.formula:>12} {row.ratio:6.2f} {row.seconds:9.4f}")
    for path, slope in report.exponents().items():
        print(f"time exponent {path}: {slope:.2f}")
    if args.csv is not None:
        write_bench_csv(report, args.csv)
    return 0


# ============================
# Parser
# ============================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="supframe", description="Adaptive short-time Fourier analysis with superposition frames.")
    parser.add_argument("--threads", type=int, help="worker threads (env SUPFRAME_THREADS, default: CPU count)")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR (env SUPFRAME_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="superposition analysis of a signal")
    _add_signal_args(p)
    _add_window_args(p)
    p.add_argument("--mode", choices=["local", "global", "dyadic"])
    p.add_argument("--partition", type=Path, help="partition JSON (default: no merging)")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--spectrogram", type=Path, help="spectrogram CSV (default: next to --out)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("adapt", help="choose a partition for a signal")
    _add_signal_args(p)
    _add_window_args(p)
    p.add_argument("--algo", choices=["greedy", "dp"], default="greedy")
    p.add_argument("--cost", choices=sorted(SEGMENT_COSTS), default="entropy", help="segment cost of the dp search")
    p.add_argument("--rmax", type=int, default=DEFAULT_R_MAX)
    p.add_argument("--reset", choices=["restart", "skip"], default="restart")
    p.add_argument("--mode", choices=["local", "global", "dyadic"], help="mode recorded with the partition")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--scores", type=Path, help="per-piece score CSV (default: next to --out)")
    p.set_defaults(func=cmd_adapt)

    p = sub.add_parser("synthesize", help="reconstruct a signal from coefficients")
    p.add_argument("--coeffs", type=Path, required=True)
    p.add_argument("--method", choices=SYNTHESIS_METHODS, default="dual")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--reference", type=Path, help="WAV to compare against; prints the max residual")
    p.add_argument("--fit", action="store_true", help="crop or zero-pad the reference to L")
    p.add_argument("--sample-rate", type=int)
    p.add_argument("--dual-out", type=Path, help="also write the dual frame JSON")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("denoise", help="Wiener denoising experiments or enhancement")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--synthetic", action="store_true", help="experiment on the synthetic signal")
    src.add_argument("--clean", type=Path, help="experiment on a clean WAV with seeded noise")
    src.add_argument("--input", type=Path, help="enhance a noisy WAV")
    p.add_argument("--config", type=Path, help="experiment config JSON")
    p.add_argument("--snr", type=float, nargs="+", help="input SNR levels in dB")
    p.add_argument("--rule", choices=["oracle", "two-stage"], action="append")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--methods", nargs="+", help="subset of configured method names")
    p.add_argument("--length", type=int)
    p.add_argument("--fit", action="store_true")
    p.add_argument("--report", type=Path, help="JSON report")
    p.add_argument("--csv", type=Path, help="CSV summary table")
    p.add_argument("--pdf", type=Path, help="PDF summary")
    p.add_argument("--reference", type=Path, help="clean WAV for --input (enables oracle rule and gain)")
    p.add_argument("--noise-sigma", type=float, help="noise standard deviation for --input")
    p.add_argument("--algo", choices=["greedy", "dp", "fixed"], default="greedy")
    p.add_argument("--rmax", type=int, default=DEFAULT_R_MAX)
    p.add_argument("--out", type=Path, help="enhanced WAV for --input")
    _add_window_args(p)
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("bench", help="operation counts and wall time")
    p.add_argument("--sizes", type=int, nargs="*", default=[])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rmax", type=int, default=DEFAULT_R_MAX)
    p.add_argument("--csv", type=Path)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = Settings.from_env(threads=args.threads, log_level=args.log_level)
        configure_logging(settings)
        args.settings = settings
        with sp_fft.set_workers(settings.threads):
            return args.func(args)
    except SupframeError as e:
        print(f"error: {e.detail}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or e.title
        print(f"error: {where}: {first['msg']}", file=sys.stderr)
        return 2
