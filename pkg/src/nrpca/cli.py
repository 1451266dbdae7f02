"""Command-line front end.

Five subcommands: `estimate` (corrected first-component estimation from
a CSV matrix), `ci` (contribution-ratio interval from a matrix or from
summary numbers), `test` (two-sample equality tests), `simulate` (the
Monte Carlo harness), and `power` (asymptotic powers). Matrices are
rows-as-variables; `--transpose` covers the other orientation and
`--standardize` rescales each variable to unit sample variance first.

Output goes to stdout (or `--out`) as JSON, except `simulate`, which
defaults to one CSV row per dimension. All randomness flows from
`--seed` (default 1729); `--workers`, or the NRPCA_WORKERS environment
variable when the flag is absent, changes wall time but never results.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass

from .dataio import load_matrix, standardize_rows
from .estimators import NrEstimate, nr_estimate
from .inference import (
    asymptotic_power,
    contribution_ci,
    jarque_bera,
    test_f1,
    test_f2,
    test_f3,
)
from .linalg import DataMatrix
from .simulation import run_estimation_mc, run_test_mc

__all__ = ["DEFAULT_SEED", "WORKERS_ENV", "RunConfig", "main"]

DEFAULT_SEED = 1729
WORKERS_ENV = "NRPCA_WORKERS"


@dataclass(frozen=True)
class RunConfig:
    """Validated arguments for one command invocation."""

    command: str
    fmt: str = "json"
    out: str | None = None
    input: str | None = None
    input2: str | None = None
    standardize: bool = False
    transpose: bool = False
    alpha: float = 0.05
    alternative: str = "two-sided"
    mode: str = "f1"
    lambda_tilde: float | None = None
    kappa: float | None = None
    n_override: int | None = None
    study: str = "pc"
    model: str = "a"
    d_values: tuple[int, ...] = ()
    n: int = 10
    n1: int = 10
    n2: int = 20
    reps: int | None = None
    seed: int = DEFAULT_SEED
    workers: int = 1
    nu1: int | None = None
    nu2: int | None = None
    ratio: float | None = None
    h: float = 1.0
    gamma: float = 1.0

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        fields = {
            name: getattr(args, name)
            for name in cls.__dataclass_fields__
            if hasattr(args, name)
        }
        workers = fields.get("workers")
        if workers is None:
            workers = int(os.environ.get(WORKERS_ENV, "1"))
        if workers < 1:
            raise ValueError(f"workers must be at least 1, got {workers}")
        fields["workers"] = workers
        cfg = cls(**fields)
        if cfg.command == "ci":
            have_summary = (
                cfg.lambda_tilde is not None
                and cfg.kappa is not None
                and cfg.n_override is not None
            )
            if cfg.input is None and not have_summary:
                raise ValueError(
                    "ci needs either --input or all of "
                    "--lambda-tilde, --kappa and --n"
                )
            if cfg.input is not None and have_summary:
                raise ValueError("ci takes --input or summary numbers, not both")
        if cfg.command == "test" and cfg.mode != "f1" and cfg.alternative != "two-sided":
            raise ValueError(
                f"mode {cfg.mode} supports only the two-sided alternative"
            )
        return cfg


def _prepared_matrix(path: str, cfg: RunConfig) -> DataMatrix:
    matrix = load_matrix(path)
    if cfg.transpose:
        matrix = DataMatrix(matrix.values.T.copy())
    if cfg.standardize:
        matrix = standardize_rows(matrix)
    return matrix


def _flat_items(record: dict, prefix: str = "") -> list[tuple[str, str]]:
    items: list[tuple[str, str]] = []
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            items.extend(_flat_items(value, f"{name}."))
        elif isinstance(value, (list, tuple)):
            items.append((name, ";".join(repr(float(v)) for v in value)))
        else:
            items.append((name, "" if value is None else str(value)))
    return items


def _render(payload, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    rows = payload["rows"] if isinstance(payload, dict) and "rows" in payload else None
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if rows is not None:
        writer.writerow(rows[0].keys())
        for row in rows:
            writer.writerow([str(v) for v in row.values()])
    else:
        flat = _flat_items(payload)
        writer.writerow([k for k, _ in flat])
        writer.writerow([v for _, v in flat])
    return buffer.getvalue()


def _emit(payload, cfg: RunConfig) -> None:
    text = _render(payload, cfg.fmt)
    if cfg.out:
        with open(cfg.out, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _estimate_record(est: NrEstimate) -> dict:
    jb = jarque_bera(est.scores_tilde) if est.n >= 8 else None
    return {
        "d": est.d,
        "n": est.n,
        "lambda_tilde_1": float(est.lambda_tilde[0]),
        "lambda_hat_1": float(est.lambda_hat[0]),
        "kappa_tilde": est.kappa_tilde,
        "trace_dual": est.trace_dual,
        "contribution_ratio": est.contribution_ratio,
        "h_tilde_norm_sq": est.h_tilde_norm_sq,
        "scores_tilde": est.scores_tilde.tolist(),
        "scores_hat": est.scores_hat.tolist(),
        "jb_statistic": None if jb is None else jb.statistic,
        "jb_p_value": None if jb is None else jb.p_value,
    }


def _cmd_estimate(cfg: RunConfig) -> None:
    est = nr_estimate(_prepared_matrix(cfg.input, cfg))
    _emit(_estimate_record(est), cfg)


def _cmd_ci(cfg: RunConfig) -> None:
    if cfg.input is not None:
        est = nr_estimate(_prepared_matrix(cfg.input, cfg))
        lt1 = float(est.lambda_tilde[0])
        kappa = est.kappa_tilde
        n = est.n
    else:
        lt1, kappa, n = cfg.lambda_tilde, cfg.kappa, cfg.n_override
    result = contribution_ci(lt1, kappa, n, cfg.alpha)
    record = {"lambda_tilde_1": lt1, "kappa_tilde": kappa, "n": n}
    record.update(asdict(result))
    _emit(record, cfg)


def _cmd_test(cfg: RunConfig) -> None:
    est1 = nr_estimate(_prepared_matrix(cfg.input, cfg))
    est2 = nr_estimate(_prepared_matrix(cfg.input2, cfg))
    if cfg.mode == "f1":
        outcome = test_f1(
            float(est1.lambda_tilde[0]),
            float(est2.lambda_tilde[0]),
            est1.n,
            est2.n,
            cfg.alpha,
            cfg.alternative,
        )
    elif cfg.mode == "f2":
        outcome = test_f2(est1, est2, cfg.alpha)
    else:
        outcome = test_f3(est1, est2, cfg.alpha)
    record = {"mode": cfg.mode}
    record.update(asdict(outcome))
    record["components"] = {
        k: v for k, v in record["components"].items() if v is not None
    }
    _emit(record, cfg)


def _cmd_simulate(cfg: RunConfig) -> None:
    if cfg.study == "pc":
        summary = run_estimation_mc(
            cfg.model,
            list(cfg.d_values),
            n=cfg.n,
            reps=2000 if cfg.reps is None else cfg.reps,
            seed=cfg.seed,
            workers=cfg.workers,
        )
    else:
        summary = run_test_mc(
            list(cfg.d_values),
            n1=cfg.n1,
            n2=cfg.n2,
            reps=4000 if cfg.reps is None else cfg.reps,
            alpha=cfg.alpha,
            seed=cfg.seed,
            workers=cfg.workers,
        )
    payload = {
        "study": summary.study,
        "seed": summary.seed,
        "rows": summary.as_records(),
    }
    _emit(payload, cfg)


def _cmd_power(cfg: RunConfig) -> None:
    record = {
        "nu1": cfg.nu1,
        "nu2": cfg.nu2,
        "lambda_ratio": cfg.ratio,
        "h": cfg.h,
        "gamma": cfg.gamma,
        "alpha": cfg.alpha,
    }
    for which in ("f1", "f2", "f3"):
        record[which] = asymptotic_power(
            cfg.nu1, cfg.nu2, cfg.ratio, cfg.h, cfg.gamma, cfg.alpha, which
        )
    _emit(record, cfg)


def _add_output_flags(parser: argparse.ArgumentParser, default_fmt: str) -> None:
    parser.add_argument(
        "--format", dest="fmt", choices=("json", "csv"), default=default_fmt
    )
    parser.add_argument("--out", default=None, help="write output to this path")


def _add_matrix_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--standardize",
        action="store_true",
        help="scale each variable (row) to unit sample variance",
    )
    parser.add_argument(
        "--transpose",
        action="store_true",
        help="input is samples x variables; transpose after loading",
    )


def _parse_d_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("dimension list is empty")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nrpca",
        description="Noise-reduced first principal component estimation, "
        "confidence intervals, and covariance equality tests for wide data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="estimate the first component")
    p_est.add_argument("--input", required=True, help="CSV matrix path")
    _add_matrix_flags(p_est)
    _add_output_flags(p_est, "json")

    p_ci = sub.add_parser("ci", help="contribution-ratio confidence interval")
    p_ci.add_argument("--input", default=None, help="CSV matrix path")
    p_ci.add_argument("--lambda-tilde", dest="lambda_tilde", type=float)
    p_ci.add_argument("--kappa", type=float)
    p_ci.add_argument("--n", dest="n_override", type=int)
    p_ci.add_argument("--alpha", type=float, default=0.05)
    _add_matrix_flags(p_ci)
    _add_output_flags(p_ci, "json")

    p_test = sub.add_parser("test", help="two-sample covariance equality test")
    p_test.add_argument("--input", "--input1", dest="input", required=True)
    p_test.add_argument("--input2", required=True)
    p_test.add_argument("--mode", choices=("f1", "f2", "f3"), default="f1")
    p_test.add_argument(
        "--alternative", choices=("two-sided", "less"), default="two-sided"
    )
    p_test.add_argument("--alpha", type=float, default=0.05)
    _add_matrix_flags(p_test)
    _add_output_flags(p_test, "json")

    p_sim = sub.add_parser("simulate", help="run the Monte Carlo harness")
    p_sim.add_argument("--study", choices=("pc", "tests"), default="pc")
    p_sim.add_argument("--model", choices=("a", "b"), default="a")
    p_sim.add_argument(
        "--d",
        dest="d_values",
        type=_parse_d_list,
        required=True,
        help="comma-separated dimensions, e.g. 8,64,512",
    )
    p_sim.add_argument("--n", type=int, default=10)
    p_sim.add_argument("--n1", type=int, default=10)
    p_sim.add_argument("--n2", type=int, default=20)
    p_sim.add_argument(
        "--R", "--reps", dest="reps", type=int, default=None,
        help="replications (default 2000 for pc, 4000 for tests)",
    )
    p_sim.add_argument("--alpha", type=float, default=0.05)
    p_sim.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_sim.add_argument(
        "--workers", type=int, default=None,
        help=f"process count; default ${WORKERS_ENV} or 1",
    )
    _add_output_flags(p_sim, "csv")

    p_pow = sub.add_parser("power", help="asymptotic power of the three tests")
    p_pow.add_argument("--nu1", type=int, required=True)
    p_pow.add_argument("--nu2", type=int, required=True)
    p_pow.add_argument("--ratio", type=float, required=True,
                       help="true first-eigenvalue ratio")
    p_pow.add_argument("--h", type=float, default=1.0)
    p_pow.add_argument("--gamma", type=float, default=1.0)
    p_pow.add_argument("--alpha", type=float, default=0.05)
    _add_output_flags(p_pow, "json")

    return parser


_HANDLERS = {
    "estimate": _cmd_estimate,
    "ci": _cmd_ci,
    "test": _cmd_test,
    "simulate": _cmd_simulate,
    "power": _cmd_power,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        _HANDLERS[cfg.command](cfg)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
