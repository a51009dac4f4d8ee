"""Command-line surface: seeded experiment runner and report writer.

Every subcommand is a pure function of (parameters, seeds): reports are
byte-identical across runs and across thread counts.  XORHALF_THREADS caps
the number of worker threads used for multi-seed batches.
"""
from __future__ import annotations

import argparse
import hashlib
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .common import rng_stream
from .formats import emit_sample, emit_xnf, parse_xnf
from .formulas import brute_force_value, gen_planted_formula, gen_random_formula
from .learners import distinguisher_wrapper, perceptron_fit, perceptron_learner, gf2_refute
from .polyrealize import interpolate_xor_poly, xor_disagreement_bound
from .pseudorandom import bound_pseudorandom_failure, pseudorandom_test
from .reduction import PipelineParams, preset_params, run_pipeline
from .reports import Report
from .sqsim import ExplicitDistribution, SparseParityTarget, SqOracle, translate_query


@dataclass
class ExperimentConfig:
    """One subcommand invocation: parameters, seed list, output paths."""

    command: str
    params: dict
    seeds: list[int]
    out: Optional[str] = None
    preset: Optional[str] = None

    def __post_init__(self):
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct")
        self.seeds = sorted(self.seeds)


def _thread_count(n_seeds: int) -> int:
    raw = os.environ.get("XORHALF_THREADS", "1")
    try:
        threads = max(1, int(raw))
    except ValueError:
        threads = 1
    return min(threads, max(1, n_seeds))


def _per_seed(seeds: list[int], work: Callable[[int], dict]) -> dict[int, dict]:
    """Run per-seed work, possibly in parallel; results keyed by seed."""
    threads = _thread_count(len(seeds))
    results: dict[int, dict] = {}
    if threads == 1:
        for seed in seeds:
            results[seed] = _guarded(work, seed)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {seed: pool.submit(_guarded, work, seed) for seed in seeds}
            for seed, fut in futures.items():
                results[seed] = fut.result()
    return results


def _guarded(work: Callable[[int], dict], seed: int) -> dict:
    try:
        return work(seed)
    except Exception as exc:  # noqa: BLE001 - recorded in the report
        return {"error": f"{type(exc).__name__}: {exc}"}


def _emit_rows(report: Report, seed: int, rows: dict) -> None:
    for key, value in rows.items():
        report.add_seed(seed, key, value)


def _seed_path(pattern: str, seed: int, multi: bool) -> str:
    if "{seed}" in pattern:
        return pattern.replace("{seed}", str(seed))
    if multi:
        raise ValueError("--out needs a {seed} placeholder for multiple seeds")
    return pattern


# ---------------------------------------------------------------------------
# subcommand implementations


def _cmd_gen_random(config: ExperimentConfig) -> Report:
    p = config.params
    report = Report("gen-random", p, config.seeds)
    multi = len(config.seeds) > 1
    for seed in config.seeds:
        J = gen_random_formula(p["n"], p["m"], p["K"], seed)
        text = emit_xnf(J)
        if config.out:
            path = _seed_path(config.out, seed, multi)
            with open(path, "w") as fh:
                fh.write(text)
            report.add_seed(seed, "file", path)
        else:
            sys.stdout.write(text)
        report.add_seed(seed, "m", J.m)
    return report


def _cmd_gen_planted(config: ExperimentConfig) -> Report:
    p = config.params
    report = Report("gen-planted", p, config.seeds)
    multi = len(config.seeds) > 1
    for seed in config.seeds:
        inst = gen_planted_formula(p["n"], p["m"], p["K"], p["eta"], seed)
        assignment = "".join("+" if v == 1 else "-" for v in inst.planted.values)
        header = (f"c planted {assignment}\n"
                  f"c flipped {','.join(str(i) for i in sorted(inst.flipped_indices))}\n")
        text = header + emit_xnf(inst.formula)
        if config.out:
            path = _seed_path(config.out, seed, multi)
            with open(path, "w") as fh:
                fh.write(text)
            report.add_seed(seed, "file", path)
        else:
            sys.stdout.write(text)
        report.add_seed(seed, "planted", assignment)
        report.add_seed(seed, "flipped_count", len(inst.flipped_indices))
    return report


def _read_formula(path: str):
    with open(path) as fh:
        return parse_xnf(fh.read())


def _cmd_value(config: ExperimentConfig) -> Report:
    p = config.params
    report = Report("value", p, config.seeds)
    J = _read_formula(p["infile"])
    psi, value = brute_force_value(J, p["limit"])
    report.add("n", J.n)
    report.add("m", J.m)
    report.add("K", J.K)
    report.add("value", value)
    report.add("argmax", "".join("+" if v == 1 else "-" for v in psi.values))
    return report


def _cmd_refute(config: ExperimentConfig) -> Report:
    p = config.params
    report = Report("refute", p, config.seeds)
    if p.get("infile"):
        J = _read_formula(p["infile"])
        result = gf2_refute(J)
        report.add("satisfiable", result.satisfiable)
        if result.satisfiable:
            report.add("assignment", "".join(
                "+" if v == 1 else "-" for v in result.assignment.values))
        else:
            report.add("certificate", list(result.certificate))
        return report

    def work(seed: int) -> dict:
        if p["mode"] == "planted":
            J = gen_planted_formula(p["n"], p["m"], p["K"], p["eta"], seed).formula
        else:
            J = gen_random_formula(p["n"], p["m"], p["K"], seed)
        result = gf2_refute(J)
        rows = {"satisfiable": result.satisfiable}
        if not result.satisfiable:
            rows["certificate_size"] = len(result.certificate)
        return rows

    results = _per_seed(config.seeds, work)
    sat = 0
    for seed in config.seeds:
        _emit_rows(report, seed, results[seed])
        sat += 1 if results[seed].get("satisfiable") else 0
    report.add("sat_count", sat)
    report.add("unsat_count", len(config.seeds) - sat)
    return report


def _pipeline_params(p: dict, preset: Optional[str], seed: int) -> PipelineParams:
    if preset:
        base = preset_params(preset, p["n"], p["K"], eta=p["eta"], seed=seed,
                             C=p.get("C", 4))
        overrides = {}
        for key in ("q", "d", "t"):
            if p.get(key) is not None:
                overrides[key] = p[key]
        if p.get("tau") is not None:
            overrides["tau"] = p["tau"]
        if overrides:
            from dataclasses import replace
            base = replace(base, **overrides)
        return base
    return PipelineParams(
        n=p["n"], K=p["K"], q=p["q"], d=p["d"], t=p["t"], tau=p["tau"],
        eta=p["eta"], seed=seed,
    )


def _cmd_reduce(config: ExperimentConfig) -> Report:
    p = config.params
    report = Report("reduce", p, config.seeds)
    lift_mode = "strict-paper" if p["strict_paper_rho"] else "canonical"
    multi = len(config.seeds) > 1

    def work(seed: int) -> dict:
        if p.get("infile"):
            instance = _read_formula(p["infile"])
            shape = {**p, "n": instance.n, "K": instance.K}
        else:
            instance = gen_planted_formula(p["n"], p["m"], p["K"], p["eta"], seed)
            shape = p
        params = _pipeline_params(shape, config.preset, seed)
        result = run_pipeline(
            instance, params, lift_mode=lift_mode,
            streaming_freq=p["streaming_freq"])
        rows = {
            "entries": result.labeled.m,
            "filter_verdict": result.filter_outcome.verdict,
            "filter_max_deviation": result.filter_outcome.report.max_deviation,
            "ternary_dim": result.ternary.dim,
            "binary_dim": result.binary_dim,
            "binary_materialized": result.binary is not None,
        }
        if result.eta_prime_bound is not None:
            rows["eta_prime"] = result.eta_prime_bound.value
            rows["eta_prime_vacuous"] = result.eta_prime_bound.vacuous
        else:
            rows["eta_prime_note"] = result.eta_prime_note
        if result.witness is not None:
            rows["witness_error"] = result.witness_error
            rows["mismatch_fraction"] = result.mismatch_fraction
            rows["unbalanced_fraction"] = result.unbalanced_fraction
            rows["weight_l1"] = result.witness.margin_stats.weight_l1
            margin = result.witness.margin_stats.min_correct_margin
            rows["min_correct_margin"] = margin if margin is not None else "none"
        if p.get("emit_sample"):
            path = _seed_path(p["emit_sample"], seed, multi)
            sample = result.ternary if p["format"] == "ternary" else result.binary
            if sample is None:
                rows["sample_note"] = "binary sample not materialized"
            else:
                with open(path, "w") as fh:
                    fh.write(emit_sample(sample))
                rows["sample_file"] = path
        return rows

    results = _per_seed(config.seeds, work)
    errors = []
    for seed in config.seeds:
        _emit_rows(report, seed, results[seed])
        if "witness_error" in results[seed]:
            errors.append(results[seed]["witness_error"])
    if errors:
        report.add("mean_witness_error", sum(errors, Fraction(0)) / len(errors))
    return report


def _cmd_check_pseudorandom(config: ExperimentConfig) -> Report:
    p = config.params
    report = Report("check-pseudorandom", p, config.seeds)

    def work(seed: int) -> dict:
        if p.get("infile"):
            J = _read_formula(p["infile"])
        else:
            J = gen_random_formula(p["n"], p["m"], p["K"], seed)
        fr = pseudorandom_test(J, p["t"], p["tau"], streaming=p["streaming_freq"])
        bound = bound_pseudorandom_failure(J.n, J.K, J.m, float(p["tau"]))
        return {
            "passed": fr.passed,
            "max_deviation": fr.max_deviation,
            "tested_count": fr.tested_count,
            "mode": fr.mode,
            "failure_bound": bound.value,
            "failure_bound_vacuous": bound.vacuous,
        }

    results = _per_seed(config.seeds, work)
    passed = 0
    for seed in config.seeds:
        _emit_rows(report, seed, results[seed])
        passed += 1 if results[seed].get("passed") else 0
    report.add("pass_count", passed)
    return report


def _cmd_realize_poly(config: ExperimentConfig) -> Report:
    p = config.params
    report = Report("realize-poly", p, config.seeds)
    real = interpolate_xor_poly(p["K"], p["d"])
    report.add("node_set", list(real.node_set))
    report.add("degree", real.qpoly.degree)
    for i, c in enumerate(real.qpoly.coefficients):
        report.add(f"coefficient.{i}", c)
    bound = xor_disagreement_bound(p["K"], p["d"], p["mu"])
    report.add("disagreement_bound", bound.value)
    report.add("disagreement_bound_vacuous", bound.vacuous)
    return report


def _read_sample(path: str):
    from .formats import parse_sample
    with open(path) as fh:
        return parse_sample(fh.read())


def _cmd_fit(config: ExperimentConfig) -> Report:
    p = config.params
    report = Report("fit", p, config.seeds)
    S = _read_sample(p["infile"])

    def work(seed: int) -> dict:
        w, error = perceptron_fit(S, p["epochs"], seed)
        return {
            "training_error": error,
            "weight_l1": float(abs(w).sum()),
            "nonzero_weights": int((w != 0).sum()),
        }

    results = _per_seed(config.seeds, work)
    for seed in config.seeds:
        _emit_rows(report, seed, results[seed])
    return report


def _cmd_distinguish(config: ExperimentConfig) -> Report:
    p = config.params
    report = Report("distinguish", p, config.seeds)
    S = _read_sample(p["infile"])
    learner = perceptron_learner(p["epochs"])

    def work(seed: int) -> dict:
        verdict = distinguisher_wrapper(S, learner, p["c"], seed=seed)
        rows = {
            "verdict": verdict.label,
            "error": verdict.error,
            "threshold": verdict.threshold,
        }
        if verdict.diagnostic:
            rows["diagnostic"] = verdict.diagnostic
        return rows

    results = _per_seed(config.seeds, work)
    for seed in config.seeds:
        _emit_rows(report, seed, results[seed])
    return report


def _hash_query(query_seed: int):
    def Q(x: tuple, y: int) -> int:
        h = hashlib.blake2s(digest_size=1)
        h.update(query_seed.to_bytes(8, "little", signed=True))
        h.update(bytes((v + 1) // 2 for v in x))
        h.update(bytes([(y + 1) // 2]))
        return 1 if h.digest()[0] & 1 else -1
    return Q


def _cmd_sq_sim(config: ExperimentConfig) -> Report:
    p = config.params
    report = Report("sq-sim", p, config.seeds)

    def work(seed: int) -> dict:
        rng = rng_stream(seed, "sq-support")
        support = frozenset(
            int(i) for i in rng.permutation(p["n"])[: p["parity_k"]])
        target = SparseParityTarget(p["n"], support)
        dist = ExplicitDistribution.uniform_parity(target)
        oracle = SqOracle(dist, Fraction(p["lam"]), policy=p["policy"], seed=seed)
        max_dev = Fraction(0)
        for qi in range(p["queries"]):
            Q = _hash_query(qi)
            answer = oracle.query(Q)
            max_dev = max(max_dev, abs(answer - dist.expectation(Q)))
        rows = {
            "support": sorted(support),
            "max_answer_deviation": max_dev,
            "tolerance_respected": max_dev <= Fraction(p["lam"]),
        }
        if p.get("lift_d") is not None:
            from .reduction import MonomialIndex, ternary_to_binary, _rho_sparse, SparseTernary
            idx = MonomialIndex(p["n"], p["lift_d"], padded=False)

            def lift(x: tuple) -> tuple:
                dense = [0] * idx.ambient
                for pos, value in _rho_sparse(SparseTernary.from_dense(x), idx):
                    dense[pos] = value
                return tuple(int(v) for v in ternary_to_binary(dense))

            lifted_oracle = SqOracle(
                dist.map_instances(lift), Fraction(p["lam"]),
                policy=p["policy"], seed=seed)
            agree = True
            for qi in range(p["queries"]):
                Q = _hash_query(1_000_000 + qi)
                direct = lifted_oracle.query(Q)
                translated = oracle.query(translate_query(Q, lift))
                if p["policy"] == "rounding" and direct != translated:
                    agree = False
            rows["lift_translation_exact"] = agree
        return rows

    results = _per_seed(config.seeds, work)
    for seed in config.seeds:
        _emit_rows(report, seed, results[seed])
    return report


_COMMANDS = {
    "gen-random": _cmd_gen_random,
    "gen-planted": _cmd_gen_planted,
    "value": _cmd_value,
    "refute": _cmd_refute,
    "reduce": _cmd_reduce,
    "check-pseudorandom": _cmd_check_pseudorandom,
    "realize-poly": _cmd_realize_poly,
    "fit": _cmd_fit,
    "distinguish": _cmd_distinguish,
    "sq-sim": _cmd_sq_sim,
}


def run_experiment(config: ExperimentConfig) -> Report:
    """Execute one subcommand across its seeds and return the report."""
    handler = _COMMANDS.get(config.command)
    if handler is None:
        raise ValueError(f"unknown command {config.command!r}")
    return handler(config)


# ---------------------------------------------------------------------------
# argument parsing


def _add_seed_args(sp) -> None:
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--seeds", type=str, default=None,
                    help="comma-separated seed list, overrides --seed")


def _add_shape_args(sp, *, m: bool = True) -> None:
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--K", type=int, required=True)
    if m:
        sp.add_argument("--m", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xorhalf",
        description="Parity-formula generators, reduction pipeline, and "
                    "verification experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen-random", help="uniform random formula(s)")
    _add_shape_args(sp)
    _add_seed_args(sp)
    sp.add_argument("--out", type=str, default=None,
                    help="output path; use {seed} for multi-seed batches")

    sp = sub.add_parser("gen-planted", help="planted formula(s) with noise")
    _add_shape_args(sp)
    sp.add_argument("--eta", type=Fraction, default=Fraction(0))
    _add_seed_args(sp)
    sp.add_argument("--out", type=str, default=None)

    sp = sub.add_parser("value", help="exhaustive value of a formula file")
    sp.add_argument("--in", dest="infile", type=str, required=True)
    sp.add_argument("--limit", type=int, default=24)
    sp.add_argument("--out", type=str, default=None)

    sp = sub.add_parser("refute", help="GF(2) elimination refuter")
    sp.add_argument("--in", dest="infile", type=str, default=None)
    sp.add_argument("--mode", choices=("random", "planted"), default="random")
    sp.add_argument("--n", type=int)
    sp.add_argument("--K", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--eta", type=Fraction, default=Fraction(0))
    _add_seed_args(sp)
    sp.add_argument("--out", type=str, default=None)

    sp = sub.add_parser("reduce", help="run the five-stage pipeline")
    sp.add_argument("--in", dest="infile", type=str, default=None,
                    help="input formula; otherwise planted instances are generated")
    sp.add_argument("--n", type=int)
    sp.add_argument("--K", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--eta", type=Fraction, default=Fraction(0))
    sp.add_argument("--q", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--t", type=int)
    sp.add_argument("--tau", type=Fraction)
    sp.add_argument("--preset", choices=("case1", "case2"), default=None)
    sp.add_argument("--C", type=int, default=4,
                    help="bundle-size constant for presets (q ~ C*K)")
    sp.add_argument("--strict-paper-rho", action="store_true")
    sp.add_argument("--streaming-freq", action="store_true")
    sp.add_argument("--emit-sample", type=str, default=None)
    sp.add_argument("--format", choices=("ternary", "binary"), default="ternary")
    _add_seed_args(sp)
    sp.add_argument("--out", type=str, default=None)

    sp = sub.add_parser("check-pseudorandom", help="partial-tuple frequency scan")
    sp.add_argument("--in", dest="infile", type=str, default=None)
    sp.add_argument("--n", type=int)
    sp.add_argument("--K", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--tau", type=Fraction, required=True)
    sp.add_argument("--streaming-freq", action="store_true")
    _add_seed_args(sp)
    sp.add_argument("--out", type=str, default=None)

    sp = sub.add_parser("realize-poly", help="interpolated parity realization")
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--mu", type=float, default=0.0)
    sp.add_argument("--out", type=str, default=None)

    sp = sub.add_parser("fit", help="perceptron on a sample file")
    sp.add_argument("--in", dest="infile", type=str, required=True)
    sp.add_argument("--epochs", type=int, default=50)
    _add_seed_args(sp)
    sp.add_argument("--out", type=str, default=None)

    sp = sub.add_parser("distinguish", help="learner-to-distinguisher wrapper")
    sp.add_argument("--in", dest="infile", type=str, required=True)
    sp.add_argument("--c", type=float, default=0.5)
    sp.add_argument("--epochs", type=int, default=50)
    _add_seed_args(sp)
    sp.add_argument("--out", type=str, default=None)

    sp = sub.add_parser("sq-sim", help="statistical-query oracle demo")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--parity-k", type=int, required=True)
    sp.add_argument("--lam", type=Fraction, default=Fraction(1, 100))
    sp.add_argument("--queries", type=int, default=100)
    sp.add_argument("--policy", choices=("rounding", "adversarial-seeded"),
                    default="rounding")
    sp.add_argument("--lift-d", type=int, default=None)
    _add_seed_args(sp)
    sp.add_argument("--out", type=str, default=None)

    return parser


def _seeds_from(args) -> list[int]:
    if getattr(args, "seeds", None):
        return [int(tok) for tok in args.seeds.split(",") if tok.strip()]
    return [getattr(args, "seed", 0)]


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    seeds = _seeds_from(args)
    params = {
        key: value for key, value in vars(args).items()
        if key not in ("command", "seed", "seeds", "out", "preset")
        and value is not None
    }
    preset = getattr(args, "preset", None)
    if args.command == "reduce" and not preset:
        missing = [k for k in ("q", "d", "t", "tau") if params.get(k) is None]
        if missing:
            parser.error(f"reduce needs --preset or explicit {missing}")
    if args.command in ("reduce", "refute", "check-pseudorandom"):
        generator_keys = ("n", "K", "m")
        if not params.get("infile") and any(
                params.get(k) is None for k in generator_keys):
            parser.error(f"{args.command} needs --in or --n/--K/--m")
    try:
        config = ExperimentConfig(
            command=args.command, params=params, seeds=seeds,
            out=getattr(args, "out", None), preset=preset)
        report = run_experiment(config)
    except (ValueError, OSError) as exc:
        parser.error(str(exc))
    if args.command in ("gen-random", "gen-planted"):
        # --out named the formula files; the report goes to stdout, and only
        # when it will not interleave with formula text
        if config.out:
            report.write(None)
    else:
        report.write(config.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
