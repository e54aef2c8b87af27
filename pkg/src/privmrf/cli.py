"""Command line interface: sampling, learning, release, structure recovery,
budget arithmetic, and the experiment harness."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .experiment import plot_data, results_csv, run_experiment, spec_from_json, summarize
from .learners import learn_ising, learn_mrf_l1, learn_mrf_linf, learn_pairwise
from .models import IsingModel, PairwiseModel, model_from_json, model_to_json
from .polynomial import MultilinearPolynomial
from .privacy import Accountant, pure_to_zcdp, zcdp_to_approx
from .query_release import pmw_release
from .sampler import Dataset, exact_sample, gibbs_sample
from .structure import StabilityConfig, base_structure, stable_mode_structure


def _load_model(path):
    with open(path) as fh:
        return model_from_json(json.load(fh))


def _write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _estimate_json(model_obj: dict, metadata: dict, accountant: Accountant | None) -> dict:
    meta = dict(metadata)
    if accountant is not None:
        meta["ledger"] = [[label, rho] for label, rho in accountant.ledger]
        meta["budget_spent"] = accountant.spent
    out = dict(model_obj)
    out["metadata"] = meta
    return out


def _cmd_sample(args) -> int:
    model = _load_model(args.model)
    if args.method == "gibbs":
        data = gibbs_sample(model, args.n, args.seed, burn_in=args.burn_in)
    else:
        data = exact_sample(model, args.n, args.seed)
    data.save_csv(args.out)
    print(f"wrote {data.n} x {data.p} samples to {args.out}")
    return 0


def _cmd_learn_ising(args) -> int:
    data = Dataset.load_csv(args.data, k=2)
    acct = None if args.non_private else Accountant(args.rho)
    est = learn_ising(data, args.lam, 0.0 if args.non_private else args.rho,
                      acct, seed=args.seed, non_private=args.non_private,
                      T_override=args.iters)
    obj = model_to_json(IsingModel(est.p, est.A_hat, est.theta_hat))
    _write_json(args.out, _estimate_json(obj, est.metadata, acct))
    print(f"wrote Ising estimate to {args.out}")
    return 0


def _cmd_learn_pairwise(args) -> int:
    data = Dataset.load_csv(args.data, k=args.k)
    acct = None if args.non_private else Accountant(args.rho)
    est = learn_pairwise(data, args.k, args.lam,
                         0.0 if args.non_private else args.rho, acct,
                         seed=args.seed, non_private=args.non_private,
                         T_override=args.iters)
    W = {key: est.W_hat[key] for key in est.W_hat if key[0] < key[1]}
    obj = model_to_json(PairwiseModel(est.p, est.k, W, np.zeros((est.p, est.k))))
    meta = dict(est.metadata)
    meta["warnings"] = est.warnings
    _write_json(args.out, _estimate_json(obj, meta, acct))
    for w in est.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"wrote pairwise estimate to {args.out}")
    return 0


def _cmd_learn_mrf(args) -> int:
    data = Dataset.load_csv(args.data, k=2)
    acct = None if args.non_private else Accountant(args.rho)
    rho = 0.0 if args.non_private else args.rho
    if args.objective == "linf":
        est = learn_mrf_linf(data, args.t, args.lam, rho, acct, seed=args.seed,
                             non_private=args.non_private, T_override=args.iters,
                             pmw_rounds=args.rounds)
    else:
        est = learn_mrf_l1(data, args.t, args.lam, rho, acct, seed=args.seed,
                           non_private=args.non_private, T_override=args.iters)
    obj = {"type": "mrf", "p": est.u.p, "t": est.t, "h": est.u.to_json()}
    _write_json(args.out, _estimate_json(obj, est.metadata, acct))
    print(f"wrote MRF estimate to {args.out}")
    return 0


def _cmd_release_parities(args) -> int:
    data = Dataset.load_csv(args.data, k=2)
    acct = None if args.non_private else Accountant(args.rho)
    release = pmw_release(data, args.t, 0.0 if args.non_private else args.rho,
                          acct, rounds=args.rounds, seed=args.seed,
                          non_private=args.non_private)
    obj = release.table.to_json()
    obj["rounds"] = release.rounds
    obj["history"] = release.history
    _write_json(args.out, obj)
    print(f"wrote parity table ({len(release.table.entries)} entries) to {args.out}")
    return 0


def _cmd_learn_structure(args) -> int:
    k = args.k if args.model == "pairwise" else 2
    data = Dataset.load_csv(args.data, k=k)
    t_or_k = args.k if args.model == "pairwise" else args.t
    base = lambda block: base_structure(
        block, args.model, args.lam, args.eta, t_or_k,
        seed=args.seed, fit_iters=args.iters,
    )
    cfg = StabilityConfig(eps=args.eps, delta=args.delta, blocks=args.blocks)
    graph = stable_mode_structure(data, base, cfg, seed=args.seed,
                                  noise_disabled=args.noise_disabled)
    _write_json(args.out, graph.to_json())
    if graph.released:
        print(f"released graph with {len(graph.edges)} edges to {args.out}")
    else:
        print(f"no stable graph (bottom); wrote {args.out}")
    return 0


def _cmd_accountant(args) -> int:
    if args.convert == "pure-to-zcdp":
        print(repr(pure_to_zcdp(args.eps)))
    else:
        print(repr(zcdp_to_approx(args.rho, args.delta)))
    return 0


def _cmd_experiment(args) -> int:
    with open(args.spec) as fh:
        spec = spec_from_json(json.load(fh))
    results = run_experiment(spec)
    out = Path(args.out)
    out.write_text(results_csv(results))
    summary_text, rows = summarize(results)
    summary_path = out.with_name(out.stem + "_summary.csv")
    summary_path.write_text(summary_text)
    if not args.no_figures:
        from .plots import render_error_curve, render_success_curve

        render_success_curve(rows, out.with_name(out.stem + "_success.png"))
        render_error_curve(rows, out.with_name(out.stem + "_error.png"))
    if args.emit_plot_data:
        out.with_name(out.stem + "_curve.csv").write_text(plot_data(rows))
    sys.stdout.write(summary_text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="privmrf",
        description="Differentially private learning of Markov random fields",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, rho=True):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", required=True)
        if rho:
            sp.add_argument("--rho", type=float, default=1.0,
                            help="total zCDP budget")
            sp.add_argument("--non-private", action="store_true",
                            help="zero-noise mode; no budget is spent")

    sp = sub.add_parser("sample", help="draw i.i.d. samples from a model")
    sp.add_argument("--model", required=True, help="model JSON file")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--method", choices=["exact", "gibbs"], default="exact")
    sp.add_argument("--burn-in", type=int, default=100)
    add_common(sp, rho=False)
    sp.set_defaults(func=_cmd_sample)

    sp = sub.add_parser("learn-ising", help="estimate Ising parameters")
    sp.add_argument("--data", required=True, help="sample CSV (no header)")
    sp.add_argument("--lambda", dest="lam", type=float, required=True,
                    help="width bound")
    sp.add_argument("--iters", type=int, default=None,
                    help="override the Frank-Wolfe iteration count")
    add_common(sp)
    sp.set_defaults(func=_cmd_learn_ising)

    sp = sub.add_parser("learn-pairwise", help="estimate pairwise model weights")
    sp.add_argument("--data", required=True)
    sp.add_argument("--k", type=int, required=True, help="alphabet size")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--iters", type=int, default=None)
    add_common(sp)
    sp.set_defaults(func=_cmd_learn_pairwise)

    sp = sub.add_parser("learn-mrf", help="estimate a binary t-wise MRF")
    sp.add_argument("--data", required=True)
    sp.add_argument("--t", type=int, required=True, help="interaction order")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--objective", choices=["l1", "linf"], default="l1")
    sp.add_argument("--iters", type=int, default=None)
    sp.add_argument("--rounds", type=int, default=None,
                    help="release rounds (linf objective)")
    add_common(sp)
    sp.set_defaults(func=_cmd_learn_mrf)

    sp = sub.add_parser("release-parities", help="release parity expectations")
    sp.add_argument("--data", required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--rounds", type=int, default=None)
    add_common(sp)
    sp.set_defaults(func=_cmd_release_parities)

    sp = sub.add_parser("learn-structure", help="recover the dependency graph")
    sp.add_argument("--data", required=True)
    sp.add_argument("--model", choices=["ising", "pairwise", "mrf"], required=True)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--eta", type=float, required=True,
                    help="minimum edge magnitude")
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--blocks", type=int, default=None)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--t", type=int, default=2)
    sp.add_argument("--iters", type=int, default=200)
    sp.add_argument("--noise-disabled", action="store_true",
                    help="deterministic release test mode")
    add_common(sp, rho=False)
    sp.set_defaults(func=_cmd_learn_structure)

    sp = sub.add_parser("accountant", help="privacy budget conversions")
    sp.add_argument("--convert", choices=["pure-to-zcdp", "zcdp-to-approx"],
                    required=True)
    sp.add_argument("--eps", type=float, default=None)
    sp.add_argument("--rho", type=float, default=None)
    sp.add_argument("--delta", type=float, default=None)
    sp.set_defaults(func=_cmd_accountant)

    sp = sub.add_parser("experiment", help="run a seeded experiment spec")
    sp.add_argument("--spec", required=True, help="experiment spec JSON")
    sp.add_argument("--out", required=True, help="results CSV path")
    sp.add_argument("--emit-plot-data", action="store_true")
    sp.add_argument("--no-figures", action="store_true")
    sp.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "accountant":
        if args.convert == "pure-to-zcdp" and args.eps is None:
            build_parser().error("pure-to-zcdp needs --eps")
        if args.convert == "zcdp-to-approx" and (args.rho is None or args.delta is None):
            build_parser().error("zcdp-to-approx needs --rho and --delta")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
