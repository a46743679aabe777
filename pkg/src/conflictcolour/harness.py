"""Command-line front end.

Subcommands: ``gen`` builds instance files, ``run`` drives the full
pipeline (prune, iterate, finish, verify) over seeded trials, ``trajectory``
dumps the recurrence table, ``oracle`` asks the exhaustive search,
``verify`` checks a colouring file against an instance.

Exit codes: 0 success, 2 uncolourable / failed verification, 3 no trial
succeeded (stuck or budget exhausted), 4 unusable input.  The
CONFLICT_COLOR_LOG environment variable sets the logging level.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone

import numpy as np

from .finisher import SearchBudgetError, brute_force, resample_colouring
from .graph import verify_colouring
from .instances import (
    BlowupTrace,
    GenerationError,
    InstanceBundle,
    InstanceFormatError,
    ParameterError,
    ResourceBudgetError,
    adaptable_lift,
    blowup_iterate,
    edge_colour_labels,
    gen_example1,
    gen_high_girth_regular,
    read_instance,
    reduce_k_colouring,
    write_instance,
)
from .procedure import READY, STATS_HEADER, run_procedure, stats_rows
from .trajectory import compute_params, run_trajectory, trajectory_csv

log = logging.getLogger("conflictcolour")


def _uniform_lists(n: int, size: int) -> list[set[int]]:
    return [set(range(1, size + 1)) for _ in range(n)]


def _require(value, flag: str, generator: str):
    if value is None:
        raise ParameterError(f"generator {generator!r} needs {flag}")
    return value


# -- gen ---------------------------------------------------------------------


def cmd_gen(args: argparse.Namespace) -> int:
    gen = args.generator
    if gen == "example1":
        ell = _require(args.ell, "--ell", gen)
        delta = args.delta if args.delta is not None else ell * ell
        bundle = gen_example1(ell, delta)

    elif gen == "blowup":
        base = read_instance(_require(args.input, "--input", gen))
        ell0 = len(base.lists[0]) if base.lists else 0
        predicted = BlowupTrace.predict(
            ell0,
            base.graph.max_degree(),
            base.graph.conflict_degree(),
            args.levels,
        )
        for i, (ell, delta, d) in enumerate(predicted.rows):
            note = ""
            num, den = (1 << i) - 1, 1 << i
            if i > 0 and ell**num == d**den:
                note = f"  (D = ell^({num}/{den}))"
            print(f"predicted level {i}: ell={ell} delta={delta} D={d}{note}")
        try:
            bundle, trace = blowup_iterate(base, args.levels, max_constraints=args.budget)
        except ResourceBudgetError as exc:
            print(f"build stopped early: {exc}")
            bundle, trace = exc.bundle, exc.trace
        for i, (ell, delta, d) in enumerate(trace.rows):
            print(f"built level {i}: ell={ell} delta={delta} D={d}")

    elif gen == "kreduce":
        k = _require(args.colours, "--colours", gen)
        if args.cycle is not None:
            if args.cycle < 3:
                raise ParameterError(f"--cycle needs length >= 3, got {args.cycle}")
            edges = [(i, (i + 1) % args.cycle) for i in range(args.cycle)]
        else:
            g = read_instance(_require(args.input, "--input or --cycle", gen)).graph
            edges = sorted({(u, v) for u, v, _ in g.edges()})
        bundle = reduce_k_colouring(edges, k)

    elif gen == "adaptlift":
        if args.input:
            g = read_instance(args.input).graph
        else:
            g = gen_high_girth_regular(
                _require(args.n, "--n (or --input)", gen),
                _require(args.delta, "--delta (or --input)", gen),
                args.seed,
            )
        if args.label_mode == "edgecolour":
            labelled = edge_colour_labels(g)
        else:
            rng = np.random.default_rng(np.random.SeedSequence([0xAD47, args.seed]))
            hi = max(2, g.max_degree() + 1)
            labelled = [
                (u, v, int(rng.integers(1, hi))) for u, v, _ in g.edges()
            ]
        size = args.list_size if args.list_size is not None else 3 * max(1, g.max_degree())
        bundle = adaptable_lift(labelled, _uniform_lists(g.n, size), g.n)
        bundle.meta["label_mode"] = args.label_mode
        bundle.meta["seed"] = str(args.seed)
        bundle.record_list_sizes()

    elif gen == "regular":
        n = _require(args.n, "--n", gen)
        delta = _require(args.delta, "--delta", gen)
        g = gen_high_girth_regular(n, delta, args.seed)
        size = args.list_size if args.list_size is not None else 3 * delta
        bundle = InstanceBundle(
            graph=g,
            lists=_uniform_lists(g.n, size),
            meta={
                "generator": "regular",
                "n": str(n),
                "delta": str(delta),
                "seed": str(args.seed),
            },
        )
        bundle.record_list_sizes()

    else:  # pragma: no cover - argparse restricts the choices
        raise ParameterError(f"unknown generator {gen!r}")

    write_instance(bundle, args.output)
    g = bundle.graph
    sizes = [len(s) for s in bundle.lists]
    girth = "girth ok" if g.validate_girth() else "CONTAINS a 3- or 4-cycle"
    print(
        f"{args.output}: n={g.n} constraints={g.n_constraints} "
        f"max_degree={g.max_degree()} conflict_degree={g.conflict_degree()} "
        f"lists={min(sizes, default=0)}..{max(sizes, default=0)} {girth}"
    )
    return 0


# -- run ---------------------------------------------------------------------


def _run_trial(
    bundle: InstanceBundle,
    epsilon: float,
    base_seed: int,
    trial: int,
    mode: str,
    max_iters: int | None,
    budget: int | None,
) -> dict:
    """One seeded pipeline pass: prune, iterate, finish, verify."""
    ss = np.random.SeedSequence([base_seed, trial])
    g = bundle.graph
    params = compute_params(max(3, g.max_degree()), epsilon)
    state, outcome = run_procedure(
        bundle, params, seed=ss, max_iters=max_iters, mode=mode
    )
    colouring = state.colouring
    fin = None
    if outcome == READY:
        uncoloured = state.uncoloured()
        if uncoloured:
            ell = min(state.list_size(v) for v in uncoloured)
            col, info = resample_colouring(
                bundle,
                state.lists,
                max(1, ell),
                seed=state.rngs["finisher"],
                max_resamples=budget,
                partial=colouring,
                override=True,
                return_info=True,
            )
            reed = info["reed"]
            fin = {
                "resamples": info["resamples"],
                "succeeded": col is not None,
                "worst_t": reed.worst_t if reed is not None else None,
                "reed_satisfied": reed.satisfied if reed is not None else None,
            }
            if col is not None:
                colouring = col
    success = len(colouring) == g.n and verify_colouring(g, colouring, bundle.lists)
    return {
        "trial": trial,
        "outcome": outcome,
        "iterations": state.iteration,
        "prune_removed": state.prune_removed,
        "stuck": sorted(state.stuck),
        "abort": state.abort,
        "finisher": fin,
        "success": success,
        "colouring": {str(v): c for v, c in sorted(colouring.items())}
        if success
        else None,
        "stats_rows": stats_rows(trial, state.stats),
    }


def _run_trial_star(job: tuple) -> dict:
    return _run_trial(*job)


def _binomial_ci(successes: int, trials: int) -> list[float]:
    p = successes / trials
    half = 1.96 * (p * (1.0 - p) / trials) ** 0.5
    return [max(0.0, p - half), min(1.0, p + half)]


def cmd_run(args: argparse.Namespace) -> int:
    bundle = read_instance(args.input)
    if not bundle.graph.validate_girth():
        raise ParameterError(f"{args.input}: instance contains a 3- or 4-cycle")
    if args.trials < 1:
        raise ParameterError(f"--trials must be >= 1, got {args.trials}")

    config = {
        "command": "run",
        "input": args.input,
        "seed": args.seed,
        "trials": args.trials,
        "mode": args.mode,
        "max_iters": args.max_iters,
        "epsilon": args.epsilon,
        "budget": args.budget,
    }
    config_hash = hashlib.sha256(
        json.dumps(config, sort_keys=True).encode()
    ).hexdigest()

    jobs = [
        (bundle, args.epsilon, args.seed, t, args.mode, args.max_iters, args.budget)
        for t in range(args.trials)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_trial_star, jobs))
    else:
        results = [_run_trial(*job) for job in jobs]

    successes = sum(1 for r in results if r["success"])
    g = bundle.graph
    report = {
        "config": config,
        "config_hash": config_hash,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "instance": {
            "n": g.n,
            "constraints": g.n_constraints,
            "max_degree": g.max_degree(),
            "conflict_degree": g.conflict_degree(),
        },
        "trials": [{k: v for k, v in r.items() if k != "stats_rows"} for r in results],
        "aggregate": {
            "successes": successes,
            "trials": args.trials,
            "rate": successes / args.trials,
            "ci95": _binomial_ci(successes, args.trials),
        },
    }
    csv_text = (
        "\n".join([STATS_HEADER, *(row for r in results for row in r["stats_rows"])])
        + "\n"
    )
    if args.output:
        with open(args.output + ".json", "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2)
            f.write("\n")
        with open(args.output + ".csv", "w", encoding="utf-8") as f:
            f.write(csv_text)

    for r in results:
        tail = " -> verified colouring" if r["success"] else ""
        log.info("trial %d: %s%s", r["trial"], r["outcome"], tail)
    print(f"{successes}/{args.trials} trials produced a verified colouring")
    return 0 if successes > 0 else 3


# -- trajectory ----------------------------------------------------------------


def cmd_trajectory(args: argparse.Namespace) -> int:
    params = compute_params(args.delta, args.epsilon)
    traj = run_trajectory(params)
    text = trajectory_csv(traj)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    print(
        f"rows={len(traj.rows)} i_star={traj.i_star} i_hat={traj.i_hat:.6g}",
        file=sys.stderr,
    )
    if traj.breakdown:
        print(
            "breakdown: L or T fell below the Delta^(eps^2/(2(eps+4)^2)) floor "
            "before the stopping condition",
            file=sys.stderr,
        )
    return 0


# -- oracle and verify ---------------------------------------------------------


def cmd_oracle(args: argparse.Namespace) -> int:
    bundle = read_instance(args.input)
    try:
        col = brute_force(bundle, budget=args.budget)
    except SearchBudgetError as exc:
        print(f"BUDGET-EXCEEDED: {exc}")
        return 3
    if col is None:
        print("UNCOLOURABLE")
        return 2
    witness = json.dumps({str(v): c for v, c in sorted(col.items())})
    print(f"COLOURABLE {witness}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    bundle = read_instance(args.input)
    with open(args.colouring, encoding="utf-8") as f:
        data = json.load(f)
    try:
        colouring = {int(k): int(v) for k, v in data.items()}
    except (TypeError, ValueError, AttributeError):
        raise ParameterError(
            f"{args.colouring}: expected a JSON object mapping vertex to colour"
        ) from None
    g = bundle.graph
    problems = []
    bad_ids = sorted(v for v in colouring if not 0 <= v < g.n)
    if bad_ids:
        problems.append(f"vertex ids out of range: {bad_ids}")
    else:
        if len(colouring) != g.n:
            problems.append(f"covers {len(colouring)} of {g.n} vertices")
        if not verify_colouring(g, colouring, bundle.lists):
            problems.append("violates a constraint or leaves a list")
    if problems:
        print("INVALID: " + "; ".join(problems))
        return 2
    print("VALID")
    return 0


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="conflictcolour",
        description="Conflict/adaptable list colouring of high-girth multigraphs.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument(
        "generator",
        choices=("example1", "blowup", "kreduce", "adaptlift", "regular"),
    )
    g.add_argument("--ell", type=int, help="example1: list size of the gadget")
    g.add_argument("--delta", type=int, help="target max degree")
    g.add_argument("--n", type=int, help="vertex count")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--levels", type=int, default=1, help="blowup levels")
    g.add_argument("--colours", type=int, help="kreduce: number of colours")
    g.add_argument("--cycle", type=int, help="kreduce: use a cycle of this length")
    g.add_argument("--input", help="base instance file")
    g.add_argument("--output", required=True, help="instance file to write")
    g.add_argument("--list-size", type=int, help="uniform list size (default 3*delta)")
    g.add_argument(
        "--label-mode",
        choices=("edgecolour", "random"),
        default="edgecolour",
        help="adaptlift edge labelling",
    )
    g.add_argument(
        "--budget",
        type=int,
        default=2_000_000,
        help="blowup: max constraints to build",
    )

    r = sub.add_parser("run", help="run the colouring pipeline")
    r.add_argument("--input", required=True)
    r.add_argument("--output", help="prefix for the .json report and .csv stats")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--trials", type=int, default=1)
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--mode", choices=("theory", "adaptive"), default="adaptive")
    r.add_argument("--max-iters", type=int, default=None)
    r.add_argument("--epsilon", type=float, default=1.0)
    r.add_argument("--budget", type=int, default=None, help="finisher resample budget")

    t = sub.add_parser("trajectory", help="dump the recurrence table as CSV")
    t.add_argument("--delta", type=int, required=True)
    t.add_argument("--epsilon", type=float, required=True)
    t.add_argument("--output")

    o = sub.add_parser("oracle", help="exhaustive colourability check")
    o.add_argument("--input", required=True)
    o.add_argument("--budget", type=int, default=10**7)

    v = sub.add_parser("verify", help="check a colouring file against an instance")
    v.add_argument("--input", required=True)
    v.add_argument("--colouring", required=True, help="JSON file: vertex -> colour")

    return p


_COMMANDS = {
    "gen": cmd_gen,
    "run": cmd_run,
    "trajectory": cmd_trajectory,
    "oracle": cmd_oracle,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = os.environ.get("CONFLICT_COLOR_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _COMMANDS[args.command](args)
    except (
        InstanceFormatError,
        ParameterError,
        GenerationError,
        json.JSONDecodeError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
