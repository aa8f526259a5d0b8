"""Command-line entry point and the end-to-end pipeline orchestrator.

Exit codes: 0 success, 2 certified failure (an honest negative verdict or a
search that exhausted its budget), 1 internal error.  Every run is
replayable: reports carry the seeds, and fixed seeds reproduce identical
stage outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

from .conditions import (
    check_degree_sequence_condition,
    check_ore_condition,
    check_robust_expander,
)
from .embedder import (
    check_compatibility,
    embed_blowup,
    embedding_respects_partition,
    verify_embedding,
)
from .errors import BandembedError, InvalidInputError
from .graph import (
    BandwidthOrdering,
    Graph,
    degree_sequence,
    graph_from_json,
    graph_to_json,
)
from .homomorphism import (
    balance_trial_stats,
    build_homomorphism,
    choose_h_parameters,
    verify_homomorphism_certificate,
)
from .hostgen import (
    HostBundle,
    TargetBundle,
    gen_bandwidth_bipartite_h,
    gen_cycle_blowup,
    gen_extremal_counterexample,
    gen_random_graph,
    gen_super_regular_host,
)
from .partition import (
    ClusterPartition,
    Config,
    load_config,
    prepare_host_partition,
    redistribute_to_sizes,
    verify_partition_structure,
)
from .regularity import build_reduced_graph, check_regular_pair, check_super_regular_pair
from .walks import Matching, find_closed_shifted_walk

__all__ = ["main", "run_full_pipeline", "PipelineReport", "StageResult"]


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------


@dataclass
class StageResult:
    name: str
    ok: bool
    seconds: float
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "seconds": round(self.seconds, 4),
            "detail": self.detail,
        }


@dataclass
class PipelineReport:
    ok: bool
    failed_stage: str | None
    stages: list[StageResult]
    seed: int
    config: dict
    embedding: list[int] | None = None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "failed_stage": self.failed_stage,
            "seed": self.seed,
            "config": self.config,
            "stages": [s.to_json() for s in self.stages],
            "embedding": self.embedding,
        }


def run_full_pipeline(
    host: HostBundle,
    target: TargetBundle,
    cfg: Config,
    seed: int = 0,
) -> PipelineReport:
    """Host preparation, homomorphism, redistribution, compatibility, embedding.

    The cluster loads of the homomorphism feed back as the demanded sizes of
    the redistribution stage, and the final gate is an unconditional
    re-verification of the embedding.  The first failing stage aborts the
    run with its identity; certified failure is a legitimate outcome.
    """
    stages: list[StageResult] = []
    report = PipelineReport(False, None, stages, seed, cfg.to_json())

    def fail(name: str, t0: float, exc: Exception) -> PipelineReport:
        stages.append(
            StageResult(name, False, time.perf_counter() - t0,
                        {"error": f"{type(exc).__name__}: {exc}"})
        )
        report.failed_stage = name
        return report

    g, h = host.graph, target.graph
    if g.n != h.n:
        t0 = time.perf_counter()
        return fail("validate", t0, InvalidInputError(
            f"host has {g.n} vertices but the target has {h.n}"))

    # Stage 1: host-side partition baseline.
    t0 = time.perf_counter()
    try:
        prep = prepare_host_partition(g, host.partition, cfg, seed=seed)
    except Exception as exc:
        return fail("host-partition", t0, exc)
    k = prep.k
    i2, j2 = prep.partition.b_chord
    # The walk search runs at nu/4 in the reduced graph; certify that level
    # exactly while the reduced graph is small.
    sub = prep.reduced.as_graph()
    expander_verdict = (
        check_robust_expander(sub, cfg.nu / 4, cfg.tau, mode="exact")
        if sub.n <= 20 else None
    )
    stages.append(StageResult("host-partition", True, time.perf_counter() - t0, {
        "k": k,
        "baseline_sizes": prep.baseline_sizes,
        "a_chord": list(prep.partition.a_chord),
        "b_chord": list(prep.partition.b_chord),
        "balance_steps": prep.balance_ledger.step_count,
        "baseline_structure_ok": prep.certification.all_ok(),
        "reduced_expander": expander_verdict.to_json() if expander_verdict else None,
    }))

    # Stage 2: homomorphism guided by the baseline sizes and the B-side chord.
    t0 = time.perf_counter()
    try:
        chord = (2 * i2 + 1, 2 * j2 + 1)
        params = choose_h_parameters(
            h.n, max(1, h.max_degree()), target.ordering.claimed_bound, cfg.xi, k
        )
        hom = build_homomorphism(
            h, target.ordering, target.bipartition, prep.baseline_sizes,
            chord, params, seed=seed,
        )
        recheck = verify_homomorphism_certificate(
            h, hom.f, hom.boundary, prep.baseline_sizes, cfg.xi, chord
        )
        if not recheck["all_ok"]:
            raise BandembedError(f"independent certificate recheck failed: {recheck}")
    except Exception as exc:
        return fail("homomorphism", t0, exc)
    demanded = hom.loads()
    stages.append(StageResult("homomorphism", True, time.perf_counter() - t0, {
        "attempts": hom.attempts,
        "kprime": hom.kprime,
        "chord": list(chord),
        "boundary_size": len(hom.boundary),
        "loads": demanded,
        "params": {"m1": params.m1, "m2": params.m2, "k1": params.k1, "k2": params.k2},
        "certificate_recheck": {key: val for key, val in recheck.items() if key != "loads"},
    }))

    # Stage 3: redistribute to the demanded sizes.
    t0 = time.perf_counter()
    try:
        a_t = [demanded[2 * i] - prep.baseline_sizes[2 * i] for i in range(k)]
        b_t = [demanded[2 * i + 1] - prep.baseline_sizes[2 * i + 1] for i in range(k)]
        final, ledger = redistribute_to_sizes(
            g, prep.partition, prep.reduced, a_t, b_t, cfg,
            verify_pairs=False, seed=seed,
        )
    except Exception as exc:
        return fail("redistribute", t0, exc)
    stages.append(StageResult("redistribute", True, time.perf_counter() - t0, {
        "a_targets": a_t,
        "b_targets": b_t,
        "mirrored": ledger.mirrored,
        "churn": ledger.churn,
        "moves": len(ledger.all_moves()),
    }))

    # Stage 4: final structural certification.
    t0 = time.perf_counter()
    try:
        structure = verify_partition_structure(g, final, demanded, cfg, seed=seed)
        if not structure.all_ok():
            raise BandembedError("final partition failed structural certification")
    except Exception as exc:
        return fail("verify-partition", t0, exc)
    stages.append(
        StageResult("verify-partition", True, time.perf_counter() - t0, structure.to_json())
    )

    # Stage 5: compatibility of the preimage partition with the host partition.
    t0 = time.perf_counter()
    try:
        w_classes = [[v for v in range(h.n) if hom.f[v] == i] for i in range(2 * k)]
        r_edges = set()
        for i in range(k):
            r_edges.add((2 * i, 2 * i + 1))
            r_edges.add(tuple(sorted((2 * i + 1, (2 * i + 2) % (2 * k)))))
        i1, j1 = final.a_chord
        r_edges.add(tuple(sorted((2 * i1, 2 * j1))))
        r_edges.add(tuple(sorted((2 * i2 + 1, 2 * j2 + 1))))
        rprime = {(2 * i, 2 * i + 1) for i in range(k)}
        compat = check_compatibility(
            h, w_classes, g, final.classes, r_edges, rprime, cfg.eps
        )
        if not compat.all_ok():
            raise BandembedError(f"compatibility failed: {compat.to_json()}")
    except Exception as exc:
        return fail("compatibility", t0, exc)
    stages.append(
        StageResult("compatibility", True, time.perf_counter() - t0, compat.to_json())
    )

    # Stage 6: the embedding itself.
    t0 = time.perf_counter()
    try:
        emb = embed_blowup(h, w_classes, g, final.classes, rprime, seed=seed)
    except Exception as exc:
        return fail("embed", t0, exc)
    stages.append(StageResult("embed", True, time.perf_counter() - t0, {}))

    # Stage 7: unconditional final gate.
    t0 = time.perf_counter()
    valid = verify_embedding(h, g, emb.phi)
    respects = embedding_respects_partition(emb.phi, w_classes, final.classes)
    stages.append(StageResult("verify-embedding", valid and respects,
                              time.perf_counter() - t0,
                              {"edge_preserving_injection": valid,
                               "respects_partition": respects}))
    if not (valid and respects):
        report.failed_stage = "verify-embedding"
        return report

    report.ok = True
    report.embedding = list(emb.phi)
    return report


# ---------------------------------------------------------------------------
# CLI plumbing
# ---------------------------------------------------------------------------


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc


def _emit(data: dict, args) -> None:
    text = json.dumps(data, indent=2, default=str)
    if getattr(args, "json_out", None):
        with open(args.json_out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_cfg(args) -> Config:
    if getattr(args, "config", None):
        with open(args.config) as fh:
            return load_config(fh.read())
    return Config()


def _load_host_bundle(path: str, partition_path: str | None = None) -> HostBundle:
    data = _load_json(path)
    graph = graph_from_json(data["graph"] if "graph" in data else data)
    if partition_path:
        partition = ClusterPartition.from_json(_load_json(partition_path))
    else:
        try:
            partition = ClusterPartition.from_json(data["partition"])
        except KeyError:
            raise InvalidInputError(
                f"{path} has no partition; pass one with --partition"
            ) from None
    return HostBundle(graph, partition)


def _load_target_bundle(path: str) -> TargetBundle:
    data = _load_json(path)
    ordering = BandwidthOrdering(
        tuple(data["ordering"]["labels"]), data["ordering"]["bound"]
    )
    bip = data["bipartition"]
    return TargetBundle(graph_from_json(data["graph"]), ordering, (bip[0], bip[1]))


def _cmd_gen_host(args) -> int:
    if args.kind == "super-regular":
        chords = None
        if args.chords:
            vals = [int(x) for x in args.chords.split(",")]
            chords = ((vals[0], vals[1]), (vals[2], vals[3]))
        bundle = gen_super_regular_host(args.k, args.size, args.density, chords, args.seed)
        _emit(bundle.to_json(), args)
    elif args.kind == "cycle-blowup":
        graph = gen_cycle_blowup(args.classes, args.size, args.seed)
        _emit({"graph": graph_to_json(graph)}, args)
    elif args.kind == "extremal":
        graph = gen_extremal_counterexample(args.n, args.m)
        _emit({"graph": graph_to_json(graph)}, args)
    else:
        graph = gen_random_graph(args.n, args.p, args.seed)
        _emit({"graph": graph_to_json(graph)}, args)
    return 0


def _cmd_gen_h(args) -> int:
    bundle = gen_bandwidth_bipartite_h(args.n, args.delta, args.bandwidth, args.seed)
    _emit(bundle.to_json(), args)
    return 0


def _cmd_check_expander(args) -> int:
    g = graph_from_json(_load_json(args.graph))
    verdict = check_robust_expander(
        g, args.nu, args.tau, mode=args.mode, seed=args.seed, trials=args.trials
    )
    _emit(verdict.to_json(), args)
    return 0 if verdict.holds else 2


def _cmd_check_degseq(args) -> int:
    g = graph_from_json(_load_json(args.graph))
    verdict = check_degree_sequence_condition(degree_sequence(g), args.gamma)
    out = verdict.to_json()
    out["params"] = {"gamma": args.gamma}
    _emit(out, args)
    return 0 if verdict.holds else 2


def _cmd_check_ore(args) -> int:
    g = graph_from_json(_load_json(args.graph))
    verdict = check_ore_condition(g, args.gamma)
    out = verdict.to_json()
    out["params"] = {"gamma": args.gamma}
    _emit(out, args)
    return 0 if verdict.holds else 2


def _cmd_check_pair(args) -> int:
    g = graph_from_json(_load_json(args.graph))
    part = _load_json(args.partition)
    classes = part["classes"]
    a_cls, b_cls = classes[args.a], classes[args.b]
    checker = check_super_regular_pair if args.super else check_regular_pair
    verdict = checker(
        g, a_cls, b_cls, args.eps, args.density,
        mode=args.mode, budget=args.budget, seed=args.seed,
    )
    _emit(verdict.to_json(), args)
    return 0 if verdict.regular else 2


def _cmd_build_reduced(args) -> int:
    g = graph_from_json(_load_json(args.graph))
    part = _load_json(args.partition)
    reduced = build_reduced_graph(
        g, part["classes"], args.eps, args.density,
        mode=args.mode, budget=args.budget, seed=args.seed,
    )
    _emit({
        "clusters": [sorted(c) for c in reduced.clusters],
        "edges": sorted(list(e) for e in reduced.edges),
        "params": {"eps": str(reduced.eps), "d": str(reduced.d)},
    }, args)
    return 0


def _cmd_find_walk(args) -> int:
    g = graph_from_json(_load_json(args.graph))
    matching = Matching.from_json(_load_json(args.matching))
    walk = find_closed_shifted_walk(g, matching, args.start, args.nu)
    _emit({"walk": list(walk.vertices), "length": walk.length}, args)
    return 0


def _cmd_lemma_g(args) -> int:
    bundle = _load_host_bundle(args.host, args.partition)
    cfg = _load_cfg(args)
    demanded = None
    if args.demand:
        demanded = _load_json(args.demand)["sizes"]
    rep = prepare_host_partition(
        bundle.graph, bundle.partition, cfg, demanded=demanded, seed=args.seed
    )
    _emit({
        "k": rep.k,
        "baseline_sizes": rep.baseline_sizes,
        "a_chord": list(rep.partition.a_chord),
        "b_chord": list(rep.partition.b_chord),
        "partition": rep.partition.to_json(),
        "structure": rep.certification.to_json(),
        "balance_steps": rep.balance_ledger.step_count,
    }, args)
    return 0 if rep.certification.all_ok() else 2


def _cmd_build_hom(args) -> int:
    target = _load_target_bundle(args.h)
    sizes = _load_json(args.sizes)["sizes"]
    chord = tuple(int(x) for x in args.chord.split(","))
    cfg = _load_cfg(args)
    k = len(sizes) // 2
    params = choose_h_parameters(
        target.graph.n, max(1, target.graph.max_degree()),
        target.ordering.claimed_bound, cfg.xi, k,
    )
    hom = build_homomorphism(
        target.graph, target.ordering, target.bipartition, sizes, chord, params,
        seed=args.seed,
    )
    out = hom.to_json()
    out["certificate_recheck"] = verify_homomorphism_certificate(
        target.graph, hom.f, hom.boundary, sizes, cfg.xi, chord
    )
    if args.coins:
        out["coin_logs"] = [d.coin_logs for d in hom.diagnostics]
    _emit(out, args)
    return 0


def _cmd_embed(args) -> int:
    host = _load_host_bundle(args.host)
    target = _load_target_bundle(args.h)
    hom_data = _load_json(args.hom)
    f = hom_data["f"]
    k = len(host.partition.classes) // 2
    w_classes = [[v for v in range(target.graph.n) if f[v] == i] for i in range(2 * k)]
    rprime = {(2 * i, 2 * i + 1) for i in range(k)}
    emb = embed_blowup(
        target.graph, w_classes, host.graph, host.partition.classes, rprime,
        seed=args.seed,
    )
    valid = verify_embedding(target.graph, host.graph, emb.phi)
    _emit({"phi": emb.phi, "verified": valid}, args)
    return 0 if valid else 2


def _cmd_pipeline(args) -> int:
    host = _load_host_bundle(args.host)
    target = _load_target_bundle(args.h)
    cfg = _load_cfg(args)
    report = run_full_pipeline(host, target, cfg, seed=args.seed)
    _emit(report.to_json(), args)
    return 0 if report.ok else 2


def _cmd_montecarlo_balance(args) -> int:
    target = gen_bandwidth_bipartite_h(args.n, args.delta, args.bandwidth, args.seed)
    k = args.k
    sizes = [args.n // (2 * k)] * (2 * k)
    sizes[-1] += args.n - sum(sizes)
    chord = (1, 2 * k - 1) if k == 2 else (1, 5)
    cfg = _load_cfg(args)
    params = choose_h_parameters(args.n, args.delta, args.bandwidth, cfg.xi, k)
    stats = balance_trial_stats(
        target.graph, target.ordering, target.bipartition, sizes, chord, params,
        root_seed=args.seed, runs=args.runs,
    )
    _emit(stats, args)
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--json-out", help="write the JSON result here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bandembed",
        description="certify host structure and embed bounded-degree, "
                    "small-bandwidth bipartite targets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-host", help="generate a host graph (with partition where applicable)")
    p.add_argument("--kind", choices=["super-regular", "cycle-blowup", "extremal", "random"],
                   default="super-regular")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--size", type=int, default=50)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--chords", help="i1,j1,i2,j2 pair indices")
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--p", type=float, default=0.5)
    _add_common(p)
    p.set_defaults(func=_cmd_gen_host)

    p = sub.add_parser("gen-h", help="generate a bounded-degree bipartite target")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=int, default=3)
    p.add_argument("--bandwidth", type=int, default=10)
    _add_common(p)
    p.set_defaults(func=_cmd_gen_h)

    p = sub.add_parser("check-expander", help="certify or probe robust expansion")
    p.add_argument("--graph", required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    p.add_argument("--trials", type=int, default=200)
    _add_common(p)
    p.set_defaults(func=_cmd_check_expander)

    p = sub.add_parser("check-degseq", help="degree-sequence condition")
    p.add_argument("--graph", required=True)
    p.add_argument("--gamma", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_check_degseq)

    p = sub.add_parser("check-ore", help="degree-sum condition on non-adjacent pairs")
    p.add_argument("--graph", required=True)
    p.add_argument("--gamma", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_check_ore)

    p = sub.add_parser("check-pair", help="regularity / super-regularity of one class pair")
    p.add_argument("--graph", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--super", action="store_true")
    p.add_argument("--mode", choices=["exact", "heuristic"], default="exact")
    p.add_argument("--budget", type=int, default=120)
    _add_common(p)
    p.set_defaults(func=_cmd_check_pair)

    p = sub.add_parser("build-reduced", help="maximal verified reduced graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--mode", choices=["exact", "heuristic"], default="heuristic")
    p.add_argument("--budget", type=int, default=120)
    _add_common(p)
    p.set_defaults(func=_cmd_build_reduced)

    p = sub.add_parser("find-walk", help="closed shifted walk at a start vertex")
    p.add_argument("--graph", required=True)
    p.add_argument("--matching", required=True)
    p.add_argument("--start", type=int, required=True)
    p.add_argument("--nu", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_find_walk)

    p = sub.add_parser("lemma-g", help="host-side partition pipeline")
    p.add_argument("--host", required=True)
    p.add_argument("--partition", help="separate partition JSON (else taken from --host)")
    p.add_argument("--demand", help="JSON file with {\"sizes\": [...]}")
    _add_common(p)
    p.set_defaults(func=_cmd_lemma_g)

    p = sub.add_parser("build-hom", help="bandwidth-respecting homomorphism onto the cycle")
    p.add_argument("--h", required=True)
    p.add_argument("--sizes", required=True, help="JSON file with {\"sizes\": [...]}")
    p.add_argument("--chord", required=True, help="two odd cluster indices, comma separated")
    p.add_argument("--coins", action="store_true", help="include per-attempt coin logs")
    _add_common(p)
    p.set_defaults(func=_cmd_build_hom)

    p = sub.add_parser("embed", help="place the target into the host along a homomorphism")
    p.add_argument("--host", required=True)
    p.add_argument("--h", required=True)
    p.add_argument("--hom", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("pipeline", help="full end-to-end run")
    p.add_argument("--host", required=True)
    p.add_argument("--h", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("montecarlo-balance", help="seeded homomorphism trial statistics")
    p.add_argument("--n", type=int, default=1536)
    p.add_argument("--delta", type=int, default=2)
    p.add_argument("--bandwidth", type=int, default=1)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--runs", type=int, default=100)
    _add_common(p)
    p.set_defaults(func=_cmd_montecarlo_balance)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidInputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except BandembedError as exc:
        # The search or certification legitimately concluded "no".
        print(f"certified failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
