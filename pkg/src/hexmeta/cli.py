"""Command-line interface: ``hexmeta <subcommand> ...`` or ``python -m hexmeta``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import exactchain, harness, polyiamond, refpath, theory
from .energy import ModelParams, validate_params
from .hexlattice import build_topology
from .metropolis import replica_ensemble


def _onoff(v: str) -> bool:
    if v not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return v == "on"


def _floats(v: str) -> list[float]:
    return [float(x) for x in v.split(",") if x.strip()]


def _model_args(p, beta_default=1.0, need_beta=True):
    p.add_argument("--J", type=float, default=3.8)
    p.add_argument("--h", type=float, default=1.0)
    if need_beta:
        p.add_argument("--beta", type=float, default=beta_default)


def cmd_theory(a) -> int:
    params = ModelParams(a.J, a.h, a.beta)
    tv = theory.theory_values(params)
    print(f"J={params.J} h={params.h} beta={params.beta}")
    print(f"  critical radius r*        {tv.r_star}")
    print(f"  delta                     {tv.delta:.12g}")
    print(f"  energy barrier Gamma      {tv.gamma_hex:.12g}")
    print(f"  critical area A*          {tv.a_star}")
    print(f"  prefactor k               {tv.k_prefactor}")
    print(f"  longest gate side l       {tv.l}")
    print(f"  predicted E[tau]          {tv.predicted_mean_tau:.6e}")
    rec = tv.as_dict()
    if a.L:
        rep = validate_params(params, a.L)
        print(f"  torus L={a.L}: condition holds = {rep.condition_holds}")
        rec["validity"] = rep.as_dict()
        rec["gate_cardinalities"] = list(theory.gate_cardinalities(params, a.L))
    print(harness.dumps(rec))
    return 0


def cmd_landscape(a) -> int:
    params = ModelParams(a.J, a.h, 1.0)
    topo = build_topology(a.L) if a.L else None
    path = refpath.build_reference_path(params, topo)
    m, idx = refpath.barrier(path, params)
    if a.out:
        harness.write_profile_csv(path, params, a.out)
    print(harness.dumps({"barrier": m, "argmax_areas": sorted(idx), "standard_length": path.standard_length,
                         "L": path.start.topo.L, "steps": len(path)}))
    return 0


def cmd_simulate(a) -> int:
    params = ModelParams(a.J, a.h, a.beta)
    topo = build_topology(a.L)
    res = replica_ensemble(params, topo, a.replicas, a.seed, a.parallelism, a.max_steps, a.gate_detect, a.dust)
    summary = res.summary.as_dict()
    if a.out:
        out = Path(a.out)
        harness.write_records_csv(res.records, out)
        harness.write_json(summary, out.with_suffix(".json"))
    print(harness.dumps(summary))
    return 0


def cmd_sweep(a) -> int:
    base = json.loads(Path(a.config).read_text()) if a.config else {}
    cfg = harness.ExperimentConfig.from_dict(
        base, J=a.J, h=a.h, L=a.L, beta_grid=a.betas, replicas=a.replicas, seed=a.seed,
        out_dir=a.out_dir, parallelism=a.parallelism, dust=a.dust,
    )

    def progress(beta, s):
        print(f"beta={beta}: mean tau {s.mean_tau:.6g} +- {s.stderr:.3g}, gate {s.gate_fraction:.3f}", file=sys.stderr)

    res = harness.run_sweep(cfg, progress)
    print(harness.dumps(res.summary_dict()))
    if not a.check:
        return 0
    tv = theory.theory_values(cfg.params(cfg.beta_grid[-1]))
    ok = res.slope is not None and abs(res.slope - tv.gamma_hex) <= cfg.slope_tolerance * tv.gamma_hex
    last = res.per_beta[-1]
    ks = harness.exponential_law_test(last.records, min_samples=min(100, last.summary.n_completed))
    ok &= ks.ks <= cfg.ks_max and last.summary.gate_fraction >= cfg.gate_min
    print(f"check: slope {res.slope} vs {tv.gamma_hex}, KS {ks.ks:.4f}, gate {last.summary.gate_fraction:.3f} -> "
          f"{'PASS' if ok else 'FAIL'}", file=sys.stderr)
    return 0 if ok else 1


def cmd_exact(a) -> int:
    params = ModelParams(a.J, a.h, a.beta)
    space = exactchain.build_state_space(a.L)
    m = exactchain.exact_mean_hitting(space, params, space.minus, space.plus)
    cap_ab = exactchain.capacity(space, params, {space.minus}, {space.plus})
    cap_ba = exactchain.capacity(space, params, {space.plus}, {space.minus})
    via_cap = exactchain.hitting_from_capacity(space, params, space.minus, space.plus)
    rec = {
        "L": a.L,
        "mean_hitting": m,
        "capacity": cap_ab,
        "capacity_reversed": cap_ba,
        "capacity_symmetry_rel": abs(cap_ab - cap_ba) / cap_ab,
        "mean_hitting_via_capacity": via_cap,
        "identity_rel": abs(via_cap - m) / m,
        "communication_height": exactchain.communication_height(space, params, space.minus, space.plus),
    }
    if a.L == 2:
        rec["spectral_gap"] = exactchain.spectral_gap(space, params)
        rec["balance_violation"] = exactchain.gibbs_and_balance_check(space, params)
    print(harness.dumps(rec))
    return 0


def cmd_polyiamond(a) -> int:
    if a.action == "enumerate":
        shapes = polyiamond.enumerate_polyiamonds(a.A, cap=a.cap)
        if a.out:
            polyiamond.export_shapes(shapes, a.out)
        perims = [polyiamond.edge_perimeter(polyiamond.Polyiamond.of(s)) for s in shapes]
        print(harness.dumps({"A": a.A, "count": len(shapes), "min_perimeter": min(perims)}))
        return 0
    if a.action == "decompose":
        d = polyiamond.standard_decomposition(a.A)
        rec = {"A": a.A, "r": d.r, "i": d.i, "k": d.k, "inner": d.inner, "outer": d.outer,
               "inner_area": d.inner_area, "outer_area": d.outer_area,
               "perimeter": polyiamond.standard_perimeter(a.A),
               "faces": polyiamond.standard_polyiamond(a.A).sorted_faces()}
        print(harness.dumps(rec))
        return 0
    # verify
    failures = 0
    for A in range(1, a.max_area + 1):
        shapes = polyiamond.enumerate_polyiamonds(A, cap=a.cap)
        polys = [polyiamond.Polyiamond.of(s) for s in shapes]
        perims = [polyiamond.edge_perimeter(P) for P in polys]
        pmin = min(perims)
        ok = pmin == polyiamond.standard_perimeter(A)
        rel = all(polyiamond.site_edge_relation_check(P) for P in polys)
        line = f"A={A:2d} shapes={len(shapes):6d} min_p={pmin:2d} formula={polyiamond.standard_perimeter(A):2d} relation={rel}"
        if polyiamond.quasi_regular_index(A):
            qr = [P for P, q in zip(polys, perims) if polyiamond.is_quasi_regular(P)]
            others = [q for P, q in zip(polys, perims) if not polyiamond.is_quasi_regular(P)]
            gap = min(others) - pmin if others else None
            ok &= len(qr) == 1 and (gap is None or gap >= 2)
            line += f" quasi_regular_unique={len(qr) == 1} gap={gap}"
        ok &= rel
        failures += not ok
        print(("PASS " if ok else "FAIL ") + line)
    return 1 if failures else 0


def cmd_gate_count(a) -> int:
    params = ModelParams(a.J, a.h, 1.0)
    gc = harness.gate_count_enumeration(params, a.L)
    print(harness.dumps({"count_S": gc.count_S, "count_D": gc.count_D, "expected_S": gc.expected_S,
                         "expected_D": gc.expected_D, "matches": gc.matches}))
    return 0 if gc.matches else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hexmeta", description="Metastability of the hexagonal-lattice Ising model")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory", help="closed-form predictions")
    _model_args(p)
    p.add_argument("--L", type=int, default=None)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("landscape", help="reference-path energy profile as CSV")
    _model_args(p, need_beta=False)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("simulate", help="replica hitting times")
    _model_args(p, beta_default=0.55)
    p.add_argument("--L", type=int, default=12)
    p.add_argument("--replicas", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--gate-detect", type=_onoff, default=True)
    p.add_argument("--dust", type=int, default=0)
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="hitting-time sweep over beta")
    p.add_argument("--config", default=None, help="JSON config; flags override its values")
    p.add_argument("--J", type=float, default=None)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--betas", type=_floats, default=None)
    p.add_argument("--replicas", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--parallelism", type=int, default=None)
    p.add_argument("--dust", type=int, default=None)
    p.add_argument("--check", action="store_true", help="exit nonzero unless slope, KS and gate thresholds hold")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("exact", help="exact chain on L = 2 or 3")
    _model_args(p)
    p.add_argument("--L", type=int, default=2, choices=(2, 3))
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("polyiamond", help="polyiamond enumeration and checks")
    p.add_argument("action", choices=("enumerate", "verify", "decompose"))
    p.add_argument("--A", type=int, default=6)
    p.add_argument("--max-area", type=int, default=13)
    p.add_argument("--cap", type=int, default=polyiamond.ENUMERATION_CAP)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_polyiamond)

    p = sub.add_parser("gate-count", help="enumerate torus placements of the critical droplets")
    _model_args(p, need_beta=False)
    p.add_argument("--L", type=int, default=12)
    p.set_defaults(func=cmd_gate_count)
    return ap


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    try:
        return a.func(a)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
