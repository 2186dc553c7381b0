"""``catsim`` command line: run, verify, bench, sweep-tiles and cost-model."""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from catsim import cost
from catsim.bench import BENCH_HEADER, SWEEP_HEADER, bench, sweep_tiles, write_csv
from catsim.engine import CatConfig
from catsim.errors import CatError
from catsim.grid import PRESETS, Grid, NeighborhoodKind, parse_ltl_rule, preset_for_radius, random_cells
from catsim.layout import to_fragment_layout
from catsim.mma import gen_band_fragments
from catsim.snapshot import snapshot_write
from catsim.verify import ENGINES, run_engine, verify_case


def int_list(text: str) -> list[int]:
    """Parse ``"1,4,8"`` or ranges like ``"1-16"`` (mixable); empty text is an empty list."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    return out


def _resolve_rule(args):
    if args.preset:
        if args.preset not in PRESETS:
            raise CatError(f"unknown preset {args.preset!r}; known: {', '.join(PRESETS)}")
        preset = PRESETS[args.preset]
        return preset.rule, preset.density
    return parse_ltl_rule(args.rule), 0.25


def padded_initial_grid(n: int, f: int, density: float, seed: int) -> Grid:
    """Random ``n x n`` pattern in the top-left of a grid padded up to a multiple of ``f`` with dead cells."""
    side = -(-n // f) * f
    grid = Grid.zeros(side, f)
    grid.interior()[:n, :n] = random_cells(n * n, density, seed).reshape(n, n)
    return grid


def _workers(value):
    return value if value is not None else int(os.environ.get("CAT_WORKERS", "1"))


def cmd_run(args) -> int:
    rule, default_density = _resolve_rule(args)
    density = args.density if args.density is not None else default_density
    grid = padded_initial_grid(args.n, args.fragment, density, args.seed)
    cfg = CatConfig(f=args.fragment, tile_w=args.tile_w, tile_h=args.tile_h, workers=_workers(args.workers))
    t0 = time.perf_counter()
    final = run_engine(args.engine, grid, rule, args.steps, cfg)
    elapsed = time.perf_counter() - t0
    if args.engine == "cat":
        final = to_fragment_layout(final)
    snapshot_write(final, args.out)
    rate = args.steps * args.n * args.n / elapsed if args.steps and elapsed > 0 else 0.0
    padded = f" padded_n={grid.n}" if grid.n != args.n else ""
    print(f"rule={rule} engine={args.engine} n={args.n}{padded} steps={args.steps} "
          f"alive={final.alive()} cells_per_sec={rate:.4g} snapshot={args.out}")
    return 0


def cmd_verify(args) -> int:
    radii = int_list(args.radii)
    sizes = int_list(args.sizes)
    seeds = int_list(args.seeds)
    steps_list = int_list(args.steps)
    kinds = [NeighborhoodKind(k) for k in args.kinds.split(",") if k]
    cfg = CatConfig(tile_w=args.tile_w, tile_h=args.tile_h, workers=_workers(args.workers))
    cases = failures = 0
    for r in radii:
        bands = None
        if args.inject_fault:
            bands = gen_band_fragments(cfg.f, r).with_flipped_bit("pi2", 0, 0)
        for kind in kinds:
            for n in sizes:
                for seed in seeds:
                    for steps in steps_list:
                        res = verify_case(r, kind, n, seed, steps, cfg, bands)
                        cases += 1
                        if not res.passed:
                            failures += 1
                        if args.verbose or not res.passed:
                            print(res.describe())
    status = "PASS" if failures == 0 else "FAIL"
    print(f"{status}: {cases - failures}/{cases} cases byte-identical across {', '.join(ENGINES)}")
    return 0 if failures == 0 else 1


def cmd_bench(args) -> int:
    engines = [e for e in args.engine.split(",") if e]
    rules = [preset_for_radius(r).rule for r in int_list(args.radii)]
    cfg = CatConfig(tile_w=args.tile_w, tile_h=args.tile_h, workers=_workers(args.workers))
    results = bench(engines, args.n, rules, args.steps, seed=args.seed, density=args.density, cfg=cfg,
                    min_realizations=args.min_realizations, max_realizations=args.max_realizations)
    _emit(args.out, BENCH_HEADER, [r.row() for r in results])
    return 0


def cmd_sweep_tiles(args) -> int:
    rule = preset_for_radius(args.r).rule
    rows = sweep_tiles(int_list(args.w_range), int_list(args.h_range), args.n, rule, steps=args.steps,
                       seed=args.seed, workers=_workers(args.workers),
                       min_realizations=args.min_realizations, max_realizations=args.max_realizations)
    _emit(args.out, SWEEP_HEADER, [(w, h, f"{ms:.4f}") for w, h, ms in rows])
    return 0


def cmd_cost_model(args) -> int:
    overrides = {}
    if args.params:
        overrides.update(cost.parse_overrides(Path(args.params).read_text()))
    if args.set:
        overrides.update(cost.parse_overrides(" ".join(args.set)))
    base = cost.CostParams().replace(**overrides)
    if args.derive_e:
        opts = cost.parse_derive_request(args.derive_e)
        e = cost.derive_e(base, opts["r"], opts["target"])
        print(f"E={e:.6f} (w x h = {base.tile_w}x{base.tile_h}, r={opts['r']}, target={opts['target']})")
        return 0
    radii = int_list(args.radii)
    efficiencies = None if "tile_efficiency" in overrides else cost.tile_efficiencies()
    table = cost.scenario_table(base, radii=radii, efficiencies=efficiencies)
    print(cost.format_table(table, radii))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            write_csv(fh, ["scenario", "change"] + [f"r={r}" for r in radii],
                      [[sc.name, sc.change] + [f"{v:.6g}" for v in row]
                       for sc, row in zip(cost.TABLE_II_SCENARIOS, table)])
    return 0


def _emit(out, header, rows):
    if out in (None, "-"):
        write_csv(sys.stdout, header, rows)
    else:
        with open(out, "w", newline="") as fh:
            write_csv(fh, header, rows)


def _add_cat_opts(p):
    p.add_argument("--tile-w", type=int, default=1, help="tile width in fragments")
    p.add_argument("--tile-h", type=int, default=14, help="tile height in fragments")
    p.add_argument("--workers", type=int, default=None, help="worker threads (default $CAT_WORKERS or 1)")


def _add_realization_opts(p):
    p.add_argument("--min-realizations", type=int, default=2)
    p.add_argument("--max-realizations", type=int, default=32)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a rule and write the final snapshot")
    rule = p.add_mutually_exclusive_group(required=True)
    rule.add_argument("--rule", help="rule string, e.g. R1,C2,M0,S2..3,B3..3,NM")
    rule.add_argument("--preset", help=f"named instance: {', '.join(PRESETS)}")
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--steps", type=int, default=25)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--density", type=float, default=None, help="initial density (default: preset's, else 0.25)")
    p.add_argument("--engine", choices=ENGINES, default="cat")
    p.add_argument("--fragment", type=int, default=16, choices=(4, 8, 16))
    p.add_argument("--out", default="final.catsnap")
    _add_cat_opts(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="cross-check cat and pack against base")
    p.add_argument("--radii", default="1-16")
    p.add_argument("--sizes", default="32,64")
    p.add_argument("--seeds", default="1,2,3")
    p.add_argument("--steps", default="1,25")
    p.add_argument("--kinds", default="M,N", help="comma list of M (Moore) and N (Von Neumann)")
    p.add_argument("--inject-fault", action="store_true", help="flip one pi2 bit in the cat engine")
    p.add_argument("-v", "--verbose", action="store_true")
    _add_cat_opts(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time engines and emit CSV")
    p.add_argument("--engine", default="cat,base,pack", help="comma list of engines")
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--radii", default="1,4,8,16")
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--density", type=float, default=0.25)
    p.add_argument("--out", default="-")
    _add_cat_opts(p)
    _add_realization_opts(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sweep-tiles", help="time the cat engine over tile shapes")
    p.add_argument("--w-range", default="1-4")
    p.add_argument("--h-range", default="1-16")
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--steps", type=int, default=2)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default="-")
    _add_realization_opts(p)
    p.set_defaults(func=cmd_sweep_tiles)

    p = sub.add_parser("cost-model", help="theoretical speedup table")
    p.add_argument("--params", help="file of key=value overrides applied to the default parameters")
    p.add_argument("--set", nargs="*", help="inline key=value overrides")
    p.add_argument("--radii", default="1,4,8,16")
    p.add_argument("--derive-e", nargs="+", metavar="KEY=VALUE",
                   help="solve for the tile efficiency factor, e.g. --derive-e r=1 target=1.20")
    p.add_argument("--csv", help="also write the table as CSV")
    p.set_defaults(func=cmd_cost_model)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CatError, ValueError, OSError) as exc:
        print(f"catsim {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
