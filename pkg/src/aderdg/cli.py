"""Command line entry point: ``aderdg run | converge | selftest``."""
from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigError, NumericalFailure

EXIT_OK = 0
EXIT_FAILED_CHECKS = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

log = logging.getLogger("aderdg")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aderdg", description="ADER-DG with a posteriori subcell limiting "
                                                           "for the Euler equations.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one scenario and write tables and figures")
    r.add_argument("--config", help="key=value file; explicit flags override it")
    r.add_argument("--scenario")
    r.add_argument("--N", type=int)
    r.add_argument("--Ns", type=int)
    r.add_argument("--nx", type=int)
    r.add_argument("--ny", type=int)
    r.add_argument("--cfl", type=float)
    r.add_argument("--flux", choices=["rusanov", "osher"], help="default: the scenario's own")
    r.add_argument("--t-final", dest="t_final", type=float)
    r.add_argument("--out")
    r.add_argument("--frame-every", dest="frame_every", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--dmp-eps", dest="dmp_eps", type=float)
    r.add_argument("--dmp-floor", dest="dmp_floor", type=float)
    r.add_argument("--ic-mode", dest="ic_mode", choices=["interpolate", "l2"])
    r.add_argument("--no-limiter", dest="limiter", action="store_const", const=False)

    c = sub.add_parser("converge", help="grid convergence study on a smooth scenario")
    c.add_argument("--scenario", default="vortex")
    c.add_argument("--N", type=int, default=2)
    c.add_argument("--grids", default="25,50,75,100")
    c.add_argument("--cfl", type=float, default=0.9)
    c.add_argument("--flux", choices=["rusanov", "osher"], help="default: the scenario's own")
    c.add_argument("--out", default="converge_out")

    sub.add_parser("selftest", help="run the built-in invariant checks")
    return p


def _fmt(v):
    if v is None:
        return ""
    return f"{v:.4g}" if isinstance(v, float) else str(v)


def _cmd_run(args) -> int:
    from .config import load_config
    from .harness import run

    keys = ("scenario", "N", "Ns", "nx", "ny", "cfl", "flux", "t_final", "out", "frame_every", "seed",
            "dmp_eps", "dmp_floor", "ic_mode", "limiter")
    cfg = load_config(args.config, {k: getattr(args, k) for k in keys})
    res = run(cfg)
    s = res.summary
    print(f"{cfg.scenario}: N={s['N']} cells={s['cells']} steps={s['steps']} t={s['t']:.6g} "
          f"max troubled={s['max_troubled']} wall={s['wall_time']:.1f}s")
    if "density_error" in s:
        e = s["density_error"]
        print(f"density error L1={e['L1']:.4e} L2={e['L2']:.4e} Linf={e['Linf']:.4e}")
    print(f"outputs in {cfg.out}")
    return EXIT_OK


def _cmd_converge(args) -> int:
    from .harness import convergence_study

    try:
        grids = [int(g) for g in args.grids.split(",") if g.strip()]
    except ValueError:
        raise ConfigError(f"grids must be a comma separated list of integers, got {args.grids!r}") from None
    if not grids or min(grids) < 1:
        raise ConfigError("need at least one positive grid size")
    print("cells,L1,L2,Linf,order_L1,order_L2,order_Linf")
    rows = convergence_study(args.N, grids, args.scenario, args.cfl, args.flux, out=args.out,
                             progress=lambda r: log.info("grid %d done: L1=%.3e", r["cells"], r["L1"]))
    for r in rows:
        print(",".join(_fmt(r[k]) for k in ("cells", "L1", "L2", "Linf", "order_L1", "order_L2", "order_Linf")))
    return EXIT_OK


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return EXIT_OK if run_selftest() else EXIT_FAILED_CHECKS


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    handlers = {"run": _cmd_run, "converge": _cmd_converge, "selftest": _cmd_selftest}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
