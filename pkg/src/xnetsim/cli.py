"""Command line front end.

Exit codes: 0 success, 2 bad configuration or input, 3 a verification
check failed, 4 the simulator hit max_trials before collecting the
requested codeword errors at some SNR point.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, checks, codes, sim
from .constellations import by_name as constellation_by_name
from .errors import XnetsimError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECK_FAILED = 3
EXIT_CAPPED = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xnetsim",
        description="Simulate and verify the two-pair MIMO X-network link.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo BER sweep")
    p_sim.add_argument("--config", required=True, help="TOML sweep definition")
    p_sim.add_argument("--out", required=True, help="output CSV path")
    p_sim.add_argument("--quiet", action="store_true", help="suppress progress lines")

    p_ver = sub.add_parser("verify", help="run one algebraic verification")
    p_ver.add_argument(
        "check", choices=("cc", "full-rank", "det-identity", "commutator"),
        help="which property to verify",
    )
    p_ver.add_argument("--code", help="code name (cc, full-rank, commutator)")
    p_ver.add_argument("--constellation", help="constellation name (full-rank)")
    p_ver.add_argument("--theta", type=float, default=float(np.pi / 4),
                       help="design angle for codes that take one")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--report", help="write the full JSON report here")

    p_rank = sub.add_parser("rankstats", help="effective-system rank statistics")
    p_rank.add_argument("--code", required=True)
    p_rank.add_argument("--theta", type=float, default=float(np.pi / 4))
    p_rank.add_argument("--draws", type=int, default=1000)
    p_rank.add_argument("--seed", type=int, default=0)
    p_rank.add_argument("--report", help="write the full JSON report here")

    p_slope = sub.add_parser("slope", help="fit a diversity slope to a sweep CSV")
    p_slope.add_argument("--in", dest="infile", required=True, help="sweep CSV")
    p_slope.add_argument("--window", type=int, default=None,
                         help="use only the last N points")
    return parser


def _cmd_simulate(args) -> int:
    config = sim.SimConfig.from_toml(args.config)

    def progress(point):
        if not args.quiet:
            print(
                f"snr {point.snr_db:g} dB: trials={point.trials} "
                f"ber={point.ber:.3e} cwer={point.cwer:.3e}"
                + (" [capped]" if point.capped else ""),
                file=sys.stderr,
            )

    sweep = sim.run_sweep(config, on_point=progress)
    sim.write_csv(args.out, sweep)
    return EXIT_CAPPED if sweep.any_capped else EXIT_OK


def _verify_report(args):
    if args.check == "cc":
        if not args.code:
            raise XnetsimError("verify cc needs --code")
        return checks.check_cancellation(codes.code_by_name(args.code, args.theta), seed=args.seed)
    if args.check == "full-rank":
        if not args.code or not args.constellation:
            raise XnetsimError("verify full-rank needs --code and --constellation")
        return checks.check_full_rank(
            codes.code_by_name(args.code, args.theta),
            constellation_by_name(args.constellation),
        )
    if args.check == "det-identity":
        return checks.check_det_identity(seed=args.seed)
    # commutator: applies to replicated schemes, which carry the map
    if not args.code:
        raise XnetsimError("verify commutator needs --code")
    code = codes.code_by_name(args.code, args.theta)
    if code.replication_map is None:
        raise XnetsimError(f"code {args.code!r} has no replication map to check")
    return checks.check_commutator(code.replication_map, seed=args.seed)


def _cmd_verify(args) -> int:
    report = _verify_report(args)
    payload = report.to_dict()
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump({"check": args.check, **payload}, fh, indent=2)
            fh.write("\n")
    detail = " ".join(f"{k}={v}" for k, v in payload.items() if k != "passed")
    print(f"{'PASS' if report.passed else 'FAIL'} {args.check} {detail}")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _cmd_rankstats(args) -> int:
    stats = checks.effective_rank_stats(
        codes.code_by_name(args.code, args.theta), draws=args.draws, seed=args.seed
    )
    payload = stats.to_dict()
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    print(" ".join(f"{k}={v}" for k, v in payload.items()))
    return EXIT_OK


def _cmd_slope(args) -> int:
    _, cols = sim.read_csv(args.infile)
    fit = checks.estimate_diversity_slope(cols["snr_db"], cols["ber"], window=args.window)
    print(
        f"slope={fit.slope:.4f} intercept={fit.intercept:.4f} "
        f"points={fit.n_points} range={fit.snr_db_min:g}..{fit.snr_db_max:g}dB"
    )
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "verify": _cmd_verify,
        "rankstats": _cmd_rankstats,
        "slope": _cmd_slope,
    }
    try:
        return handlers[args.command](args)
    except XnetsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
