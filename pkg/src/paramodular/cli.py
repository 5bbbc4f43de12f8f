"""Command line entry point: ``paramodular <subcommand> [options]``.

Every subcommand prints one ``key=value`` record per check and exits with the
number of failed checks (capped at 125).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import verify
from .exact import check_prime
from .groups import Chart, GroupId, GroupKind, Sampler, SamplerConfig, make_kappa, make_wtilde
from .siegel import SiegelSeries, build_delta1, collect_characters
from .sp4f2 import enumerate_sp4f2


def _common(sub: argparse.ArgumentParser, **defaults) -> None:
    sub.add_argument("--p", type=int, default=defaults.get("p", 3))
    sub.add_argument("--seed", type=int, default=defaults.get("seed", 42))
    sub.add_argument("--samples", type=int, default=defaults.get("samples", 1000))
    sub.add_argument("--cap", type=int, default=defaults.get("cap", 96))
    sub.add_argument("--tol", type=float, default=defaults.get("tol", 1e-4))
    sub.add_argument("--out", default=None, help="write the report (or the series) to this file")
    sub.add_argument("--convention", choices=("i", "no-i"), default="i",
                     help="substitution for r: e(tau2) ('i') or exp(2 pi tau2) ('no-i')")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paramodular", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    _common(subs.add_parser("verify-group", help="exact identities of the paramodular groups"))
    sub = subs.add_parser("enumerate-sp4f2", help="enumerate Sp(4, F2)")
    _common(sub)
    sub.add_argument("--stats", action="store_true", help="print order, derived order and class count")
    _common(subs.add_parser("audit-uniqueness", help="replay the uniqueness argument step by step"))
    _common(subs.add_parser("build-delta", help="expand Delta_1 and write it to --out"))
    sub = subs.add_parser("check-characters", help="slash ratios of a stored series on sampled elements")
    _common(sub, samples=50)
    sub.add_argument("--series", default=None, help="series file; built at --cap when omitted")
    sub.add_argument("--group", default="GammaCircle",
                     help="GammaCircle, GammaCircleLevel2, GammaStar or GammaStarLevel2")
    sub.add_argument("--weight", type=int, default=1)
    sub.add_argument("--order", type=int, default=6)
    sub.add_argument("--word-length", type=int, default=8)
    sub = subs.add_parser("check-dual-identity", help="residual of the dual period matrix identity")
    _common(sub, samples=20)
    sub = subs.add_parser("run-all", help="every check, in order")
    _common(sub)
    sub.add_argument("--cache", default=None, help="directory for cached series files")
    return parser


def _emit(lines: list[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if out:
        Path(out).write_text(text)


def _finish(reports: list[verify.Report], out: str | None, extra: list[str] | None = None) -> int:
    _emit((extra or []) + [r.line() for r in reports], out)
    return verify.exit_code(reports)


def _stream(group: GroupId, seed: int, word_length: int):
    """Sampled elements; the starred groups alternate between the two cosets."""
    level2 = group.kind in (GroupKind.GAMMA_CIRCLE_LEVEL2, GroupKind.GAMMA_STAR_LEVEL2)
    kind = GroupKind.GAMMA_CIRCLE_LEVEL2 if level2 else GroupKind.GAMMA_CIRCLE
    sampler = Sampler(GroupId(kind, Chart.TILDE, group.p), SamplerConfig(seed=seed, word_length=word_length))
    starred = group.kind in (GroupKind.GAMMA_STAR, GroupKind.GAMMA_STAR_LEVEL2)
    w = make_wtilde(group.p)
    for k, g in enumerate(sampler):
        if starred and k % 2:
            # kappa is in the kernel of pi_star and sits in the Fricke coset
            yield (w @ g) if group.kind is GroupKind.GAMMA_STAR else make_kappa(group.p) @ g
        else:
            yield g


def cmd_check_characters(args) -> int:
    group = GroupId.parse(args.group, args.p)
    sr = SiegelSeries.load(args.series) if args.series else build_delta1(args.cap)
    res = collect_characters(sr, _stream(group, args.seed, args.word_length), args.weight, args.order,
                             args.samples, snap_tol=args.tol, const_tol=args.tol, convention=args.convention,
                             seed=args.seed)
    lines = []
    for k, r in enumerate(res.reports):
        lines.append(f"element={k} snapped={r.snapped} residual={r.residual:.2e} "
                     f"ratio={r.ratio.real:+.8f}{r.ratio.imag:+.8f}j")
    bad = sum(r.snapped is None for r in res.reports)
    status = verify.FAIL if bad else (verify.PASS if len(res.reports) >= args.samples else verify.SKIP)
    rep = verify.Report("check_characters", status,
                        f"evaluated={len(res.reports)},skipped={res.skipped},unsnapped={bad}",
                        f"order_{args.order}_roots", args.tol, "character-scan")
    return _finish([rep], args.out, lines)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        check_prime(args.p)
        cfg = verify.RunConfig(p=args.p, seed=args.seed, samples=args.samples, cap=args.cap, tol=args.tol,
                               out=args.out, cache_dir=getattr(args, "cache", None), convention=args.convention)
    except ValueError as exc:  # includes InvalidPrime
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2

    if args.command == "verify-group":
        return _finish(verify.group_checks(cfg.p, cfg.samples, cfg.seed), cfg.out)
    if args.command == "enumerate-sp4f2":
        reports = verify.sp4f2_checks(cfg.p)
        extra = []
        if args.stats:
            t = enumerate_sp4f2()
            extra.append(f"order={len(t)} derived={int(t.derived_mask.sum())} classes={len(t.conjugacy_classes())}")
        return _finish(reports, cfg.out, extra)
    if args.command == "audit-uniqueness":
        reports, text = verify.audit_checks(cfg.p, min(cfg.samples, 200), cfg.seed)
        return _finish(reports, cfg.out, text.splitlines())
    if args.command == "build-delta":
        sr = build_delta1(cfg.cap)
        if cfg.out:
            sr.save(cfg.out)
        print(f"cap={sr.cap} terms={len(sr)} out={cfg.out or '-'}")
        return 0
    if args.command == "check-characters":
        return cmd_check_characters(args)
    if args.command == "check-dual-identity":
        return _finish(verify.dual_identity_checks(cfg.p, cfg.samples, cfg.seed), cfg.out)
    if args.command == "run-all":
        reports = verify.run_all(cfg, log=lambda line: print(line, flush=True))
        if cfg.out:
            Path(cfg.out).write_text("".join(r.line() + "\n" for r in reports))
        return verify.exit_code(reports)
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
