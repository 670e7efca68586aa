"""Command-line entry point: ``murmur {ap,zeta,murmurate,satotate}``.

Exit codes: 0 success, 1 I/O or parse failure, 2 domain rejection (CM curve,
bad reduction, empty family) or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from murmur import murmuration as mm
from murmur import satotate as st
from murmur.config import Config, load_config
from murmur.curves import CurveOverQ
from murmur.errors import MurmurError, ParseError
from murmur.family import ApCache, CurveRecord, FamilyFilter, ap_table, find_record, load_family
from murmur.primes import sieve
from murmur.zeta import angle_data, beta_sequence, rh_check, zeta_polynomial


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _parse_ainvs(text: str) -> CurveOverQ:
    try:
        ainvs = [int(t) for t in text.replace("[", "").replace("]", "").split(",")]
    except ValueError as exc:
        raise ParseError(f"cannot parse a-invariants {text!r}") from exc
    return CurveOverQ.from_ainvs(ainvs)


def _resolve_curve(args) -> CurveOverQ | CurveRecord:
    if args.curve:
        return _parse_ainvs(args.curve)
    if args.label and args.family:
        return find_record(args.family, args.label)
    raise ParseError("give --curve a1,a2,a3,a4,a6 or --label with --family")


def _out_dir(cfg: Config) -> Path:
    d = Path(cfg.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def cmd_ap(args, cfg: Config) -> int:
    curve = _resolve_curve(args)
    cache = ApCache.from_env(cfg.cache)
    table = ap_table(curve, (int(p) for p in sieve(args.pmax)), cache, cfg.threads, cfg.bsgs_cutoff)
    lines = ["p,ap"] + [f"{p},{ap}" for p, ap in table.items() if ap is not None]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_zeta(args, cfg: Config) -> int:
    bs = beta_sequence(args.q, args.a1, args.n, strict=not args.no_strict)
    ri = zeta_polynomial(bs, args.n)
    ang = angle_data(ri)
    doc = {
        "q": args.q,
        "a1": args.a1,
        "n": args.n,
        "betas": [_frac(b) for b in bs.betas],
        "a_n": _frac(ri.a_n),
        "alpha_n": _frac(ri.alpha_n),
        "P": [_frac(c) for c in ri.P_coeffs],
        "theta": float(f"{ang.theta_n:.12g}"),
        "delta": None if ang.delta_n is None else float(f"{ang.delta_n:.12g}"),
        "clamped": ang.clamped,
        "rh": rh_check(ri),
    }
    print(json.dumps(doc, indent=2))
    return 0


def cmd_murmurate(args, cfg: Config) -> int:
    flt = FamilyFilter.parse_range(args.rank, args.conductor)
    family = load_family(args.family, flt, dedupe=not args.no_dedupe)
    cache = ApCache.from_env(cfg.cache)
    series = mm.f_series(family, args.n, args.imax, cfg.bad_prime_policy, cache, cfg.threads, flt)
    out = _out_dir(cfg)
    stem = f"murmuration_r{args.rank if args.rank is not None else 'all'}_n{args.n}"
    written = [
        mm.emit_series(series, out / f"{stem}.csv", "csv"),
        mm.emit_series(series, out / f"{stem}.json", "json"),
        mm.emit_series(series, out / f"{stem}.svg", "svg", args.x),
    ]
    if args.fit:
        fit = mm.fit_murmuration(series, args.x)
        doc = {k: float(f"{getattr(fit, k):.12g}") for k in ("A", "alpha", "B", "beta", "residual_rms")}
        doc.update(converged=fit.converged, x_axis=fit.x_axis)
        path = out / f"{stem}_fit.json"
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        written.append(path)
    for w in series.warnings:
        print(f"warning: {w}", file=sys.stderr)
    for path in written:
        print(path)
    return 0


def cmd_satotate(args, cfg: Config) -> int:
    curve = _resolve_curve(args)
    base = curve.curve if isinstance(curve, CurveRecord) else curve
    cache = ApCache.from_env(cfg.cache)
    samples = st.delta_samples(curve, args.n, args.pmax, args.allow_cm, cache, cfg.threads, cfg.bsgs_cutoff)
    bad = st.bad_primes_up_to(base, args.pmax)
    report = st.build_report(samples, args.n, args.pmax, args.bins, cfg.clamp_policy, bad)
    out = _out_dir(cfg)
    stem = f"satotate_n{args.n}_N{args.pmax}"
    (out / f"{stem}.json").write_text(report.to_json(), encoding="utf-8")
    (out / f"{stem}.svg").write_text(st.report_svg(report), encoding="utf-8")
    (out / f"{stem}_samples.csv").write_text(st.samples_csv(samples), encoding="utf-8")
    (out / f"{stem}_scatter.svg").write_text(st.scatter_svg_samples(samples, args.n), encoding="utf-8")
    sys.stdout.write(report.to_json())
    return 0


def _positive(kind):
    def check(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
        if v < kind:
            raise argparse.ArgumentTypeError(f"must be >= {kind}, got {v}")
        return v

    return check


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value configuration file")
    common.add_argument("--cache", help="a_p cache file (default: $MURMUR_CACHE)")
    common.add_argument("--threads", type=_positive(1), help="worker processes (default: $MURMUR_THREADS or 1)")
    common.add_argument("--cutoff", type=_positive(5), dest="bsgs_cutoff", help="largest p counted naively")
    common.add_argument("--out-dir", dest="out_dir", help="directory for output files")

    parser = argparse.ArgumentParser(prog="murmur", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def curve_opts(p):
        p.add_argument("--curve", help="a-invariants a1,a2,a3,a4,a6 (use --curve=-1,... for a leading minus)")
        p.add_argument("--label", help="curve label, resolved against --family")
        p.add_argument("--family", help="family CSV file")

    p = sub.add_parser("ap", parents=[common], help="Frobenius traces a_p at good primes")
    curve_opts(p)
    p.add_argument("--pmax", type=int, required=True)
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_ap)

    p = sub.add_parser("zeta", parents=[common], help="rank-n zeta invariants for (q, a1)")
    p.add_argument("--q", type=_positive(2), required=True)
    p.add_argument("--a1", type=int, required=True)
    p.add_argument("--n", type=_positive(1), required=True)
    p.add_argument("--no-strict", action="store_true", help="allow non-positive betas (forged inputs)")
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser("murmurate", parents=[common], help="rank-n murmuration series over a family")
    p.add_argument("--family", required=True)
    p.add_argument("--rank", type=int)
    p.add_argument("--conductor", help="N1:N2")
    p.add_argument("--n", type=_positive(1), required=True)
    p.add_argument("--imax", type=_positive(1), required=True)
    p.add_argument("--fit", action="store_true")
    p.add_argument("--x", choices=("i", "p"), default="i")
    p.add_argument("--policy", choices=("skip", "formal", "strict"), dest="bad_prime_policy")
    p.add_argument("--no-dedupe", action="store_true")
    p.set_defaults(func=cmd_murmurate)

    p = sub.add_parser("satotate", parents=[common], help="Sato-Tate statistics of Delta_n for one curve")
    curve_opts(p)
    p.add_argument("--n", type=_positive(1), required=True)
    p.add_argument("--pmax", type=_positive(2), required=True)
    p.add_argument("--bins", type=_positive(1), default=20)
    p.add_argument("--allow-cm", action="store_true")
    p.add_argument("--clamp-policy", choices=("include", "exclude"), dest="clamp_policy")
    p.set_defaults(func=cmd_satotate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = {
            k: getattr(args, k, None)
            for k in ("cache", "threads", "bsgs_cutoff", "out_dir", "bad_prime_policy", "clamp_policy")
        }
        cfg = load_config(args.config, **overrides)
        return args.func(args, cfg)
    except MurmurError as exc:
        print(f"murmur: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"murmur: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
