"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed (or a domain error), 2 usage
error, 3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import InvariantBreach, ThetaPolyError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BREACH = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_k(text: str):
    try:
        k = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--k expects four comma-separated integers, got {text!r}")
    if len(k) != 4:
        raise UsageError(f"--k expects exactly four integers, got {len(k)}")
    return k


def _kindex(k, n=None, m=None):
    from .kernel import KIndex

    s = sum(k)
    if m is None:
        if n is None:
            n = s // 2 if s % 2 == 0 else None
            if n is None:
                raise UsageError("give --n or --m; |k| is odd")
        m = 2 * n - s
    if m < 0:
        raise UsageError(f"m = {m} is negative")
    if (s + m) % 2:
        raise UsageError("|k| + m must be even")
    ki = KIndex(k, m)
    if n is not None and ki.n != n:
        raise UsageError(f"--n {n} and --m {m} are inconsistent for k = {k}")
    return ki


def _emit(payload, output, human=None):
    text = payload if isinstance(payload, (bytes, str)) else json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if isinstance(text, str):
        text = text.encode()
    if output:
        Path(output).write_bytes(text)
        if human:
            print(human)
    else:
        sys.stdout.buffer.write(text)
        sys.stdout.flush()


def _cache(args):
    from .cache import Cache

    return Cache(args.cache_dir)


# -- verbs ----------------------------------------------------------------------------

def cmd_gen(args) -> int:
    k = parse_k(args.k)
    ki = _kindex(k, args.n, args.m)
    kind = "U" if args.dual else "T"
    data, hit = _cache(args).get_bytes(kind, ki.n, ki.k, ki.m)
    from .cache import decode

    obj = decode(json.loads(data))
    human = f"{kind}_{ki.n}^{ki.k} in {ki.m} variables: {obj.num}" + ("" if obj.is_polynomial() else f" / ({obj.den})")
    if args.output:
        _emit(data, args.output, human)
    else:
        print(human)
        if args.json:
            sys.stdout.write(data.decode())
    return EXIT_OK


def cmd_tau(args) -> int:
    from .kernel import tau
    from .scalars import RatFunZeta

    k = parse_k(args.k)
    if sum(k) % 2:
        raise UsageError("|k| must be even")
    t = tau(k)
    js = t.to_json()
    num = str(RatFunZeta.from_json({"num": js["num"], "den": ["1"]}))
    den = str(RatFunZeta.from_json({"num": js["den"], "den": ["1"]}))
    report = {"k": list(k), "factored": t.factored(), "num": num, "den": den, "json": js}
    if args.output:
        _emit(report, args.output, t.factored())
    else:
        print(t.factored())
        print("num:", num)
        print("den:", den)
    return EXIT_OK


def pde_indices(window: int, mmax: int):
    from .kernel import KIndex

    r = range(-window, window + 1)
    out = []
    for k in itertools.product(r, repeat=4):
        if sum(map(abs, k)) > window:
            continue
        for m in range(mmax + 1):
            if (sum(k) + m) % 2 == 0:
                out.append(KIndex(k, m))
    out.sort(key=lambda ki: (sum(map(abs, ki.k)), ki.m, ki.k))
    return out


def _pde_job(ki):
    from .pde import apply_omega, apply_omega_dual

    t0 = time.perf_counter()
    r1 = apply_omega(ki).is_zero()
    r2 = apply_omega_dual(ki).is_zero()
    return {"k": list(ki.k), "m": ki.m, "n": ki.n, "omega": r1, "omega_dual": r2,
            "pass": r1 and r2, "wall_time": round(time.perf_counter() - t0, 3)}


def _fan_out(fn, items, jobs):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(i) for i in items]


def cmd_verify_pde(args) -> int:
    if args.k:
        idx = [_kindex(parse_k(args.k), args.n, args.m)]
    else:
        idx = pde_indices(args.window, args.m if args.m is not None else 3)
    records = _fan_out(_pde_job, idx, args.jobs)
    ok = all(r["pass"] for r in records)
    _emit(records, args.output, f"{sum(r['pass'] for r in records)}/{len(records)} indices pass")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify_bilinear(args) -> int:
    from .kernel import KIndex
    from .lattice import bst_check, lattice_verify

    rep = lattice_verify(args.window, jobs=args.jobs)
    records = rep.to_json()
    ok = rep.passed
    bst = []
    if args.k:
        k = parse_k(args.k)
        ki = KIndex(k, 1)
        res = bst_check(ki)
        bst.append({"k": list(k), "m": 1, "pass": res})
        ok = ok and res
    payload = {"window": args.window, "records": records, "bst": bst, "pass": ok}
    npass = sum(1 for r in records if r["nonzero"] and all(r["residuals"].values()))
    _emit(payload, args.output, f"{npass}/{len(records)} lattice points pass")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify_elliptic(args) -> int:
    from .elliptic import CATALOGUE, EllipticCtx, default_grid, identity_report, parse_tau, verify_schroedinger

    if args.prec < 30:
        raise UsageError("--prec must be at least 30")
    names = tuple(args.identities.split(",")) if args.identities else CATALOGUE
    bad = [n for n in names if n not in CATALOGUE]
    if bad:
        raise UsageError(f"unknown identities: {', '.join(bad)}")
    taus = args.tau or ["1.2i", "0.3+1.1i"]
    records = []
    for t in taus:
        try:
            tv = parse_tau(t)
        except ValueError:
            raise UsageError(f"cannot parse tau {t!r}; use a+bi")
        if tv.imag <= 0:
            raise UsageError("tau must have positive imaginary part")
        ctx = EllipticCtx(tv, args.prec)
        grid = default_grid(ctx, args.grid)
        for r in identity_report(ctx, names, grid):
            r["tau"] = t
            records.append(r)
        if args.k:
            ki = _kindex(parse_k(args.k), m=args.m if args.m is not None else 1)
            rep = verify_schroedinger(ki, ctx)
            d = rep.to_json()
            d.update({"identity": "schroedinger", "tau": t})
            records.append(d)
    ok = all(r["pass"] for r in records)
    _emit(records, args.output, f"{sum(r['pass'] for r in records)}/{len(records)} checks pass")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_cache(args) -> int:
    c = _cache(args)
    if args.action == "path":
        print(c.root)
    elif args.action == "list":
        for p in c.entries():
            print(p.name)
    elif args.action == "clear":
        print(f"removed {c.clear()} entries")
    elif args.action == "verify":
        res = c.verify()
        _emit(res, args.output)
        return EXIT_OK if all(res.values()) else EXIT_FAIL
    elif args.action == "warm":
        if not args.k:
            raise UsageError("cache warm needs --k")
        ki = _kindex(parse_k(args.k), args.n, args.m)
        for kind in ("T", "U"):
            _, hit = c.get_bytes(kind, ki.n, ki.k, ki.m)
            print(f"{kind} {'hit' if hit else 'stored'}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="thetapoly", description="Exact T/U polynomials, tau functions and their checks.")
    p.add_argument("--cache-dir", default=None, help="cache directory (overrides THETAPOLY_CACHE)")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(sp, k=True):
        if k:
            sp.add_argument("--k", help="lattice index as k0,k1,k2,k3")
            sp.add_argument("--n", type=int)
            sp.add_argument("--m", type=int)
        sp.add_argument("--output", "-o", help="write the JSON report here")

    g = sub.add_parser("gen", help="generate T (or U with --dual)")
    common(g)
    g.add_argument("--dual", action="store_true")
    g.add_argument("--json", action="store_true", help="also print the canonical JSON")
    g.set_defaults(fn=cmd_gen)

    t = sub.add_parser("tau", help="compute t^(k)")
    t.add_argument("--k", required=True)
    t.add_argument("--output", "-o")
    t.set_defaults(fn=cmd_tau)

    vp = sub.add_parser("verify-pde", help="differential equation residuals")
    common(vp)
    vp.add_argument("--window", type=int, default=3)
    vp.add_argument("--jobs", type=int, default=1)
    vp.set_defaults(fn=cmd_verify_pde)

    vb = sub.add_parser("verify-bilinear", help="bilinear identities on a window")
    vb.add_argument("--window", type=int, default=4)
    vb.add_argument("--k", help="also check the derivative formula at this k (m = 1)")
    vb.add_argument("--jobs", type=int, default=1)
    vb.add_argument("--output", "-o")
    vb.set_defaults(fn=cmd_verify_bilinear)

    ve = sub.add_parser("verify-elliptic", help="numerical identity catalogue")
    ve.add_argument("--tau", action="append", help="a+bi; repeatable")
    ve.add_argument("--prec", type=int, default=50)
    ve.add_argument("--grid", type=int, default=10)
    ve.add_argument("--identities", help="comma list; default all")
    ve.add_argument("--k", help="also run the Schroedinger check at this k")
    ve.add_argument("--m", type=int)
    ve.add_argument("--output", "-o")
    ve.set_defaults(fn=cmd_verify_elliptic)

    c = sub.add_parser("cache", help="inspect or manage the cache")
    c.add_argument("action", choices=("path", "list", "verify", "clear", "warm"))
    common(c)
    c.set_defaults(fn=cmd_cache)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.fn(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantBreach as e:
        print(f"internal invariant breach ({type(e).__name__}): {e}", file=sys.stderr)
        return EXIT_BREACH
    except ThetaPolyError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
