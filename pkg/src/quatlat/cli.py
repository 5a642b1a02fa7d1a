"""Experiment harness: config loading, subcommands, deterministic CSV output.

Determinism contract: given the same config, seed, and inputs, every run
writes byte-identical output regardless of thread count.  Timing is only
recorded when explicitly requested, since wall times are never reproducible.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import __version__, balance, counting, coprime
from . import amplifier as amp_mod
from .arith import factorize
from .errors import SearchExhausted, TheoremViolation, UsageError
from .lattice import (
    Lattice4,
    MaximalOrder,
    default_maximal_order,
    saturate_to_maximal,
)
from .quat import QuatAlg, UpperHalfPoint, ZBox, box_constant
from . import intmat

log = logging.getLogger("quatlat")

DEFAULT_Z_BOX = (-0.5, 0.5, 0.8, 1.2)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _to_fraction(v) -> Fraction:
    if isinstance(v, bool):
        raise UsageError("expected a rational, got a boolean")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(str(v))
    if isinstance(v, str):
        return Fraction(v)
    raise UsageError(f"cannot read {v!r} as a rational")


def parse_factored(text: str) -> dict[int, int]:
    """Parse 'p1^e1*p2^e2' (or '1') into an exponent map."""
    text = text.strip()
    if text in ("", "1"):
        return {}
    out: dict[int, int] = {}
    for part in text.split("*"):
        if "^" in part:
            p_s, e_s = part.split("^", 1)
        else:
            p_s, e_s = part, "1"
        try:
            p, e = int(p_s), int(e_s)
        except ValueError:
            raise UsageError(f"bad factored chunk {part!r}") from None
        if p < 2 or e < 0:
            raise UsageError(f"bad factored chunk {part!r}")
        out[p] = out.get(p, 0) + e
    return out


def _format_factored(fac) -> str:
    items = sorted(dict(fac).items())
    if not items:
        return "1"
    return "*".join(f"{p}^{e}" for p, e in items)


@dataclass(frozen=True)
class ExperimentConfig:
    alg: QuatAlg
    mo: MaximalOrder | None
    order_lat: Lattice4 | None
    delta: float
    z_box: ZBox
    l_max: int
    squares_only: bool
    samples: int
    seed: int
    threads: int


def _lattice_rows(obj, what: str):
    if not isinstance(obj, dict) or "mat" not in obj:
        raise UsageError(f"{what} must be an object with 'mat' (16 integers) and 'den'")
    mat = obj["mat"]
    den = obj.get("den", 1)
    if len(mat) != 16 or not all(isinstance(v, int) for v in mat):
        raise UsageError(f"{what}.mat must hold exactly 16 integers")
    if not isinstance(den, int) or den < 1:
        raise UsageError(f"{what}.den must be a positive integer")
    return [[Fraction(mat[4 * i + j], den) for j in range(4)] for i in range(4)]


def _read_json(path: str, what: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read {what}: {e}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{what} is not valid JSON: {e}") from None


def load_config(path: str | None, overrides, need_lattice: bool = True) -> ExperimentConfig:
    raw = {}
    if path is not None:
        raw = _read_json(path, "config")
    alg_raw = raw.get("algebra", {"p": 3, "q": -1})
    alg = QuatAlg(int(alg_raw["p"]), int(alg_raw["q"]))
    mo = order_lat = None
    if need_lattice:
        if "maximal_order" in raw:
            rows = _lattice_rows(raw["maximal_order"], "maximal_order")
            mo = MaximalOrder(alg, rows)
        else:
            mo = saturate_to_maximal(
                alg, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
            )
            log.info(
                "maximal order not given; saturated from the standard basis to "
                "level-1 order with reduced discriminant %s",
                mo.lattice.reduced_discriminant(),
            )
        if "order" in raw:
            rows = _lattice_rows(raw["order"], "order")
            quats = [alg.quat(*r) for r in rows]
            order_lat = mo.lattice_from_quats(quats)
        else:
            order_lat = mo.lattice
    delta = float(_to_fraction(raw.get("delta", 1)))
    if "delta" in overrides and overrides["delta"] is not None:
        delta = overrides["delta"]
    zb = raw.get("z_box", list(DEFAULT_Z_BOX))
    if len(zb) != 4:
        raise UsageError("z_box must hold 4 reals")
    z_box = ZBox(*(float(_to_fraction(v)) for v in zb))
    sweep = raw.get("sweep", {})
    l_max = int(sweep.get("l_max", 10))
    squares_only = bool(sweep.get("squares_only", False))
    samples = int(sweep.get("samples", 4))
    seed = int(sweep.get("seed", 0))
    if overrides.get("lmax") is not None:
        l_max = overrides["lmax"]
    if overrides.get("squares"):
        squares_only = True
    if overrides.get("seed") is not None:
        seed = overrides["seed"]
    threads = int(raw.get("threads", 0)) or int(os.environ.get("QUATLAT_THREADS", "1"))
    if overrides.get("threads") is not None:
        threads = overrides["threads"]
    if l_max < 1 or samples < 1 or threads < 1:
        raise UsageError("l_max, samples, and threads must be positive")
    return ExperimentConfig(
        alg=alg,
        mo=mo,
        order_lat=order_lat,
        delta=delta,
        z_box=z_box,
        l_max=l_max,
        squares_only=squares_only,
        samples=samples,
        seed=seed,
        threads=threads,
    )


def _van_der_corput(i: int, base: int) -> float:
    v, denom = 0.0, 1.0
    n = i
    while n:
        denom *= base
        n, rem = divmod(n, base)
        v += rem / denom
    return v


def sample_points(box: ZBox, samples: int, seed: int) -> list[UpperHalfPoint]:
    """Low-discrepancy points in the box: van der Corput grid plus jitter.

    The jitter stream is drawn up front in sample order, so the list is a
    pure function of (box, samples, seed).
    """
    rng = random.Random(seed)
    wx = box.x_max - box.x_min
    wy = box.y_max - box.y_min
    pts = []
    for i in range(samples):
        jx = rng.uniform(-0.5, 0.5) / max(4 * samples, 8)
        jy = rng.uniform(-0.5, 0.5) / max(4 * samples, 8)
        fx = min(max(_van_der_corput(i + 1, 2) + jx, 0.0), 1.0)
        fy = min(max(_van_der_corput(i + 1, 3) + jy, 0.0), 1.0)
        pts.append(UpperHalfPoint(box.x_min + wx * fx, box.y_min + wy * fy))
    return pts


def _atomic_write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _cmd_algebra(cfg: ExperimentConfig, args) -> str:
    alg, mo = cfg.alg, cfg.mo
    lines = [
        f"algebra: ({alg.p}, {alg.q})",
        f"ramified: {sorted(alg.ramified_set())}",
        f"discriminant: {alg.discriminant}",
        f"maximal order rows (den {mo.lattice.den}): {mo.lattice.mat}",
        f"trace-zero gram: {mo.gram0}",
        f"maximal order shape: {mo.lattice.shape().tuple3()}",
    ]
    return "\n".join(lines) + "\n"


def _cmd_order(cfg: ExperimentConfig, args) -> str:
    lat = cfg.order_lat
    sh = lat.shape()
    inv = lat.invariant_factors_in(cfg.mo.lattice)
    lines = [
        f"level: {lat.level()}",
        f"shape: {sh.tuple3()} (split index co-factor {sh.e})",
        f"invariant factors: {inv.factors} (t1 {inv.t1})",
        f"is_order: {lat.is_order()}",
        f"is_balanced: {lat.is_balanced()}",
        f"smith_condition: {balance.smith_condition(lat)}",
        f"reduced discriminant: {lat.reduced_discriminant()}",
    ]
    return "\n".join(lines) + "\n"


def _cmd_count(cfg: ExperimentConfig, args) -> str:
    lat = cfg.order_lat
    frame_inv = intmat.inverse_frac([list(r) for r in cfg.mo.basis])
    t = box_constant(cfg.delta, cfg.z_box, cfg.alg, frame_inv=frame_inv)
    witness = counting.build_injection(lat)
    sh = lat.shape()
    points = sample_points(cfg.z_box, cfg.samples, cfg.seed)
    timing = bool(getattr(args, "timing", False))

    def one(idx_z):
        idx, z = idx_z
        q = counting.CountQuery(lat, z, cfg.delta, cfg.l_max, cfg.squares_only)
        rep = counting.sweep_counts(q, witness, t)
        wall = rep.wall_ms if timing else 0.0
        return (
            f"{cfg.seed}-{idx},{sh.level},{sh.m1},{sh.m2},{sh.m3},{sh.e},"
            f"{cfg.l_max},{int(cfg.squares_only)},{cfg.delta!r},"
            f"{z.x!r},{z.y!r},{t.t!r},{rep.total},{rep.explicit_bound},"
            f"{rep.ratio!r},{wall!r}"
        )

    tasks = list(enumerate(points))
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(pool.map(one, tasks))
    else:
        rows = [one(task) for task in tasks]
    header = [
        f"# quatlat {__version__}",
        f"# seed={cfg.seed} delta={cfg.delta!r} box_t={t.t!r}",
        f"# u_slack={counting.U_SLACK!r} prefilter_margin=1e-06",
        f"# z_box=({cfg.z_box.x_min!r},{cfg.z_box.x_max!r},"
        f"{cfg.z_box.y_min!r},{cfg.z_box.y_max!r})",
        "run_id,N,M1,M2,M3,e,lmax,squares_only,delta,z_x,z_y,t,total,"
        "explicit_bound,ratio,wall_ms",
    ]
    return "\n".join(header + rows) + "\n"


def _cmd_balance(cfg: ExperimentConfig, args) -> str:
    if args.order:
        raw = _read_json(args.order, "order file")
        rows = _lattice_rows(raw, "order")
        lat = cfg.mo.lattice_from_quats([cfg.alg.quat(*r) for r in rows])
    else:
        lat = cfg.order_lat
    primes = frozenset(factorize(lat.level())) or frozenset({2})
    spec = balance.BalanceSearchSpec(lat, primes, args.kmax, args.height)
    res = balance.balanced_search(spec, threads=cfg.threads)
    if res is None:
        raise SearchExhausted(
            f"no balanced conjugate found (kmax {args.kmax}, height {args.height})"
        )
    gamma, conj = res
    before = lat.invariant_factors_in(cfg.mo.lattice)
    after = conj.invariant_factors_in(cfg.mo.lattice)
    coord_text = ",".join(str(v) for v in gamma.coords())
    lines = [
        f"conjugator: ({coord_text}) (nrd {gamma.nrd()})",
        f"before: {before.factors}",
        f"after: {after.factors}",
        f"balanced: {conj.is_balanced()} smith: {balance.smith_condition(conj)}",
    ]
    return "\n".join(lines) + "\n"


def _cmd_coprime(cfg: ExperimentConfig, args) -> str:
    if args.infile:
        try:
            with open(args.infile) as fh:
                lines = fh.read().splitlines()
        except OSError as e:
            raise UsageError(f"cannot read problem file: {e}") from None
    else:
        lines = sys.stdin.read().splitlines()
    out = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(";")
        if len(parts) < 2:
            raise UsageError(f"bad problem line {line!r}: want 'a0,...,an;N[;c[;bound]]'")
        a = tuple(int(v) for v in parts[0].split(","))
        big_n = int(parts[1])
        c = int(parts[2]) if len(parts) > 2 and parts[2] else 2
        bound = int(parts[3]) if len(parts) > 3 and parts[3] else None
        prob = coprime.CombinationProblem(a, big_n, c, bound)
        sols = coprime.solve(prob)
        out.append(" ".join(",".join(str(v) for v in s) for s in sols))
    return "\n".join(out) + "\n"


def _cmd_amp(cfg: ExperimentConfig, args) -> str:
    bad = frozenset(cfg.alg.ramified_set())
    sample = None
    if args.satake:
        raw = _read_json(args.satake, "satake file")
        sample = amp_mod.SatakeSample(
            tuple((int(p), _to_fraction(v)) for p, v in raw.items())
        )
    spec = amp_mod.amplifier_spec(_to_fraction(args.lam), bad, sample=sample)
    combo = amp_mod.build_amplifier(spec)
    lines = [f"primes: {spec.prime_set}"]
    for l, c in combo.coeffs:
        if c.is_real():
            lines.append(f"y[{l}] = {c.re}")
        else:
            lines.append(f"y[{l}] = {c.re} + {c.im}i")
    if sample is not None:
        val = amp_mod.eigenvalue_lower_bound(spec, sample)
        lines.append(f"eigenvalue: {val} >= |P|^2/8 = {Fraction(len(spec.prime_set)**2, 8)}")
    return "\n".join(lines) + "\n"


def _cmd_exponent(cfg: ExperimentConfig, args) -> str:
    n_fac = parse_factored(args.n)
    mode = args.mode
    if mode == "maingen":
        rep = amp_mod.exponent_bound(n_fac)
    elif mode == "minimal":
        rep = amp_mod.minimal_type_profile(n_fac)
    elif mode == "microlocal":
        rep = amp_mod.microlocal_profile(n_fac)
    elif mode == "newform":
        rep = amp_mod.newform_bound(n_fac, parse_factored(args.m or "1"))
    else:
        raise UsageError(f"unknown mode {mode!r}")
    lines = [f"branch: {rep.branch}"]
    if rep.exponent is not None:
        lines.append(f"exponent: {rep.exponent}")
    if rep.n_level is not None:
        lines.append(f"level: {_format_factored(dict(rep.n_level))}")
    if rep.n1 is not None:
        lines.append(f"N1: {rep.n1}")
    if rep.c1 is not None:
        lines.append(f"C1: {rep.c1}")
    if rep.dim != 1:
        lines.append(f"dim: {rep.dim}")
    for p, ex in rep.extras:
        lines.append(f"extra: {p}^{ex}")
    lines.append(f"value^24: {rep.value_pow24}")
    lines.append(f"lambda choices: {', '.join(rep.lambda_choices)}")
    return "\n".join(lines) + "\n"


def _build_parser() -> _Parser:
    parser = _Parser(prog="quatlat", description="quaternion lattice experiments")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--config", default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--delta", type=float, default=None)
        p.add_argument("--lmax", type=int, default=None)
        p.add_argument("--squares", action="store_true")

    for name in ("algebra", "order"):
        common(sub.add_parser(name))
    p_count = sub.add_parser("count")
    common(p_count)
    p_count.add_argument("--timing", action="store_true")
    p_bal = sub.add_parser("balance")
    common(p_bal)
    p_bal.add_argument("--order", default=None)
    p_bal.add_argument("--kmax", type=int, default=3)
    p_bal.add_argument("--height", type=int, default=64)
    p_cop = sub.add_parser("coprime")
    common(p_cop)
    p_cop.add_argument("--in", dest="infile", default=None)
    p_amp = sub.add_parser("amp")
    common(p_amp)
    p_amp.add_argument("--lambda", dest="lam", required=True)
    p_amp.add_argument("--satake", default=None)
    p_exp = sub.add_parser("exponent")
    common(p_exp)
    p_exp.add_argument("--n", required=True)
    p_exp.add_argument(
        "--mode",
        default="maingen",
        choices=("maingen", "minimal", "microlocal", "newform"),
    )
    p_exp.add_argument("--m", default=None)
    return parser


_DISPATCH = {
    "algebra": (_cmd_algebra, True),
    "order": (_cmd_order, True),
    "count": (_cmd_count, True),
    "balance": (_cmd_balance, True),
    "coprime": (_cmd_coprime, False),
    "amp": (_cmd_amp, False),
    "exponent": (_cmd_exponent, False),
}


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        overrides = {
            "seed": args.seed,
            "threads": args.threads,
            "delta": args.delta,
            "lmax": args.lmax,
            "squares": args.squares,
        }
        handler, need_lattice = _DISPATCH[args.cmd]
        cfg = load_config(args.config, overrides, need_lattice=need_lattice)
        text = handler(cfg, args)
        _atomic_write(args.out, text)
        return 0
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except TheoremViolation as e:
        print(f"theorem violation (implementation bug): {e}", file=sys.stderr)
        return 2
    except SearchExhausted as e:
        print(f"search exhausted: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
