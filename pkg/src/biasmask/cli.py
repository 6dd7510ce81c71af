"""
Command-line front end.

Exit codes: 0 on success, 1 on usage errors, 2 when a reported margin falls
below ``-tolerance``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import cqstate, entropic, extractor, fourier, privcorrect, session, smallbias
from .ensembles import FAMILY_KINDS, random_cq_state, sigma_candidates, trial_rng
from .errors import BiasmaskError
from .gf2 import BitString

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


@dataclass
class RunConfig:
    subcommand: str
    seed: int = 0
    csv: Path | None = None
    json: Path | None = None
    tolerance: float = 1e-9
    max_dim: int = cqstate.MAX_DIM
    args: argparse.Namespace = field(default_factory=argparse.Namespace)


@dataclass
class Result:
    columns: list[str] = field(default_factory=list)
    rows: list[list] = field(default_factory=list)
    lines: list[str] = field(default_factory=list)
    margins: list[float] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def _csv_text(res: Result) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(res.columns)
    for row in res.rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _parse_bits(text: str, n: int | None = None) -> BitString:
    text = text.strip()
    if text.startswith("n="):
        b = BitString.from_hex(text)
    else:
        if n is None:
            raise UsageError(f"bit string {text!r} needs an 'n=<n>;' length header")
        b = BitString(n, int(text, 16))
    if n is not None and b.n != n:
        raise UsageError(f"expected {n} bits, got {b.n}")
    return b


# --- subcommands ----------------------------------------------------------


def cmd_bias(cfg: RunConfig) -> Result:
    a = cfg.args
    space = smallbias.loads_space(Path(a.space).read_text())
    res = Result(columns=["alpha", "bias"])
    if a.alpha is not None:
        alpha = _parse_bits(a.alpha, space.n)
        v = smallbias.bias_at(space, alpha)
        res.rows.append([alpha.to_hex(), v])
    else:
        v = smallbias.max_bias(space)
        res.rows.append(["max", v])
    res.lines.append(fmt(v))
    return res


def cmd_aghp(cfg: RunConfig) -> Result:
    a = cfg.args
    space = smallbias.aghp_construct(a.n, a.m)
    b = smallbias.max_bias(space)
    bound = (a.n - 1) / 2**a.m
    if a.out:
        Path(a.out).write_text(smallbias.dumps_space(space))
    res = Result(columns=["n", "m", "distinct", "max_bias", "bound", "margin"])
    res.rows.append([a.n, a.m, len(space), b, bound, bound - b])
    res.margins.append(bound - b)
    res.lines.append(f"n={a.n} m={a.m} distinct={len(space)} max_bias={fmt(b)} bound={fmt(bound)}")
    return res


def _family_for_trial(kind: str, rng, n: int, size: int, file_family):
    if kind == "file":
        return file_family
    if kind == "mixed":
        kind = ("aghp", "codes", "points")[int(rng.integers(3))]
    return FAMILY_KINDS[kind](rng, n, size)


def cmd_verify_thm1(cfg: RunConfig) -> Result:
    a = cfg.args
    file_family = None
    if a.family == "file":
        if not a.family_file:
            raise UsageError("--family file needs --family-file")
        file_family = privcorrect.loads_family(Path(a.family_file).read_text()).as_biased_family()
        if file_family.n != a.n:
            raise UsageError(f"--n {a.n} does not match the family file (n={file_family.n})")
    res = Result(columns=["trial", "n", "dB", "familySize", "delta", "h2", "lhs", "rhs", "margin"])
    for t in range(a.trials):
        rng = trial_rng(cfg.seed, t)
        size = a.family_size or int(rng.integers(1, 9))
        fam = _family_for_trial(a.family, rng, a.n, size, file_family)
        s = random_cq_state(rng, a.n, a.db)
        lhs = cqstate.trace_dist_uniform(extractor.build_masked_state(s, fam, cfg.max_dim), cfg.max_dim)
        worst = None
        for i, sig in enumerate(sigma_candidates(rng, s, a.sigmas)):
            rep = extractor.verify_theorem1(s, fam, sig, str(i), lhs=lhs)
            h2 = cqstate.collision_entropy(s, sig)
            if worst is None or rep.margin < worst[0].margin:
                worst = (rep, h2)
        rep, h2 = worst
        res.rows.append([t, a.n, a.db, len(fam), fam.delta, h2, rep.lhs, rep.rhs, rep.margin])
        res.margins.append(rep.margin)
    return res


def cmd_enc(cfg: RunConfig) -> Result:
    a = cfg.args
    res = Result()
    if a.action == "keysize":
        if a.t is None or a.eps is None:
            raise UsageError("keysize needs --t and --eps")
        m, ell = entropic.key_length(a.n, a.t, a.eps)
        bound = entropic.key_length_bound(a.n, a.t, a.eps)
        res.columns = ["n", "t", "eps", "m", "ell", "bound"]
        res.rows.append([a.n, a.t, a.eps, m, ell, bound])
        res.margins.append(bound - ell)
        res.lines.append(f"m={m} ell={ell}")
        return res
    ks = entropic.KeySet.build(a.n, a.m)
    if a.action == "keygen":
        idx = entropic.keygen(ks, trial_rng(cfg.seed, 0))
        res.columns = ["key", "key_string"]
        res.rows.append([idx.dumps(), ks.key(idx).to_hex()])
        res.lines.append(idx.dumps())
        return res
    if not a.key or a.data is None:
        raise UsageError(f"{a.action} needs --key and --data")
    idx = entropic.KeyIndex.loads(a.key)
    data = _parse_bits(a.data, a.n)
    out = entropic.encrypt(ks, idx, data).ciphertext if a.action == "encrypt" else entropic.decrypt(ks, idx, data)
    res.columns = ["key", "input", "output"]
    res.rows.append([idx.dumps(), data.to_hex(), out.to_hex()])
    res.lines.append(out.to_hex())
    return res


def _load_family(a) -> privcorrect.CodeFamily:
    if not a.family:
        raise UsageError("--family <file> is required")
    fam = privcorrect.loads_family(Path(a.family).read_text())
    return privcorrect.CodeFamily(tuple(c.with_radius(a.radius) for c in fam.codes))


def cmd_codes(cfg: RunConfig) -> Result:
    a = cfg.args
    if a.action == "session":
        return cmd_session(cfg)
    fam = _load_family(a)
    res = Result()
    if a.action == "bias":
        dual = privcorrect.dual_membership_bias(fam)
        univ = privcorrect.almost_universal_delta(fam)
        fb = smallbias.family_bias(fam.as_biased_family())
        res.columns = ["n", "count", "dual_membership_bias", "almost_universal_delta", "family_bias"]
        res.rows.append([fam.n, len(fam), dual, univ, fb])
        res.lines.append(f"delta={fmt(dual)} universal={fmt(univ)} family_bias={fmt(fb)}")
        return res
    if a.word is None:
        raise UsageError("decode needs --word")
    y = _parse_bits(a.word, fam.n)
    res.columns = ["code", "word", "decoded"]
    for j, code in enumerate(fam.codes):
        out = privcorrect.decode(code, y)
        res.rows.append([j, y.to_hex(), out.to_hex() if out else "FAIL"])
        res.lines.append(f"{j} {out.to_hex() if out else 'FAIL'}")
    return res


def cmd_session(cfg: RunConfig) -> Result:
    a = cfg.args
    fam = _load_family(a)
    params = session.SessionParams(
        n=fam.n, ell=a.ell, family=fam, key_bits=a.key_bits, eve=a.eve, noise=a.noise
    )
    res = Result(columns=[
        "trial", "j", "k", "errors", "within_radius", "recovered",
        "h2", "key_security", "key_freshness", "composed_bound", "margin",
    ])
    for t in range(a.trials):
        tr = session.run_session(params, trial_rng(cfg.seed, t))
        ok = tr.recovered is not None and tr.recovered == tr.x
        margin = min(tr.security_margin, tr.freshness_margin)
        res.rows.append([
            t, tr.j, tr.k, (tr.x ^ tr.x_bob).weight(), int(tr.within_radius), int(ok),
            tr.h2, tr.key_security, tr.key_freshness, tr.composed_bound, margin,
        ])
        res.margins.append(margin)
    return res


def cmd_fourier_check(cfg: RunConfig) -> Result:
    a = cfg.args
    res = Result(columns=["trial", "n", "d", "convolution_dev", "parseval_dev", "margin"])
    for t in range(a.trials):
        rng = trial_rng(cfg.seed, t)
        n = a.n or int(rng.integers(1, 6))
        d = a.d or int(rng.integers(1, 5))
        m = fourier.random_matrix_function(rng, n, d)
        k = fourier.random_matrix_function(rng, n, d)
        rep = fourier.check_convolution_theorem(m, k)
        # margins here are measured against zero deviation
        res.rows.append([t, n, d, rep.convolution_dev, rep.parseval_dev, -rep.max_dev])
        res.margins.append(-rep.max_dev)
    return res


COMMANDS: dict[str, Callable[[RunConfig], Result]] = {
    "bias": cmd_bias,
    "aghp": cmd_aghp,
    "verify-thm1": cmd_verify_thm1,
    "enc": cmd_enc,
    "codes": cmd_codes,
    "session": cmd_session,
    "fourier-check": cmd_fourier_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit seed for all randomness")
    common.add_argument("--csv", type=Path, help="write result rows as CSV")
    common.add_argument("--json", type=Path, help="write a JSON summary")
    common.add_argument("--tolerance", type=float, default=1e-9)
    common.add_argument("--max-dim", type=int, default=cqstate.MAX_DIM)

    p = _Parser(prog="biasmask", description=__doc__.strip().splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    b = sub.add_parser("bias", parents=[common], help="bias of a sample-space file")
    b.add_argument("--space", required=True)
    g = b.add_mutually_exclusive_group(required=True)
    g.add_argument("--alpha")
    g.add_argument("--max", action="store_true")

    ag = sub.add_parser("aghp", parents=[common], help="build a small-bias set")
    ag.add_argument("--n", type=int, required=True)
    ag.add_argument("--m", type=int, required=True)
    ag.add_argument("--out")

    v = sub.add_parser("verify-thm1", parents=[common], help="randomized extractor bound check")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--n", type=int, default=4)
    v.add_argument("--db", type=int, default=2)
    v.add_argument("--family", choices=["aghp", "codes", "points", "weighted", "mixed", "file"], default="mixed")
    v.add_argument("--family-file")
    v.add_argument("--family-size", type=int, default=0, help="0 draws a size in [1, 8] per trial")
    v.add_argument("--sigmas", type=int, default=5)

    e = sub.add_parser("enc", parents=[common], help="entropically secure encryption")
    e.add_argument("action", choices=["keygen", "encrypt", "decrypt", "keysize"])
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--m", type=int, default=4)
    e.add_argument("--t", type=float)
    e.add_argument("--eps", type=float)
    e.add_argument("--key")
    e.add_argument("--data", help="message or ciphertext, hex (optionally 'n=<n>;<hex>')")

    session_args = argparse.ArgumentParser(add_help=False)
    session_args.add_argument("--family")
    session_args.add_argument("--radius", type=int, help="decoding radius (default: from minimum distance)")
    session_args.add_argument("--noise", type=float, default=0.0)
    session_args.add_argument("--trials", type=int, default=1)
    session_args.add_argument("--ell", type=int, default=1)
    session_args.add_argument("--key-bits", type=int, default=1)
    session_args.add_argument("--eve", choices=sorted(session.EVE_FIXTURES), default="copy-bit")

    c = sub.add_parser("codes", parents=[common, session_args], help="code-family tools")
    c.add_argument("action", choices=["bias", "decode", "session"])
    c.add_argument("--word")

    sub.add_parser("session", parents=[common, session_args], help="toy key-agreement session")

    f = sub.add_parser("fourier-check", parents=[common], help="convolution and Parseval identities")
    f.add_argument("--trials", type=int, default=100)
    f.add_argument("--n", type=int, default=0, help="0 draws n in [1, 5] per trial")
    f.add_argument("--d", type=int, default=0, help="0 draws d in [1, 4] per trial")
    return p


def dispatch(cfg: RunConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    res = COMMANDS[cfg.subcommand](cfg)
    for line in res.lines:
        print(line, file=out)
    if cfg.csv:
        cfg.csv.write_text(_csv_text(res))
    elif res.rows and not res.lines:
        out.write(_csv_text(res))
    violations = sum(m < -cfg.tolerance for m in res.margins)
    if cfg.json:
        summary = {
            "subcommand": cfg.subcommand,
            "seed": cfg.seed,
            "rows": len(res.rows),
            "min_margin": min(res.margins) if res.margins else None,
            "violations": violations,
            **res.summary,
        }
        cfg.json.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return EXIT_VIOLATION if violations else EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        subcommand=args.subcommand,
        seed=args.seed,
        csv=args.csv,
        json=args.json,
        tolerance=args.tolerance,
        max_dim=args.max_dim,
        args=args,
    )
    try:
        return dispatch(cfg)
    except (UsageError, BiasmaskError, ValueError, OSError) as exc:
        print(f"biasmask {cfg.subcommand}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
