"""Command-line front end: ``python -m dirichlet_moments <subcommand> ...``.

Exit status is 0 on success, 1 for bad input, 2 when a verification suite
reports tolerance violations.
"""

from __future__ import annotations

import argparse
import csv
import inspect
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .characters import character_group, get_character, phi_flat
from .cutoffs import WeightFunction, psi_default
from .expsums import hyper_kloosterman, kloosterman, ramanujan_sum
from .lvalues import Shifts, completed_lambda, l_value, root_number
from .mainterm import SHIFT_FLOOR, main_term_model, support_moduli
from .moments import METHODS, SURROGATE_SHIFTS, MomentConfig, moment_report, write_report
from .suites import SUITES
from .weights import KERNELS, w_weight, w_weight_mp

EXIT_OK, EXIT_INPUT, EXIT_TOLERANCE = 0, 1, 2
SUBCOMMANDS = ("characters", "lvalue", "weights", "mainterm", "expsums", "moment", "verify")
EXPSUM_SUITES = ("weil", "deligne", "smith", "ramanujan", "twisted", "degenerate", "poisson")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    output_path: str | None = None
    tolerances: dict = field(default_factory=dict)

    _FIELDS = ("subcommand", "params", "output_path", "tolerances")

    def __post_init__(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        for k, v in self.tolerances.items():
            if not isinstance(v, (int, float)) or not v > 0:
                raise UsageError(f"tolerance {k} must be positive, got {v!r}")

    @classmethod
    def from_mapping(cls, d: dict) -> "RunConfig":
        extra = set(d) - set(cls._FIELDS)
        if extra:
            raise UsageError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)


def read_shift_file(path: str) -> Shifts:
    """Six lines ``re im`` in the order alpha1 alpha2 alpha3 beta1 beta2 beta3."""
    try:
        with open(path) as fh:
            lines = [ln.split("#")[0].strip() for ln in fh]
    except OSError as exc:
        raise UsageError(f"cannot read shift file: {exc}") from None
    lines = [ln for ln in lines if ln]
    if len(lines) != 6:
        raise UsageError(f"shift file {path}: expected 6 lines 're im', found {len(lines)}")
    vals = []
    for i, ln in enumerate(lines, 1):
        parts = ln.split()
        try:
            if len(parts) != 2:
                raise ValueError
            vals.append(complex(float(parts[0]), float(parts[1])))
        except ValueError:
            raise UsageError(f"shift file {path}: line {i} is not 're im': {ln!r}") from None
    try:
        return Shifts(tuple(vals[:3]), tuple(vals[3:]))
    except ValueError as exc:
        raise UsageError(f"shift file {path}: {exc}") from None


def _shifts_arg(value: str | None, allow_zero: bool) -> Shifts | None:
    if value is None or value == "surrogate":
        return SURROGATE_SHIFTS
    if value == "zero":
        if not allow_zero:
            raise UsageError("zero shifts are not allowed here; give a shift file")
        return None
    return read_shift_file(value)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _complex(text: str) -> complex:
    parts = _floats(text)
    if len(parts) not in (1, 2):
        raise UsageError(f"expected 're,im', got {text!r}")
    return complex(parts[0], parts[1] if len(parts) == 2 else 0.0)


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _tolerance(text: str) -> tuple[str, float]:
    name, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name, float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance value {val!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dirichlet-moments", description="Sixth-moment laboratory for Dirichlet L-functions.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    c = sub.add_parser("characters", help="character table mod q as CSV")
    c.add_argument("--q", type=_positive_int, required=True)
    c.add_argument("--out")

    lv = sub.add_parser("lvalue", help="L(s, chi) and its completion as JSON")
    lv.add_argument("--q", type=_positive_int, required=True)
    lv.add_argument("--index", type=int, required=True)
    lv.add_argument("--s", default="0.5,0", help="re,im (use --s=-0.1,0 for negative real parts)")

    w = sub.add_parser("weights", help="W(xi, eta; mu) on a product grid as CSV")
    w.add_argument("--xi", default="1,2,5")
    w.add_argument("--eta", default="1,2,5")
    w.add_argument("--mu", default="1")
    w.add_argument("--shifts", help="shift file (default: the built-in small surrogate shifts)")
    w.add_argument("--kernel", choices=KERNELS, default="H")
    w.add_argument("--abscissa", type=float, default=1.0)
    w.add_argument("--precise", action="store_true", help="evaluate in extended precision")
    w.add_argument("--out")

    m = sub.add_parser("mainterm", help="symmetrized main term per modulus as CSV")
    m.add_argument("--Q", type=_positive_int, required=True)
    m.add_argument("--shifts", required=True)
    m.add_argument("--out")

    e = sub.add_parser("expsums", help="exponential sums as JSON")
    esub = e.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    k = esub.add_parser("kloosterman")
    k.add_argument("--a", type=int, required=True)
    k.add_argument("--b", type=int, required=True)
    k.add_argument("--c", type=_positive_int, required=True)
    h = esub.add_parser("hyper")
    for name in ("f", "g", "h"):
        h.add_argument(f"--{name}", type=int, required=True)
    h.add_argument("--r", type=_positive_int, required=True)
    r = esub.add_parser("ramanujan")
    r.add_argument("--r", type=_positive_int, required=True)
    r.add_argument("--n", type=int, required=True)
    ev = esub.add_parser("verify")
    ev.add_argument("--suite", choices=EXPSUM_SUITES, required=True)
    ev.add_argument("--tol", type=_tolerance, action="append", default=[])

    mo = sub.add_parser("moment", help="empirical against predicted moment")
    mo.add_argument("--Q", type=_positive_int, required=True)
    mo.add_argument("--shifts", default="zero", help="shift file or 'zero'")
    mo.add_argument("--weight", choices=("smooth", "sharp"), default="smooth")
    mo.add_argument("--method", choices=METHODS, default="hurwitz")
    mo.add_argument("--kernel", choices=KERNELS, default="unit")
    mo.add_argument("--threads", type=_positive_int, default=1)
    mo.add_argument("--out")

    v = sub.add_parser("verify", help="run a named verification suite")
    v.add_argument("--suite", choices=sorted(SUITES), required=True)
    v.add_argument("--tol", type=_tolerance, action="append", default=[], help="name=value, e.g. tol=1e-10")
    return p


def _emit_csv(rows, header, out, comments=()) -> None:
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        fh.write(f"# dirichlet_moments {__version__}\n")
        for line in comments:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if out:
            fh.close()


def _pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _cmd_characters(cfg: RunConfig) -> int:
    q = cfg.params["q"]
    grp = character_group(q)
    rows = []
    for i in range(grp.values.shape[0]):
        parity = "even" if grp.even[i] else "odd"
        for a in range(q):
            v = grp.values[i, a]
            rows.append([i, int(grp.conductors[i]), parity, a, repr(float(v.real)), repr(float(v.imag))])
    _emit_csv(rows, ["index", "conductor", "parity", "a", "re_chi", "im_chi"], cfg.output_path,
              [f"config {json.dumps({'q': q})}"])
    return EXIT_OK


def _cmd_lvalue(cfg: RunConfig) -> int:
    q, idx, s = cfg.params["q"], cfg.params["index"], _complex(cfg.params["s"])
    try:
        chi = get_character(q, idx)
        val = l_value(chi, s)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = {"q": q, "index": idx, "conductor": chi.conductor, "parity": chi.parity, "s": _pair(s),
           "L": _pair(val), "completed": None, "root_number": None}
    if chi.is_primitive and chi.is_even:
        out["completed"] = _pair(completed_lambda(chi, s - 0.5).value)
        out["root_number"] = _pair(root_number(chi))
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


def _cmd_weights(cfg: RunConfig) -> int:
    p = cfg.params
    t = _shifts_arg(p["shifts"], allow_zero=False)
    try:
        t.check_admissible(SHIFT_FLOOR)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    xs, es, ms = _floats(p["xi"]), _floats(p["eta"]), _floats(p["mu"])
    if min(xs + es + ms, default=0) <= 0:
        raise UsageError("grid values must be positive")
    rows = []
    for xi in xs:
        for eta in es:
            for mu in ms:
                if p["precise"]:
                    val, rem = w_weight_mp(xi, eta, mu, t, p["kernel"], p["abscissa"]), 0.0
                else:
                    ev = w_weight(xi, eta, mu, t, abscissa=p["abscissa"], kernel=p["kernel"])
                    val, rem = ev.value, ev.truncation_remainder
                rows.append([repr(xi), repr(eta), repr(mu), repr(val.real), repr(val.imag), repr(rem)])
    _emit_csv(rows, ["xi", "eta", "mu", "re_w", "im_w", "remainder"], cfg.output_path,
              [f"config {json.dumps({'kernel': p['kernel'], 'abscissa': p['abscissa'], 'precise': p['precise'], 'shifts': [_pair(z) for z in t.all_six]})}"])
    return EXIT_OK


def _cmd_mainterm(cfg: RunConfig) -> int:
    Q = cfg.params["Q"]
    t = read_shift_file(cfg.params["shifts"])
    try:
        model = main_term_model(t)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    for q in support_moduli(Q, psi_default()):
        f = phi_flat(q)
        v = model.q_tilde(q)
        rows.append([q, f, repr(v.real), repr(v.imag)])
    _emit_csv(rows, ["q", "phi_flat", "re_qtilde", "im_qtilde"], cfg.output_path,
              [f"config {json.dumps({'Q': Q, 'shifts': [_pair(z) for z in t.all_six]})}"])
    return EXIT_OK


def _run_suite(fn, tolerances: dict) -> int:
    params = [k for k in inspect.signature(fn).parameters if k.startswith("tol")]
    unknown = set(tolerances) - set(params)
    if unknown:
        raise UsageError(f"suite does not take {sorted(unknown)}")
    res = fn(**tolerances)
    print(f"{'suite':<22}{'checked':>10}{'violations':>12}{'worst':>14}  status")
    print(f"{res.name:<22}{res.checked:>10}{res.violations:>12}{res.worst:>14.4g}  {'PASS' if res.passed else 'FAIL'}")
    for k, v in res.detail.items():
        print(f"  {k}: {v}")
    return EXIT_OK if res.passed else EXIT_TOLERANCE


def _cmd_expsums(cfg: RunConfig) -> int:
    p = cfg.params
    kind = p["kind"]
    if kind == "verify":
        return _run_suite(SUITES[p["suite"]], cfg.tolerances)
    if kind == "kloosterman":
        v = kloosterman(p["a"], p["b"], p["c"])
    elif kind == "hyper":
        v = hyper_kloosterman(p["f"], p["g"], p["h"], p["r"])
    else:
        v = ramanujan_sum(p["r"], p["n"])
    args = {k: p[k] for k in ("a", "b", "c", "f", "g", "h", "r", "n") if k in p}
    print(json.dumps({"kind": kind, "args": args, "value": _pair(v.value), "modulus": v.modulus,
                      "method": v.method}, sort_keys=True))
    return EXIT_OK


def _cmd_moment(cfg: RunConfig) -> int:
    p = cfg.params
    t = _shifts_arg(p["shifts"], allow_zero=True)
    weight: WeightFunction = psi_default()
    try:
        mcfg = MomentConfig(p["Q"], shifts=t, weight=weight, method=p["method"],
                            mode=p["weight"],
                            kernel=p["kernel"], thread_hint=p["threads"])
        rep = moment_report(mcfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if cfg.output_path:
        write_report(rep, cfg.output_path)
        print(json.dumps(rep.summary(), sort_keys=True))
    else:
        sys.stdout.write(rep.csv_text())
        print(json.dumps(rep.summary(), sort_keys=True), file=sys.stderr)
    return EXIT_OK


def _cmd_verify(cfg: RunConfig) -> int:
    return _run_suite(SUITES[cfg.params["suite"]], cfg.tolerances)


_DISPATCH = {
    "characters": _cmd_characters,
    "lvalue": _cmd_lvalue,
    "weights": _cmd_weights,
    "mainterm": _cmd_mainterm,
    "expsums": _cmd_expsums,
    "moment": _cmd_moment,
    "verify": _cmd_verify,
}


def parse(argv: list[str]) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    sub = ns.pop("subcommand")
    out = ns.pop("out", None)
    tols = dict(ns.pop("tol", []) or [])
    return RunConfig(sub, ns, out, tols)


def run(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse(argv)
        return _DISPATCH[cfg.subcommand](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())
