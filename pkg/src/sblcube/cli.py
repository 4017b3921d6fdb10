"""Command-line front end.

Exit codes: 0 success or feasible, 1 a numerical check failed its tolerance,
2 infeasible verdict, 64 usage or configuration error, 74 output not writable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .analysis import (annular_profile_check, cone_partition, gaussian_identity_check, parse_kernel,
                       stick_search, telescoping_closed_form, telescoping_integral, verify_stick)
from .analysis.stick import StickSearchError
from .cube import CubicalData, FunctionAssignment, corners
from .feasibility import (EquivalenceViolation, PreconditionError, check_conditions,
                          classify_trilinear, normalize_to_IA)
from .gaussian import DefinitenessError, GaussianMixture, TermCountError
from .linalg import RationalMatrix, ShapeError, SingularMatrixError, parse_vector
from .evaluator import (RouteError, apply_symmetry, blowup_cubical, blowup_experiment, eval_form,
                        sweep_truncation)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INFEASIBLE, EXIT_USAGE, EXIT_IOERR = 0, 1, 2, 64, 74
COMMANDS = ("check", "classify", "eval", "sweep", "blowup", "cone", "identities", "symmetry", "stick")
SUITES = ("heat", "heat-vector", "convolution", "heat-equation", "telescoping", "annular", "all")


class UsageError(Exception):
    """Bad flags or configuration; maps to exit code 64."""


class OutputError(Exception):
    """Report could not be written; maps to exit code 74."""


def _field_error(name: str, exc: Exception) -> UsageError:
    return UsageError(f"invalid {name}: {exc}")


# configuration ---------------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    m: int | None = None
    d: int = 1
    A: str | None = None
    B: str | None = None
    kernel: str = "dirac"
    tuple: str = "gauss"
    seed: int = 0
    out: str | None = None
    format: str = "text"
    tolerance: float | None = None
    T_list: list = field(default_factory=list)
    R_list: list = field(default_factory=list)
    method: str = "exact"
    samples: int = 200_000
    suite: str = "all"
    dim: int | None = None
    delta: float = 0.05
    eps: str | None = None
    l: int = 0
    gamma: str | None = None
    kind: str | None = None
    D: str | None = None
    perm: str | None = None
    Pi: str | None = None
    projections: list = field(default_factory=list)
    exponents: str | None = None
    V: list = field(default_factory=list)
    degenerate: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise UsageError(f"unknown configuration fields {sorted(extra)}")
        if "command" not in data:
            raise UsageError("configuration is missing field 'command'")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"invalid command: {self.command!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise UsageError(f"invalid seed: {self.seed!r} (need an unsigned integer)")
        if self.format not in ("text", "json", "csv"):
            raise UsageError(f"invalid format: {self.format!r}")
        if self.d < 1:
            raise UsageError(f"invalid d: {self.d}")
        needs_A = {"check", "classify", "eval", "sweep", "symmetry", "stick"}
        if self.command in needs_A and self.A is None:
            raise UsageError(f"command {self.command!r} requires --A")
        if self.command == "blowup" and self.A is None and self.Pi is None:
            raise UsageError("command 'blowup' requires --A or --Pi")
        if self.command == "sweep" and not self.T_list:
            raise UsageError("command 'sweep' requires --T-list")
        if self.command == "blowup" and not self.R_list:
            raise UsageError("command 'blowup' requires --R-list")
        if self.command == "cone" and self.dim is None:
            raise UsageError("command 'cone' requires --dim")
        if self.command == "symmetry" and self.kind not in ("scale", "permute"):
            raise UsageError("command 'symmetry' requires --kind scale|permute")
        if self.command == "stick" and (self.eps is None or self.gamma is None):
            raise UsageError("command 'stick' requires --eps and --gamma")
        if self.suite not in SUITES:
            raise UsageError(f"invalid suite: {self.suite!r}")


def _matrix(name: str, text: str | None) -> RationalMatrix | None:
    if text is None:
        return None
    try:
        return RationalMatrix.parse(text)
    except (ValueError, ShapeError) as exc:
        raise _field_error(name, exc) from None


def build_data(cfg: RunConfig) -> CubicalData:
    A = _matrix("A", cfg.A)
    B = _matrix("B", cfg.B)
    m = cfg.m if cfg.m is not None else A.rows
    try:
        return CubicalData(m, cfg.d, A, B)
    except (ValueError, ShapeError) as exc:
        raise _field_error("A/B/m", exc) from None


def build_tuple(desc: str, m: int, d: int, seed: int) -> FunctionAssignment:
    """``gauss``, ``gauss-normalized`` or ``random:terms=K`` (seeded)."""
    name, _, rest = desc.partition(":")
    n = m * d
    if name == "gauss":
        return FunctionAssignment.uniform(m, GaussianMixture.standard(n))
    if name == "gauss-normalized":
        return FunctionAssignment.uniform(m, GaussianMixture.standard(n).normalized(2**m))
    if name == "random":
        terms = 1
        if rest:
            key, _, val = rest.partition("=")
            if key != "terms":
                raise UsageError(f"invalid tuple: unknown parameter {key!r}")
            terms = int(val)
        rng = np.random.default_rng(seed)
        return FunctionAssignment({j: GaussianMixture.random(n, rng, terms) for j in corners(m)})
    raise UsageError(f"invalid tuple: unknown descriptor {desc!r}")


# serialization ---------------------------------------------------------------

_FLOAT_TOKEN = "@@f17@@"


def _prep(obj):
    """Floats become tagged strings so the JSON writer cannot reformat them."""
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return f"{_FLOAT_TOKEN}{x:.17g}{_FLOAT_TOKEN}"
        return str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _prep(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_prep(v) for v in obj]
    return str(obj)


def to_json(obj) -> str:
    text = json.dumps(_prep(obj), indent=2, sort_keys=True)
    return re.sub(f'"{_FLOAT_TOKEN}(.*?){_FLOAT_TOKEN}"', r"\1", text) + "\n"


def _fmt(v) -> str:
    if isinstance(v, np.bool_):
        v = bool(v)
    if isinstance(v, bool) or v is None:
        return str(v).lower() if isinstance(v, bool) else "null"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_fmt(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def to_text(result: dict) -> str:
    return "".join(f"{k}: {_fmt(v)}\n" for k, v in result.items() if k != "table")


def to_csv(result: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    table = result.get("table")
    if table:
        w.writerow(table["columns"])
        for row in table["rows"]:
            w.writerow([_fmt(v) for v in row])
    else:
        w.writerow(["key", "value"])
        for k, v in result.items():
            w.writerow([k, _fmt(v)])
    return buf.getvalue()


def emit_report(result: dict, fmt: str = "text", path: str | None = None, meta: dict | None = None) -> None:
    """Serialize ``result`` deterministically to ``path`` (stdout if ``None``)."""
    text = {"text": to_text, "json": to_json, "csv": to_csv}[fmt](result)
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
        if meta is not None:
            with open(path + ".meta.json", "w") as fh:
                fh.write(to_json(meta))
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from None


# commands ------------------------------------------------------------------


def cmd_check(cfg):
    report = check_conditions(build_data(cfg))
    return report.to_dict(), (EXIT_OK if report.feasible else EXIT_INFEASIBLE)


def cmd_classify(cfg):
    A = _matrix("A", cfg.A)
    try:
        label = classify_trilinear(A, cfg.degenerate)
    except ShapeError as exc:
        raise _field_error("A", exc) from None
    code = EXIT_INFEASIBLE if label.value == "degenerate-triangular-family" else EXIT_OK
    return {"A3": str(A), "case": label.value}, code


def _kernel(cfg):
    try:
        return parse_kernel(cfg.kernel)
    except ValueError as exc:
        raise _field_error("kernel", exc) from None


def cmd_eval(cfg):
    data = build_data(cfg)
    K = _kernel(cfg)
    tup = build_tuple(cfg.tuple, data.m, data.d, cfg.seed)
    res = eval_form(K, normalize_to_IA(data), tup, cfg.method, samples=cfg.samples, seed=cfg.seed)
    out = {"kernel": K.describe(), "A": str(data.A)}
    out.update(res.to_dict())
    return out, EXIT_OK


def cmd_sweep(cfg):
    data = build_data(cfg)
    tup = build_tuple(cfg.tuple, data.m, data.d, cfg.seed)
    sw = sweep_truncation(normalize_to_IA(data), tup, cfg.T_list)
    rows = [(T, res.value, ratio) for T, res, ratio in sw.rows]
    out = {"A": str(data.A), "feasible": sw.feasible, "sup_ratio": sw.sup_ratio,
           "dirac_ratio": sw.dirac_ratio, "differences": sw.differences,
           "table": {"columns": ["T", "value", "ratio"], "rows": rows}}
    if sw.note:
        out["note"] = sw.note
    return out, EXIT_OK


def cmd_blowup(cfg):
    if cfg.Pi is not None:
        Pi = _matrix("Pi", cfg.Pi)
        projs = [_matrix("projections", p) for p in cfg.projections]
        try:
            exps = [int(e) for e in parse_vector(cfg.exponents or "")]
            V = [parse_vector(v) for v in cfg.V]
        except ValueError as exc:
            raise _field_error("exponents/V", exc) from None
        res = blowup_experiment(Pi, projs, exps, V, cfg.R_list)
    else:
        res = blowup_cubical(build_data(cfg), cfg.R_list)
    out = {"slope": res.slope, "predicted_gap": str(res.predicted_gap), "intercept": res.intercept,
           "table": {"columns": ["R", "value", "ratio"], "rows": [list(p) for p in res.points]}}
    return out, EXIT_OK


def cmd_cone(cfg):
    try:
        cp = cone_partition(cfg.dim, cfg.delta)
    except ValueError as exc:
        raise _field_error("dim/delta", exc) from None
    cover = cp.covering_radius(10_000, seed=cfg.seed)
    out = {"dim": cfg.dim, "delta": cfg.delta, "size": len(cp), "min_separation": cp.min_separation(),
           "covering_radius": cover,
           "table": {"columns": [f"gamma_{k + 1}" for k in range(cp.dim)], "rows": cp.gamma_set.tolist()}}
    return out, EXIT_OK


def _suite_points(suite: str, rng):
    """(label, residual-function, target) triples for the identity suite."""
    cases = []
    if suite in ("heat", "all"):
        for _ in range(5):
            eta, t = rng.uniform(0.2, 2.0), rng.uniform(0.3, 2.0)
            cases.append((f"heat eta={eta:.6g} t={t:.6g}", lambda e=eta, t=t: gaussian_identity_check("heat", eta=e, t=t)))
    if suite in ("heat-vector", "all"):
        for _ in range(5):
            xi, t = rng.uniform(-1.5, 1.5, size=2), rng.uniform(0.3, 2.0)
            cases.append((f"heat-vector xi={xi.round(6).tolist()} t={t:.6g}",
                          lambda x=xi, t=t: gaussian_identity_check("heat-vector", xi=x, t=t)))
    if suite in ("heat-equation", "all"):
        for _ in range(5):
            s, t = rng.uniform(-2, 2), rng.uniform(0.5, 2.0)
            cases.append((f"heat-equation s={s:.6g} t={t:.6g}",
                          lambda s=s, t=t: gaussian_identity_check("heat-equation", s=s, t=t)))
    if suite in ("convolution", "all"):
        for _ in range(5):
            s1, s0, t = rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.3, 2.0)
            cases.append((f"convolution s1={s1:.6g} s0={s0:.6g} t={t:.6g}",
                          lambda a=s1, b=s0, t=t: gaussian_identity_check("convolution", s1=a, s0=b, t=t)))
    if suite in ("telescoping", "all"):
        for _ in range(3):
            xi = rng.normal(size=2)
            cases.append((f"telescoping xi={xi.round(6).tolist()}",
                          lambda x=xi: abs(telescoping_integral(x, 1e-3, 1e3) - telescoping_closed_form(x, 1e-3, 1e3))))
    if suite in ("annular", "all"):
        for s in (1e-3, 1.0, 10.0):
            cases.append((f"annular s={s:g}", lambda s=s: abs(annular_profile_check(s) - 1.0)))
    return cases


def cmd_identities(cfg):
    tol = 1e-7 if cfg.tolerance is None else cfg.tolerance
    rng = np.random.default_rng(cfg.seed)
    rows, ok = [], True
    for label, fn in _suite_points(cfg.suite, rng):
        r = fn()
        passed = r <= tol
        ok &= passed
        rows.append([label, r, "pass" if passed else "FAIL"])
    out = {"suite": cfg.suite, "tolerance": tol, "all_pass": ok, "max_residual": max(r[1] for r in rows),
           "residuals": {r[0]: r[1] for r in rows},
           "table": {"columns": ["case", "residual", "status"], "rows": rows}}
    return out, (EXIT_OK if ok else EXIT_CHECK_FAILED)


def cmd_symmetry(cfg):
    data = build_data(cfg)
    K = _kernel(cfg)
    tup = build_tuple(cfg.tuple, data.m, data.d, cfg.seed)
    if cfg.kind == "scale":
        D = _matrix("D", cfg.D or " ; ".join(" ".join("1" if i == j else "0" for j in range(data.m))
                                              for i in range(data.m)))
        res = apply_symmetry("scale", data, tup, K, D=D)
    else:
        try:
            perm = [int(p) for p in (cfg.perm or "").replace(",", " ").split()]
        except ValueError as exc:
            raise _field_error("perm", exc) from None
        res = apply_symmetry("permute", data, tup, K, perm=perm)
    out = {"kind": cfg.kind, "kernel": K.describe(), "A": str(data.A), "A_transformed": str(res.data.A),
           "before": res.before.value, "after": res.after.value, "rel_error": res.rel_error}
    tol = 1e-9 if cfg.tolerance is None else cfg.tolerance
    return out, (EXIT_OK if res.rel_error <= tol else EXIT_CHECK_FAILED)


def cmd_stick(cfg):
    A = _matrix("A", cfg.A)
    try:
        gamma = np.array([float(x) for x in parse_vector(cfg.gamma)])
        eps = float(parse_vector(cfg.eps)[0])
    except (ValueError, IndexError) as exc:
        raise _field_error("gamma/eps", exc) from None
    res = stick_search(A, eps, cfg.l, gamma / np.linalg.norm(gamma))
    fine = verify_stick(A, cfg.l, gamma / np.linalg.norm(gamma), res)
    out = res.to_dict()
    out["fine_grid_min"] = fine
    return out, (EXIT_OK if fine > res.delta else EXIT_CHECK_FAILED)


HANDLERS = {"check": cmd_check, "classify": cmd_classify, "eval": cmd_eval, "sweep": cmd_sweep,
            "blowup": cmd_blowup, "cone": cmd_cone, "identities": cmd_identities,
            "symmetry": cmd_symmetry, "stick": cmd_stick}


# argument parsing ------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sblcube", allow_abbrev=False, description="Feasibility checks and experiments for cubical "
                                            "singular Brascamp-Lieb forms.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--instance", help="JSON file with configuration fields (flags override it)")
    p.add_argument("--m", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--A", help='matrix literal such as "-1 0; 0 -1" (rationals allowed)')
    p.add_argument("--B")
    p.add_argument("--kernel", help="dirac | heat:T=4 | deriv:i=1,k1=1,k2=1,tmin=1e-3,tmax=1e3")
    p.add_argument("--tuple", help="gauss | gauss-normalized | random:terms=K")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=("text", "json", "csv"))
    p.add_argument("--tolerance", type=float)
    p.add_argument("--T-list", dest="T_list", type=_floats)
    p.add_argument("--R-list", dest="R_list", type=_floats)
    p.add_argument("--method", choices=("exact", "monte-carlo"))
    p.add_argument("--samples", type=int)
    p.add_argument("--suite", choices=SUITES)
    p.add_argument("--dim", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--eps")
    p.add_argument("--l", type=int)
    p.add_argument("--gamma")
    p.add_argument("--kind", choices=("scale", "permute"))
    p.add_argument("--D")
    p.add_argument("--perm")
    p.add_argument("--Pi")
    p.add_argument("--projection", dest="projections", action="append")
    p.add_argument("--exponents")
    p.add_argument("--V", action="append")
    p.add_argument("--degenerate", action="store_true", default=None,
                   help="classify: first columns of A1, A2, A3 vanish")
    return p


def parse_config(argv: Sequence[str]) -> RunConfig:
    ns = build_parser().parse_args(list(argv))
    base = {"command": ns.command}
    if ns.instance:
        try:
            with open(ns.instance) as fh:
                base.update(json.load(fh))
        except OSError as exc:
            raise UsageError(f"cannot read instance file {ns.instance}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"instance file {ns.instance} is not valid JSON: {exc}") from None
        base["command"] = ns.command
    for k, v in vars(ns).items():
        if k not in ("command", "instance") and v is not None:
            base[k] = v
    return RunConfig.from_dict(base)


def run(argv: Sequence[str]) -> int:
    try:
        cfg = parse_config(argv)
        result, code = HANDLERS[cfg.command](cfg)
        meta = {"config": cfg.to_dict(), "seed": cfg.seed} if cfg.out else None
        emit_report(result, cfg.format, cfg.out, meta)
        return code
    except UsageError as exc:
        print(f"sblcube: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OutputError as exc:
        print(f"sblcube: error: {exc}", file=sys.stderr)
        return EXIT_IOERR
    except StickSearchError as exc:
        print(f"sblcube: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except EquivalenceViolation:
        raise
    except (PreconditionError, ShapeError, SingularMatrixError, DefinitenessError, RouteError,
            TermCountError, ValueError) as exc:
        print(f"sblcube: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Sequence[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)
