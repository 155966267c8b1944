"""Command-line front end.

Exit codes: 0 success, 1 usage/parse error, 2 unsupported inhomogeneity (or a
batch/verify run with at least one failure).
"""
from __future__ import annotations

import argparse
import json
import os
import random
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import AnnihilantError, ConditionError, UnsupportedError
from .formatting import STYLES, format_expr, to_json
from .helmholtz import VectorField, decompose
from .operators import LinDiffOp
from .parsing import parse, parse_coefficient, parse_rational
from .solver import Problem, solve
from .verify import DEFAULT_H, DEFAULT_TOL, check

EQUATIONS = ("poisson", "polyharmonic", "generalized", "helmholtz", "wave", "decompose", "verify")
SOLVE_EQUATIONS = EQUATIONS[:5]
SEED_ENV = "ANNIHILANT_SEED"

EXIT_OK, EXIT_USAGE, EXIT_UNSUPPORTED = 0, 1, 2


class UsageError(AnnihilantError):
    pass


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (UnsupportedError, ConditionError)):
        return EXIT_UNSUPPORTED
    return EXIT_USAGE


@dataclass
class ProblemSpec:
    equation: str
    n: int | None = None
    k: int | None = None
    j: int | None = None
    nu: str | None = None
    c: str | None = None
    weights: list[str] | None = None
    rhs: str | list[str] | None = None
    candidate: str | None = None
    operator: dict | None = None
    forced_m: str | None = None
    output: str = "plain"
    seed: int = 0
    points: int = 0
    h: str | None = None
    param_values: dict[str, str] = field(default_factory=dict)
    verify_kind: str | None = None

    _ALLOWED = {
        "poisson": {"forced_m"},
        "polyharmonic": {"k"},
        "generalized": {"k", "weights"},
        "helmholtz": {"k", "j", "nu"},
        "wave": {"c"},
        "decompose": set(),
        "verify": {"k", "j", "nu", "c", "weights", "candidate", "operator", "forced_m"},
    }

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemSpec":
        if not isinstance(data, dict):
            raise UsageError("problem must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        aliases = {"params": "param_values", "forced-m": "forced_m", "kind": "verify_kind"}
        kwargs = {}
        for key, value in data.items():
            key = aliases.get(key, key)
            if key not in known:
                raise UsageError(f"unknown problem field {key!r}")
            kwargs[key] = value
        if "equation" not in kwargs:
            raise UsageError("problem needs an 'equation' field")
        if isinstance(kwargs.get("weights"), str):
            kwargs["weights"] = _split(kwargs["weights"], ",")
        for key in ("nu", "c"):
            if key in kwargs and kwargs[key] is not None:
                kwargs[key] = str(kwargs[key])
        return cls(**kwargs)

    def validate(self):
        if self.equation not in EQUATIONS:
            raise UsageError(f"unknown equation {self.equation!r}; expected one of {', '.join(EQUATIONS)}")
        allowed = self._ALLOWED[self.equation]
        for name in ("k", "j", "nu", "c", "weights", "candidate", "operator", "forced_m"):
            if getattr(self, name) is not None and name not in allowed:
                raise UsageError(f"--{name.replace('_', '-')} is not valid for equation {self.equation}")
        if self.rhs is None:
            raise UsageError("--rhs is required")
        if self.output not in STYLES:
            raise UsageError(f"unknown output style {self.output!r}")
        for name in ("n", "k", "j"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or v < 1):
                raise UsageError(f"--{name} must be a positive integer")
        if self.equation == "helmholtz" and self.nu is None:
            raise UsageError("helmholtz needs --nu")
        if self.equation == "generalized" and not self.weights:
            raise UsageError("generalized needs --weights")
        if self.equation == "verify" and self.candidate is None:
            raise UsageError("verify needs --candidate")


def _split(text: str, sep: str) -> list[str]:
    return [p.strip() for p in text.split(sep) if p.strip()]


def _param_names(*texts) -> set[str]:
    names = set()
    for text in texts:
        if text is None:
            continue
        for word in re.findall(r"[A-Za-z_][A-Za-z_0-9]*", text):
            if word not in ("sin", "cos", "exp", "t") and not re.fullmatch(r"x[0-9]+", word):
                names.add(word)
    return names


def _infer_n(texts, n):
    if n is not None:
        return n
    idx = [int(m) for text in texts if text for m in re.findall(r"x([0-9]+)", text)]
    return max(idx, default=1)


def build_problem(spec: ProblemSpec, equation: str | None = None) -> tuple[Problem, set[str]]:
    """Translate flags into a solver :class:`Problem` and the declared parameter names."""
    equation = equation or spec.equation
    declared = _param_names(spec.nu, spec.c, *(spec.weights or []))
    rhs_texts = spec.rhs if isinstance(spec.rhs, list) else [spec.rhs, spec.candidate]
    k = spec.k or 1
    if equation == "poisson":
        if spec.k not in (None, 1):
            raise UsageError("poisson has k = 1")
        return Problem.polyharmonic(None, 1, _infer_n(rhs_texts, spec.n)), declared
    if equation == "polyharmonic":
        return Problem.polyharmonic(None, k, _infer_n(rhs_texts, spec.n)), declared
    if equation == "generalized":
        weights = [parse_coefficient(w) for w in spec.weights]
        if spec.n is not None and spec.n != len(weights):
            raise UsageError("--n must match the number of weights")
        try:
            return Problem.polyharmonic(weights, k), declared
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if equation == "helmholtz":
        nu = parse_coefficient(spec.nu)
        if nu.is_zero():
            raise UsageError("nu must be nonzero")
        return Problem.helmholtz(spec.j or 1, k, nu, _infer_n(rhs_texts, spec.n)), declared
    if equation == "wave":
        c = parse_coefficient(spec.c if spec.c is not None else "c")
        declared |= set(c.param_exponents)
        if c.is_zero():
            raise UsageError("wave speed must be nonzero")
        return Problem.wave(c, spec.n or 3), declared
    raise UsageError(f"cannot build an operator for {equation}")


def _bind_params(names, given: dict, seed: int) -> dict[str, Fraction]:
    """Bind parameters for numeric checks; unbound ones get seeded values in [1/2, 2]."""
    rng = random.Random(seed)
    out = {}
    for name in sorted(names):
        if name in given:
            out[name] = parse_rational(str(given[name]))
        else:
            out[name] = Fraction(rng.randint(500, 2000), 1000)
    return out


def _report(D, k, Q, q, spec: ProblemSpec, points: int):
    names = set(Q.params) | set(q.params) | {n for _o, c in D.items() for n, _e in c.params}
    values = _bind_params(names, spec.param_values, spec.seed)
    h = parse_rational(spec.h) if spec.h else DEFAULT_H
    return check(D, k, Q, q, n_points=points, h=h, tol=DEFAULT_TOL, param_values=values, seed=spec.seed)


def run_problem(spec: ProblemSpec) -> dict:
    """Solve, decompose or verify one problem; returns a result record.

    Raises on errors; callers map exceptions to statuses or exit codes.
    """
    spec.validate()
    if spec.equation == "decompose":
        comps = spec.rhs if isinstance(spec.rhs, list) else _split(spec.rhs, ";")
        n = spec.n or len(comps)
        if len(comps) != n:
            raise UsageError(f"expected {n} components, got {len(comps)}")
        f = VectorField(tuple(parse(c, n) for c in comps))
        d = decompose(f)
        return {"status": "ok", "decomposition": d}

    if spec.equation == "verify":
        if spec.operator is not None:
            op = LinDiffOp.from_json(spec.operator)
            declared = {n for _o, c in op.items() for n, _e in c.params}
            k = spec.k or 1
        else:
            kind = spec.verify_kind or "poisson"
            if kind not in SOLVE_EQUATIONS:
                raise UsageError(f"unknown verify kind {kind!r}")
            if kind == "helmholtz" and spec.nu is None:
                raise UsageError("helmholtz needs --nu")
            if kind == "generalized" and not spec.weights:
                raise UsageError("generalized needs --weights")
            problem, declared = build_problem(spec, kind)
            op, k = problem.base_operator, problem.k
        declared |= set(spec.param_values)
        q = parse(spec.rhs, None, sorted(declared))
        Q = parse(spec.candidate, None, sorted(declared))
        report = _report(op, k, Q, q, spec, spec.points or 10)
        status = "ok" if report.passed else "error"
        out = {"status": status, "Q": Q, "report": report}
        if not report.passed:
            out["message"] = "candidate is not a particular solution"
        return out

    problem, declared = build_problem(spec)
    q = parse(spec.rhs, len([c for c in problem.coords if c != "t"]), sorted(declared))
    Q = solve(problem, q, spec.forced_m)
    report = _report(problem.base_operator, problem.k, Q, q, spec, spec.points)
    if not report.passed:
        raise AnnihilantError("internal error: solution failed verification; refusing to print it")
    return {"status": "ok", "Q": Q, "report": report}


def _decomposition_json(d) -> dict:
    vec = lambda v: [to_json(c) for c in v]  # noqa: E731
    mat = lambda m: [[to_json(e) for e in row] for row in m.entries]  # noqa: E731
    return {"phi": vec(d.phi), "F": mat(d.F), "G": to_json(d.G), "R": mat(d.R),
            "g": vec(d.g), "r": vec(d.r)}


def result_to_json(result: dict) -> dict:
    out = {"status": result["status"]}
    if "Q" in result:
        out["Q"] = to_json(result["Q"])
    if "report" in result:
        out["report"] = result["report"].to_json()
    if "decomposition" in result:
        out.update(_decomposition_json(result["decomposition"]))
    if "message" in result:
        out["message"] = result["message"]
    return out


def render(result: dict, style: str) -> str:
    if style == "json" or "Q" not in result and "decomposition" not in result:
        return json.dumps(result_to_json(result), separators=(",", ":"))
    if "decomposition" in result:
        d = result["decomposition"]
        fmt = lambda e: format_expr(e, style)  # noqa: E731
        vec = lambda v: "[" + "; ".join(fmt(c) for c in v) + "]"  # noqa: E731
        mat = lambda m: "[" + "; ".join(vec(row) for row in m.entries) + "]"  # noqa: E731
        return "\n".join([f"phi = {vec(d.phi)}", f"F = {mat(d.F)}", f"G = {fmt(d.G)}",
                          f"R = {mat(d.R)}", f"g = {vec(d.g)}", f"r = {vec(d.r)}"])
    return format_expr(result["Q"], style)


def _batch_line(line: str) -> tuple[dict, bool]:
    try:
        spec = ProblemSpec.from_dict(json.loads(line))
        spec.output = "json"
        result = run_problem(spec)
        return result_to_json(result), result["status"] == "ok"
    except json.JSONDecodeError as exc:
        return {"status": "error", "message": f"malformed JSON: {exc}"}, False
    except (UnsupportedError, ConditionError) as exc:
        return {"status": "unsupported", "message": str(exc)}, False
    except (AnnihilantError, ValueError, TypeError) as exc:
        return {"status": "error", "message": str(exc)}, False


def run_batch(path: str, jobs: int = 1, out=None) -> int:
    """Solve one JSON problem per line, writing JSON-lines results in input order."""
    out = out or sys.stdout
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if jobs > 1 and len(lines) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_batch_line, lines))
    else:
        results = [_batch_line(ln) for ln in lines]
    for record, _ok in results:
        out.write(json.dumps(record, separators=(",", ":")) + "\n")
    return EXIT_OK if all(ok for _r, ok in results) else EXIT_UNSUPPORTED


def _add_problem_flags(p: argparse.ArgumentParser, equation: bool = True):
    if equation:
        p.add_argument("--equation", required=True, choices=SOLVE_EQUATIONS)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--nu")
    p.add_argument("--c")
    p.add_argument("--weights", help="comma-separated, e.g. '1/c^2,-1,-1,-1'")
    p.add_argument("--rhs", required=True)
    p.add_argument("--forced-m", dest="forced_m")
    p.add_argument("--output", choices=STYLES, default="plain")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                   help="numeric parameter value for residual checks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="annihilant",
                                     description="Closed-form particular solutions of constant-coefficient PDEs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one equation")
    _add_problem_flags(p)
    p.add_argument("--points", type=int, default=0, help="also run a numeric check at this many points")

    p = sub.add_parser("decompose", help="Helmholtz decomposition of a vector field")
    p.add_argument("--n", type=int)
    p.add_argument("--rhs", required=True, help="components separated by ';'")
    p.add_argument("--output", choices=STYLES, default="plain")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("verify", help="check a candidate solution")
    _add_problem_flags(p, equation=False)
    p.add_argument("--equation", dest="verify_kind", choices=SOLVE_EQUATIONS, default="poisson")
    p.add_argument("--candidate", required=True)
    p.add_argument("--operator-json", dest="operator_json", help="operator as JSON (overrides --equation)")
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--h", default=None, help="finite-difference step, e.g. 1/1000")

    p = sub.add_parser("batch", help="JSON-lines batch mode")
    p.add_argument("file")
    p.add_argument("--jobs", type=int, default=1)
    return parser


def _spec_from_args(args) -> ProblemSpec:
    params = {}
    for item in getattr(args, "param", []):
        if "=" not in item:
            raise UsageError(f"--param expects NAME=VALUE, got {item!r}")
        name, value = item.split("=", 1)
        params[name.strip()] = value.strip()
    seed = args.seed
    if os.environ.get(SEED_ENV):
        seed = int(os.environ[SEED_ENV])
    if args.command == "decompose":
        return ProblemSpec("decompose", n=args.n, rhs=args.rhs, output=args.output, seed=seed)
    spec = ProblemSpec(
        equation="verify" if args.command == "verify" else args.equation,
        n=args.n, k=args.k, j=args.j, nu=args.nu, c=args.c,
        weights=_split(args.weights, ",") if args.weights else None,
        rhs=args.rhs, forced_m=args.forced_m, output=args.output, seed=seed,
        points=args.points, param_values=params)
    if args.command == "verify":
        spec.candidate = args.candidate
        spec.h = args.h
        spec.verify_kind = args.verify_kind
        spec.forced_m = None
        if args.operator_json:
            spec.operator = json.loads(args.operator_json)
    return spec


_EXPR_FLAGS = ("--rhs", "--candidate", "--weights", "--nu", "--c")


def _attach_values(argv: list[str]) -> list[str]:
    # expressions such as "-x2" would otherwise be read as option names
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _EXPR_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _attach_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "batch":
        try:
            return run_batch(args.file, args.jobs)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    try:
        spec = _spec_from_args(args)
        result = run_problem(spec)
        if spec.equation == "verify":
            print(json.dumps(result["report"].to_json(), separators=(",", ":")))
            return EXIT_OK if result["status"] == "ok" else EXIT_UNSUPPORTED
    except UnsupportedError as exc:
        msg = str(exc)
        if not msg.startswith("unsupported inhomogeneity"):
            msg = f"unsupported inhomogeneity: {msg}"
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ConditionError as exc:
        print(f"error: unsupported inhomogeneity: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (AnnihilantError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(render(result, spec.output))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
