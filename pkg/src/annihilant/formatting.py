"""Plain, LaTeX and JSON rendering of canonical expressions.

Terms sharing a parameter monomial are rendered as one group with the common
rational denominator and the leading sign pulled out, e.g.
``(91*x1^2*x2^12 - x2^14)/12012``.  Plain output re-parses to the same value.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Any

from .coefficient import Coefficient, ParamKey
from .errors import ParseError
from .expr import COS, NONE, SIN, TRIG_NAMES, Expr, coord_index, coord_name

GREEK = {
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa",
    "lambda", "mu", "nu", "xi", "pi", "rho", "sigma", "tau", "upsilon", "phi", "chi", "psi",
    "omega",
}

STYLES = ("plain", "latex", "json")


def _display_key(atoms, width):
    by_coord = {a[0]: a[1:] for a in atoms}
    return tuple(by_coord.get(ci, (0, 0, 0, 0)) for ci in range(width))


def _groups(e: Expr):
    width = 1 + max(e.coord_indices(), default=0)
    groups: dict[ParamKey, list] = {}
    for (atoms, params), c in e.items():
        groups.setdefault(params, []).append((atoms, c))
    order = sorted(groups, key=lambda p: (sum(abs(x) for _n, x in p), p))
    for params in order:
        terms = sorted(groups[params], key=lambda t: _display_key(t[0], width), reverse=True)
        lcm = 1
        for _atoms, c in terms:
            lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        sign = -1 if terms[0][1] < 0 else 1
        ints = [(atoms, int(c * lcm * sign)) for atoms, c in terms]
        yield params, sign, lcm, ints


# plain ---------------------------------------------------------------------


def _plain_linear(rate: Fraction, name: str) -> str:
    num, den = abs(rate.numerator), rate.denominator
    s = "-" if rate < 0 else ""
    body = name if num == 1 else f"{num}*{name}"
    return s + body + (f"/{den}" if den != 1 else "")


def _plain_atom(a) -> list[str]:
    ci, p, r, code, f = a
    name = coord_name(ci)
    out = []
    if p:
        out.append(name if p == 1 else f"{name}^{p}")
    if r:
        out.append(f"exp({_plain_linear(r, name)})")
    if code != NONE:
        out.append(f"{TRIG_NAMES[code]}({_plain_linear(f, name)})")
    return out


def _plain_power(name, e):
    return name if e == 1 else f"{name}^{e}"


def _plain_mono(n: int, atoms, lead=()) -> str:
    pieces = list(lead)
    for a in atoms:
        pieces.extend(_plain_atom(a))
    if n != 1 or not pieces:
        pieces.insert(0, str(n))
    return "*".join(pieces)


def _plain_poly(ints) -> str:
    out = []
    for i, (atoms, n) in enumerate(ints):
        body = _plain_mono(abs(n), atoms)
        if i == 0:
            out.append(("-" if n < 0 else "") + body)
        else:
            out.append((" - " if n < 0 else " + ") + body)
    return "".join(out)


def _plain(e: Expr) -> str:
    if e.is_zero():
        return "0"
    groups = list(_groups(e))
    parts = []
    for params, sign, lcm, ints in groups:
        pos = [_plain_power(n, x) for n, x in params if x > 0]
        dens = ([str(lcm)] if lcm != 1 else []) + [_plain_power(n, -x) for n, x in params if x < 0]
        if len(ints) == 1:
            atoms, n = ints[0]
            body = _plain_mono(n, atoms, pos)
        else:
            poly = _plain_poly(ints)
            bare = len(groups) == 1 and sign > 0 and not pos and not dens
            body = poly if bare else "*".join(pos + [f"({poly})"])
        if dens:
            body += "/" + (dens[0] if len(dens) == 1 else "(" + "*".join(dens) + ")")
        parts.append((sign, body))
    out = ("-" if parts[0][0] < 0 else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += (" - " if sign < 0 else " + ") + body
    return out


# latex ---------------------------------------------------------------------


def _latex_name(name: str) -> str:
    if name == "t":
        return "t"
    if name.startswith("x"):
        return f"x_{{{name[1:]}}}"
    return ("\\" + name) if name in GREEK else name


def _latex_param(name, e):
    base = _latex_name(name)
    return base if e == 1 else f"{base}^{{{e}}}"


def _latex_linear(rate: Fraction, name: str) -> str:
    var = _latex_name(name)
    s = "-" if rate < 0 else ""
    num, den = abs(rate.numerator), rate.denominator
    if den != 1:
        return f"{s}\\frac{{{num}}}{{{den}}} {var}"
    return s + (var if num == 1 else f"{num} {var}")


def _latex_atom(a) -> list[str]:
    ci, p, r, code, f = a
    name = coord_name(ci)
    var = _latex_name(name)
    out = []
    if p:
        out.append(var if p == 1 else f"{var}^{{{p}}}")
    if r:
        out.append(f"e^{{{_latex_linear(r, name)}}}")
    if code == COS:
        out.append(f"\\cos({_latex_linear(f, name)})")
    elif code == SIN:
        out.append(f"\\sin({_latex_linear(f, name)})")
    return out


def _latex_mono(n: int, atoms, lead=()) -> str:
    pieces = list(lead)
    for a in atoms:
        pieces.extend(_latex_atom(a))
    if n != 1 or not pieces:
        pieces.insert(0, str(n))
    return " ".join(pieces)


def _latex(e: Expr) -> str:
    if e.is_zero():
        return "0"
    parts = []
    for params, sign, lcm, ints in _groups(e):
        pos = [_latex_param(n, x) for n, x in params if x > 0]
        dens = ([str(lcm)] if lcm != 1 else []) + [_latex_param(n, -x) for n, x in params if x < 0]
        if len(ints) == 1:
            atoms, n = ints[0]
            num = _latex_mono(n, atoms, pos)
        else:
            poly = ""
            for i, (atoms, n) in enumerate(ints):
                body = _latex_mono(abs(n), atoms)
                if i == 0:
                    poly += ("-" if n < 0 else "") + body
                else:
                    poly += (" - " if n < 0 else " + ") + body
            if pos or (not dens and (sign < 0 or parts)):
                num = " ".join(pos + [f"\\left({poly}\\right)"])
            else:
                num = poly
        body = f"\\frac{{{num}}}{{{' '.join(dens)}}}" if dens else num
        parts.append((sign, body))
    out = ("-" if parts[0][0] < 0 else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += (" - " if sign < 0 else " + ") + body
    return out


# json ----------------------------------------------------------------------


def _frac_str(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def to_json(e: Expr) -> dict[str, Any]:
    terms = []
    for (atoms, params), c in e.items():
        terms.append({
            "coeff": {"num": str(c.numerator), "den": str(c.denominator), "params": dict(params)},
            "atoms": [{"coord": coord_name(ci), "pow": p, "exp": _frac_str(r),
                       "trig": TRIG_NAMES[code], "freq": _frac_str(f)}
                      for ci, p, r, code, f in atoms],
        })
    return {"terms": terms}


def from_json(data) -> Expr:
    """Decode the JSON encoding produced by :func:`to_json` (dict or string)."""
    if isinstance(data, str):
        data = json.loads(data)
    try:
        items = []
        for term in data["terms"]:
            coeff = term["coeff"]
            value = Fraction(int(coeff["num"]), int(coeff["den"]))
            params = tuple(sorted((str(n), int(x)) for n, x in coeff.get("params", {}).items() if x))
            atoms = []
            for a in term.get("atoms", []):
                code = TRIG_NAMES.index(a.get("trig", "none"))
                freq = Fraction(a.get("freq", "0")) if code != NONE else Fraction(0)
                if code != NONE and freq <= 0:
                    raise ValueError("trig frequency must be positive")
                p = int(a.get("pow", 0))
                if p < 0:
                    raise ValueError("negative power")
                atoms.append((coord_index(a["coord"]), p, Fraction(a.get("exp", "0")), code, freq))
            atoms.sort(key=lambda t: t[0])
            if len({t[0] for t in atoms}) != len(atoms):
                raise ValueError("duplicate coordinate in term")
            atoms = tuple(t for t in atoms if t[1] or t[2] or t[3] != NONE)
            items.append(((atoms, params), value))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"invalid expression JSON: {exc}") from exc
    return Expr(items)


def format_expr(e: Expr, style: str = "plain") -> str:
    if style == "plain":
        return _plain(e)
    if style == "latex":
        return _latex(e)
    if style == "json":
        return json.dumps(to_json(e), separators=(",", ":"))
    raise ValueError(f"unknown style {style!r}; expected one of {STYLES}")


def format_coefficient(c: Coefficient, style: str = "plain") -> str:
    return format_expr(Expr.constant(c), style)
