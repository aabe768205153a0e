"""Report assembly and emission.

Reports are plain nested dicts with a fixed key order.  Every numeric leaf is
a dict ``{"value": ..., "provenance": ...}`` where provenance is ``exact`` or
``float`` (with an ``error`` estimate where one exists).  The machine format is
JSON with that key order; the text format is an indented rendering of the same
tree, so both are deterministic for fixed input and configuration.
"""

from __future__ import annotations

import json

from . import __version__
from .blowup import cascade
from .brjuno import QuadraticSurd, brjuno_report, golden_ratio, liouville
from .classify import NON_SINGULAR, SADDLE_NODE, classify, eigen_data
from .coeffs import coeff, format_coeff
from .config import Config
from .dsl import GRAMMAR_VERSION, evaluate, parse, to_text
from .errors import ParseError, PreconditionError
from .gluing import omega_invariant
from .modular import ElizarovInput, elizarov_derivative
from .normal_forms import ECALLE2, dulac_prenormalize, recognize, recognize_all
from .numerics import PathSpec, holonomy_jet
from .vfield import camacho_sad_index, is_axis_invariant

__all__ = [
    "exact",
    "floating",
    "classify_report",
    "prenormalize_report",
    "blowup_report",
    "holonomy_report",
    "omega_report",
    "elizarov_report",
    "brjuno_value",
    "brjuno_text_report",
    "emit",
]


def exact(v) -> dict:
    return {"value": format_coeff(v), "provenance": "exact"}


def floating(z, error=None) -> dict:
    z = complex(z)
    out = {"value": [z.real, z.imag], "provenance": "float"}
    if error is not None:
        out["error"] = error
    return out


def _header(cfg: Config, command: str) -> dict:
    return {
        "tool": {"name": "saddlenode", "version": __version__, "grammar": GRAMMAR_VERSION},
        "command": command,
        "config": cfg.to_dict(),
    }


def _load(text: str, bindings: dict, cfg: Config):
    ast = parse(text)
    X = evaluate(ast, cfg.trunc, bindings)
    echo = {"expression": to_text(ast), "bindings": {k: format_coeff(v) for k, v in sorted(bindings.items())}}
    return X, echo


def _unavailable(exc: Exception) -> dict:
    module = getattr(exc, "module", None)
    return {"unavailable": f"{type(exc).__name__}: {exc}", "module": module}


def _cs_indices(X) -> list:
    out = []
    for axis in ("y=0", "x=0"):
        if not is_axis_invariant(X, axis):
            continue
        try:
            idx = camacho_sad_index(X, axis)
        except PreconditionError:
            continue
        out.append({"curve": axis, "index": exact(idx.value)})
    return out


def _cascade_section(X, steps: int) -> dict:
    rep = cascade(X, steps)
    return {
        "steps": steps,
        "singular_points": [
            {"location": p.location, "class": str(p.cls),
             **({"mu": exact(p.mu)} if p.mu is not None else {})}
            for p in rep.singular_points
        ],
    }


def _holonomy_section(X, cfg: Config) -> dict:
    path = PathSpec(radius=cfg.radius, rtol=cfg.rtol, atol=cfg.atol)
    jet = holonomy_jet(X, path, cfg.jet)
    return {
        "path": {"kind": "circle", "radius": cfg.radius, "orientation": "counterclockwise",
                 "transversal": f"x = {cfg.radius}"},
        "jet": [{"order": n + 1, "coefficient": floating(c, e)} for n, (c, e) in enumerate(zip(jet.coefficients, jet.error_estimates))],
    }


def classify_report(text: str, bindings: dict, cfg: Config) -> dict:
    X, echo = _load(text, bindings, cfg)
    rep = _header(cfg, "classify")
    rep["input"] = echo
    rep["field"] = str(X)
    cls = classify(X, brjuno_budget=cfg.brjuno_budget())
    rep["class"] = cls.to_dict()
    if cls.variant == NON_SINGULAR:
        return rep
    rep["eigendata"] = eigen_data(X).to_dict()
    if cls.variant == SADDLE_NODE:
        try:
            D = dulac_prenormalize(X)
            rep["dulac"] = {"k": {"value": D.k, "provenance": "exact"}, "mu": exact(D.mu)}
        except PreconditionError as exc:
            rep["dulac"] = _unavailable(exc)
    named = recognize(X)
    rep["named_form"] = named.to_dict() if named is not None else None
    rep["camacho_sad"] = _cs_indices(X)
    if cfg.steps > 0:
        try:
            rep["cascade"] = _cascade_section(X, cfg.steps)
        except PreconditionError as exc:
            rep["cascade"] = _unavailable(exc)
    return rep


def prenormalize_report(text: str, bindings: dict, cfg: Config) -> dict:
    X, echo = _load(text, bindings, cfg)
    D = dulac_prenormalize(X)
    rep = _header(cfg, "prenormalize")
    rep["input"] = echo
    rep["dulac"] = {
        "k": {"value": D.k, "provenance": "exact"},
        "mu": exact(D.mu),
        "depth": D.N,
        "normal_form": str(D.field()),
        "change": {"x": str(D.change.u), "y": str(D.change.v)},
        "unit": str(D.unit),
    }
    return rep


def blowup_report(text: str, bindings: dict, cfg: Config) -> dict:
    X, echo = _load(text, bindings, cfg)
    shapes = {f.variant for f in recognize_all(X)}
    rep = _header(cfg, "blowup")
    rep["input"] = echo
    rep["recognized"] = ECALLE2 in shapes or "FormalModel" in shapes
    rep["cascade"] = _cascade_section(X, cfg.steps)
    return rep


def holonomy_report(text: str, bindings: dict, cfg: Config) -> dict:
    X, echo = _load(text, bindings, cfg)
    rep = _header(cfg, "holonomy")
    rep["input"] = echo
    rep["holonomy"] = _holonomy_section(X, cfg)
    return rep


def omega_report(text_x: str, text_y: str, bindings: dict, cfg: Config, x0="0", x1=None, k=None) -> dict:
    X, echo_x = _load(text_x, bindings, cfg)
    Y, echo_y = _load(text_y, bindings, cfg)
    x0v = coeff(x0)
    w = omega_invariant(X, Y, x0v, k)
    rep = _header(cfg, "omega")
    rep["input"] = {"X": echo_x, "Y": echo_y, "x0": format_coeff(x0v)}
    rep["omega"] = {"k": w.k, "density": str(w.density).replace("t", "(x - x0)") if x0v != 0 else str(w.density).replace("t", "x"),
                    "variable": "x - x0"}
    if x1 is not None:
        rep["omega"]["integral"] = {"x1": format_coeff(coeff(x1)), **exact(w.integral(coeff(x1)))}
    return rep


def _parse_coefficient_spec(item: str):
    try:
        idx, val = item.split("=", 1)
        m, n = (int(s) for s in idx.split(","))
        return (m, n), coeff(val.strip())
    except ValueError as exc:
        raise ParseError(f"coefficient {item!r} is not 'm,n=value'", 0) from exc


def elizarov_report(mu: str, coefficient_specs: list, cfg: Config, dps: int = 40) -> dict:
    muv = coeff(mu)
    coefs = dict(_parse_coefficient_spec(s) for s in coefficient_specs)
    out = elizarov_derivative(ElizarovInput(muv, coefs), dps=dps)
    rep = _header(cfg, "elizarov")
    rep["input"] = {"mu": format_coeff(muv), "coefficients": {f"{m},{n}": format_coeff(v) for (m, n), v in sorted(coefs.items())}}
    rep["derivative"] = out.to_dict()
    return rep


def brjuno_value(spec: str):
    """``golden``, ``liouville[:base]``, ``sqrt(D)``, ``surd:a,b,D`` (a + b√D), or a rational (rejected)."""
    s = spec.strip()
    if s == "golden":
        return golden_ratio()
    if s.startswith("liouville"):
        base = int(s.split(":", 1)[1]) if ":" in s else 10
        return liouville(base)
    if s.startswith("sqrt(") and s.endswith(")"):
        return QuadraticSurd(0, 1, int(s[5:-1]))
    if s.startswith("surd:"):
        a, b, D = s[5:].split(",")
        return QuadraticSurd(coeff(a), coeff(b), int(D))
    try:
        return coeff(s)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"unrecognized number {spec!r}", 0) from exc


def brjuno_text_report(spec: str, cfg: Config) -> dict:
    value = brjuno_value(spec)
    r = brjuno_report(value, **cfg.brjuno_budget())
    rep = _header(cfg, "brjuno")
    rep["input"] = spec
    rep["brjuno"] = {
        "verdict": r.verdict,
        "terms": len(r.partial_sums),
        "partial_sum": floating(r.partial_sums[-1] if r.partial_sums else 0.0),
        "last_increment": floating(r.increments[-1] if r.partial_sums else 0.0),
        "partial_quotients": [q for q in _quotients(r)][:20],
    }
    return rep


def _quotients(r):
    conv = r.convergents
    out = []
    for n, (p, q) in enumerate(conv):
        if n == 0:
            out.append(p)
        elif n == 1:
            out.append(q)
        else:
            out.append((q - conv[n - 2][1]) // conv[n - 1][1])
    return out


def _render(node, indent=0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(node, dict):
        if set(node) >= {"value", "provenance"}:
            return [pad + _leaf(node)]
        for k, v in node.items():
            if isinstance(v, dict) and set(v) >= {"value", "provenance"}:
                lines.append(f"{pad}{k}: {_leaf(v)}")
            elif isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_render(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(node, list):
        for item in node:
            if isinstance(item, (dict, list)):
                sub = _render(item, indent + 1)
                lines.append(f"{pad}- " + sub[0].strip())
                lines.extend(sub[1:])
            else:
                lines.append(f"{pad}- {_scalar(item)}")
    else:
        lines.append(pad + _scalar(node))
    return lines


def _scalar(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, (dict, list)):
        return "none"
    return str(v)


def _leaf(d: dict) -> str:
    v = d["value"]
    if d["provenance"] == "exact" or isinstance(v, (str, int)):
        text = str(v)
    else:
        re_, im = v
        text = f"{re_:.12g}" if im == 0 else f"{re_:.12g} {'+' if im >= 0 else '-'} {abs(im):.12g}i"
    tag = d["provenance"]
    if "error" in d:
        tag += f", err {d['error']:.2g}"
    return f"{text}  [{tag}]"


def emit(report: dict, fmt: str = "text") -> str:
    if fmt == "machine":
        return json.dumps(report, indent=2, ensure_ascii=False)
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    return "\n".join(_render(report))
