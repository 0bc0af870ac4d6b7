"""Run configuration: strict JSON parsing and the restricted coefficient
expression grammar.

Configs are single JSON documents with nested sections; unknown keys are
rejected so a typo cannot silently change a run.  Coefficient fields and
mask indicators may be given as expressions in x and y over a small
whitelisted grammar (numbers, + - * / **, unary minus, min, max, exp) —
enough to express "Lambda on a ball, smaller elsewhere" without a general
interpreter.
"""

from __future__ import annotations

import ast
import json
import operator
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .grids import Grid, build_masked, build_rectangle, truncate_strip
from .systems import (
    NONLINEARITY_KINDS,
    GrowthEnvelope,
    LowerEnvelope,
    Nonlinearity,
    PositivityBall,
    SystemTemplate,
)

COMMANDS = ("solve", "check_conditions", "exhaust", "poisson_test")


# ---------------------------------------------------------------------------
# expression grammar
# ---------------------------------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}

_FUNCS = {
    "exp": lambda args: np.exp(args[0]),
    "min": lambda args: _reduce(np.minimum, args),
    "max": lambda args: _reduce(np.maximum, args),
}


def _reduce(fn, args):
    out = args[0]
    for a in args[1:]:
        out = fn(out, a)
    return out


def compile_expression(text: str):
    """Compile an expression in x, y into a callable on coordinate arrays."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"bad expression {text!r}: {exc.msg} (offset {exc.offset})") from exc

    def ev(node, x, y):
        if isinstance(node, ast.Expression):
            return ev(node.body, x, y)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, (int, float)):
                return float(node.value)
            raise ConfigError(f"non-numeric constant {node.value!r} in expression {text!r}")
        if isinstance(node, ast.Name):
            if node.id == "x":
                return x
            if node.id == "y":
                return y
            raise ConfigError(f"unknown name {node.id!r} in expression {text!r}")
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left, x, y), ev(node.right, x, y))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand, x, y)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            if node.func.id not in _FUNCS:
                raise ConfigError(f"function {node.func.id!r} not allowed in expression {text!r}")
            if node.keywords:
                raise ConfigError(f"keyword arguments not allowed in expression {text!r}")
            return _FUNCS[node.func.id]([ev(a, x, y) for a in node.args])
        raise ConfigError(f"disallowed syntax {type(node).__name__} in expression {text!r}")

    def fn(x, y):
        return ev(tree, x, y)

    fn.source = text
    return fn


# ---------------------------------------------------------------------------
# strict dictionary walking
# ---------------------------------------------------------------------------

class _Section:
    """One config dict with path-aware take() and an unknown-key check."""

    def __init__(self, data: dict, path: str):
        if not isinstance(data, dict):
            raise ConfigError(f"section {path!r} must be an object")
        self.data = dict(data)
        self.path = path

    def take(self, key, required=False, default=None, kind=None):
        if key not in self.data:
            if required:
                raise ConfigError(f"missing key {self.path}.{key}")
            return default
        val = self.data.pop(key)
        if kind is not None and not isinstance(val, kind):
            names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
            raise ConfigError(f"key {self.path}.{key} must be {names}")
        return val

    def subsection(self, key, required=False):
        val = self.take(key, required=required)
        if val is None:
            return None
        return _Section(val, f"{self.path}.{key}")

    def finish(self):
        if self.data:
            stray = sorted(self.data)[0]
            raise ConfigError(f"unknown key {self.path}.{stray}")


def _number(val, path) -> float:
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{path} must be a number")
    return float(val)


# ---------------------------------------------------------------------------
# typed config blocks
# ---------------------------------------------------------------------------

@dataclass
class DomainConfig:
    type: str
    spacing: float
    x_extent: tuple[float, float] | None = None
    y_extent: tuple[float, float] | None = None
    halfwidth: float | None = None
    length: float | None = None
    indicator: str | None = None

    def build(self) -> Grid:
        if self.type == "rectangle":
            return build_rectangle(self.x_extent, self.y_extent, self.spacing)
        if self.type == "strip":
            return truncate_strip(self.halfwidth, self.length, self.spacing)
        return build_masked(
            compile_expression(self.indicator), self.x_extent, self.y_extent, self.spacing
        )


@dataclass
class IterationConfig:
    tol_step: float = 1e-8
    tol_residual: float = 1e-8
    max_iters: int = 500
    method: str | None = None
    tau_lin: float | None = None


@dataclass
class OutputConfig:
    directory: str = "."
    formats: tuple[str, ...] = ("csv",)
    report: str = "report.json"


@dataclass
class RunConfig:
    command: str | None
    domain: DomainConfig
    system: SystemTemplate | None
    subsolution_delta: float
    iteration: IterationConfig
    output: OutputConfig
    seed: int
    exhaust_lengths: tuple[float, ...] | None
    bound_path: str | None
    bound_x_max: float
    poisson_rhs: str
    conditions: dict = field(default_factory=dict)
    echo: dict = field(default_factory=dict)


def _parse_matrix(sec_val, n1, path, fill):
    """n+1 x n+1 matrix with null meaning 'undeclared' (mapped to fill)."""
    if not isinstance(sec_val, list) or len(sec_val) != n1:
        raise ConfigError(f"{path} must be a {n1}x{n1} matrix (list of rows)")
    out = np.full((n1, n1), fill, dtype=float)
    for i, row in enumerate(sec_val):
        if not isinstance(row, list) or len(row) != n1:
            raise ConfigError(f"{path}[{i}] must be a row of length {n1}")
        for j, v in enumerate(row):
            if v is None:
                continue
            out[i, j] = _number(v, f"{path}[{i}][{j}]")
    return out


def _parse_nonlinearity(sec: _Section, n1: int, index: int) -> Nonlinearity:
    kind = sec.take("kind", required=True, kind=str)
    if kind not in NONLINEARITY_KINDS:
        raise ConfigError(
            f"{sec.path}.kind: unknown kind {kind!r}; choose from {sorted(NONLINEARITY_KINDS)}"
        )
    params = dict(sec.data)
    sec.data.clear()
    sec.finish()
    if kind == "power_product" and "target" not in params:
        params["target"] = (index + 1) % n1  # cyclic Lane-Emden coupling
    try:
        return NONLINEARITY_KINDS[kind](**params)
    except TypeError as exc:
        raise ConfigError(f"{sec.path}: bad parameters for kind {kind!r}: {exc}") from exc


def _parse_system(sec: _Section) -> SystemTemplate:
    n1 = sec.take("n_plus_1", required=True, kind=int)
    if n1 < 1:
        raise ConfigError(f"{sec.path}.n_plus_1 must be >= 1")
    eqs = sec.take("equations", required=True, kind=list)
    if len(eqs) != n1:
        raise ConfigError(f"{sec.path}.equations must list {n1} entries")
    nonlinearities = tuple(
        _parse_nonlinearity(_Section(e, f"{sec.path}.equations[{i}]"), n1, i)
        for i, e in enumerate(eqs)
    )

    lam_raw = sec.take("lambda", required=True)
    if not isinstance(lam_raw, list):
        lam_raw = [lam_raw] * n1
    if len(lam_raw) != n1:
        raise ConfigError(f"{sec.path}.lambda must be one entry or a list of {n1}")
    lambda_fns = tuple(
        compile_expression(v) if isinstance(v, str) else _number(v, f"{sec.path}.lambda[{i}]")
        for i, v in enumerate(lam_raw)
    )

    growth = None
    gsec = sec.subsection("growth")
    if gsec is not None:
        C = _parse_matrix(gsec.take("C", required=True), n1, f"{gsec.path}.C", np.inf)
        p = _parse_matrix(gsec.take("p", required=True), n1, f"{gsec.path}.p", 0.5)
        A = _number(gsec.take("A", default=0.0), f"{gsec.path}.A")
        gsec.finish()
        growth = GrowthEnvelope(C=C, p=p, A=A)

    lsec = sec.subsection("lower", required=True)
    A = _parse_matrix(lsec.take("A", required=True), n1, f"{lsec.path}.A", 0.0)
    alpha = _parse_matrix(lsec.take("alpha", required=True), n1, f"{lsec.path}.alpha", 0.5)
    eps0 = _number(lsec.take("epsilon0", default=1.0), f"{lsec.path}.epsilon0")
    lsec.finish()
    lower = LowerEnvelope(A=A, alpha=alpha, epsilon0=eps0)

    bsec = sec.subsection("ball", required=True)
    q = bsec.take("q", required=True, kind=list)
    if len(q) != 2:
        raise ConfigError(f"{bsec.path}.q must be [x, y]")
    ball = PositivityBall(
        center=(_number(q[0], f"{bsec.path}.q[0]"), _number(q[1], f"{bsec.path}.q[1]")),
        rho=_number(bsec.take("rho", required=True), f"{bsec.path}.rho"),
        lambda_lower=_number(bsec.take("Lambda_lower", required=True), f"{bsec.path}.Lambda_lower"),
    )
    bsec.finish()
    sec.finish()
    return SystemTemplate(
        nonlinearities=nonlinearities,
        lambda_fns=lambda_fns,
        lower=lower,
        ball=ball,
        growth=growth,
    )


def _parse_domain(sec: _Section) -> DomainConfig:
    dtype = sec.take("type", required=True, kind=str)
    if dtype not in ("rectangle", "strip", "masked"):
        raise ConfigError(f"{sec.path}.type must be rectangle, strip or masked")
    spacing = _number(sec.take("spacing", required=True), f"{sec.path}.spacing")
    cfg = DomainConfig(type=dtype, spacing=spacing)
    if dtype == "strip":
        cfg.halfwidth = _number(sec.take("halfwidth", required=True), f"{sec.path}.halfwidth")
        cfg.length = _number(sec.take("length", required=True), f"{sec.path}.length")
    else:
        for name in ("x_extent", "y_extent"):
            ext = sec.take(name, required=True, kind=list)
            if len(ext) != 2:
                raise ConfigError(f"{sec.path}.{name} must be [lo, hi]")
            setattr(cfg, name, (_number(ext[0], name), _number(ext[1], name)))
        if dtype == "masked":
            cfg.indicator = sec.take("indicator", required=True, kind=str)
    sec.finish()
    return cfg


def parse_config(path) -> RunConfig:
    """Read and strictly validate a JSON run configuration."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} line {exc.lineno}: {exc.msg}") from exc
    top = _Section(raw, "config")

    command = top.take("command", kind=str)
    if command is not None and command not in COMMANDS:
        raise ConfigError(f"config.command must be one of {COMMANDS}")

    domain = _parse_domain(top.subsection("domain", required=True))

    system = None
    ssec = top.subsection("system")
    if ssec is not None:
        system = _parse_system(ssec)

    sub_delta = 1.0
    subsec = top.subsection("subsolution")
    if subsec is not None:
        sub_delta = _number(subsec.take("delta", default=1.0), "subsolution.delta")
        subsec.finish()

    itcfg = IterationConfig()
    isec = top.subsection("iteration")
    if isec is not None:
        itcfg.tol_step = _number(isec.take("tol_step", default=itcfg.tol_step), "tol_step")
        itcfg.tol_residual = _number(
            isec.take("tol_residual", default=itcfg.tol_residual), "tol_residual"
        )
        itcfg.max_iters = isec.take("max_iters", default=itcfg.max_iters, kind=int)
        itcfg.method = isec.take("method", kind=str)
        tau = isec.take("tau_lin")
        itcfg.tau_lin = None if tau is None else _number(tau, "iteration.tau_lin")
        isec.finish()

    outcfg = OutputConfig()
    osec = top.subsection("output")
    if osec is not None:
        outcfg.directory = osec.take("directory", default=".", kind=str)
        formats = osec.take("formats", default=["csv"], kind=list)
        for f in formats:
            if f not in ("csv", "binary"):
                raise ConfigError(f"output.formats entries must be 'csv' or 'binary', got {f!r}")
        outcfg.formats = tuple(formats)
        outcfg.report = osec.take("report", default="report.json", kind=str)
        osec.finish()

    exhaust_lengths = None
    esec = top.subsection("exhaustion")
    if esec is not None:
        lengths = esec.take("lengths", required=True, kind=list)
        exhaust_lengths = tuple(_number(v, "exhaustion.lengths") for v in lengths)
        esec.finish()

    bound_path = None
    bound_x_max = 50.0
    bnd = top.subsection("bound")
    if bnd is not None:
        bound_path = bnd.take("path", required=True, kind=str)
        if bound_path not in ("growth", "fixed_point"):
            raise ConfigError("bound.path must be 'growth' or 'fixed_point'")
        bound_x_max = _number(bnd.take("x_max", default=50.0), "bound.x_max")
        bnd.finish()

    poisson_rhs = "1"
    psec = top.subsection("poisson")
    if psec is not None:
        rhs = psec.take("rhs", default="1")
        poisson_rhs = rhs if isinstance(rhs, str) else repr(_number(rhs, "poisson.rhs"))
        psec.finish()

    conditions = {}
    csec = top.subsection("conditions")
    if csec is not None:
        conditions["sample_count"] = csec.take("sample_count", default=4096, kind=int)
        conditions["box_radius"] = _number(csec.take("box_radius", default=10.0), "box_radius")
        csec.finish()

    seed = top.take("seed", default=0, kind=int)
    top.finish()

    return RunConfig(
        command=command,
        domain=domain,
        system=system,
        subsolution_delta=sub_delta,
        iteration=itcfg,
        output=outcfg,
        seed=seed,
        exhaust_lengths=exhaust_lengths,
        bound_path=bound_path,
        bound_x_max=bound_x_max,
        poisson_rhs=poisson_rhs,
        conditions=conditions,
        echo=raw,
    )
