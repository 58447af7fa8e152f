"""Batch front door: run files in, deterministic CSV/JSON artifacts out.

Run files are flat sectioned key-value text (see README for the full
schema).  Unknown sections or keys are rejected at parse time with the
offending line and a spelling suggestion; referenced file paths must
resolve at parse time.  All floating-point output uses 17 significant
digits so artifacts round-trip bit-exactly.
"""

import argparse
import difflib
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import asymfit, fdsolver, jetop, radial, relation
from .errors import (ContinuationStall, DomainError, GeometryError,
                     HemisphereError, OrderingError, ParseError, RegimeError,
                     SingularJacobian, StepFailure, WeingartenError,
                     WindowError)

COMMANDS = ("relation list", "relation check", "radial solve",
            "radial asymptote", "dirichlet solve", "exterior solve",
            "fit expansion", "verify", "sweep")

#: structured exit codes per error family
EXIT_CODES = {
    ParseError: 2,
    DomainError: 3,
    GeometryError: 3,
    StepFailure: 4,
    ContinuationStall: 4,
    SingularJacobian: 4,
    WindowError: 5,
    RegimeError: 5,
    OrderingError: 5,
    HemisphereError: 5,
    OSError: 6,
    WeingartenError: 3,
}

_BOUNDARY_KEYS = {"phi", "value", "bx", "by", "terms", "c", "r0", "path"}
SCHEMA = {
    "relation": {"kind", "a", "lam", "fprime0", "umbilic_c"},
    "domain": {"kind", "R", "a", "b", "Rin", "Rout", "rho"},
    "solver": {"n_s", "n_theta", "eps", "t_steps", "newton_tol", "newton_max",
               "damping", "R0", "C0", "r_max", "tol", "window_r1", "window_r2",
               "exponent", "t_max", "n_samples"},
    "boundary": _BOUNDARY_KEYS | {f"inner_{k}" for k in _BOUNDARY_KEYS}
                | {f"outer_{k}" for k in _BOUNDARY_KEYS},
    "output": {"dir", "prefix", "input"},
    "sweep": {"param", "values", "command"},
}


# ---------------------------------------------------------------------------
# run files


@dataclass
class RunFile:
    path: str
    sections: dict          # section -> {key: value-string}
    lines: dict             # (section, key) -> line number
    text: str

    def get(self, section, key, default=None):
        return self.sections.get(section, {}).get(key, default)

    def require(self, section, key):
        val = self.get(section, key)
        if val is None:
            raise ParseError(f"missing required key '{key}' in section [{section}] "
                             f"of {self.path}")
        return val

    def get_float(self, section, key, default=None):
        val = self.get(section, key)
        if val is None:
            if default is None:
                raise ParseError(f"missing key '{key}' in [{section}]")
            return default
        try:
            return float(val)
        except ValueError:
            raise ParseError(f"key '{key}' in [{section}] is not a number: {val!r}",
                             line=self.lines.get((section, key)))

    def get_int(self, section, key, default=None):
        val = self.get(section, key)
        if val is None:
            if default is None:
                raise ParseError(f"missing key '{key}' in [{section}]")
            return default
        try:
            return int(val)
        except ValueError:
            raise ParseError(f"key '{key}' in [{section}] is not an integer: {val!r}",
                             line=self.lines.get((section, key)))

    def config_hash(self):
        canon = []
        for sec in sorted(self.sections):
            for key in sorted(self.sections[sec]):
                canon.append(f"{sec}.{key}={self.sections[sec][key]}")
        return hashlib.sha256("\n".join(canon).encode()).hexdigest()[:16]


def _suggest(word, candidates):
    close = difflib.get_close_matches(word, candidates, n=1, cutoff=0.6)
    return f"; did you mean '{close[0]}'?" if close else ""


def parse_run_file(path):
    """Parse and validate a run file; rejects unknown sections/keys and
    checks that referenced file paths resolve."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read run file {path}: {exc}")
    sections, lines = {}, {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError("unterminated section header", line=lineno,
                                 column=len(raw) - len(raw.lstrip()) + 1)
            name = line[1:-1].strip()
            if name not in SCHEMA:
                raise ParseError(f"unknown section [{name}]"
                                 + _suggest(name, SCHEMA.keys()), line=lineno)
            current = name
            sections.setdefault(name, {})
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", line=lineno,
                             column=1)
        if current is None:
            raise ParseError("key/value outside any section", line=lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in SCHEMA[current]:
            raise ParseError(f"unknown key '{key}' in section [{current}]"
                             + _suggest(key, SCHEMA[current]), line=lineno,
                             column=raw.index(key) + 1)
        sections[current][key] = value
        lines[(current, key)] = lineno
    rf = RunFile(path=path, sections=sections, lines=lines, text=text)
    base = os.path.dirname(os.path.abspath(path))
    for sec, key in list(rf.lines):
        if key == "path" or key.endswith("_path") or (sec, key) == ("output", "input"):
            target = rf.sections[sec][key]
            resolved = target if os.path.isabs(target) else os.path.join(base, target)
            if not os.path.exists(resolved):
                raise ParseError(f"referenced file not found: {target}",
                                 line=rf.lines[(sec, key)])
            rf.sections[sec][key] = resolved
    return rf


# ---------------------------------------------------------------------------
# run-file -> objects


def build_relation(rf):
    kind = rf.require("relation", "kind").lower()
    if kind == "minimal":
        spec = relation.minimal()
    elif kind == "linear":
        spec = relation.linear(rf.get_float("relation", "a"))
    elif kind == "expblend":
        spec = relation.expblend(rf.get_float("relation", "lam"))
    else:
        raise ParseError(f"unknown relation kind '{kind}'"
                         + _suggest(kind, relation.REGISTRY.keys()),
                         line=rf.lines.get(("relation", "kind")))
    # optional declared metadata is cross-checked against the family
    for key, actual in (("fprime0", spec.fprime0), ("umbilic_c", spec.umbilic_c)):
        declared = rf.get("relation", key)
        if declared is not None and abs(float(declared) - actual) > 1e-12:
            raise ParseError(f"declared {key} = {declared} does not match "
                             f"{spec.label()} ({actual})",
                             line=rf.lines.get(("relation", key)))
    return spec


def build_domain(rf):
    kind = rf.require("domain", "kind").lower()
    if kind == "disk":
        return fdsolver.disk(rf.get_float("domain", "R"))
    if kind == "ellipse":
        return fdsolver.ellipse(rf.get_float("domain", "a"),
                                rf.get_float("domain", "b"))
    if kind == "annulus":
        return fdsolver.annulus(rf.get_float("domain", "Rin"),
                                rf.get_float("domain", "Rout"))
    if kind == "starconvex":
        samples = [float(v) for v in rf.require("domain", "rho").split(",")]
        return fdsolver.star_convex(np.asarray(samples))
    raise ParseError(f"unknown domain kind '{kind}'",
                     line=rf.lines.get(("domain", "kind")))


def build_config(rf):
    return fdsolver.SolverConfig(
        n_s=rf.get_int("solver", "n_s", 16),
        n_theta=rf.get_int("solver", "n_theta", 32),
        eps=rf.get_float("solver", "eps", 1e-8),
        t_steps=rf.get_int("solver", "t_steps", 5),
        newton_tol=rf.get_float("solver", "newton_tol", 1e-10),
        newton_max=rf.get_int("solver", "newton_max", 30),
        damping=rf.get_float("solver", "damping", 0.5))


def _boundary_callable(rf, ring_radius, prefix=""):
    sec = rf.sections.get("boundary", {})
    get = lambda k, d=None: sec.get(prefix + k, d)
    kind = (get("phi") or "constant").lower()
    if kind == "constant":
        value = float(get("value", 0.0))
        return lambda th: np.full_like(np.asarray(th, dtype=float), value)
    if kind == "linear":
        bx, by = float(get("bx", 0.0)), float(get("by", 0.0))
        r = ring_radius
        return lambda th: r * (bx * np.cos(th) + by * np.sin(th))
    if kind == "trig":
        terms = []
        for part in get("terms", "0").split(";"):
            terms.append([float(v) for v in part.split(",")])
        def phi(th, terms=terms):
            out = np.zeros_like(np.asarray(th, dtype=float))
            for t in terms:
                if len(t) == 1:
                    out = out + t[0]
                else:
                    k, ak, bk = t
                    out = out + ak * np.cos(k * th) + bk * np.sin(k * th)
            return out
        return phi
    if kind == "catenoid":
        c = float(get("c", 1.0 / np.sqrt(2.0)))
        r0 = float(get("r0", 1.0))
        val = c * (np.arccosh(ring_radius / c) - np.arccosh(r0 / c))
        return lambda th: np.full_like(np.asarray(th, dtype=float), val)
    if kind == "file":
        data = np.loadtxt(get("path"), delimiter=",")
        th_s, phi_s = data[:, 0], data[:, 1]
        return lambda th: np.interp(np.mod(th, 2 * np.pi), th_s, phi_s,
                                    period=2 * np.pi)
    raise ParseError(f"unknown boundary form '{kind}'",
                     line=rf.lines.get(("boundary", prefix + "phi")))


def build_boundary(rf, domain):
    if domain.kind == fdsolver.ANNULUS:
        return fdsolver.BoundaryData.pair(
            _boundary_callable(rf, domain.Rin, "inner_"),
            _boundary_callable(rf, domain.Rout, "outer_"))
    radius = {fdsolver.DISK: domain.R, fdsolver.ELLIPSE: 1.0,
              fdsolver.STARCONVEX: 1.0}[domain.kind]
    return fdsolver.BoundaryData(phi=_boundary_callable(rf, radius))


# ---------------------------------------------------------------------------
# emitters


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def emit_csv(header, rows, path):
    """UTF-8, newline-terminated CSV with byte-stable float formatting."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _jsonable(value):
    # non-finite floats have no strict-JSON form; emit null
    if isinstance(value, (float, np.floating)):
        return float(value) if np.isfinite(value) else None
    if isinstance(value, (np.integer, np.bool_)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def emit_json(record, path):
    """Deterministic (sorted-key) strict JSON; non-finite floats become null."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(record), fh, sort_keys=True, indent=2,
                  allow_nan=False)
        fh.write("\n")


def read_csv(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


RADIAL_HEADER = ["r", "u", "uprime", "udoubleprime", "g"]
GRID_HEADER = ["x", "y", "u", "H", "K", "kappa1", "kappa2", "residual"]


def _radial_rows(sol):
    return zip(sol.r, sol.u, sol.uprime, sol.udoubleprime, sol.g)


def _grid_rows(sol):
    grid, field = sol.grid, sol.curvature_field
    res = fdsolver.residual_field(sol.spec, grid, sol.u, sol.config.eps)
    n_int = grid.n_interior
    nan = float("nan")
    for i in range(grid.n_total):
        x, y = grid.nodes_xy[i]
        if i < n_int:
            yield (x, y, sol.u[i], field.H[i], field.Kgauss[i],
                   field.kappa1[i], field.kappa2[i], res[i])
        else:
            yield (x, y, sol.u[i], nan, nan, nan, nan, nan)


# ---------------------------------------------------------------------------
# command implementations


@dataclass
class RunSummary:
    command: str
    config_hash: str
    wall_time: float
    outputs: list
    verdicts: dict
    exit_code: int = 0

    def record(self):
        return {"command": self.command, "config_hash": self.config_hash,
                "wall_time": self.wall_time, "outputs": self.outputs,
                "verdicts": self.verdicts, "exit_code": self.exit_code}


def _out_paths(rf, out_dir, stem):
    prefix = rf.get("output", "prefix", "run") if rf else "run"
    directory = out_dir or (rf.get("output", "dir", ".") if rf else ".")
    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, f"{prefix}_{stem}")


def _cmd_relation_list(rf, out_dir, opts):
    lines = [f"{name:10s} {doc}" for name, (_, doc) in sorted(relation.REGISTRY.items())]
    print("\n".join(lines))
    return [], {"relations": sorted(relation.REGISTRY)}


def _cmd_relation_check(rf, out_dir, opts):
    spec = build_relation(rf)
    t_max = rf.get_float("solver", "t_max", 10.0)
    n = rf.get_int("solver", "n_samples", 256)
    rep = relation.validate(spec, t_max, n)
    path = _out_paths(rf, out_dir, "relation_check.json")
    emit_json(rep.summary(), path)
    print(f"{spec.label()}: regime {rep.regime}, ok={rep.ok}")
    return [path], {"ok": rep.ok, "regime": rep.regime}


def _solve_radial_from(rf):
    spec = build_relation(rf)
    return radial.solve_radial(
        spec,
        rf.get_float("solver", "R0", 1.0),
        rf.get_float("solver", "C0", 1.0),
        rf.get_float("solver", "r_max", 100.0),
        rf.get_float("solver", "tol", 1e-9))


def _cmd_radial_solve(rf, out_dir, opts):
    sol = _solve_radial_from(rf)
    csv_path = _out_paths(rf, out_dir, "radial.csv")
    emit_csv(RADIAL_HEADER, _radial_rows(sol), csv_path)
    rep = radial.monotone_bounds_report(sol)
    json_path = _out_paths(rf, out_dir, "radial.json")
    emit_json({"R0": sol.R0, "C0": sol.C0, "r_max": float(sol.r[-1]),
               "regime": sol.regime, "rows": len(sol.r),
               "monotone_bounds_ok": rep["ok"]}, json_path)
    return [csv_path, json_path], {"rows": len(sol.r), "regime": sol.regime,
                                   "monotone_bounds_ok": rep["ok"]}


def _cmd_radial_asymptote(rf, out_dir, opts):
    sol = _solve_radial_from(rf)
    asym = radial.asymptotic_constant(sol)
    path = _out_paths(rf, out_dir, "asymptote.json")
    emit_json({"regime": asym.regime, "Kinf": asym.Kinf,
               "tail_estimate": asym.tail_estimate, "R0": sol.R0, "C0": sol.C0},
              path)
    return [path], {"regime": asym.regime, "Kinf": asym.Kinf}


def _cmd_grid_solve(rf, out_dir, opts, exterior):
    spec = build_relation(rf)
    domain = build_domain(rf)
    config = build_config(rf)
    bc = build_boundary(rf, domain)
    if exterior:
        sol = fdsolver.solve_exterior(spec, domain, bc, config=config)
    else:
        sol = fdsolver.solve_dirichlet(spec, domain, bc, config)
    csv_path = _out_paths(rf, out_dir, "grid.csv")
    emit_csv(GRID_HEADER, _grid_rows(sol), csv_path)
    json_path = _out_paths(rf, out_dir, "solve.json")
    emit_json({"converged": sol.converged, "residual_norm": sol.residual_norm,
               "continuation_trace": sol.continuation_trace,
               "newton_iterations_total": sol.newton_iterations_total,
               "wall_time": sol.wall_time}, json_path)
    return [csv_path, json_path], {"converged": sol.converged,
                                   "residual_norm": sol.residual_norm}


def _samples_from_csv(path):
    header, data = read_csv(path)
    if header[:2] == ["r", "u"]:
        return data[:, 0], data[:, 1]
    if header[:3] == ["x", "y", "u"]:
        interior = np.isfinite(data[:, 7])
        x, y, u = data[interior, 0], data[interior, 1], data[interior, 2]
        r = np.hypot(x, y)
        ring_key = np.round(r, 9)
        radii = np.unique(ring_key)
        means = np.array([u[ring_key == rv].mean() for rv in radii])
        return radii, means
    raise ParseError(f"unrecognized CSV header in {path}: {header}")


def _cmd_fit_expansion(rf, out_dir, opts):
    src = opts.get("input") or (rf.get("output", "input") if rf else None)
    if not src:
        raise ParseError("fit expansion needs --input or [output] input = <csv>")
    r, ubar = _samples_from_csv(src)
    w1 = rf.get_float("solver", "window_r1", 0.0) if rf else 0.0
    w2 = rf.get_float("solver", "window_r2", 0.0) if rf else 0.0
    window = (w1, w2) if w1 and w2 else asymfit.default_window(r)
    verdict, scores = asymfit.select_regime((r, ubar), window)
    record = {"regime": verdict, "window": list(window), "d": None, "c": None,
              "alpha": None, "Kinf": None, "R2": None}
    if verdict == relation.REGIME_LOG:
        fit = asymfit.fit_log_expansion((r, ubar), window)
        record.update(d=fit.d, c=fit.c, alpha=fit.alpha, R2=fit.r2)
    elif verdict == relation.REGIME_POWER:
        exponent = rf.get_float("solver", "exponent", 0.0) if rf else 0.0
        if not exponent:
            if rf and "relation" in rf.sections:
                exponent = 1.0 + build_relation(rf).fprime0
            else:
                exponent = float(np.clip(scores.get("power_exponent", 0.5), 0.01, 0.99))
        fit = asymfit.fit_power((r, ubar), exponent, window)
        record.update(Kinf=fit.Kinf, R2=fit.r2, alpha=fit.alpha)
    else:
        tail = ubar[r >= r.max() / 10.0]
        record.update(Kinf=float(np.mean(tail)), d=scores.get("d"),
                      c=scores.get("c"))
    path = _out_paths(rf, out_dir, "fit.json")
    emit_json(record, path)
    print(f"fit expansion: regime {verdict}")
    return [path], {"regime": verdict}


def _cmd_sweep(rf, out_dir, opts):
    if "sweep" not in rf.sections:
        raise ParseError("sweep needs a [sweep] section")
    param = rf.require("sweep", "param")
    if "." not in param:
        raise ParseError("sweep param must be 'section.key'",
                         line=rf.lines.get(("sweep", "param")))
    sec, key = param.split(".", 1)
    if sec not in SCHEMA or key not in SCHEMA[sec]:
        raise ParseError(f"sweep param '{param}' is not a known key",
                         line=rf.lines.get(("sweep", "param")))
    values = [v.strip() for v in rf.require("sweep", "values").split(",")]
    command = rf.get("sweep", "command", "exterior solve")
    if command not in ("radial solve", "exterior solve", "dirichlet solve"):
        raise ParseError(f"sweep cannot dispatch '{command}'",
                         line=rf.lines.get(("sweep", "command")))

    def one(value):
        sections = {s: dict(kv) for s, kv in rf.sections.items()}
        sections.setdefault(sec, {})[key] = value
        sub = RunFile(path=rf.path, sections=sections, lines=rf.lines,
                      text=rf.text)
        prefix = sub.sections.setdefault("output", {})
        prefix["prefix"] = f"{prefix.get('prefix', 'run')}_{key}{value}"
        if command == "radial solve":
            return _cmd_radial_solve(sub, out_dir, opts)
        return _cmd_grid_solve(sub, out_dir, opts, exterior=(command == "exterior solve"))

    threads = opts.get("threads") or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(one, values))

    outputs, verdicts = [], {}
    table_rows = []
    for value, (paths, verdict) in zip(values, results):
        outputs.extend(paths)
        verdicts[value] = verdict
        csvs = [p for p in paths if p.endswith(".csv")]
        if csvs:
            r, ubar = _samples_from_csv(csvs[0])
            if r.max() >= 10.0 * r.min() and len(r) >= 8:
                regime, scores = asymfit.select_regime((r, ubar))
                fit = asymfit.fit_log_expansion((r, ubar))
                table_rows.append((value, regime, fit.d, fit.c, fit.alpha, fit.r2))
            else:
                table_rows.append((value, "short-range", float("nan"),
                                   float("nan"), float("nan"), float("nan")))
    table_path = _out_paths(rf, out_dir, "sweep_fits.csv")
    emit_csv(["value", "regime", "d", "c", "alpha", "R2"], table_rows, table_path)
    outputs.append(table_path)
    return outputs, verdicts


# ---------------------------------------------------------------------------
# verify suite


def _verify_checks(seed):
    rng = np.random.default_rng(seed)
    checks = []

    def check(name):
        def deco(fn):
            checks.append((name, fn))
            return fn
        return deco

    @check("relation-involution-and-bands")
    def _():
        for spec in (relation.minimal(), relation.linear(-0.5),
                     relation.linear(-2.0), relation.expblend(0.25)):
            rep = relation.validate(spec, 10.0, 256)
            assert rep.ok, f"{spec.label()}: {rep.summary()}"
            t = rng.uniform(0.1, 8.0, 64)
            back = relation.eval_f(spec, relation.eval_f(spec, t))
            assert np.max(np.abs(back - t)) < 1e-10

    @check("operator-closed-form-values")
    def _():
        j = jetop.GraphJet.from_components(1.0, 0.0, 1.0, 0.0, 1.0)
        cv = jetop.curvatures(j)
        assert abs(cv.H - 3.0 / (4.0 * np.sqrt(2.0))) < 1e-15
        assert abs(cv.Kgauss - 0.25) < 1e-15
        assert abs(jetop.discriminant_poly(j).value - 1.0) < 1e-14
        j2 = jetop.GraphJet.from_components(0.0, 0.0, 1.0, 0.0, -1.0)
        assert abs(jetop.operator_value(relation.linear(-0.5), j2, 0.0) + 0.5) < 1e-15

    @check("operator-rotational-invariance")
    def _():
        spec = relation.expblend(0.25)
        for _ in range(200):
            p = rng.uniform(-1.0, 1.0, 2)
            Msym = rng.uniform(-1.0, 1.0, (2, 2))
            M = 0.5 * (Msym + Msym.T)
            ang = rng.uniform(0.0, 2.0 * np.pi)
            Q = np.array([[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]])
            j1 = jetop.GraphJet.from_arrays(p, M)
            j2 = jetop.GraphJet.from_arrays(Q @ p, Q @ M @ Q.T)
            v1 = jetop.operator_value(spec, j1, 1e-8)
            v2 = jetop.operator_value(spec, j2, 1e-8)
            assert abs(v1 - v2) < 1e-12

    @check("operator-jacobian-vs-finite-differences")
    def _():
        spec = relation.linear(-0.5)
        count = 0
        while count < 200:
            p = rng.uniform(-1.0, 1.0, 2)
            Ms = rng.uniform(-1.0, 1.0, (2, 2))
            M = 0.5 * (Ms + Ms.T)
            j = jetop.GraphJet.from_arrays(p, M)
            cv = jetop.curvatures(j)
            if cv.disc < 1e-3:
                continue
            count += 1
            ev = jetop.operator_derivs(spec, j, 1e-8, fd_check=False)
            fd = jetop.fd_operator_derivs(spec, j, 1e-8)
            an = np.array([ev.dF_dM[0, 0], 2.0 * ev.dF_dM[0, 1], ev.dF_dM[1, 1],
                           ev.dF_dp[0], ev.dF_dp[1]])
            fdv = np.array([fd[0], fd[1], fd[2], fd[3], fd[4]])
            scale = np.maximum(np.abs(an), 1e-6)
            assert np.max(np.abs(an - fdv) / scale) < 1e-5

    @check("pinching-inequality-on-relation-jets")
    def _():
        for spec in (relation.minimal(), relation.expblend(0.4)):
            lam = spec.lam if spec.lam < 1 else 0.999999
            k1 = rng.uniform(0.1, 3.0, 200)
            k2 = relation.eval_f(spec, k1)
            lhs = 2.0 * np.abs(k1 * k2)
            mid = k1 ** 2 + k2 ** 2
            rhs = (2.0 / lam) * np.abs(k1 * k2)
            assert np.all(lhs <= mid * (1 + 1e-10))
            assert np.all(mid <= rhs * (1 + 1e-10))

    @check("radial-catenoid-oracle")
    def _():
        sol = radial.solve_radial(relation.minimal(), 1.0, 1.0, 100.0, tol=1e-9)
        c = 1.0 / np.sqrt(2.0)
        ucat = c * (np.arccosh(sol.r / c) - np.arccosh(np.sqrt(2.0)))
        err = np.max(np.abs(sol.u - ucat) / np.maximum(ucat, 1e-12))
        assert err <= 1e-6, f"catenoid error {err}"
        rep = radial.monotone_bounds_report(sol)
        assert rep["ok"], rep

    @check("radial-linear-closed-form")
    def _():
        sol = radial.solve_radial(relation.linear(-0.5), 1.0, 1.0, 1e3, tol=1e-10)
        C = 1.0 / np.sqrt(2.0)
        upcf = C * sol.r ** -0.5 / np.sqrt(1.0 - C ** 2 / sol.r)
        assert np.max(np.abs(sol.uprime - upcf) / upcf) <= 1e-6

    @check("dirichlet-plane-exactness")
    def _():
        dom = fdsolver.disk(1.0)
        cfg = fdsolver.SolverConfig(n_s=8, n_theta=16)
        phi = fdsolver.linear_boundary(0.3, 0.1)(dom)
        sol = fdsolver.solve_dirichlet(relation.expblend(0.25), dom,
                                       fdsolver.BoundaryData(phi=phi), cfg)
        plane = sol.nodes @ np.array([0.3, 0.1])
        assert np.max(np.abs(sol.u - plane)) <= 1e-10
        assert sol.newton_iterations_total <= 3

    @check("comparison-bracket-catenoid-pair")
    def _():
        c = 1.0 / np.sqrt(2.0)
        r = np.logspace(0.2, 3.0, 200)
        hi = c * np.arccosh(r / c) + 0.5
        lo = c * np.arccosh(r / c)
        rep = asymfit.comparison_at_infinity((r, hi), (r, lo))
        assert rep.bracketing_ok and abs(rep.c0_estimate - 0.5) < 1e-12
        rep2 = asymfit.comparison_at_infinity((r, lo), (r, lo))
        assert rep2.agreement and rep2.c0_estimate == 0.0

    return checks


def _cmd_verify(rf, out_dir, opts):
    seed = opts.get("seed", 0)
    verdicts = {}
    failed = 0
    for name, fn in _verify_checks(seed):
        t0 = time.perf_counter()
        try:
            fn()
            verdicts[name] = "pass"
            print(f"PASS {name} ({time.perf_counter() - t0:.2f}s)")
        except AssertionError as exc:
            verdicts[name] = f"fail: {exc}"
            failed += 1
            print(f"FAIL {name}: {exc}")
    print(f"verify: {len(verdicts) - failed}/{len(verdicts)} checks passed")
    if failed:
        raise WeingartenError(f"{failed} verify checks failed")
    return [], verdicts


# ---------------------------------------------------------------------------
# dispatch


_DISPATCH = {
    "relation list": _cmd_relation_list,
    "relation check": _cmd_relation_check,
    "radial solve": _cmd_radial_solve,
    "radial asymptote": _cmd_radial_asymptote,
    "dirichlet solve": lambda rf, o, k: _cmd_grid_solve(rf, o, k, exterior=False),
    "exterior solve": lambda rf, o, k: _cmd_grid_solve(rf, o, k, exterior=True),
    "fit expansion": _cmd_fit_expansion,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
}

_NEEDS_RUNFILE = {"relation check", "radial solve", "radial asymptote",
                  "dirichlet solve", "exterior solve", "sweep"}


def run(command, runfile=None, out_dir=None, **opts):
    """Execute one CLI command; returns a RunSummary.

    ``runfile`` may be a path or a parsed RunFile.  Outputs land in
    ``out_dir`` (or the run file's [output] dir).  Raises package errors
    on failure; `main` maps them to structured exit codes.
    """
    if command not in _DISPATCH:
        raise ParseError(f"unknown command '{command}'"
                         + _suggest(command, COMMANDS))
    rf = None
    if runfile is not None:
        rf = runfile if isinstance(runfile, RunFile) else parse_run_file(runfile)
    if command in _NEEDS_RUNFILE and rf is None:
        raise ParseError(f"command '{command}' requires --run <path>")
    t0 = time.perf_counter()
    outputs, verdicts = _DISPATCH[command](rf, out_dir, opts)
    summary = RunSummary(command=command,
                         config_hash=rf.config_hash() if rf else "-",
                         wall_time=time.perf_counter() - t0,
                         outputs=[os.path.basename(p) for p in outputs],
                         verdicts=verdicts)
    if outputs:
        directory = os.path.dirname(outputs[0])
        prefix = rf.get("output", "prefix", "run") if rf else "run"
        emit_json(summary.record(), os.path.join(directory, f"{prefix}_summary.json"))
    return summary


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="weingarten",
        description="Numerical laboratory for uniformly elliptic Weingarten "
                    "graphs of minimal type")
    parser.add_argument("tokens", nargs="+",
                        help="command, e.g. 'radial solve' or 'verify'")
    parser.add_argument("--run", help="run file path")
    parser.add_argument("--out", help="output directory (overrides [output] dir)")
    parser.add_argument("--threads", type=int, default=None,
                        help="concurrent sweep entries (default: one per core)")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for randomized verify checks")
    parser.add_argument("--input", help="input CSV for 'fit expansion'")
    args = parser.parse_args(argv)
    command = " ".join(args.tokens)
    try:
        summary = run(command, runfile=args.run, out_dir=args.out,
                      threads=args.threads, seed=args.seed, input=args.input)
    except Exception as exc:  # noqa: BLE001 - structured exit codes
        code = next((c for t, c in EXIT_CODES.items() if isinstance(exc, t)), 1)
        print(f"error[{code}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return code
    print(json.dumps(summary.record(), sort_keys=True, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
