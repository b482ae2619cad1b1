"""Command line front end.

Subcommands: ``solve``, ``analyze``, ``render``, ``verify`` and ``sweep``.
Settings come from an optional flat ``key = value`` file (``--config``) with
``--key value`` overrides.  Exit codes: 0 success, 1 failed claim, 2 bad
configuration, 3 numerical pipeline abort.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import analysis as an
from . import neumann_complex as nc
from .critical import find_critical_points
from .eigenfield import domain_grid
from .errors import NeumannKitError, ParameterError
from .flow import Tracer
from .geometry import DomainSpec
from .render import save_svg
from .report import SCHEMA_VERSION, write_json
from .solve import MFSOptions, Solver
from .suite import CLAIMS, Settings, Workspace, run_suite

log = logging.getLogger("neumannkit")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2, 3


def _positive(x: float) -> float:
    if not x > 0:
        raise ValueError("must be positive")
    return x


def _k_list(text: str) -> list[int]:
    out = []
    for part in str(text).split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out or min(out) < 1:
        raise ValueError("k must be >= 1")
    return out


def _bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int_list(text: str) -> list[int]:
    return [int(v) for v in str(text).split(",") if v.strip()]


def _str_list(text: str) -> list[str]:
    return [v.strip() for v in str(text).split(",") if v.strip()]


# key -> (parser, default)
KEYS: dict[str, tuple] = {
    "domain.kind": (str, None),
    "domain.n": (int, None),
    "domain.a": (float, None),
    "domain.coeffs": (json.loads, None),
    "k": (_k_list, [1]),
    "backend": (str, "auto"),
    "mfs.charges": (int, None),
    "mfs.collocation": (int, None),
    "mfs.probes": (int, None),
    "mfs.d_scale": (lambda s: _positive(float(s)), None),
    "mfs.symmetric": (_bool, True),
    "tol_g": (lambda s: _positive(float(s)), 1e-9),
    "eps_cap": (lambda s: _positive(float(s)), 1e-7),
    "eps_launch": (lambda s: _positive(float(s)), 1e-5),
    "h_seed": (lambda s: _positive(float(s)), 0.05),
    "h_nodal": (lambda s: _positive(float(s)), 0.01),
    "h_grad": (lambda s: _positive(float(s)), 0.002),
    "margin": (lambda s: _positive(float(s)), 0.05),
    "out": (str, None),
    "svg": (str, None),
    "cache": (str, None),
    "suite": (str, "paper"),
    "only": (_str_list, None),
    "jobs": (int, 1),
    "n_list": (_int_list, [3, 4, 5, 6]),
}
ALIASES = {"domain": "domain.kind", "n": "domain.n", "a": "domain.a", "coeffs": "domain.coeffs",
           "charges": "mfs.charges", "d_scale": "mfs.d_scale"}


class ConfigError(Exception):
    pass


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":" if ":" in line else None
        if sep is None:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split(sep, 1))
        raw[key] = value
    return raw


def _overrides(extra: list[str]) -> dict[str, str]:
    raw: dict[str, str] = {}
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--"):
            raise ConfigError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(extra):
                raise ConfigError(f"missing value for --{key}")
            value = extra[i + 1]
            i += 2
        raw[key.replace("-", "_") if key not in KEYS else key] = value
    return raw


@dataclass
class RunConfig:
    values: dict

    def __getitem__(self, key):
        return self.values[key]

    @classmethod
    def build(cls, file_values: dict[str, str], cli_values: dict[str, str]) -> "RunConfig":
        merged: dict[str, str] = {}
        for source in (file_values, cli_values):
            for key, value in source.items():
                key = ALIASES.get(key, key)
                if key not in KEYS:
                    raise ConfigError(f"unknown configuration key {key!r}")
                merged[key] = value
        values = {}
        for key, (parse, default) in KEYS.items():
            if key in merged:
                try:
                    values[key] = parse(merged[key])
                except (ValueError, TypeError, json.JSONDecodeError) as exc:
                    raise ConfigError(f"bad value for {key}: {merged[key]!r} ({exc})") from None
            else:
                values[key] = default
        if values["jobs"] < 1:
            raise ConfigError("jobs must be >= 1")
        if values["backend"] not in ("auto", "closed_form", "mfs"):
            raise ConfigError(f"unknown backend {values['backend']!r}")
        return cls(values)

    def domain(self) -> DomainSpec:
        kind = self["domain.kind"]
        if kind is None:
            raise ConfigError("domain.kind is required")
        cfg = {"kind": kind, "n": self["domain.n"], "a": self["domain.a"], "coeffs": self["domain.coeffs"]}
        try:
            return DomainSpec.from_config({k: v for k, v in cfg.items() if v is not None})
        except (KeyError, ParameterError) as exc:
            raise ConfigError(f"invalid domain: {exc}") from None

    def solver(self) -> Solver:
        opts = None
        if any(self[k] is not None for k in ("mfs.charges", "mfs.collocation", "mfs.probes", "mfs.d_scale")) \
                or not self["mfs.symmetric"]:
            base = MFSOptions.for_domain(self.domain()) if self["domain.kind"] else MFSOptions()
            opts = MFSOptions(
                charges=self["mfs.charges"] or base.charges,
                collocation=self["mfs.collocation"] or base.collocation,
                interior_probes=self["mfs.probes"] or base.interior_probes,
                d_scale=self["mfs.d_scale"] or base.d_scale,
                symmetric=self["mfs.symmetric"], scan_step=base.scan_step)
        return Solver(self["backend"], opts, self["cache"])

    def settings(self) -> Settings:
        return Settings(tol_g=self["tol_g"], eps_cap=self["eps_cap"], eps_launch=self["eps_launch"],
                        h_seed=self["h_seed"], h_nodal=self["h_nodal"], h_grad=self["h_grad"],
                        margin=self["margin"])


# ---------------------------------------------------------------------------
# commands

def cmd_solve(cfg: RunConfig) -> int:
    spec, solver = cfg.domain(), cfg.solver()
    rows = []
    for k in cfg["k"]:
        fld = solver.field(spec, k)
        row = {"k": k, "lam": fld.lam, "backend": fld.backend, "x_max": fld.x_max}
        if k == 1:
            row["positive"] = bool(fld.value(domain_grid(spec, 0.01)).min() > -1e-8)
        rows.append(row)
        extra = "" if k != 1 else f"  positive={row['positive']}"
        print(f"{spec.label} k={k}: lambda = {fld.lam:.15g} ({fld.backend}){extra}")
    if cfg["out"]:
        write_json(cfg["out"], {"schema": SCHEMA_VERSION, "domain": spec.to_config(), "eigenpairs": rows})
    return EXIT_OK


def analyze_field(spec: DomainSpec, k: int, solver: Solver, settings: Settings) -> tuple[dict, nc.NeumannComplex]:
    fld = solver.field(spec, k)
    crit = find_critical_points(fld, settings.h_seed, settings.tol_g)
    tracer = Tracer(fld, crit)
    tracer.eps_cap = settings.eps_cap * crit.grad_scale
    cx = nc.build(fld, crit, tracer, settings.eps_launch)
    count = nc.count_neumann_domains(cx)
    part = an.nodal_partition(fld, settings.h_nodal)
    doc = {
        "schema": SCHEMA_VERSION, "domain": spec.to_config(), "k": k, "lam": fld.lam, "backend": fld.backend,
        "critical_points": [p.to_json() for p in crit.points],
        "critical_circles": [c.to_json() for c in crit.circles],
        "neumann_total": count.total, "neumann_interior": count.interior, "neumann_boundary": count.boundary,
        "punctures": count.punctures, "critical_circle": bool(crit.circles),
        "nodal": part.count, "payne": len(part.payne), "nodal_partition": part.to_json(),
        "corollaries": an.corollary_checks(count, part, crit),
        "euler": nc.euler_audit(cx).to_json(),
        "complex": cx.to_json(),
        "separatrices": [t.to_json() for t in cx.trajectories],
    }
    if spec.is_convex() and not any(p.kind.value == "degenerate" for p in crit.points):
        doc["identities"] = an.identity_checks(crit, fld)
    return doc, cx


def cmd_analyze(cfg: RunConfig) -> int:
    spec, solver, settings = cfg.domain(), cfg.solver(), cfg.settings()
    if len(cfg["k"]) != 1:
        raise ConfigError("analyze takes a single k")
    k = cfg["k"][0]
    doc, cx = analyze_field(spec, k, solver, settings)
    print(f"{spec.label} k={k}: neumann_total={doc['neumann_total']} (interior {doc['neumann_interior']}, "
          f"boundary {doc['neumann_boundary']}), nodal={doc['nodal']}, payne={doc['payne']}")
    if cfg["svg"]:
        save_svg(cx, cfg["svg"], f"{spec.label} u_{k}")
        print(f"svg written to {cfg['svg']}")
    if cfg["out"]:
        write_json(cfg["out"], doc)
        print(f"report written to {cfg['out']}")
    return EXIT_OK


def cmd_render(cfg: RunConfig) -> int:
    spec, solver, settings = cfg.domain(), cfg.solver(), cfg.settings()
    k = cfg["k"][0]
    if not cfg["svg"]:
        raise ConfigError("render needs --svg PATH")
    _, cx = analyze_field(spec, k, solver, settings)
    save_svg(cx, cfg["svg"], f"{spec.label} u_{k}")
    print(f"svg written to {cfg['svg']}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    only = cfg["only"]
    if only:
        unknown = [o for o in only if o not in CLAIMS]
        if unknown:
            raise ConfigError(f"unknown claim ids {unknown}; known: {list(CLAIMS)}")
    ws = Workspace(cfg.settings(), Solver(cfg["backend"], None, cfg["cache"]))
    rep = run_suite(ws, only, cfg["jobs"], cfg["suite"])
    for e in rep.entries:
        tag = "PASS" if e.passed else "FAIL"
        print(f"[{tag}] {e.id}" + (f"  ({e.error})" if e.error else ""))
    if cfg["out"]:
        write_json(cfg["out"], rep.to_json())
        print(f"report written to {cfg['out']}")
    if not rep.passed:
        print("failing claims: " + ", ".join(e.id for e in rep.failures))
        return EXIT_FAIL
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    solver = Solver(cfg["backend"], None, cfg["cache"])
    rows = []
    for n in cfg["n_list"]:
        t0 = time.perf_counter()
        res = an.flower_a_search(n, cfg["margin"], solver)
        rows.append(res.to_json())
        print(f"n={n}: a={res.a:.2f} lambda1={res.field.lam:.10g} max|u1| on rays={res.direct['max_abs_on_rays']:.4f} "
              f"published condition {res.paper.value:.3f} ({'holds' if res.paper.holds else 'fails'}) "
              f"[{time.perf_counter() - t0:.1f}s]")
    if cfg["out"]:
        write_json(cfg["out"], {"schema": SCHEMA_VERSION, "margin": cfg["margin"], "flowers": rows})
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "analyze": cmd_analyze, "render": cmd_render, "verify": cmd_verify,
            "sweep": cmd_sweep}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="neumannkit", description=__doc__.split("\n")[0],
                                     epilog="Any configuration key may be given as --key value "
                                            f"({', '.join(KEYS)}).")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("-v", "--verbose", action="store_true")
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        file_values = read_config(args.config) if args.config else {}
        cfg = RunConfig.build(file_values, _overrides(extra))
        return COMMANDS[args.command](cfg)
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NeumannKitError as exc:
        print(f"aborted: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
