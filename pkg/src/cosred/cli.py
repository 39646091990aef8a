"""``cosred`` batch runner: ``gen``, ``run`` and ``report``."""
import argparse
import csv
import io
import json
import os
import platform
import re
import sys
import tempfile
import time
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy

from . import __version__, families
from .checks import PARALLEL_AWARE, REGISTRY, check_seed
from .errors import ConfigError, CosredError, SpectrumInvalid
from .operator_core import estimate_bound_M, opnorm
from .phillips import CalcContext

CONFIG_KEYS = {"family", "suite", "grids", "tolerances", "seed", "output"}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["family", "suite"],
    "properties": {
        "family": {"description": "'scalar(4)', 'diagonal([0,1,4])', 'similarity([1,4],10)', 'laplacian_1d(64)' or {kind: ...}"},
        "suite": {"type": "array", "items": {"enum": sorted(REGISTRY)}},
        "grids": {"type": "object", "description": "per-check parameter overrides"},
        "tolerances": {"type": "object", "description": "per-check tolerance overrides"},
        "seed": {"type": "integer"},
        "output": {"type": "object", "properties": {"path": {"type": "string"}, "format": {"enum": ["json", "csv"]}}},
    },
}

_CALL = re.compile(r"^\s*(\w+)\s*\((.*)\)\s*$", re.S)


def parse_family(fam):
    """``"similarity([1,4],10)"`` or a dict with ``kind`` -> family dict."""
    if isinstance(fam, dict):
        if "kind" not in fam:
            raise ConfigError("family object needs a 'kind'")
        return dict(fam)
    if not isinstance(fam, str):
        raise ConfigError(f"family must be a string or object, got {type(fam).__name__}")
    m = _CALL.match(fam)
    if not m:
        raise ConfigError(f"cannot parse family {fam!r}")
    kind, inner = m.groups()
    try:
        args = json.loads("[" + inner + "]")
    except json.JSONDecodeError as e:
        raise ConfigError(f"bad family arguments in {fam!r}: {e}") from None
    names = {"scalar": ["a"], "diagonal": ["spectrum"], "similarity": ["spectrum", "cond", "seed"], "laplacian_1d": ["dim", "spacing"]}
    if kind not in names:
        raise ConfigError(f"unknown family kind {kind!r}")
    if not 1 <= len(args) <= len(names[kind]) or (kind == "similarity" and len(args) < 2):
        raise ConfigError(f"wrong number of arguments for {kind}")
    return {"kind": kind, **dict(zip(names[kind], args))}


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    return validate_config(cfg)


def validate_config(cfg):
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    extra = set(cfg) - CONFIG_KEYS
    if extra:
        raise ConfigError(f"unknown config keys {sorted(extra)}")
    if "family" not in cfg:
        raise ConfigError("config needs a family")
    parse_family(cfg["family"])
    suite = cfg.get("suite", [])
    if not isinstance(suite, list) or not all(isinstance(s, str) for s in suite):
        raise ConfigError("suite must be a list of check names")
    unknown = [s for s in suite if s not in REGISTRY]
    if unknown:
        raise ConfigError(f"unknown checks {unknown}; known: {sorted(REGISTRY)}")
    for key in ("grids", "tolerances"):
        if not isinstance(cfg.get(key, {}), dict):
            raise ConfigError(f"{key} must be an object keyed by check name")
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed must be an integer")
    out = cfg.get("output", {})
    if not isinstance(out, dict) or out.get("format", "json") not in ("json", "csv"):
        raise ConfigError("output.format must be 'json' or 'csv'")
    return cfg


def _clean(x):
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, float) and not np.isfinite(x):
        return None
    return x


def _run_check(name, ctx, cfg, seed, strict, jobs):
    fn = REGISTRY[name]
    grid = cfg.get("grids", {}).get(name, {})
    tol = cfg.get("tolerances", {}).get(name)
    rng = check_seed(seed, name)
    t0 = time.perf_counter()
    kw = {"jobs": jobs} if name in PARALLEL_AWARE else {}
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rows = fn(ctx, grid, tol, rng, **kw)
        records = [
            {
                "check": name,
                "params": {k: _clean(v) for k, v in params.items()},
                "value": _clean(float(value)),
                "bound": _clean(None if bound is None else float(bound)),
                "tolerance": float(tolerance),
                "pass": bool(np.isfinite(value) and value <= tolerance),
            }
            for params, value, bound, tolerance in rows
        ]
    except (CosredError, ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
        if strict:
            raise
        records = [
            {"check": name, "params": {}, "value": None, "bound": None, "tolerance": None, "pass": False, "error": f"{type(e).__name__}: {e}"}
        ]
    return records, time.perf_counter() - t0


def versions():
    return {"cosred": __version__, "numpy": np.__version__, "scipy": scipy.__version__, "python": platform.python_version()}


def run_suite(cfg, strict=False, jobs=1, seed=None):
    """Run the configured suite; returns the report dict (``wall_time`` kept apart)."""
    cfg = validate_config(cfg)
    seed = cfg.get("seed", 0) if seed is None else seed
    suite = cfg.get("suite", [])
    records, wall = [], {}
    fam = parse_family(cfg["family"])
    if suite:
        _, P = build_family(fam)
        ctx = CalcContext(P)
        if jobs > 1:
            with ThreadPoolExecutor(jobs) as ex:
                futs = [ex.submit(_run_check, n, ctx, cfg, seed, strict, 1) for n in suite]
                results = [f.result() for f in futs]
        else:
            results = [_run_check(n, ctx, cfg, seed, strict, jobs) for n in suite]
        for name, (recs, dt) in zip(suite, results):
            records.extend(recs)
            wall[name] = dt
    return {
        "config": cfg,
        "seed": seed,
        "records": records,
        "all_pass": all(r["pass"] for r in records),
        "versions": versions(),
        "wall_time": wall,
    }


def report_json(report):
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def report_csv(report):
    recs = report["records"]
    k = max((len(r["params"]) for r in recs), default=0)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["check", *[f"param_{i + 1}" for i in range(k)], "value", "bound", "tolerance", "pass"])
    for r in recs:
        params = [f"{key}={json.dumps(v)}" for key, v in sorted(r["params"].items())]
        params += [""] * (k - len(params))
        fmt = lambda v: "" if v is None else repr(v)
        wr.writerow([r["check"], *params, fmt(r["value"]), fmt(r["bound"]), fmt(r["tolerance"]), str(r["pass"]).lower()])
    return buf.getvalue()


def write_atomic(path, text):
    path = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), prefix=".cosred-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_family_arg(arg):
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = arg
    try:
        spec = json.loads(text)
    except json.JSONDecodeError:
        spec = text.strip()
    if isinstance(spec, dict) and "family" in spec:
        spec = spec["family"]
    return parse_family(spec)


def cmd_gen(args):
    spec = _read_family_arg(args.family)
    A, P = build_family(spec)
    out = {
        "family": spec,
        "dim": P.dim,
        "matrix_re": A.real.tolist(),
        "matrix_im": A.imag.tolist(),
        "eigenvalues": sorted(np.linalg.eigvals(A).real.tolist()),
        "eigvec_condition": P.condition_number,
        "M": estimate_bound_M(P),
    }
    if spec["kind"] == "similarity":
        S = families.similarity_matrix(len(spec["spectrum"]), spec["cond"], spec.get("seed", 0))
        out["cond_S"] = float(np.linalg.cond(S))
        out["cos_1"] = opnorm(P.eval(1.0))
    text = json.dumps(out, sort_keys=True, indent=2) + "\n"
    if args.output:
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_run(args):
    cfg = load_config(args.config)
    env = os.environ.get("COSRED_SEED")
    seed = None
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise ConfigError(f"COSRED_SEED={env!r} is not an integer") from None
    report = run_suite(cfg, strict=args.strict, jobs=args.jobs, seed=seed)
    out = cfg.get("output", {})
    fmt = out.get("format", "json")
    text = report_csv(report) if fmt == "csv" else report_json(report)
    path = args.output or out.get("path")
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)
    for r in report["records"]:
        status = "PASS" if r["pass"] else "FAIL"
        detail = r.get("error") or f"value={r['value']:.3e} tol={r['tolerance']:.3e}"
        print(f"{status} {r['check']} {json.dumps(r['params'], sort_keys=True)} {detail}", file=sys.stderr)
    return 0 if report["all_pass"] else 1


def cmd_report(args):
    try:
        with open(args.report, encoding="utf-8") as fh:
            report = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read report {args.report}: {e}") from None
    if args.csv:
        text = report_csv(report)
    else:
        lines = [f"{'check':<24}{'value':>14}{'tolerance':>14}  pass"]
        for r in report["records"]:
            v = "error" if r["value"] is None else f"{r['value']:.3e}"
            t = "-" if r["tolerance"] is None else f"{r['tolerance']:.3e}"
            lines.append(f"{r['check']:<24}{v:>14}{t:>14}  {r['pass']}")
        text = "\n".join(lines) + "\n"
    if args.output:
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)
    return 0 if all(r["pass"] for r in report["records"]) else 1


def cmd_schema(args):
    sys.stdout.write(json.dumps(CONFIG_SCHEMA, indent=2, sort_keys=True) + "\n")
    return 0


def build_family(spec):
    try:
        return families.generate_family(spec)
    except (KeyError, TypeError, ValueError, SpectrumInvalid) as e:
        raise ConfigError(f"bad family {spec!r}: {e}") from None


def build_parser():
    ap = argparse.ArgumentParser(prog="cosred", description="Cosine-family reduction checks on matrix families.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    g = sub.add_parser("gen", help="build a family and print its matrix and bound M")
    g.add_argument("family", help="family JSON file, inline JSON, or e.g. 'similarity([1,4],10)'")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)
    r = sub.add_parser("run", help="run a check suite from a config file")
    r.add_argument("config")
    r.add_argument("--strict", action="store_true", help="abort on the first numerical error")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("-o", "--output", help="override output.path")
    r.set_defaults(func=cmd_run)
    p = sub.add_parser("report", help="summarise a JSON report")
    p.add_argument("report")
    p.add_argument("--csv", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_report)
    sub.add_parser("schema", help="print the config schema").set_defaults(func=cmd_schema)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except CosredError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
