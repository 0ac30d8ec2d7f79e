"""Command-line front end.

    tdlc scale  --backend padic --prime 3
    tdlc scale  --input config.json --format json
    tdlc verify --suite tachar --cases 500 --seed 7

Exit codes: 0 certified / all passed, 1 error or failure, 2 undecided.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Sequence

from . import engine, groups, padic, shift, suites, tree
from .core import Budgets, TidyError

EXIT_OK, EXIT_ERROR, EXIT_UNDECIDED = 0, 1, 2


class ConfigError(ValueError):
    pass


def budget_multiplier(env=None) -> int:
    raw = (env if env is not None else os.environ).get("TDLC_BUDGET_SCALE", "1")
    try:
        factor = int(raw)
    except ValueError as exc:
        raise ConfigError(f"TDLC_BUDGET_SCALE must be a positive integer, got {raw!r}") from exc
    if factor < 1:
        raise ConfigError("TDLC_BUDGET_SCALE must be positive")
    return factor


def budgets_from(args, cfg: dict) -> Budgets:
    b = cfg.get("budgets", {})

    def pick(flag, key, default):
        v = getattr(args, flag, None)
        v = b.get(key, default) if v is None else v
        if not isinstance(v, int) or v < 1:
            raise ConfigError(f"budget {key} must be a positive integer")
        return v

    base = Budgets(max_depth=pick("max_depth", "max_depth", 32), window=pick("window", "window", 3),
                   max_level=pick("max_level", "max_level", 4),
                   search_radius=pick("radius", "search_radius", 64))
    return base.scaled(budget_multiplier())


# --- config parsing --------------------------------------------------------------------------

def _group(value) -> Any:
    if isinstance(value, str):
        return groups.preset(value)
    if isinstance(value, dict) and "table" in value:
        from .core import FiniteGroupTable
        return FiniteGroupTable.from_table(value["table"], value.get("label", "F"))
    raise ConfigError("group must be a preset name or {\"table\": [[...]]}")


def _int_keys(d: dict) -> dict:
    try:
        return {int(k): v for k, v in d.items()}
    except (TypeError, ValueError) as exc:
        raise ConfigError("coordinate keys must be integers") from exc


def build_shift(cfg: dict):
    table = _group(cfg.get("group", "Z2"))
    conj = shift.FiniteSupportElement.make(table, _int_keys(cfg.get("conj", {})))
    alpha = shift.ShiftAutomorphism(table, int(cfg.get("shift", 1)), conj)
    sub = cfg.get("subgroup", "whole")
    if sub == "whole":
        U = shift.whole(table)
    elif isinstance(sub, dict) and "trivial_at" in sub:
        U = shift.E(table, sub["trivial_at"])
    elif isinstance(sub, dict) and "generators" in sub:
        U = shift.make_generated(table, _int_keys(sub["generators"]))
    else:
        raise ConfigError("shift subgroup: \"whole\", {\"trivial_at\": [...]} or {\"generators\": {...}}")
    return alpha, U


def build_tree(cfg: dict):
    d = int(cfg.get("degree", 3))
    aut = cfg.get("automorphism", {"preset": "translation", "length": 1})
    if "preset" in aut:
        name = aut["preset"]
        if name not in tree.PRESETS:
            raise ConfigError(f"unknown tree preset {name!r}; choose from {sorted(tree.PRESETS)}")
        phi = tree.translation(d, int(aut.get("length", 1))) if name == "translation" \
            else tree.PRESETS[name](d)
    else:
        local = {tuple(int(c) for c in k): v for k, v in aut.get("local", {}).items()}
        phi = tree.PortraitAutomorphism(d, aut.get("base_image", []), aut.get("default"), local)
    U = tree.fix(d, [tuple(v) for v in cfg.get("subgroup", [[]])])
    return phi, U


def build_padic(cfg: dict):
    p = int(cfg.get("p", 2))
    ambient = cfg.get("ambient", "SL")
    a1, a2 = cfg.get("exponents", [1, 0])
    alpha = padic.diag_conj(int(a1), int(a2))
    sub = cfg.get("subgroup", "whole")
    if sub == "whole":
        U = padic.whole(p, ambient)
    elif sub == "upper":
        U = padic.upper_congruence(p, 1, ambient)
    elif isinstance(sub, dict):
        U = padic.closure(p, int(sub.get("level", 1)), sub.get("generators", []), ambient)
    else:
        raise ConfigError("padic subgroup: \"whole\", \"upper\" or {\"level\": k, \"generators\": [...]}")
    return alpha, U


BUILDERS = {"shift": build_shift, "tree": build_tree, "padic": build_padic}


def load_config(args) -> dict:
    cfg: dict = {}
    if args.input:
        try:
            with open(args.input, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read {args.input}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    if getattr(args, "backend", None):
        cfg["backend"] = args.backend
    for flag, key in (("prime", "p"), ("degree", "degree"), ("group", "group"), ("shift", "shift")):
        v = getattr(args, flag, None)
        if v is not None:
            cfg[key] = v
    if getattr(args, "length", None) is not None or getattr(args, "preset", None):
        cfg["automorphism"] = {"preset": args.preset or "translation", "length": args.length or 1}
    if "backend" not in cfg:
        raise ConfigError("no backend given (--backend or \"backend\" in the config)")
    if cfg["backend"] not in BUILDERS:
        raise ConfigError(f"unknown backend {cfg['backend']!r}")
    return cfg


# --- output --------------------------------------------------------------------------------------

def jsonable(x: Any) -> Any:
    """Ints become decimal strings; everything else becomes plain JSON data."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        return x
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(jsonable(v) for v in x)
    return str(x)


def dumps(report: dict) -> str:
    return json.dumps(jsonable(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def describe(U) -> str:
    return engine.backend_of(U).describe(U)


# --- commands -------------------------------------------------------------------------------------

def cmd_scale(args) -> tuple[int, dict, str]:
    cfg = load_config(args)
    budgets = budgets_from(args, cfg)
    alpha, U = BUILDERS[cfg["backend"]](cfg)
    r = engine.scale(alpha, U, budgets)
    report = {"command": "scale", "backend": cfg["backend"], "scale": r.scale,
              "certified": r.certified, "witness": describe(r.witness),
              "index_chain": [list(c) for c in r.index_chain], "seed": args.seed,
              "budgets": vars(budgets)}
    status = "certified" if r.certified else "upper bound, tidiness undecided"
    text = (f"scale = {r.scale}, {status}\nwitness = {describe(r.witness)}\n"
            f"index chain = {', '.join(f'{n}:{v}' for n, v in r.index_chain)}\n")
    return (EXIT_OK if r.certified else EXIT_UNDECIDED), report, text


def cmd_verify(args) -> tuple[int, dict, str]:
    name = args.suite
    if name not in suites.SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {sorted(suites.SUITES)}")
    cfg = {}
    if args.input:
        with open(args.input, encoding="utf-8") as fh:
            cfg = json.load(fh)
    budgets = budgets_from(args, cfg)
    cases = args.cases if args.cases is not None else suites.DEFAULT_CASES[name]
    seed = args.seed if args.seed is not None else suites.DEFAULT_SEED
    res = suites.SUITES[name](cases, seed, budgets)
    report = {"command": "verify", "suite": name, "passed": res.passed, "total": res.total,
              "seed": seed, "cases": cases, "failures": res.failures[:5],
              "details": res.details, "budgets": vars(budgets)}
    lines = [f"suite {name}: {res.passed}/{res.total} passed (seed {seed})"]
    if name == "paper-table":
        lines += [f"  {r['family']:6} {r['example']:34} scale = {r['scale']:<3} expected {r['expected']}"
                  for r in res.details["rows"]]
    for f in res.failures[:5]:
        lines.append(f"  FAIL {f}")
    if res.failures:
        lines.append(f"  reproduce: tdlc verify --suite {name} --cases {cases} --seed {seed}")
    return (EXIT_OK if res.ok else EXIT_ERROR), report, "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tdlc", description="Scale and tidy subgroups of automorphisms "
                                 "of totally disconnected locally compact groups.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", help="JSON config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--max-depth", type=int, dest="max_depth")
        p.add_argument("--window", type=int)
        p.add_argument("--max-level", type=int, dest="max_level")
        p.add_argument("--radius", type=int)
        p.add_argument("--format", choices=("text", "json"), default="text")

    s = sub.add_parser("scale", help="compute the scale and a tidy subgroup")
    common(s)
    s.add_argument("--backend", choices=sorted(BUILDERS))
    s.add_argument("--prime", type=int, help="padic: the prime p")
    s.add_argument("--degree", type=int, help="tree: vertex degree")
    s.add_argument("--preset", choices=sorted(tree.PRESETS), help="tree: automorphism preset")
    s.add_argument("--length", type=int, help="tree: translation length")
    s.add_argument("--group", help="shift: finite group preset (Z2, S3, SL2F2, ...)")
    s.add_argument("--shift", type=int, help="shift: shift amount")

    v = sub.add_parser("verify", help="run a verification suite")
    common(v)
    v.add_argument("--suite", required=True, choices=sorted(suites.SUITES))
    v.add_argument("--cases", type=int)
    v.add_argument("--backend", help=argparse.SUPPRESS)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        code, report, text = (cmd_scale if args.command == "scale" else cmd_verify)(args)
    except (ConfigError, TidyError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(dumps(report) if args.format == "json" else text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
