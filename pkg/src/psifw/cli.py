"""Command-line front end: config parsing, JSON/DOT emission, check runner.

Exit codes: 0 success, 2 parse/usage error, 3 internal assertion failure
(with a machine-readable failure record on the output stream).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import firework as fw
from . import tropcycles as tc
from .checks import run_builtin_checks
from .dotexport import dot_filename, metric_tree_to_dot
from .kapranov import PsiSpec, SpecError, in_hypersurface, kapranov_image, min_profile, specs_from_classes
from .trees import TreeError, metric_tree_from_json, metric_tree_to_json, split_key, splits

PARSE_ERROR = 2
ASSERTION_ERROR = 3


def _dump(doc: dict, out_path: str | None) -> None:
    text = json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _load_config(path: str | None) -> dict:
    if path is None:
        raise SpecError("this command requires --config <path>")
    return json.loads(Path(path).read_text())


def _profile_json(profile) -> dict:
    return {
        "values": [[ell, str(v)] for ell, v in profile.values],
        "argmins": list(profile.argmins),
    }


def _point_json(pt: fw.FireworkPoint, specs) -> dict:
    return {
        "tree": metric_tree_to_json(pt.metric),
        "k": list(pt.star.kvec),
        "l": list(pt.star.lvec),
        "minProfiles": [
            _profile_json(min_profile(pt.metric, specs[q])) for q in range(pt.star.r)
        ],
    }


def run_firework(config: dict, args) -> dict:
    n = int(config["n"])
    B = int(args.base) if args.base is not None else config.get("B")
    specs, B = specs_from_classes(n, config["classes"], B)
    levels = fw.firework_run(
        n, specs, B, max_level=args.max_level, threads=args.threads
    )
    checks: dict = {"injectivity": True, "membership": True}
    for level in levels[1:]:
        keys = [pt.metric.tree.key() for pt in level.points]
        checks["injectivity"] &= len(set(keys)) == len(keys)
        checks["membership"] &= all(
            in_hypersurface(pt.metric, specs[q])
            for pt in level.points
            for q in range(level.r)
        )
    expected = fw.degree_law_expected(n, specs) if len(levels) - 1 == len(specs) else None
    if expected is None:
        checks["degreeLaw"] = {"applicable": False}
    else:
        actual = len(levels[-1].points)
        checks["degreeLaw"] = {
            "applicable": True,
            "expected": str(expected),
            "actual": str(actual),
            "pass": actual == expected,
        }
    if args.oracle:
        oracle_levels = []
        for level in levels:
            if n > 7 or level.r > 3:
                continue
            oracle = fw.brute_force_FW(n, specs, B, level.r)
            agrees = sorted(m.key() for m in oracle) == sorted(
                pt.metric.key() for pt in level.points
            )
            oracle_levels.append({"r": level.r, "agrees": agrees})
        checks["oracle"] = oracle_levels
    cycle = fw.limit_cycle(levels[-1])
    doc = {
        "levels": [
            {"r": level.r, "points": [_point_json(pt, specs) for pt in level.points]}
            for level in levels
        ],
        "cycle": [
            {"splits": [list(split_key(s)) for s in splits(tree)], "coeff": coeff}
            for tree, coeff in cycle.strata
        ],
        "checks": checks,
    }
    if args.dot:
        dot_dir = Path(args.dot)
        dot_dir.mkdir(parents=True, exist_ok=True)
        for level in levels:
            for idx, pt in enumerate(level.points):
                name = dot_filename(f"fw_level{level.r}", idx)
                (dot_dir / name).write_text(
                    metric_tree_to_dot(pt.metric, f"fw_{level.r}_{idx}")
                )
    failures = [k for k, v in checks.items() if v is False]
    if checks["degreeLaw"].get("pass") is False:
        failures.append("degreeLaw")
    if args.oracle and not all(o["agrees"] for o in checks["oracle"]):
        failures.append("oracle")
    if failures:
        raise fw.InconsistencyError(f"checks failed: {failures}")
    return doc


def _spec_from_doc(doc: dict, n: int, base_override) -> PsiSpec:
    B = int(base_override) if base_override is not None else int(doc.get("B", 2 * n + 1))
    return PsiSpec.build(
        doc["S"], doc["i"], doc["j"], int(doc.get("q", 1)), n, B,
        valuations=doc.get("valuations"),
    )


def run_kapranov(config: dict, args) -> dict:
    mt = metric_tree_from_json(config["tree"])
    spec = _spec_from_doc(config["spec"], mt.tree.n, args.base)
    image = kapranov_image(mt, spec)
    profile = min_profile(mt, spec)
    doc = {
        "coordinates": {str(ell): str(d) for ell, d in sorted(image.items())},
        "minProfile": _profile_json(profile),
        "inHypersurface": len(profile.argmins) >= 2,
    }
    _maybe_tree_dot(mt, args)
    return doc


def run_membership(config: dict, args) -> dict:
    mt = metric_tree_from_json(config["tree"])
    n = mt.tree.n
    B = int(args.base) if args.base is not None else config.get("B")
    specs, B = specs_from_classes(n, config["classes"], B)
    per_class = []
    for spec in specs:
        profile = min_profile(mt, spec)
        per_class.append(
            {
                "q": spec.q,
                "member": len(profile.argmins) >= 2,
                "exactlyTwice": len(profile.argmins) == 2,
                "minProfile": _profile_json(profile),
            }
        )
    _maybe_tree_dot(mt, args)
    return {"classes": per_class, "allMember": all(c["member"] for c in per_class)}


def run_mult(config: dict, args) -> dict:
    star_sigma = tc.fan_from_json(config["starSigma"])
    star_trop_x = tc.fan_from_json(config["starTropX"])
    sigma = config["sigma"]
    value = tc.local_mult(star_sigma, sigma, star_trop_x, facet=config.get("facet"))
    return {"multiplicity": value}


def run_tropcurve(config: dict, args) -> dict:
    poly = tc.polynomial_from_json(config)
    curve = tc.trop_curve(poly)
    doc = {"curve": tc.curve_to_json(curve), "balanced": tc.check_balanced(curve)}
    if "rays" in config:
        doc["crossings"] = list(tc.ray_crossings(curve, config["rays"]))
    return doc


def run_checks(config: dict | None, args) -> dict:
    report = run_builtin_checks()
    if not report["all_pass"]:
        raise fw.InconsistencyError("builtin checks failed")
    return report


def _maybe_tree_dot(mt, args) -> None:
    if args.dot:
        dot_dir = Path(args.dot)
        dot_dir.mkdir(parents=True, exist_ok=True)
        (dot_dir / dot_filename("tree", 0)).write_text(metric_tree_to_dot(mt))


COMMANDS = {
    "firework": (run_firework, True),
    "kapranov": (run_kapranov, True),
    "membership": (run_membership, True),
    "mult": (run_mult, True),
    "tropcurve": (run_tropcurve, True),
    "checks": (run_checks, False),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psifw",
        description="Exact firework engine and tropical intersection toolkit",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="input JSON path")
    parser.add_argument("--out", help="output JSON path (default: stdout)")
    parser.add_argument("--base", type=int, help="override the base B")
    parser.add_argument("--max-level", type=int, dest="max_level", help="cap the firework level")
    parser.add_argument("--oracle", action="store_true", help="cross-check with brute force")
    parser.add_argument("--dot", help="directory for DOT tree drawings")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.threads = None
    env_threads = os.environ.get("PSIFW_THREADS")
    if env_threads:
        try:
            args.threads = int(env_threads)
        except ValueError:
            parser.error(f"PSIFW_THREADS must be an integer, got {env_threads!r}")
    runner, needs_config = COMMANDS[args.command]
    try:
        config = _load_config(args.config) if needs_config else None
    except (OSError, json.JSONDecodeError, SpecError) as exc:
        sys.stderr.write(f"psifw: {exc}\n")
        return PARSE_ERROR
    try:
        doc = runner(config, args)
    except (KeyError, TypeError, ValueError) as exc:
        # Bad schema or invalid mathematical input.
        sys.stderr.write(f"psifw: invalid input: {type(exc).__name__}: {exc}\n")
        return PARSE_ERROR
    except (fw.InconsistencyError, tc.InconsistencyError, tc.GenericityError) as exc:
        _dump({"failure": {"type": type(exc).__name__, "message": str(exc)}}, args.out)
        return ASSERTION_ERROR
    _dump(doc, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
