"""Command line front end: ``omega <command> [options]``.

Exit codes: 0 when every bound check passes, 1 when one fails, 2 for
usage, configuration or file errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import voluptuous as vol

from . import __version__
from .bs_dehn import dehn_table
from .combing import (
    TruncationReport,
    combing_path,
    containment_violations,
    deep_horoball_family,
    deep_horoball_target,
    log_changed,
    random_unit_pair,
)
from .config import RunConfig
from .const import (
    DEFAULT_AREA_BUDGET,
    DEFAULT_KMAX,
    DEFAULT_LENGTH_SAMPLES,
    DEFAULT_MAX_DISTANCE,
    DEFAULT_MIN_DIAMETER,
    DEFAULT_N_MAX,
    DEFAULT_N_PAIRS,
    DEFAULT_WINDOW_TREE_RADIUS,
    DEHN_COLUMNS,
    LENGTH_COLUMNS,
    LENGTH_CONSTANT_LIMIT,
    PATH_COLUMNS,
    PROJECT,
    WIDTH_COLUMNS,
)
from .coordinator import Trial, run_trials
from .diagnostics import SUMMARY_FILE, build_summary, write_csv, write_json
from .exceptions import OmegaError
from .omega_model import OmegaPoint, Scene, Window, scene_enumerate
from .padic_tree import TreeVertex
from .psl2_group import word_problem
from .width import async_width, fit_length_constant, length_rows, sample_lengths

_LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def parse_target(text: str, p: int) -> OmegaPoint:
    """``"x,y,a,b"``: plane point (x, y) over the vertex ``[[p**a, b], [0, 1]]``."""
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"target must be 'x,y,a,b', got {text!r}")
    try:
        x, y, a, b = float(parts[0]), float(parts[1]), int(parts[2]), Fraction(parts[3])
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad target {text!r}: {err}") from err
    return OmegaPoint.of(x, y, TreeVertex.canonical(a, b, p))


def _point_from_json(data, p: int) -> OmegaPoint:
    x, y, a, b = data
    return OmegaPoint.of(float(x), float(y), TreeVertex.canonical(int(a), Fraction(str(b)), p))


def load_pairs(path: Path, p: int) -> list[tuple[OmegaPoint, OmegaPoint]]:
    """Pairs from a JSON list of ``[[x, y, a, b], [x, y, a, b]]``."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [(_point_from_json(first, p), _point_from_json(second, p)) for first, second in data]


def _scene(config: RunConfig, args: argparse.Namespace) -> Scene:
    if getattr(args, "scene", None):
        scene = Scene.from_json(Path(args.scene).read_text(encoding="utf-8"))
        _LOGGER.info("Loaded %d horospheres from %s", len(scene), args.scene)
        return scene
    return scene_enumerate(config.params, config.radius)


def _outputs(config: RunConfig, name: str) -> tuple[Path, Path]:
    """Table and summary paths.

    ``--out`` naming a ``.csv`` file writes the table there and the summary
    next to it as ``<stem>.summary.json``; otherwise it is a directory.
    """
    out = Path(config.out)
    if out.suffix == ".csv":
        return out, out.with_suffix(".summary.json")
    return out / name, out / SUMMARY_FILE


def _truncation(config: RunConfig, targets: list[OmegaPoint], scene: Scene, wider: Scene) -> TruncationReport:
    def changed(rng, target):
        return log_changed(target, scene, wider)

    results = run_trials(config, [Trial(i, changed, (target,)) for i, target in enumerate(targets)])
    report = TruncationReport(
        scene.radius,
        wider.radius,
        len(targets),
        tuple(result.trial_id for result in results if result.value),
    )
    if not report.passed:
        _LOGGER.warning(
            "%d of %d interaction logs change from radius %d to %d",
            len(report.changed),
            len(targets),
            scene.radius,
            wider.radius,
        )
    return report


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_scene(config: RunConfig, args: argparse.Namespace) -> int:
    window = Window(tree_radius=args.window_radius)
    scene = scene_enumerate(config.params, config.radius, window, args.min_diameter)
    out = Path(config.out)
    path = out if out.suffix == ".json" else out / "scene.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(scene.to_json(), encoding="utf-8")
    print(f"{len(scene)} horospheres -> {path}")
    return EXIT_OK


def cmd_comb(config: RunConfig, args: argparse.Namespace) -> int:
    scene = _scene(config, args)
    target = parse_target(args.target, config.p)
    path = combing_path(target, scene)
    samples = path.sample(config.step, scene)
    violations = containment_violations(samples, scene)
    table, summary_path = _outputs(config, "path.csv")
    write_csv(table, PATH_COLUMNS, samples.rows(), config)
    summary = build_summary(
        config,
        "comb",
        [],
        {
            "length": path.length,
            "raw_length": path.raw_length,
            "k_prime": path.k_prime(),
            "touched": path.touched,
            "samples": len(samples),
            "flagged": samples.flagged,
            "violations": len(violations),
        },
    )
    summary["passed"] = not violations
    write_json(summary_path, summary)
    print(f"length {path.length:.6f} (raw {path.raw_length:.6f}), {len(samples)} samples")
    if violations:
        _LOGGER.warning("%d samples lie inside a horoball", len(violations))
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_width_sweep(config: RunConfig, args: argparse.Namespace) -> int:
    scene = _scene(config, args)
    wider = scene.widened()

    def known_pair(rng, first, second):
        return async_width(first, second, scene, config.step)

    def random_pair(rng):
        first, second = random_unit_pair(rng, wider, args.max_distance, config.pair_attempts)
        return async_width(first, second, scene, config.step)

    if args.pairs:
        pairs = load_pairs(args.pairs, config.p)
        trials = [Trial(i, known_pair, pair) for i, pair in enumerate(pairs)]
    else:
        trials = [Trial(i, random_pair) for i in range(args.n_pairs)]
    results = run_trials(config, trials)
    rows = [result.value.row(result.trial_id) for result in results]
    targets = [point for result in results for point in (result.value.first, result.value.second)]
    truncation = _truncation(config, targets, scene, wider)
    table, summary_path = _outputs(config, "widths.csv")
    write_csv(table, WIDTH_COLUMNS, rows, config)
    summary = build_summary(config, "width", rows, {"truncation": truncation.to_json()})
    summary["passed"] = summary["passed"] and truncation.passed
    write_json(summary_path, summary)
    worst = summary["maxima"].get("oracle", 0.0)
    print(f"{len(rows)} pairs, max oracle width {worst:.6f}, max measured {summary['maxima'].get('measured', 0.0):.6f}")
    for row in rows:
        if not row["passed"]:
            _LOGGER.warning("Pair %d (%s) has width %.6f above %.6f", row["pair"], row["case"], row["oracle"], row["bound"])
    return EXIT_OK if summary["passed"] else EXIT_CHECK_FAILED


def cmd_length_table(config: RunConfig, args: argparse.Namespace) -> int:
    scene = _scene(config, args)
    wider = scene.widened()

    def longest(rng, n):
        return sample_lengths(scene, n, args.samples, rng, sampling=wider)

    results = run_trials(config, [Trial(n, longest, (n,)) for n in range(args.n_max + 1)])
    table = length_rows([result.value.max_length for result in results], args.samples)
    rows = [row.row() for row in table]
    constant = fit_length_constant(table)
    targets = [target for result in results for target in result.value.targets]
    extra = {"length_constant": constant}
    if args.n_max >= 2:
        fit = deep_horoball_family(scene, range(1, args.n_max + 1))
        targets.extend(deep_horoball_target(scene.params, float(n)) for n in fit.n)
        extra["deep_family"] = {"slope": fit.slope, "intercept": fit.intercept, "c": fit.c, "lengths": fit.lengths.tolist()}
    truncation = _truncation(config, targets, scene, wider)
    extra["truncation"] = truncation.to_json()
    table_path, summary_path = _outputs(config, "lengths.csv")
    write_csv(table_path, LENGTH_COLUMNS, rows, config)
    summary = build_summary(config, "lengths", rows, extra)
    summary["passed"] = summary["passed"] and constant <= LENGTH_CONSTANT_LIMIT and truncation.passed
    write_json(summary_path, summary)
    print(f"L(n) <= {constant:.4f} e^n for 1 <= n <= {args.n_max}")
    return EXIT_OK if summary["passed"] else EXIT_CHECK_FAILED


def cmd_dehn_lower(config: RunConfig, args: argparse.Namespace) -> int:
    n = config.p**2
    table = dehn_table(n, args.kmax, args.budget, calibration=config.calibration)
    rows = [row.row() for row in table]
    table_path, summary_path = _outputs(config, "table.csv")
    write_csv(table_path, DEHN_COLUMNS, rows, config)
    bad = [row.k for row in table if row.rewriting_cost != n**row.k]
    summary = build_summary(config, "dehn-lower", rows)
    summary["passed"] = not bad
    write_json(summary_path, summary)
    print(f"BS(1, {n}): {len(rows)} witness loops, distortion {table[0].distortion:.12f}" if rows else f"BS(1, {n}): no rows")
    if bad:
        _LOGGER.warning("Rewriting cost differs from n**k for k in %s", bad)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_wordproblem(config: RunConfig, args: argparse.Namespace) -> int:
    verdict = "trivial" if word_problem(args.word, config.p) else "nontrivial"
    print(verdict)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="the prime p")
    common.add_argument("--B", dest="calibration", type=float, help="calibration height B > 1")
    common.add_argument("--radius", type=int, help="word radius of the scene")
    common.add_argument("--step", type=float, help="sampling step")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--out", help="output directory, or a .csv file for the table (.json for scene)")
    common.add_argument("--workers", type=int, help="worker threads")
    common.add_argument("--pair-attempts", dest="pair_attempts", type=int, help="retries per random target")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug")

    parser = argparse.ArgumentParser(prog="omega", description="Combings of PSL2(Z[1/p]) on Omega_p.")
    parser.add_argument("--version", action="version", version=f"{PROJECT} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    scene = sub.add_parser("scene", parents=[common], help="enumerate the horospheres of a scene")
    scene.add_argument("--window-radius", type=int, default=DEFAULT_WINDOW_TREE_RADIUS)
    scene.add_argument("--min-diameter", type=float, default=DEFAULT_MIN_DIAMETER)
    scene.set_defaults(handler=cmd_scene)

    comb = sub.add_parser("comb", parents=[common], help="sample the combing path to one target")
    comb.add_argument("--target", required=True, help="x,y,a,b")
    comb.add_argument("--scene", help="scene JSON file")
    comb.set_defaults(handler=cmd_comb)

    width = sub.add_parser("width", parents=[common], help="asynchronous width of nearby pairs")
    pairs = width.add_mutually_exclusive_group()
    pairs.add_argument("--pairs", type=Path, help="JSON file of point pairs")
    pairs.add_argument("--n-pairs", type=int, default=DEFAULT_N_PAIRS)
    width.add_argument("--max-distance", type=float, default=DEFAULT_MAX_DISTANCE)
    width.add_argument("--scene", help="scene JSON file")
    width.set_defaults(handler=cmd_width_sweep)

    lengths = sub.add_parser("lengths", parents=[common], help="length function table")
    lengths.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    lengths.add_argument("--samples", type=int, default=DEFAULT_LENGTH_SAMPLES)
    lengths.add_argument("--scene", help="scene JSON file")
    lengths.set_defaults(handler=cmd_length_table)

    dehn = sub.add_parser("dehn-lower", parents=[common], help="BS(1, p^2) witness loop table")
    dehn.add_argument("--kmax", type=int, default=DEFAULT_KMAX)
    dehn.add_argument("--budget", type=int, default=DEFAULT_AREA_BUDGET)
    dehn.set_defaults(handler=cmd_dehn_lower)

    words = sub.add_parser("wordproblem", parents=[common], help="decide whether a word is trivial")
    words.add_argument("word", nargs="?", default="", help="word over S s T t A a")
    words.set_defaults(handler=cmd_wordproblem)
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    keys = ("p", "calibration", "radius", "step", "seed", "out", "workers", "pair_attempts")
    return RunConfig.from_mapping({k: getattr(args, k) for k in keys if getattr(args, k) is not None})


def _setup_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)
    try:
        config = _config(args)
        return args.handler(config, args)
    except vol.Invalid as err:
        _LOGGER.error("Invalid configuration: %s", err)
    except argparse.ArgumentTypeError as err:
        _LOGGER.error("%s", err)
    except OSError as err:
        _LOGGER.error("Cannot access %s: %s", err.filename, err.strerror)
    except json.JSONDecodeError as err:
        _LOGGER.error("Malformed JSON input: %s", err)
    except OmegaError as err:
        _LOGGER.error("%s", err)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
