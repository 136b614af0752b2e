"""``nangle`` command line: JSON in, deterministic JSON reports out.

Exit codes: 0 success, 1 budget exhausted (or failed properties for
``props``), 2 invalid input or parity error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .angulation import decide_contractible_homotopy, is_n_angle, n_angle_certificate
from .counterexample import run_counterexample
from .errors import PreconditionError
from .goodness import Outcome, count_fill_ins, find_good_fill_in, is_good, minimal_completion
from .linalg import Matrix, ShapeError
from .middling import search_middling_extension
from .octahedron import OctahedronWitness, find_octahedron, octahedron_defects
from .properties import run_properties
from .ring import RingError, RingSpec
from .sequences import (
    NSigmaSequence,
    ParityError,
    SequenceMorphism,
    check_parity,
    is_candidate,
    is_exact,
    is_morphism,
    mapping_cone,
)
from .verdier import search_verdier

EXIT_OK, EXIT_BUDGET, EXIT_INVALID = 0, 1, 2


class InputError(Exception):
    """Raised for unreadable or inconsistent command input."""


# -- input helpers -------------------------------------------------------------


def _load(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        obj = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise InputError(f"{path}: top-level JSON must be an object")
    return obj


def _spec(args, obj: dict | None = None) -> RingSpec:
    if args.ring:
        return RingSpec.parse(args.ring)
    if obj is not None and "ring" in obj:
        return RingSpec.from_json(obj["ring"])
    # witness files carry the ring on their rows
    for value in (obj or {}).values():
        if isinstance(value, dict) and "ring" in value:
            return RingSpec.from_json(value["ring"])
    raise InputError("no ring given; use --ring or a 'ring' field")


def _frame(args, spec: RingSpec, n: int) -> None:
    if args.n is not None and args.n != n:
        raise InputError(f"--n {args.n} does not match the input's n = {n}")
    check_parity(n, spec)


def _sequence(obj: dict, spec: RingSpec) -> NSigmaSequence:
    return NSigmaSequence.from_json(obj, spec)


def _morphism(args, obj: dict) -> tuple[RingSpec, SequenceMorphism]:
    spec = _spec(args, obj)
    phi = SequenceMorphism.from_json(obj, spec)
    _frame(args, spec, phi.n)
    if not is_morphism(phi):
        raise InputError("the components do not form a morphism")
    if not (is_n_angle(phi.source) and is_n_angle(phi.target)):
        raise InputError("source and target must be n-angles")
    return spec, phi


def _envelope(args, command: str, spec: RingSpec | None, n: int | None, verdict: str, result: dict, **bounds) -> dict:
    return {
        "tool": {"name": "nangle", "version": __version__},
        "command": command,
        "ring": None if spec is None else spec.to_json(),
        "n": n,
        "bounds": bounds,
        "budget": getattr(args, "budget", None),
        "seed": getattr(args, "seed", None),
        "verdict": verdict,
        "result": result,
    }


def _outcome_exit(verdict: str) -> int:
    return EXIT_BUDGET if verdict == Outcome.NONE_WITHIN_BUDGET.value else EXIT_OK


# -- commands --------------------------------------------------------------------


def cmd_check(args) -> tuple[dict, int]:
    obj = _load(args.input)
    spec = _spec(args, obj)
    a = _sequence(obj, spec)
    _frame(args, spec, a.n)
    result = {"candidate": is_candidate(a), "exact": None, "contractible": None, "n_angle": None, "decomposition": None}
    if result["candidate"]:
        cert = n_angle_certificate(a)
        result.update(
            exact=is_exact(a),
            contractible=decide_contractible_homotopy(a) is not None,
            n_angle=cert is not None,
            decomposition=None if cert is None else cert.to_json(),
        )
        verdict = "N_ANGLE" if cert is not None else "NOT_N_ANGLE"
    else:
        verdict = "NOT_CANDIDATE"
    return _envelope(args, "check", spec, a.n, verdict, result), EXIT_OK


def cmd_cone(args) -> tuple[dict, int]:
    spec, phi = _morphism(args, _load(args.input))
    cone = mapping_cone(phi)
    good = is_n_angle(cone)
    result = {"cone": cone.to_json(), "good": good}
    return _envelope(args, "cone", spec, phi.n, "GOOD" if good else "NOT_GOOD", result), EXIT_OK


def cmd_good(args) -> tuple[dict, int]:
    spec, phi = _morphism(args, _load(args.input))
    good = is_good(phi)
    return _envelope(args, "good", spec, phi.n, "GOOD" if good else "NOT_GOOD", {"good": good}), EXIT_OK


def cmd_fillin(args) -> tuple[dict, int]:
    obj = _load(args.input)
    spec = _spec(args, obj)
    try:
        a = _sequence(obj["source"], spec)
        b = _sequence(obj["target"], spec)
        phi1 = Matrix.from_json(spec, obj["phi1"])
        phi2 = Matrix.from_json(spec, obj["phi2"])
    except KeyError as exc:
        raise InputError(f"fill-in input needs {exc}") from exc
    _frame(args, spec, a.n)
    if not (is_n_angle(a) and is_n_angle(b)):
        raise InputError("source and target must be n-angles")
    found = find_good_fill_in(a, b, phi1, phi2, args.budget)
    verdict = found.value if isinstance(found, Outcome) else Outcome.FOUND.value
    result = {
        "fill_in_count": count_fill_ins(a, b, phi1, phi2),
        "good_fill_in": None if isinstance(found, Outcome) else found.to_json(),
    }
    return _envelope(args, "fillin", spec, a.n, verdict, result), _outcome_exit(verdict)


def cmd_middling(args) -> tuple[dict, int]:
    spec, phi = _morphism(args, _load(args.input))
    res = search_middling_extension(phi, args.rank_bound, args.budget, jobs=args.jobs)
    verdict = res.outcome.value
    return (
        _envelope(args, "middling", spec, phi.n, verdict, res.to_json(), rank_bound=args.rank_bound),
        _outcome_exit(verdict),
    )


def cmd_verdier(args) -> tuple[dict, int]:
    spec, phi = _morphism(args, _load(args.input))
    found = search_verdier(phi, args.budget, seed=args.seed)
    verdict = found.value if isinstance(found, Outcome) else Outcome.FOUND.value
    result = {"witness": None if isinstance(found, Outcome) else found.to_json()}
    return _envelope(args, "verdier", spec, phi.n, verdict, result), _outcome_exit(verdict)


def cmd_octa(args) -> tuple[dict, int]:
    obj = _load(args.input)
    spec = _spec(args, obj)
    if "phi" in obj:
        w = OctahedronWitness.from_json(obj, spec)
        _frame(args, spec, w.n)
        defects = octahedron_defects(w)
        verdict = "VERIFIED" if not defects else "REJECTED"
        return _envelope(args, "octa", spec, w.n, verdict, {"defects": defects, "witness": None}), EXIT_OK
    try:
        a = _sequence(obj["a"], spec)
        if "gamma1" in obj:
            g1 = Matrix.from_json(spec, obj["gamma1"])
            c = minimal_completion(g1, a.n)
            b = minimal_completion(g1 @ a.maps[0], a.n)
        else:
            b = _sequence(obj["b"], spec)
            c = _sequence(obj["c"], spec)
    except KeyError as exc:
        raise InputError(f"octahedron input needs {exc}") from exc
    _frame(args, spec, a.n)
    for row in (a, b, c):
        if not is_n_angle(row):
            raise InputError("every row must be an n-angle")
    w = find_octahedron(a, b, c, args.budget, seed=args.seed)
    verdict = Outcome.FOUND.value if w is not None else Outcome.NONE_WITHIN_BUDGET.value
    result = {"defects": [], "witness": None if w is None else w.to_json()}
    return _envelope(args, "octa", spec, a.n, verdict, result), _outcome_exit(verdict)


def cmd_counterexample(args) -> tuple[dict, int]:
    spec = RingSpec.parse(args.ring or "z4")
    n = args.n if args.n is not None else 4
    check_parity(n, spec)
    report = run_counterexample(n, spec, args.rank_bound, args.budget, jobs=args.jobs)
    verdict = report["verdict"]
    return (
        _envelope(args, "counterexample", spec, n, verdict, report, rank_bound=args.rank_bound),
        _outcome_exit(verdict),
    )


def cmd_props(args) -> tuple[dict, int]:
    result = run_properties(args.seed, args.cases)
    verdict = "PASS" if result["all_passed"] else "FAIL"
    return _envelope(args, "props", None, None, verdict, result, cases=args.cases), (
        EXIT_OK if result["all_passed"] else EXIT_BUDGET
    )


COMMANDS = {
    "check": (cmd_check, "membership, exactness and contractibility of a sequence"),
    "cone": (cmd_cone, "mapping cone of a morphism and its goodness"),
    "good": (cmd_good, "whether a morphism of n-angles is good"),
    "fillin": (cmd_fillin, "count fill-ins of a square and find a good one"),
    "middling": (cmd_middling, "bounded search for a middling extension"),
    "verdier": (cmd_verdier, "seeded search for a Verdier witness"),
    "octa": (cmd_octa, "verify an octahedron witness or search for one"),
    "counterexample": (cmd_counterexample, "the non-middling-good morphism (0, ..., 0, p)"),
    "props": (cmd_props, "seeded invariant suite"),
}


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", help="ring short name: z4, z9, z25, f2eps, f3eps, ...")
    common.add_argument("--n", type=int, help="number of objects (checked against the input)")
    common.add_argument("--rank-bound", type=_non_negative, default=2, help="interior rank bound for middling searches")
    common.add_argument("--budget", type=_positive, default=10**6, help="step budget for searches")
    common.add_argument("--seed", type=_non_negative, default=0, help="seed for sampled searches and props")
    common.add_argument("--jobs", type=_positive, default=1, help="worker processes (does not change output)")
    common.add_argument("--out", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="nangle", description="Workbench for exotic n-angulations over Z/p^2 and F_p[e].")
    parser.add_argument("--version", action="version", version=f"nangle {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name not in ("counterexample", "props"):
            p.add_argument("input", help="JSON input file ('-' for stdin)")
        if name == "props":
            p.add_argument("--cases", type=_positive, default=100, help="number of property cases")
    return parser


def render(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    handler = COMMANDS[args.command][0]
    try:
        report, code = handler(args)
    except ParityError as exc:
        print(f"nangle: parity error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (InputError, PreconditionError, RingError, ShapeError, ValueError) as exc:
        print(f"nangle: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = render(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
