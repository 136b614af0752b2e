"""Regenerate src/nangle/schemas/*.json from the definitions below."""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "nangle" / "schemas"
DRAFT = "https://json-schema.org/draft/2020-12/schema"

ENTRY = {"oneOf": [{"type": "integer", "minimum": 0}, {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2}]}
NULLABLE = lambda s: {"oneOf": [{"type": "null"}, s]}
REF = lambda name: {"$ref": f"#/$defs/{name}"}
VERDICT = ["FOUND", "NONE_EXHAUSTIVE", "NONE_WITHIN_BUDGET"]

DEFS = {
    "ring": {
        "type": "object",
        "required": ["kind", "p"],
        "properties": {"kind": {"enum": ["z-mod-p2", "dual-numbers"]}, "p": {"type": "integer", "minimum": 2}},
        "additionalProperties": False,
    },
    "matrix": {
        "type": "object",
        "required": ["rows", "cols", "entries"],
        "properties": {
            "rows": {"type": "integer", "minimum": 0},
            "cols": {"type": "integer", "minimum": 0},
            "entries": {"type": "array", "items": ENTRY},
        },
        "additionalProperties": False,
    },
    "sequence": {
        "type": "object",
        "required": ["ring", "n", "ranks", "maps"],
        "properties": {
            "ring": REF("ring"),
            "n": {"type": "integer", "minimum": 3},
            "ranks": {"type": "array", "items": {"type": "integer", "minimum": 0}},
            "maps": {"type": "array", "items": REF("matrix")},
        },
        "additionalProperties": False,
    },
    "morphism": {
        "type": "object",
        "required": ["ring", "n", "source", "target", "components"],
        "properties": {
            "ring": REF("ring"),
            "n": {"type": "integer", "minimum": 3},
            "source": REF("sequence"),
            "target": REF("sequence"),
            "components": {"type": "array", "items": REF("matrix")},
        },
        "additionalProperties": False,
    },
    "trivial_summand": {
        "type": "object",
        "required": ["slot", "multiplicity"],
        "properties": {"slot": {"type": "integer", "minimum": 1}, "multiplicity": {"type": "integer", "minimum": 1}},
        "additionalProperties": False,
    },
    "decomposition": {
        "type": "object",
        "required": ["trivial_summands", "fp_rank", "witness", "residual", "obstruction"],
        "properties": {
            "trivial_summands": {"type": "array", "items": REF("trivial_summand")},
            "fp_rank": {"type": "integer", "minimum": 0},
            "witness": {"type": "array", "items": REF("matrix")},
            "residual": NULLABLE(REF("sequence")),
            "obstruction": NULLABLE({"type": "string"}),
        },
        "additionalProperties": False,
    },
    "octahedron_witness": {
        "type": "object",
        "required": ["a", "b", "c", "phi", "psi", "lambdas"],
        "properties": {
            "a": REF("sequence"),
            "b": REF("sequence"),
            "c": REF("sequence"),
            "phi": {"type": "array", "items": REF("matrix")},
            "psi": {"type": "array", "items": REF("matrix")},
            "lambdas": {"type": "array", "items": REF("matrix")},
        },
        "additionalProperties": False,
    },
    "verdier_witness": {
        "type": "object",
        "required": ["first", "second"],
        "properties": {"first": REF("octahedron_witness"), "second": REF("octahedron_witness")},
        "additionalProperties": False,
    },
    "middling_diagram": {
        "type": "object",
        "required": ["ring", "n", "ranks", "alpha", "phi"],
        "properties": {
            "ring": REF("ring"),
            "n": {"type": "integer", "minimum": 3},
            "ranks": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
            "alpha": {"type": "array", "items": {"type": "array", "items": REF("matrix")}},
            "phi": {"type": "array", "items": {"type": "array", "items": REF("matrix")}},
        },
        "additionalProperties": False,
    },
    "middling_result": {
        "type": "object",
        "required": [
            "verdict",
            "diagram",
            "budget",
            "budget_used",
            "branches_total",
            "branches_explored",
            "column_representatives",
            "rank_bound",
            "branch",
        ],
        "properties": {
            "verdict": {"enum": VERDICT},
            "diagram": NULLABLE(REF("middling_diagram")),
            "budget": {"type": "integer", "minimum": 1},
            "budget_used": {"type": "integer", "minimum": 0},
            "branches_total": {"type": "integer", "minimum": 0},
            "branches_explored": {"type": "integer", "minimum": 0},
            "column_representatives": {"type": "array", "items": {"type": "integer", "minimum": 0}},
            "rank_bound": {"type": "integer", "minimum": 0},
            "branch": NULLABLE({"type": "array", "items": {"type": "integer", "minimum": 0}}),
        },
        "additionalProperties": False,
    },
}

RESULTS = {
    "check": (
        ["N_ANGLE", "NOT_N_ANGLE", "NOT_CANDIDATE"],
        {
            "type": "object",
            "required": ["candidate", "exact", "contractible", "n_angle", "decomposition"],
            "properties": {
                "candidate": {"type": "boolean"},
                "exact": {"type": ["boolean", "null"]},
                "contractible": {"type": ["boolean", "null"]},
                "n_angle": {"type": ["boolean", "null"]},
                "decomposition": NULLABLE(REF("decomposition")),
            },
            "additionalProperties": False,
        },
    ),
    "cone": (
        ["GOOD", "NOT_GOOD"],
        {
            "type": "object",
            "required": ["cone", "good"],
            "properties": {"cone": REF("sequence"), "good": {"type": "boolean"}},
            "additionalProperties": False,
        },
    ),
    "good": (
        ["GOOD", "NOT_GOOD"],
        {"type": "object", "required": ["good"], "properties": {"good": {"type": "boolean"}}, "additionalProperties": False},
    ),
    "fillin": (
        VERDICT,
        {
            "type": "object",
            "required": ["fill_in_count", "good_fill_in"],
            "properties": {"fill_in_count": {"type": "integer", "minimum": 0}, "good_fill_in": NULLABLE(REF("morphism"))},
            "additionalProperties": False,
        },
    ),
    "middling": (VERDICT, REF("middling_result")),
    "verdier": (
        VERDICT,
        {
            "type": "object",
            "required": ["witness"],
            "properties": {"witness": NULLABLE(REF("verdier_witness"))},
            "additionalProperties": False,
        },
    ),
    "octa": (
        ["VERIFIED", "REJECTED", "FOUND", "NONE_WITHIN_BUDGET"],
        {
            "type": "object",
            "required": ["defects", "witness"],
            "properties": {
                "defects": {"type": "array", "items": {"type": "string"}},
                "witness": NULLABLE(REF("octahedron_witness")),
            },
            "additionalProperties": False,
        },
    ),
    "counterexample": (
        VERDICT,
        {
            "type": "object",
            "required": ["morphism", "is_morphism", "is_weak_isomorphism", "is_good", "cone", "search", "verdict", "trace"],
            "properties": {
                "morphism": REF("morphism"),
                "is_morphism": {"type": "boolean"},
                "is_weak_isomorphism": {"type": "boolean"},
                "is_good": {"type": "boolean"},
                "cone": {
                    "type": "object",
                    "required": ["n_angle", "obstruction", "monodromy"],
                    "properties": {
                        "n_angle": {"type": "boolean"},
                        "obstruction": {"type": ["string", "null"]},
                        "monodromy": {
                            "oneOf": [
                                {"type": "null"},
                                {"type": "string"},
                                {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                            ]
                        },
                    },
                    "additionalProperties": False,
                },
                "search": REF("middling_result"),
                "verdict": {"enum": VERDICT},
                "trace": NULLABLE(
                    {
                        "type": "object",
                        "required": ["columns", "branches", "wrap_condition"],
                        "properties": {
                            "columns": {"type": "array", "items": {"type": "object"}},
                            "branches": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "required": ["branch", "solutions_per_column", "rows_rejected", "extension_found"],
                                },
                            },
                            "wrap_condition": {"type": "string"},
                        },
                    }
                ),
            },
            "additionalProperties": False,
        },
    ),
    "props": (
        ["PASS", "FAIL"],
        {
            "type": "object",
            "required": ["properties", "cases", "all_passed"],
            "properties": {
                "cases": {"type": "integer", "minimum": 1},
                "all_passed": {"type": "boolean"},
                "properties": {
                    "type": "object",
                    "additionalProperties": {
                        "type": "object",
                        "required": ["cases", "passed", "failures"],
                        "properties": {
                            "cases": {"type": "integer", "minimum": 0},
                            "passed": {"type": "integer", "minimum": 0},
                            "failures": {"type": "array"},
                        },
                    },
                },
            },
            "additionalProperties": False,
        },
    ),
}


def report_schema(command: str) -> dict:
    verdicts, result = RESULTS[command]
    return {
        "$schema": DRAFT,
        "$id": f"nangle/report_{command}.json",
        "title": f"nangle {command} report",
        "type": "object",
        "required": ["tool", "command", "ring", "n", "bounds", "budget", "seed", "verdict", "result"],
        "properties": {
            "tool": {
                "type": "object",
                "required": ["name", "version"],
                "properties": {"name": {"const": "nangle"}, "version": {"type": "string"}},
                "additionalProperties": False,
            },
            "command": {"const": command},
            "ring": NULLABLE(REF("ring")),
            "n": {"type": ["integer", "null"]},
            "bounds": {"type": "object"},
            "budget": {"type": ["integer", "null"]},
            "seed": {"type": ["integer", "null"]},
            "verdict": {"enum": verdicts},
            "result": result,
        },
        "additionalProperties": False,
        "$defs": DEFS,
    }


def object_schema(name: str) -> dict:
    return {"$schema": DRAFT, "$id": f"nangle/{name}.json", "title": name.replace("_", " "), **REF(name), "$defs": DEFS}


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    files = {f"report_{c}.json": report_schema(c) for c in RESULTS}
    for name in ("sequence", "morphism", "middling_diagram", "octahedron_witness", "verdier_witness"):
        files[f"{name}.json"] = object_schema(name)
    for fname, schema in files.items():
        (OUT / fname).write_text(json.dumps(schema, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
