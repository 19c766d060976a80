"""JSON schemas for everything the CLI writes."""

_number = {"type": "number"}
_prob = {"type": "number", "minimum": 0, "maximum": 1}

STATE = {
    "type": "object",
    "required": ["d", "entries"],
    "properties": {
        "d": {"type": "integer", "minimum": 1},
        "entries": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "array", "items": _number, "minItems": 2, "maxItems": 2},
            },
        },
    },
}

REPORT = {
    "type": "object",
    "required": ["d", "score", "residuals", "concurrence", "measurement_mode"],
    "properties": {
        "d": {"type": "integer", "minimum": 1},
        "score": _prob,
        "residuals": {"type": "array", "items": _prob, "minItems": 3, "maxItems": 3},
        "concurrence": {"type": ["number", "null"]},
        "measurement_mode": {"enum": ["constructed", "explicit"]},
        "converged": {"type": "boolean"},
        "state": STATE,
    },
}

LHV = {
    "type": "object",
    "required": ["d", "minimum", "n_strategies", "n_minimizers", "all_equal_is_minimizer", "minimizers"],
    "properties": {
        "d": {"type": "integer"},
        "minimum": _number,
        "n_strategies": {"type": "integer"},
        "n_minimizers": {"type": "integer"},
        "all_equal_is_minimizer": {"type": "boolean"},
        "minimizers": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 4, "maxItems": 4},
        },
    },
}

NOGO = {
    "type": "object",
    "required": ["d", "trials", "max_score", "max_residual", "constructed_score", "passed"],
    "properties": {
        "d": {"type": "integer"},
        "trials": {"type": "integer"},
        "max_score": _number,
        "max_residual": _number,
        "constructed_score": _number,
        "passed": {"type": "boolean"},
    },
}

SAMPLE = {
    "type": "object",
    "required": ["d", "pair", "n_samples", "seed", "counts"],
    "properties": {
        "d": {"type": "integer"},
        "pair": {"enum": ["11", "12", "21", "22"]},
        "n_samples": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "counts": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
    },
}

SCAN = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["d", "p_app", "concurrence", "wall_time_s"],
        "properties": {
            "d": {"type": "integer"},
            "p_app": {"type": ["number", "null"]},
            "concurrence": {"type": ["number", "null"]},
            "wall_time_s": _number,
            "error": {"type": "string"},
        },
    },
}

ERROR = {
    "type": "object",
    "required": ["error", "message"],
    "properties": {"error": {"type": "string"}, "message": {"type": "string"}},
}
