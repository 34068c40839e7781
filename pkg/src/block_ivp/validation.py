"""
Request models and their JSON schema validation

The CLI and the public API build RunRequest / OrderRequest objects; both are
validated against the schemas below before any solver work starts.
"""
import logging
from dataclasses import dataclass, asdict
from typing import Optional

from jsonschema import validate, ValidationError

from .config import get_solver_settings, OUTPUT_DEFAULTS
from .errors import RequestValidationError

logger = logging.getLogger(__name__)

_POSITIVE_INT_OR_NULL = {"type": ["integer", "null"], "minimum": 1}

RUN_REQUEST_SCHEMA = {
    "type": "object",
    "properties": {
        "problem": {"type": "string", "minLength": 1},
        "blocks": _POSITIVE_INT_OR_NULL,
        "points": {"type": "integer", "minimum": 1},
        "newton_tol": {"type": "number", "exclusiveMinimum": 0},
        "max_iter": {"type": "integer", "minimum": 1},
        "output_format": {"type": "string", "enum": ["table", "csv"]},
        "compare": {"type": ["string", "null"], "enum": ["exact", "oracle", "none", None]},
        "oracle_steps": _POSITIVE_INT_OR_NULL,
        "out": {"type": ["string", "null"]}
    },
    "required": ["problem", "points", "newton_tol", "max_iter", "output_format"]
}

ORDER_REQUEST_SCHEMA = {
    "type": "object",
    "properties": {
        "problem": {"type": "string", "minLength": 1},
        "points": {"type": "integer", "minimum": 1},
        "refinements": {"type": "integer", "minimum": 2},
        "blocks": _POSITIVE_INT_OR_NULL,
        "oracle_steps": _POSITIVE_INT_OR_NULL,
        "workers": {"type": "integer", "minimum": 1},
        "newton_tol": {"type": "number", "exclusiveMinimum": 0},
        "max_iter": {"type": "integer", "minimum": 1}
    },
    "required": ["problem", "points", "refinements"]
}

SCHEMAS = {
    "run": RUN_REQUEST_SCHEMA,
    "order": ORDER_REQUEST_SCHEMA
}


def validate_request(schema_name, instance):
    """
    Validate a request dictionary against one of the schemas

    Args:
        schema_name: Key into SCHEMAS ('run' or 'order')
        instance: The request as a plain dictionary

    Raises:
        RequestValidationError: the instance does not match the schema
    """
    schema = SCHEMAS.get(schema_name)
    if schema is None:
        raise RequestValidationError(f"unknown request schema {schema_name!r}")
    try:
        validate(instance=instance, schema=schema)
    except ValidationError as e:
        field = '.'.join(str(p) for p in e.path) or '<request>'
        logger.debug(f"Request validation failed: {e}")
        raise RequestValidationError(f"{field}: {e.message}") from e


@dataclass(frozen=True)
class RunRequest:
    """Parameters of a single benchmark run"""
    problem: str
    blocks: Optional[int] = None
    points: int = 5
    newton_tol: float = 1e-12
    max_iter: int = 25
    output_format: str = OUTPUT_DEFAULTS['format']
    compare: Optional[str] = None
    oracle_steps: Optional[int] = None
    out: Optional[str] = None

    def __post_init__(self):
        validate_request("run", asdict(self))

    @classmethod
    def with_defaults(cls, problem, **overrides):
        """Fill unset solver fields from the package settings"""
        settings = get_solver_settings()
        values = {
            'points': settings['points_per_block'],
            'newton_tol': settings['newton_tol'],
            'max_iter': settings['newton_max_iter'],
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(problem=problem, **values)


@dataclass(frozen=True)
class OrderRequest:
    """Parameters of a convergence-order study"""
    problem: str
    points: int = 5
    refinements: int = 3
    blocks: Optional[int] = None
    oracle_steps: Optional[int] = None
    workers: int = 1
    newton_tol: float = 1e-12
    max_iter: int = 25

    def __post_init__(self):
        validate_request("order", asdict(self))
