import json
import os
from functools import lru_cache
from typing import Any, Dict

from jsonschema import Draft202012Validator

from supframe.errors import SchemaViolation, StorageError

BASE_DIR = os.path.dirname(os.path.abspath(__file__))
SCHEMA_DIR = os.path.join(BASE_DIR, "..", "..", "schemas")

PARTITION_SCHEMA = "partition.schema.json"
COEFFICIENTS_SCHEMA = "coefficients.schema.json"
DUAL_FRAME_SCHEMA = "dual_frame.schema.json"
EXPERIMENT_CONFIG_SCHEMA = "experiment.config.schema.json"
EXPERIMENT_REPORT_SCHEMA = "experiment.report.schema.json"


def load_schema(name: str) -> Dict[str, Any]:
    path = os.path.join(SCHEMA_DIR, name)
    if not os.path.exists(path):
        raise StorageError(f"schema not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


@lru_cache(maxsize=None)
def validator(name: str) -> Draft202012Validator:
    schema = load_schema(name)
    Draft202012Validator.check_schema(schema)
    return Draft202012Validator(schema)


def validate(data: Any, name: str) -> None:
    """Raise SchemaViolation listing every error, ordered by location."""
    errors = sorted(validator(name).iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        raise SchemaViolation(
            name,
            [f"{'/'.join(map(str, e.absolute_path)) or '<root>'}: {e.message}" for e in errors],
        )
