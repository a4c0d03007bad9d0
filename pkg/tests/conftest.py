import json

import pytest
from hypothesis import HealthCheck, settings
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from excoll.cli import SCHEMA_NAMES, load_schema

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def validate():
    """Validate a payload against a checked-in schema by short name."""
    schemas = {name: load_schema(name) for name in SCHEMA_NAMES}
    registry = Registry().with_resources(
        [(s["$id"], Resource.from_contents(s)) for s in schemas.values()]
        + [(f"{name}.schema.json", Resource.from_contents(s)) for name, s in schemas.items()]
    )

    def check(name: str, payload: dict) -> None:
        data = json.loads(json.dumps(payload))
        Draft202012Validator(schemas[name], registry=registry).validate(data)

    return check
