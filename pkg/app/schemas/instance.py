"""
Instance file schema.

Defines the JSON layout read and written by the CLI:
{"m": int, "n": int, "k": int, "mode": "without_reps"|"with_reps", "vectors": [[...], ...]}
"""
import json
import logging
from pathlib import Path
from typing import Union

from pydantic import BaseModel, ConfigDict

from app.models.instance import Instance, Mode

logger = logging.getLogger(__name__)


class InstanceFile(BaseModel):
    """
    Schema for an instance file.

    Field order is the on-disk key order.
    """
    m: int
    n: int
    k: int
    mode: Mode
    vectors: list[list[float]]

    model_config = ConfigDict(extra="forbid")

    def to_instance(self) -> Instance:
        """Validate the file contents as an Instance."""
        return Instance(
            m=self.m,
            n=self.n,
            k=self.k,
            mode=self.mode,
            vectors=tuple(tuple(row) for row in self.vectors),
        )

    @classmethod
    def from_instance(cls, inst: Instance) -> "InstanceFile":
        return cls(m=inst.m, n=inst.n, k=inst.k, mode=inst.mode, vectors=[list(row) for row in inst.vectors])


def instance_to_json(inst: Instance) -> str:
    """
    Serialize an instance with a stable layout (one vector per line).

    Floats are written with repr precision, so a load of the output
    reproduces the instance exactly.
    """
    data = InstanceFile.from_instance(inst)
    rows = ",\n    ".join(json.dumps(row) for row in data.vectors)
    return (
        "{\n"
        f'  "m": {data.m},\n'
        f'  "n": {data.n},\n'
        f'  "k": {data.k},\n'
        f'  "mode": "{data.mode.value}",\n'
        f'  "vectors": [\n    {rows}\n  ]\n'
        "}\n"
    )


def load_instance(path: Union[str, Path]) -> Instance:
    """
    Read and validate an instance file.

    Parameters:
        path: JSON file in the instance layout

    Returns:
        Validated Instance

    Raises:
        pydantic.ValidationError: If the JSON does not match the layout
        DesignError: If the instance violates a domain invariant
    """
    text = Path(path).read_text(encoding="utf-8")
    inst = InstanceFile.model_validate_json(text).to_instance()
    logger.debug(f"Loaded instance {path}: m={inst.m}, n={inst.n}, k={inst.k}, mode={inst.mode.value}")
    return inst


def dump_instance(inst: Instance, path: Union[str, Path]) -> None:
    """Write an instance file."""
    Path(path).write_text(instance_to_json(inst), encoding="utf-8")
    logger.info(f"Wrote instance to {path}")
