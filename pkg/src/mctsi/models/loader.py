"""
Model-file I/O.

A model file is a JSON object

    {"m": 3, "cards": [2, 2, 2], "edges": [[1, 2], [2, 3]], "root": 1,
     "root_pmf": [0.5, 0.5], "kernels": {"2": [[0.9, 0.1], [0.1, 0.9]], "3": ...}}

Probabilities may be JSON numbers or decimal strings. Structural problems are
reported by pydantic, invariant problems by MctModel; both surface as a
ModelValidationError carrying the JSON pointer of the first offending value.
Besides file paths, ``load_target`` accepts ``builtin:<name>[:key=value,...]``.
"""

import json
import logging
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError

from ..core.errors import InvalidTreeError, ModelParseError, ModelValidationError, json_pointer
from ..core.pmf import DEFAULT_DENSE_GUARD, JointPmf
from ..core.tree import Tree
from . import generators
from .mct import MctModel, joint_pmf

logger = logging.getLogger(__name__)

BUILTIN_PREFIX = "builtin:"
DEFAULT_BINARY_TREE_FLIPS = (0.1, 0.2)


def _parse_probability(value: Any) -> Any:
    if isinstance(value, str):
        try:
            number = Decimal(value.strip())
        except InvalidOperation:
            raise ValueError(f"{value!r} is not a decimal number")
        if not number.is_finite():
            raise ValueError(f"{value!r} is not finite")
        return float(number)
    return value


Probability = Annotated[float, BeforeValidator(_parse_probability)]


class ModelFile(BaseModel):
    """Schema of a model file; invariants beyond shape are checked by MctModel."""
    model_config = ConfigDict(extra="forbid")

    m: int = Field(ge=1)
    cards: List[int]
    edges: List[Tuple[int, int]]
    root: int
    root_pmf: List[Probability]
    kernels: Dict[str, List[List[Probability]]]


def _first_error(exc: ValidationError) -> ModelValidationError:
    error = exc.errors()[0]
    return ModelValidationError(json_pointer(*error["loc"]), error["msg"])


def model_from_data(data: Any) -> MctModel:
    """Validate decoded JSON and build the model."""
    try:
        schema = ModelFile.model_validate(data)
    except ValidationError as e:
        raise _first_error(e)
    for key in schema.kernels:
        if not key.isdigit():
            raise ModelValidationError(json_pointer("kernels", key), "kernel keys must be vertex ids")
    try:
        tree = Tree(schema.m, tuple(schema.edges))
    except InvalidTreeError as e:
        raise ModelValidationError("/edges", str(e))
    return MctModel(
        tree=tree,
        root=schema.root,
        cards=tuple(schema.cards),
        root_pmf=schema.root_pmf,
        kernels={int(j): rows for j, rows in schema.kernels.items()},
    )


def loads_model(text: str) -> MctModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelParseError(f"Malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    return model_from_data(data)


def load_model(path: Union[str, Path]) -> MctModel:
    """Read and validate a model file. OSError propagates for unreadable paths."""
    text = Path(path).read_text(encoding="utf-8")
    model = loads_model(text)
    logger.info(f"Loaded {model.m}-vertex model from {path}")
    return model


def dump_model(model: MctModel) -> str:
    """Canonical JSON text; loading it back and dumping again is a fixed point."""
    return json.dumps(model.to_dict(), indent=2, sort_keys=True) + "\n"


def save_model(model: MctModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(dump_model(model), encoding="utf-8")
    logger.info(f"Wrote model to {path}")
    return path


@dataclass(frozen=True, eq=False)
class ModelTarget:
    """What a command operates on: an MCT, or a bare pmf placed on a tree."""
    name: str
    tree: Tree
    model: Optional[MctModel] = None
    pmf: Optional[JointPmf] = None

    def joint(self, max_states: int = DEFAULT_DENSE_GUARD) -> JointPmf:
        if self.pmf is not None:
            return self.pmf
        return joint_pmf(self.model, max_states)

    @classmethod
    def of_model(cls, name: str, model: MctModel) -> "ModelTarget":
        return cls(name=name, tree=model.tree, model=model)


def _builtin_options(text: str) -> Dict[str, str]:
    options = {}
    for item in filter(None, text.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise ModelParseError(f"Builtin option {item!r} is not key=value")
        options[key.strip()] = value.strip()
    return options


def _option(options: Dict[str, str], key: str, convert, default=None):
    if key not in options:
        return default
    try:
        return convert(options[key])
    except ValueError:
        raise ModelParseError(f"Builtin option {key}={options[key]!r} is not a valid value") from None


def builtin_target(spec: str) -> ModelTarget:
    """Resolve ``binary-tree[:l=3,p=0.1/0.2/...]``, ``local-not-global``, ``chain3`` or ``product[:m=4]``."""
    name, _, rest = spec.partition(":")
    options = _builtin_options(rest)
    if name == "binary-tree":
        l = _option(options, "l", int, 2)
        p = _option(options, "p", lambda text: [float(x) for x in text.split("/")])
        if p is None:
            p = DEFAULT_BINARY_TREE_FLIPS if l == 2 else list(np.linspace(0.05, 0.45, 2 ** l - 2))
        return ModelTarget.of_model(BUILTIN_PREFIX + spec, generators.example_binary_tree(l, p))
    if name == "local-not-global":
        pmf, tree = generators.local_not_global_pmf()
        return ModelTarget(name=BUILTIN_PREFIX + spec, tree=tree, pmf=pmf)
    if name == "chain3":
        return ModelTarget.of_model(BUILTIN_PREFIX + spec, generators.chain3())
    if name == "product":
        return ModelTarget.of_model(BUILTIN_PREFIX + spec, generators.product_model(_option(options, "m", int, 3)))
    raise ModelParseError(f"Unknown builtin model {name!r}")


def load_target(ref: Union[str, Path]) -> ModelTarget:
    """Load a model file or resolve a ``builtin:`` reference."""
    ref = str(ref)
    if ref.startswith(BUILTIN_PREFIX):
        return builtin_target(ref[len(BUILTIN_PREFIX):])
    return ModelTarget.of_model(ref, load_model(ref))

