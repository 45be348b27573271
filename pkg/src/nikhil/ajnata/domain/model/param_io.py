"""
Flat record files for model parameters

One JSON line per tensor: {"name", "shape", "values"} with values flattened
in C order; a final {"name": "nonlinearity", "value"} line records the
encoder's fixed nonlinearity.
"""

from pathlib import Path

import numpy as np

from nikhil.ajnata.domain.exceptions import StreamFormatError
from nikhil.ajnata.domain.model.params import TENSOR_NAMES, ModelParams
from nikhil.ajnata.utils.json_utils import JsonUtils


def save_params(params: ModelParams, file_path: Path) -> Path:
    records = [
        {"name": name, "shape": list(array.shape), "values": array.ravel().tolist()}
        for name, array in params.tensors().items()
    ]
    records.append({"name": "nonlinearity", "value": params.nonlinearity})
    return JsonUtils.save_jsonl(records, Path(file_path))


def load_params(file_path: Path) -> ModelParams:
    file_path = Path(file_path)
    tensors = {}
    nonlinearity = "tanh"
    for line_number, record in JsonUtils.iter_jsonl(file_path):
        name = record.get("name")
        if name == "nonlinearity":
            nonlinearity = record.get("value", "tanh")
            continue
        if name not in TENSOR_NAMES:
            raise StreamFormatError(f"unknown parameter {name!r}", str(file_path), line_number)
        try:
            values = np.asarray(record["values"], dtype=float)
            tensors[name] = values.reshape(tuple(record["shape"]))
        except (KeyError, TypeError, ValueError) as e:
            raise StreamFormatError(f"bad tensor record for {name}: {e}", str(file_path), line_number)

    missing = [name for name in TENSOR_NAMES if name not in tensors]
    if missing:
        raise StreamFormatError(f"missing parameter(s) {', '.join(missing)}", str(file_path))
    theta_u = float(tensors.pop("theta_u"))
    try:
        return ModelParams(theta_u=theta_u, nonlinearity=nonlinearity, **tensors)
    except ValueError as e:
        raise StreamFormatError(str(e), str(file_path))
