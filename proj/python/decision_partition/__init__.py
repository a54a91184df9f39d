"""Decision problem formulation and partitioning."""

import json

from . import _core
from ._core import DecisionError

__all__ = ["DecisionError", "nearest_preorder", "rank", "cover", "alice", "validate", "replay"]


def _text(value):
    return value if isinstance(value, str) else json.dumps(value)


def nearest_preorder(relation, exact=True):
    """Nearest total preorder of a relation given as a dict or JSON text."""
    return json.loads(_core.nearest_preorder(_text(relation), exact))


def rank(relation, class_count=None):
    return json.loads(_core.rank(_text(relation), class_count))


def cover(matrix, algorithm="exact"):
    """Solve a covering instance given as 0/1 matrix text."""
    return json.loads(_core.cover(matrix, algorithm))


def alice(with_sw=False):
    return json.loads(_core.alice(with_sw))


def validate(model):
    return json.loads(_core.validate(_text(model)))


def replay(model, transcript):
    """Replay a transcript through the elicitation loop; returns the session."""
    return json.loads(_core.replay(_text(model), _text(transcript)))
