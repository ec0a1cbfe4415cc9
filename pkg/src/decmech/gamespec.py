"""JSON game-specification files.

Schema (all keys required unless noted):

.. code-block:: json

    {
      "states":    ["honeypot", "normal"],
      "types":     ["selfish", "adversarial"],
      "actions":   ["DO", "AC"],
      "utility_D": [[[0.0, -0.3], [0.0, 1.0]], [[0.0, 1.0], [0.0, -0.9]]],
      "utility_U": [[[0.0, -0.3], [0.0, -1.0]], [[0.0, 1.0], [0.0, 0.9]]],
      "beliefs":   {"b": [0.2, 0.8],
                    "b_U": [[0.2, 0.8], [0.2, 0.8]],
                    "b_D": [[0.32, 0.68], [0.32, 0.68]]},
      "modulator": {"gamma": 0.0, "c": [0.0, 0.0]},
      "insider":   {"q_g": 0.32}
    }

Utility tables are nested ``[state][type][action]``.  The first action must
be named ``"DO"`` (the drop-out action).  The optional ``insider`` block
carries case-study parameters and is preserved verbatim on round-trip.
"""

from __future__ import annotations

import json
from typing import Optional, Tuple

import numpy as np

from .errors import IoError, ParseError, ValidationError
from .model import BasicGame, BeliefProfile, Modulator

TOP_LEVEL_KEYS = {
    "states",
    "types",
    "actions",
    "utility_D",
    "utility_U",
    "beliefs",
    "modulator",
    "insider",
}
BELIEF_KEYS = {"b", "b_U", "b_D"}
MODULATOR_KEYS = {"gamma", "c"}


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise ParseError(f"missing key {key!r} in {where}")
    return doc[key]


def _reject_unknown(doc: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ParseError(f"unknown key(s) {unknown} in {where}")


def _names(value, where: str) -> Tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ParseError(f"{where} must be a list of strings")
    return tuple(value)


def _array(value, where: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where} must be a rectangular numeric array") from exc
    return arr


def parse_game_spec(path) -> Tuple[BasicGame, BeliefProfile, Modulator]:
    """Read and fully validate a JSON game specification.

    Unknown keys are rejected; semantic violations raise
    :class:`ValidationError` naming the broken invariant.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return load_game_spec(doc)


def load_game_spec(doc: dict) -> Tuple[BasicGame, BeliefProfile, Modulator]:
    """Build validated model objects from an already-decoded document."""
    if not isinstance(doc, dict):
        raise ParseError("top-level document must be a JSON object")
    _reject_unknown(doc, TOP_LEVEL_KEYS, "the top-level object")
    states = _names(_require(doc, "states", "the top-level object"), "states")
    types = _names(_require(doc, "types", "the top-level object"), "types")
    actions = _names(_require(doc, "actions", "the top-level object"), "actions")
    if not actions or actions[0] != "DO":
        raise ValidationError(
            'the first action must be named "DO" (the drop-out action)'
        )
    game = BasicGame(
        states=states,
        types=types,
        actions=actions,
        utility_D=_array(_require(doc, "utility_D", "the top-level object"), "utility_D"),
        utility_U=_array(_require(doc, "utility_U", "the top-level object"), "utility_U"),
    )
    bel = _require(doc, "beliefs", "the top-level object")
    if not isinstance(bel, dict):
        raise ParseError("beliefs must be an object")
    _reject_unknown(bel, BELIEF_KEYS, "beliefs")
    beliefs = BeliefProfile(
        b=_array(_require(bel, "b", "beliefs"), "beliefs.b"),
        b_U=_array(_require(bel, "b_U", "beliefs"), "beliefs.b_U"),
        b_D=_array(_require(bel, "b_D", "beliefs"), "beliefs.b_D"),
    )
    if beliefs.b_U.shape[0] != game.n_types:
        raise ValidationError("beliefs.b_U needs one row per type")
    if beliefs.b_D.shape != (game.n_states, game.n_types):
        raise ValidationError("beliefs.b_D needs one row per state, one column per type")
    m = _require(doc, "modulator", "the top-level object")
    if not isinstance(m, dict):
        raise ParseError("modulator must be an object")
    _reject_unknown(m, MODULATOR_KEYS, "modulator")
    c = _array(_require(m, "c", "modulator"), "modulator.c")
    if c.shape != (game.n_actions,):
        raise ValidationError("modulator.c needs one entry per action")
    mod = Modulator(c=c, gamma=float(_require(m, "gamma", "modulator")))
    return game, beliefs, mod


def serialize_game_spec(
    game: BasicGame,
    beliefs: BeliefProfile,
    mod: Modulator,
    insider: Optional[dict] = None,
) -> dict:
    """Inverse of :func:`load_game_spec`; round-trips exactly."""
    doc = {
        "states": list(game.states),
        "types": list(game.types),
        "actions": list(game.actions),
        "utility_D": game.utility_D.tolist(),
        "utility_U": game.utility_U.tolist(),
        "beliefs": {
            "b": beliefs.b.tolist(),
            "b_U": beliefs.b_U.tolist(),
            "b_D": beliefs.b_D.tolist(),
        },
        "modulator": {"gamma": mod.gamma, "c": mod.c.tolist()},
    }
    if insider is not None:
        doc["insider"] = insider
    return doc


def write_game_spec(path, game, beliefs, mod, insider: Optional[dict] = None) -> None:
    doc = serialize_game_spec(game, beliefs, mod, insider=insider)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
