"""Scenario files: JSON descriptions of systems, device pipelines and a frame.

Complex numbers are ``[re, im]`` pairs (a bare real is also accepted) and
matrices are row-major lists of rows.  Validation errors carry the line of
the offending JSON object or array.

Example::

    {
      "tol": 1e-10,
      "systems": [
        {"label": "A", "sector": "+", "state": [[0.6, 0], [0.8, 0]],
         "observable": [1, -1]}
      ],
      "pipeline": [{"family": "Pi", "system": "A", "branch": 0}],
      "frame": {"kind": "random", "seed": 7}
    }
"""

from __future__ import annotations

import json
import json.decoder
import json.scanner
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import TOL, CartanError, Sector
from .frames import FrameTransform
from .group import (
    DynFrameMap,
    SL2CElement,
    SU2Element,
    TranslationMatrix,
    dyn_matrix,
    dyn_restriction,
    poincare_matrix,
    random_dyn_frame,
)
from .measurement import (
    MeasurementDevice,
    NotNormalizedError,
    Observable,
    State,
    ZeroBranchError,
    big_pi,
    exchange_device,
    m_device,
    make_state,
    pi_device,
)


class ScenarioError(CartanError, ValueError):
    """Malformed or invalid scenario; the message starts with ``line N:``."""

    def __init__(self, line: Optional[int], message: str):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class _LocDict(dict):
    line: Optional[int] = None


class _LocList(list):
    line: Optional[int] = None


def _line_of(text: str, pos: int) -> int:
    return text.count("\n", 0, pos) + 1


def _make_decoder() -> json.JSONDecoder:
    decoder = json.JSONDecoder()

    def parse_object(s_and_end, *args):
        s, end = s_and_end
        obj, stop = json.decoder.JSONObject(s_and_end, *args)
        out = _LocDict(obj)
        out.line = _line_of(s, end - 1)
        return out, stop

    def parse_array(s_and_end, scan_once):
        s, end = s_and_end
        arr, stop = json.decoder.JSONArray(s_and_end, scan_once)
        out = _LocList(arr)
        out.line = _line_of(s, end - 1)
        return out, stop

    decoder.parse_object = parse_object
    decoder.parse_array = parse_array
    # the C scanner ignores the hooks above
    decoder.scan_once = json.scanner.py_make_scanner(decoder)
    return decoder


def load_json(text: str):
    """Parse JSON keeping line numbers on every object and array."""
    try:
        return _make_decoder().decode(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(exc.lineno, f"invalid JSON: {exc.msg}") from None


def _line(node) -> Optional[int]:
    return getattr(node, "line", None)


def parse_complex(value, where) -> complex:
    if isinstance(value, bool):
        raise ScenarioError(_line(where), f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    raise ScenarioError(_line(where), f"expected [re, im], got {value!r}")


def parse_vector(value, n: int, where) -> np.ndarray:
    if not isinstance(value, list) or len(value) != n:
        raise ScenarioError(_line(value) or _line(where), f"expected {n} complex entries")
    return np.array([parse_complex(v, value) for v in value], dtype=complex)


def parse_matrix(value, n: int, where) -> np.ndarray:
    if not isinstance(value, list) or len(value) != n:
        raise ScenarioError(_line(value) or _line(where), f"expected a {n}x{n} matrix")
    return np.array([parse_vector(row, n, value) for row in value])


def _require(node, key: str):
    if not isinstance(node, dict):
        raise ScenarioError(_line(node), "expected an object")
    if key not in node:
        raise ScenarioError(_line(node), f"missing key {key!r}")
    return node[key]


def _int(node, key: str, choices=None) -> int:
    v = _require(node, key)
    if not isinstance(v, int) or isinstance(v, bool) or (choices is not None and v not in choices):
        allowed = f" in {sorted(choices)}" if choices is not None else ""
        raise ScenarioError(_line(node), f"{key!r} must be an integer{allowed}")
    return v


@dataclass
class System:
    state: State
    observable: Optional[Observable] = None

    @property
    def label(self) -> str:
        return self.state.label


@dataclass
class Scenario:
    systems: dict
    pipelines: dict = field(default_factory=dict)
    frame: Optional[FrameTransform] = None
    frame_spec: Optional[dict] = None
    seed: int = 0
    tol: float = TOL
    raw: Optional[dict] = None


def _parse_system(node, tol: float) -> System:
    label = _require(node, "label")
    if not isinstance(label, str) or not label:
        raise ScenarioError(_line(node), "system label must be a non-empty string")
    try:
        sector = Sector.parse(_require(node, "sector"))
    except ValueError as exc:
        raise ScenarioError(_line(node), str(exc)) from None
    comps = parse_vector(_require(node, "state"), 2, node)
    try:
        state = make_state(comps, sector, label, tol)
    except NotNormalizedError as exc:
        raise ScenarioError(_line(node), str(exc)) from None
    obs = None
    if node.get("observable") is not None:
        spec = node["observable"]
        if not isinstance(spec, list) or len(spec) != 2:
            raise ScenarioError(_line(spec) or _line(node), "observable must be two real eigenvalues")
        try:
            obs = Observable(sector, tuple(float(v) for v in spec))
        except (TypeError, ValueError) as exc:
            raise ScenarioError(_line(spec), str(exc)) from None
    return System(state, obs)


def _parse_device(node, systems: dict, tol: float) -> MeasurementDevice:
    family = _require(node, "family")

    def system(key):
        name = _require(node, key)
        if name not in systems:
            raise ScenarioError(_line(node), f"unknown system {name!r}")
        return systems[name].state

    try:
        if family == "pi":
            if "system" in node:
                sector = system("system").sector
            else:
                sector = Sector.parse(_require(node, "sector"))
            return pi_device(sector, _int(node, "branch", {0, 1}))
        if family == "exchange":
            src, dst = _int(node, "from", {0, 1}), _int(node, "to", {0, 1})
            return exchange_device(system("system"), src, dst, tol)
        if family == "Pi":
            return big_pi(system("system"), _int(node, "branch", {0, 1}))
        if family == "M":
            return m_device(system("in"), system("out"), _int(node, "branch", {0, 1}))
    except (ZeroBranchError, ValueError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(_line(node), str(exc)) from None
    raise ScenarioError(_line(node), f"unknown device family {family!r} (pi, exchange, Pi, M)")


def parse_frame(node) -> FrameTransform:
    """Build a frame from ``identity``, ``random``, ``dyn`` or ``poincare`` descriptors."""
    kind = _require(node, "kind")
    label = node.get("label", kind)
    try:
        if kind == "identity":
            return FrameTransform(DynFrameMap.identity(), label)
        if kind == "random":
            return FrameTransform(random_dyn_frame(_int(node, "seed")), label)
        if kind == "dyn":
            beta = SU2Element(parse_matrix(_require(node, "beta"), 2, node))
            w = TranslationMatrix(parse_matrix(_require(node, "w"), 2, node))
            return FrameTransform(dyn_restriction(dyn_matrix(beta, w)), label)
        if kind == "poincare":
            a = SL2CElement(parse_matrix(_require(node, "a"), 2, node))
            w = TranslationMatrix(parse_matrix(_require(node, "w"), 2, node))
            return FrameTransform(dyn_restriction(poincare_matrix(a, w)), label)
    except ScenarioError:
        raise
    except (CartanError, ValueError) as exc:
        raise ScenarioError(_line(node), f"invalid {kind} frame: {exc}") from None
    raise ScenarioError(_line(node), f"unknown frame kind {kind!r}")


def parse_scenario(text: str, tol: Optional[float] = None) -> Scenario:
    """Parse and validate a scenario document.

    ``tol`` overrides the document's own ``tol`` entry.
    """
    doc = load_json(text)
    if not isinstance(doc, dict):
        raise ScenarioError(_line(doc) or 1, "scenario must be a JSON object")
    if tol is None:
        tol = doc.get("tol", TOL)
        if not isinstance(tol, (int, float)) or isinstance(tol, bool) or tol <= 0:
            raise ScenarioError(_line(doc), "tol must be a positive number")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ScenarioError(_line(doc), "seed must be an integer")

    nodes = _require(doc, "systems")
    if not isinstance(nodes, list) or not nodes:
        raise ScenarioError(_line(nodes) or _line(doc), "systems must be a non-empty list")
    systems = {}
    for node in nodes:
        s = _parse_system(node, float(tol))
        if s.label in systems:
            raise ScenarioError(_line(node), f"duplicate system label {s.label!r}")
        systems[s.label] = s

    pipelines = {}
    if "pipeline" in doc:
        pipelines["pipeline"] = doc["pipeline"]
    if "pipelines" in doc:
        named = doc["pipelines"]
        if not isinstance(named, dict):
            raise ScenarioError(_line(doc), "pipelines must map names to device lists")
        pipelines.update(named)
    built = {}
    for name, devices in pipelines.items():
        if not isinstance(devices, list) or not devices:
            raise ScenarioError(_line(devices) or _line(doc), f"pipeline {name!r} must be a non-empty list")
        built[name] = [_parse_device(d, systems, float(tol)) for d in devices]
        sectors = {d.sector for d in built[name]}
        if len(sectors) > 1:
            raise ScenarioError(_line(devices), f"pipeline {name!r} mixes sectors")

    frame = None
    if doc.get("frame") is not None:
        frame = parse_frame(doc["frame"])
    return Scenario(systems, built, frame, doc.get("frame"), seed, float(tol), doc)
