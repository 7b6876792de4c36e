"""Run configuration: flat ``key = value`` files with strict keys.

Numbers may be written as small arithmetic expressions over ``pi``
(``pi/2``, ``2*pi``, ``1e-3``); nothing else is evaluated.  Booleans accept
true/false, yes/no, on/off and 1/0; lists are comma separated.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field

from .errors import ConfigError, MissingRequired, TypeMismatch, UnknownKey
from .sequence import InterferometerSequence
from .units import DIMENSIONLESS, PhaseSpacePoint, PowerLawPerturbation, TrapSpec

_BINARY = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi}


def _eval_number(node):
    if isinstance(node, ast.Constant) and type(node.value) in (int, float):
        return node.value
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _BINARY:
        return _BINARY[type(node.op)](_eval_number(node.left), _eval_number(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _UNARY[type(node.op)](_eval_number(node.operand))
    raise ValueError("not a numeric expression")


def parse_number(text: str) -> float:
    """Evaluate ``text`` as a real number; raises ValueError otherwise."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
        value = float(_eval_number(tree.body))
    except (SyntaxError, ValueError, TypeError, ZeroDivisionError, OverflowError) as exc:
        raise ValueError(f"cannot read {text!r} as a number") from exc
    if not math.isfinite(value):
        raise ValueError(f"{text!r} is not finite")
    return value


def _int(text):
    value = parse_number(text)
    if value != int(value):
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


def _bool(text):
    word = text.strip().lower()
    if word in ("true", "yes", "on", "1"):
        return True
    if word in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"{text!r} is not a boolean")


def _list(text):
    items = [item.strip() for item in text.split(",")]
    if not all(items):
        raise ValueError(f"{text!r} has an empty list entry")
    return tuple(items)


def _str(text):
    if not text.strip():
        raise ValueError("empty value")
    return text.strip()


# key -> (reader, default); None default with key in REQUIRED means mandatory
_SCHEMA = {
    "dimensionless": (_bool, True),
    "mass": (parse_number, 1.0),
    "omega": (parse_number, 1.0),
    "hbar": (parse_number, 1.0),
    "lambda": (_int, None),
    "beta": (parse_number, None),
    "t": (parse_number, None),
    "amplitude": (parse_number, 0.0),
    "x_i": (parse_number, 0.0),
    "v_i": (parse_number, 0.0),
    "kappa_ai": (parse_number, None),
    "kappa_bi": (parse_number, None),
    "kappa_af": (parse_number, None),
    "kappa_bf": (parse_number, None),
    "xi": (parse_number, 0.0),
    "methods": (_list, None),
    "steps": (_int, 200),
    "grid_dx": (parse_number, None),
    "grid_dt": (parse_number, None),
    "grid_padding": (parse_number, None),
    "stencil_order": (_int, None),
    "classical_dt": (parse_number, None),
    "quad_order": (_int, 16),
    "fock_dim": (_int, None),
    "out": (_str, None),
    "threads": (_int, None),
}
REQUIRED = ("lambda", "beta", "t")
TRAP_KEYS = ("mass", "omega", "hbar")


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters; ``values`` holds every key with defaults filled."""

    values: dict = field(default_factory=dict)
    lines: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def replace(self, **changes) -> "RunConfig":
        values = dict(self.values)
        for key, value in changes.items():
            if key not in _SCHEMA:
                raise UnknownKey(f"unknown key {key!r}")
            values[key] = value
        return _validated(values, self.lines)

    @property
    def trap(self) -> TrapSpec:
        if self.values["dimensionless"]:
            return DIMENSIONLESS
        return TrapSpec(self.values["mass"], self.values["omega"], self.values["hbar"])

    @property
    def perturbation(self) -> PowerLawPerturbation:
        return PowerLawPerturbation(self.values["lambda"], self.values["beta"])

    @property
    def initial(self) -> PhaseSpacePoint:
        return PhaseSpacePoint(self.values["x_i"], self.values["v_i"])

    def kicks(self):
        """(kappa_ai, kappa_bi, kappa_af, kappa_bf) with the amplitude filling gaps."""
        trap = self.trap
        kappa = trap.mass * trap.omega * self.values["amplitude"] / trap.hbar
        defaults = {"kappa_ai": kappa, "kappa_bi": -kappa, "kappa_af": kappa, "kappa_bf": -kappa}
        return tuple(self.values[k] if self.values[k] is not None else defaults[k] for k in defaults)

    def sequence(self) -> InterferometerSequence:
        ka, kb, kaf, kbf = self.kicks()
        return InterferometerSequence(self.initial, ka, kb, self.values["t"], kaf, kbf,
                                      self.values["xi"])

    def trajectory_start(self) -> PhaseSpacePoint:
        """Arm a just after the splitting kick."""
        trap = self.trap
        ka = self.kicks()[0]
        return PhaseSpacePoint(self.values["x_i"], self.values["v_i"] + trap.hbar * ka / trap.mass)


def _validated(values: dict, lines: dict) -> RunConfig:
    def fail(cls, key, message):
        raise cls(message, lines.get(key))

    for key in REQUIRED:
        if values.get(key) is None:
            raise MissingRequired(f"required key {key!r} is missing")
    if values["dimensionless"]:
        for key in TRAP_KEYS:
            if key in lines and values[key] != 1.0:
                fail(ConfigError, key, f"{key} cannot be set in dimensionless mode")
    for key in TRAP_KEYS:
        if not values[key] > 0:
            fail(ConfigError, key, f"{key} must be positive")
    if values["lambda"] < 3:
        fail(ConfigError, "lambda", "lambda must be an integer >= 3")
    if not values["t"] > 0:
        fail(ConfigError, "t", "t must be positive")
    for key in ("steps", "quad_order"):
        if values[key] < 1:
            fail(ConfigError, key, f"{key} must be at least 1")
    for key in ("threads", "fock_dim", "stencil_order"):
        if values[key] is not None and values[key] < 1:
            fail(ConfigError, key, f"{key} must be at least 1")
    for key in ("grid_dx", "grid_dt", "classical_dt"):
        if values[key] is not None and not values[key] > 0:
            fail(ConfigError, key, f"{key} must be positive")
    if values["grid_padding"] is not None and values["grid_padding"] < 0:
        fail(ConfigError, "grid_padding", "grid_padding must be non-negative")
    return RunConfig(values, dict(lines))


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration; errors name the offending line."""
    values = {key: default for key, (_, default) in _SCHEMA.items()}
    lines = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", number)
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in _SCHEMA:
            raise UnknownKey(f"unknown key {key!r}", number)
        if key in lines:
            raise ConfigError(f"key {key!r} repeats line {lines[key]}", number)
        reader = _SCHEMA[key][0]
        try:
            values[key] = reader(value)
        except ValueError as exc:
            raise TypeMismatch(f"{key}: {exc}", number) from None
        lines[key] = number
    return _validated(values, lines)


def read_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
