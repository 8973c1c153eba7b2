"""Unit-suffixed quantities at the command-line boundary.

``9.5ps``, ``1.5um``, ``200pm/V``, ``2THz``. Bare numbers are SI. Cyclic
frequencies (anything in Hz) are converted to rad/s; ``rad/s`` and ``1/s``
are taken as angular already.
"""

from __future__ import annotations

import math
import re
from enum import StrEnum
from functools import lru_cache

import pint

from chi2cavity.errors import DomainError

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


class Kind(StrEnum):
    TIME = "time"
    LENGTH = "length"
    ANGULAR = "angular"
    CHI2 = "chi2"


_TARGET = {
    Kind.TIME: "s",
    Kind.LENGTH: "m",
    Kind.ANGULAR: "1/s",
    Kind.CHI2: "m/V",
}


@lru_cache(maxsize=1)
def registry() -> pint.UnitRegistry:
    return pint.UnitRegistry()


def parse_quantity(value: str | float | int, kind: Kind | str) -> float:
    """SI magnitude of ``value`` for the given kind of quantity."""
    kind = Kind(kind)
    if isinstance(value, bool):
        raise DomainError(f"expected a {kind.value} quantity, got {value!r}")
    if isinstance(value, int | float):
        return float(value)
    match = _NUMBER.match(value)
    if match is None:
        raise DomainError(f"cannot parse {kind.value} quantity {value!r}")
    number, unit = float(match.group(1)), match.group(2).replace("μ", "u").replace("µ", "u")
    if not unit:
        return number
    ureg = registry()
    try:
        quantity = ureg.Quantity(number, unit)
        magnitude = float(quantity.to(_TARGET[kind]).magnitude)
    except pint.errors.PintError as exc:
        raise DomainError(f"{value!r} is not a {kind.value} quantity: {exc}") from exc
    if kind is Kind.ANGULAR and "Hz" in unit:
        magnitude *= 2.0 * math.pi
    return magnitude
