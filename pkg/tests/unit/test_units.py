"""Unit tests — unit-suffixed quantity parsing"""

import math

import pytest

from chi2cavity.errors import DomainError
from chi2cavity.units import Kind, parse_quantity


@pytest.mark.parametrize(
    ("text", "kind", "expected"),
    [
        ("9.5ps", Kind.TIME, 9.5e-12),
        ("1.5um", Kind.LENGTH, 1.5e-6),
        ("1.5μm", Kind.LENGTH, 1.5e-6),
        ("200pm/V", Kind.CHI2, 2e-10),
        ("2THz", Kind.ANGULAR, 4 * math.pi * 1e12),
        ("-2THz", Kind.ANGULAR, -4 * math.pi * 1e12),
        ("1e11 rad/s", Kind.ANGULAR, 1e11),
        ("3.5e-12", Kind.TIME, 3.5e-12),
    ],
)
def test_parse(text, kind, expected):
    assert parse_quantity(text, kind) == pytest.approx(expected, rel=1e-12)


def test_numbers_pass_through():
    assert parse_quantity(2.5, "time") == 2.5


@pytest.mark.parametrize(
    ("text", "kind"),
    [
        ("9.5ps", Kind.LENGTH),
        ("ps", Kind.TIME),
        ("4 parsecz", Kind.LENGTH),
    ],
)
def test_rejects(text, kind):
    with pytest.raises(DomainError):
        parse_quantity(text, kind)


def test_rejects_bool():
    with pytest.raises(DomainError):
        parse_quantity(True, Kind.TIME)
