"""Strong coupling of single photons in χ⁽²⁾ nonlinear microcavities."""

__version__ = "0.1.0"
