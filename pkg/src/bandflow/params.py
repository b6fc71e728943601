"""Model parameters shared by the quantum, semi-quantum, and classical layers."""

from __future__ import annotations

import warnings
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysParams:
    """Control parameter A, couplings (delta, d, gamma), and quantum numbers L, S.

    ``delta`` and ``d`` are real, ``gamma`` complex.  L is a non-negative
    integer and S a non-negative integer or half-integer; 2S+1 is the number
    of bands.  S > L is allowed but unusual, so it only warns.
    """

    A: float
    delta: float
    d: float
    gamma: complex
    L: int
    S: float

    def __post_init__(self):
        for name in ("A", "delta", "d"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or value != value:
                raise ValueError(f"{name} must be a finite real number, got {value!r}")
        if not isinstance(self.L, int) or self.L < 0:
            raise ValueError(f"L must be a non-negative integer, got {self.L!r}")
        two_s = 2.0 * float(self.S)
        if self.S < 0 or abs(two_s - round(two_s)) > 1e-12:
            raise ValueError(
                f"S must be a non-negative integer or half-integer, got {self.S!r}"
            )
        object.__setattr__(self, "gamma", complex(self.gamma))
        object.__setattr__(self, "S", float(self.S))
        if self.S > self.L:
            warnings.warn(
                f"S={self.S} exceeds L={self.L}; the model is intended for S <= L",
                stacklevel=2,
            )

    @property
    def n_bands(self) -> int:
        return round(2 * self.S) + 1

    @property
    def n_levels(self) -> int:
        return self.n_bands * (2 * self.L + 1)
