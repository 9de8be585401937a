"""Walk protocol parameters.

Three protocols are supported, each a frozen dataclass holding its angles in
radians:

- :class:`HQW` -- Hadamard walk, one y-rotation by ``theta`` per step.
- :class:`NCRQW` -- two non-commuting rotations (``theta`` about axis 2 and
  ``phi`` about axis 1) per step.
- :class:`SSQW` -- split-step walk, two rotations and two shifts per step.

Angles outside [-pi, pi] are wrapped on construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Union


def wrap_angle(angle: float) -> float:
    """Map ``angle`` into [-pi, pi]; values already inside are untouched."""
    angle = float(angle)
    if -math.pi <= angle <= math.pi:
        return angle
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


class _Angles:
    def __post_init__(self) -> None:
        for f in fields(self):
            object.__setattr__(self, f.name, wrap_angle(getattr(self, f.name)))

    @property
    def angles(self) -> tuple[float, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    @property
    def angle_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in fields(self))

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.angle_names, self.angles))


@dataclass(frozen=True)
class HQW(_Angles):
    theta: float

    name = "hqw"
    shifts_per_step = 1


@dataclass(frozen=True)
class NCRQW(_Angles):
    theta: float
    phi: float

    name = "ncrqw"
    shifts_per_step = 1


@dataclass(frozen=True)
class SSQW(_Angles):
    theta1: float
    theta2: float

    name = "ssqw"
    shifts_per_step = 2


ProtocolParams = Union[HQW, NCRQW, SSQW]

PROTOCOLS: dict[str, type] = {"hqw": HQW, "ncrqw": NCRQW, "ssqw": SSQW}


def make_params(protocol: str, *angles: float) -> ProtocolParams:
    """Build parameters from a protocol name and its angles in field order."""
    try:
        cls = PROTOCOLS[protocol.lower()]
    except KeyError:
        raise ValueError(f"unknown protocol {protocol!r}; expected one of {sorted(PROTOCOLS)}") from None
    return cls(*angles)
