"""Competition skill catalog: codes, names, tariffs, structural attributes.

Codes are opaque catalog keys; several are idiomatic (CDI, LBK, RUI), so no
grammar is applied. Positions, shape and rotation counts are stored
explicitly per record. Tariffs are kept as integer tenths internally.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

from .errors import UnknownCodeError


class Position(enum.Enum):
    FEET = "feet"
    SEAT = "seat"
    FRONT = "front"
    BACK = "back"


class Shape(enum.Enum):
    TUCK = "tuck"
    PIKE = "pike"
    STRADDLE = "straddle"
    STRAIGHT = "straight"


@dataclass(frozen=True)
class SkillRecord:
    code: str
    name: str
    tariff_tenths: int
    takeoff: Position
    landing: Position
    shape: Shape | None
    somersault_quarters: int
    twist_halves: int

    @property
    def tariff(self) -> float:
        return self.tariff_tenths / 10.0

    def __post_init__(self):
        if self.tariff_tenths < 0:
            raise ValueError("tariff must be non-negative")
        if self.somersault_quarters < 0 or self.twist_halves < 0:
            raise ValueError("rotation counts must be non-negative")


_F, _S, _R, _B = Position.FEET, Position.SEAT, Position.FRONT, Position.BACK
_T, _P, _ST, _SS = Shape.TUCK, Shape.PIKE, Shape.STRADDLE, Shape.STRAIGHT

# code, name, tariff tenths, takeoff, landing, shape, somersault quarters, twist halves
_ROWS = [
    ("F0F", "Straight Bounce", 0, _F, _F, _SS, 0, 0),
    ("FTF", "Tuck Jump", 0, _F, _F, _T, 0, 0),
    ("FPF", "Pike Jump", 0, _F, _F, _P, 0, 0),
    ("FSF", "Straddle Jump", 0, _F, _F, _ST, 0, 0),
    ("F1F", "Half Twist Jump", 1, _F, _F, _SS, 0, 1),
    ("F2F", "Full Twist Jump", 2, _F, _F, _SS, 0, 2),
    ("F0S", "Seat Drop", 0, _F, _S, None, 0, 0),
    ("F1S", "Half Twist to Seat Drop", 1, _F, _S, None, 0, 1),
    ("S1S", "Seat Half Twist To Seat", 1, _S, _S, None, 0, 1),
    ("S0F", "To Feet from Seat", 0, _S, _F, None, 0, 0),
    ("S1F", "Half Twist to Feet from Seat", 1, _S, _F, None, 0, 1),
    ("F0R", "Front Drop", 1, _F, _R, None, 1, 0),
    ("R0F", "To Feet from Front", 1, _R, _F, None, 1, 0),
    ("F0B", "Back Drop", 1, _F, _B, None, 1, 0),
    ("B0F", "To Feet from Back", 1, _B, _F, None, 1, 0),
    ("B1F", "Half Twist to Feet from Back", 2, _B, _F, None, 1, 1),
    ("FSSt", "Front Somersault (Tuck)", 5, _F, _F, _T, 4, 0),
    ("FSSp", "Front Somersault (Pike)", 6, _F, _F, _P, 4, 0),
    ("BRIt", "Barani (Tuck)", 6, _F, _F, _T, 4, 1),
    ("BRIp", "Barani (Pike)", 6, _F, _F, _P, 4, 1),
    ("BRIs", "Barani (Straight)", 6, _F, _F, _SS, 4, 1),
    ("CDI", "Crash Dive", 3, _F, _B, None, 3, 0),
    ("BSSt", "Back Somersault (Tuck)", 5, _F, _F, _T, 4, 0),
    ("BSSp", "Back Somersault (Pike)", 6, _F, _F, _P, 4, 0),
    ("BSSs", "Back Somersault (Straight)", 6, _F, _F, _SS, 4, 0),
    ("BSTt", "Back Somersault to Seat (Tuck)", 5, _F, _S, _T, 4, 0),
    ("LBK", "Lazy Back", 3, _F, _R, None, 3, 0),
    ("CDYt", "Cody (Tuck)", 6, _R, _F, _T, 5, 0),
    ("BHA", "Back Half", 6, _F, _F, _SS, 4, 1),
    ("BBOt", "Barani Ball Out (Tuck)", 7, _B, _F, _T, 5, 1),
    ("RUI", "Rudolph / Rudi", 8, _F, _F, _SS, 4, 3),
    ("FFR", "Full Front", 7, _F, _F, _SS, 4, 2),
    ("FUB", "Full Back", 7, _F, _F, _SS, 4, 2),
]

_CATALOG = [SkillRecord(*row) for row in _ROWS]
_BY_CODE = {rec.code: rec for rec in _CATALOG}
assert len(_BY_CODE) == len(_CATALOG), "duplicate skill codes in catalog"


def load_catalog() -> list[SkillRecord]:
    """All catalog entries, in catalog order."""
    return list(_CATALOG)


def get_record(code: str) -> SkillRecord:
    try:
        return _BY_CODE[code]
    except KeyError:
        raise UnknownCodeError(code) from None


def parse_code(token: str) -> str:
    """Validate a code token (whitespace-trimmed, case-sensitive)."""
    code = token.strip()
    if code not in _BY_CODE:
        raise UnknownCodeError(token)
    return code


def lookup_tariff(code: str) -> float:
    return get_record(code).tariff


def catalog_as_json() -> str:
    """Catalog as a JSON array for the UI and docs."""
    rows = [
        {
            "code": r.code,
            "name": r.name,
            "tariff": r.tariff,
            "takeoff": r.takeoff.value,
            "landing": r.landing.value,
            "shape": r.shape.value if r.shape else None,
            "somersault_quarters": r.somersault_quarters,
            "twist_halves": r.twist_halves,
        }
        for r in _CATALOG
    ]
    return json.dumps(rows, indent=2)
