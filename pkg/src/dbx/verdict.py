"""Three-valued verdicts: yes, no, or unknown up to a finite inspection depth."""
from __future__ import annotations

import enum
from dataclasses import dataclass


class Tri(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    value: Tri
    depth: int | None = None
    witness: str | None = None

    @classmethod
    def yes(cls, witness: str | None = None) -> "Verdict":
        return cls(Tri.YES, None, witness)

    @classmethod
    def no(cls, witness: str | None = None) -> "Verdict":
        return cls(Tri.NO, None, witness)

    @classmethod
    def unknown(cls, depth: int | None, witness: str | None = None) -> "Verdict":
        return cls(Tri.UNKNOWN, depth, witness)

    @classmethod
    def of(cls, flag: bool, witness: str | None = None) -> "Verdict":
        return cls.yes(witness) if flag else cls.no(witness)

    @property
    def is_yes(self) -> bool:
        return self.value is Tri.YES

    @property
    def is_no(self) -> bool:
        return self.value is Tri.NO

    @property
    def is_unknown(self) -> bool:
        return self.value is Tri.UNKNOWN

    def __bool__(self):
        raise TypeError("a Verdict is three-valued; test .is_yes / .is_no explicitly")

    def __str__(self) -> str:
        if self.value is Tri.UNKNOWN:
            return f"unknown({self.depth})"
        return self.value.value

    def to_json(self) -> dict:
        out = {"verdict": self.value.value}
        if self.depth is not None:
            out["depth"] = self.depth
        if self.witness is not None:
            out["witness"] = self.witness
        return out
