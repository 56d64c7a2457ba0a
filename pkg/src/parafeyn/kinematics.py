"""Kinematic symbols and numeric kinematic configurations.

External momenta never appear directly: the only kinematic unknowns are the
invariants s_I = (sum_{i in I} p_i)^2 and the squared masses per colour.
Under momentum conservation I and its complement name the same invariant; the
canonical representative is the subset that avoids the highest leg label.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .errors import KinematicsError

_KIND_ORDER = {"1": 0, "s": 1, "msq": 2}


@dataclass(frozen=True)
class KinSymbol:
    kind: str
    key: tuple[int, ...] = ()

    def sort_key(self):
        return (_KIND_ORDER[self.kind], len(self.key), self.key)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        if self.kind == "1":
            return "1"
        if self.kind == "s":
            return "s[" + ",".join(map(str, self.key)) + "]"
        return f"msq[{self.key[0]}]"


UNIT = KinSymbol("1")


def mass_sq(colour: int) -> KinSymbol:
    return KinSymbol("msq", (int(colour),))


def canonical_subset(subset: Iterable[int], universe: Iterable[int]) -> Optional[tuple[int, ...]]:
    """Canonical representative of {I, complement of I}, or None if s_I vanishes."""
    universe = frozenset(universe)
    sub = frozenset(subset)
    if not sub <= universe:
        raise KinematicsError(f"invariant subset {sorted(sub)} is not a set of leg labels")
    if not sub or sub == universe:
        return None
    if max(universe) in sub:
        sub = universe - sub
    return tuple(sorted(sub))


def invariant(subset: Iterable[int], universe: Iterable[int]) -> Optional[KinSymbol]:
    key = canonical_subset(subset, universe)
    return None if key is None else KinSymbol("s", key)


def parse_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise KinematicsError(f"not a rational number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**9)
    if isinstance(value, str):
        text = value.replace(" ", "")
        # allow simple sums such as "4-1/10"
        if re.fullmatch(r"[+-]?\d+(/\d+)?([+-]\d+(/\d+)?)*", text):
            return sum((Fraction(t) for t in re.findall(r"[+-]?\d+(?:/\d+)?", text)), Fraction(0))
    raise KinematicsError(f"not a rational number: {value!r}")


@dataclass(frozen=True)
class KinematicConfig:
    """Numeric external data: dimension, masses per colour, canonical invariants."""

    d: Fraction
    masses: Mapping[int, float] = field(default_factory=dict)
    invariants: Mapping[tuple[int, ...], float] = field(default_factory=dict)
    n_legs: int = 0

    def __post_init__(self):
        object.__setattr__(self, "d", parse_fraction(self.d))
        masses = {}
        for c, m in self.masses.items():
            m = float(m)
            if not m >= 0:
                raise KinematicsError(f"masses[{c}]: mass must be non-negative")
            masses[int(c)] = m
        object.__setattr__(self, "masses", dict(sorted(masses.items())))
        universe = range(1, self.n_legs + 1)
        inv: dict[tuple[int, ...], float] = {}
        for key, val in self.invariants.items():
            ckey = canonical_subset(key, universe) if self.n_legs else None
            if ckey is None:
                raise KinematicsError(
                    f"invariants[{list(key)}]: not a proper nonempty subset of legs 1..{self.n_legs}")
            val = float(val)
            if ckey in inv and inv[ckey] != val:
                raise KinematicsError(
                    f"invariants[{list(key)}]: conflicts with complementary subset value")
            inv[ckey] = val
        object.__setattr__(self, "invariants", dict(sorted(inv.items())))

    def value(self, sym: KinSymbol) -> float:
        if sym.kind == "1":
            return 1.0
        if sym.kind == "msq":
            try:
                return self.masses[sym.key[0]] ** 2
            except KeyError:
                raise KinematicsError(f"missing mass for colour {sym.key[0]}") from None
        try:
            return self.invariants[sym.key]
        except KeyError:
            raise KinematicsError(f"missing value for invariant {sym}") from None

    def is_generic(self) -> bool:
        """Every supplied invariant strictly positive (Euclidean genericity check)."""
        return all(v > 0 for v in self.invariants.values())

    def all_masses_positive(self, colours: Iterable[int]) -> bool:
        return all(self.masses.get(c, 0.0) > 0 for c in colours)

    def with_d(self, d) -> "KinematicConfig":
        return KinematicConfig(d, self.masses, self.invariants, self.n_legs)

    def to_json(self) -> dict:
        d = self.d
        return {
            "d": int(d) if d.denominator == 1 else str(d),
            "legs": self.n_legs,
            "masses": {str(c): m for c, m in self.masses.items()},
            "invariants": {json.dumps(list(k)): v for k, v in self.invariants.items()},
        }

    @classmethod
    def from_json(cls, data: dict, n_legs: Optional[int] = None, d=None) -> "KinematicConfig":
        if not isinstance(data, dict):
            raise KinematicsError("kinematics: expected a JSON object")
        raw_inv = data.get("invariants", {})
        keys = {}
        for text, val in raw_inv.items():
            try:
                key = json.loads(text)
                if not isinstance(key, list) or not all(isinstance(i, int) for i in key):
                    raise ValueError
            except ValueError:
                raise KinematicsError(f"invariants[{text!r}]: key must look like \"[1,2]\"") from None
            keys[tuple(key)] = val
        if n_legs is None:
            n_legs = data.get("legs")
        if n_legs is None:
            n_legs = max((max(k) for k in keys if k), default=0)
        if d is None:
            d = data.get("d")
        if d is None:
            raise KinematicsError("d: missing dimension")
        try:
            masses = {int(c): m for c, m in data.get("masses", {}).items()}
        except ValueError:
            raise KinematicsError("masses: keys must be colour integers") from None
        return cls(parse_fraction(d), masses, keys, int(n_legs))
