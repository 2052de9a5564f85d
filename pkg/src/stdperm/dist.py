"""Discrete symbol distributions: finite probability vectors and the geometric family."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence, Union

from .errors import ParseError, UnknownSymbol

Number = Union[Fraction, float]

GEOMETRIC_TAIL_TOL = 1e-15


def _as_number(x) -> Number:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    return float(x)


@dataclass(frozen=True)
class DiscreteDist:
    """Law of one symbol G_j.

    ``kind="finite"``: ``probs[i]`` is P(G = i) on {0..len(probs)-1}.
    ``kind="geometric"``: P(G = i) = (1 - q) q^i on {0, 1, 2, ...}.
    All-rational parameters put the distribution in exact mode.
    """

    kind: str
    probs: tuple = ()
    q: Number | None = None

    def __post_init__(self):
        if self.kind == "finite":
            probs = tuple(_as_number(p) for p in self.probs)
            if not probs:
                raise ValueError("finite distribution needs a nonempty support")
            if any(p < 0 or p > 1 for p in probs):
                raise ValueError("probabilities must lie in [0, 1]")
            if all(isinstance(p, Fraction) for p in probs):
                if sum(probs) != 1:
                    raise ValueError(f"probabilities sum to {sum(probs)}, not 1")
            else:
                probs = tuple(float(p) for p in probs)
                if abs(math.fsum(probs) - 1.0) > 1e-12:
                    raise ValueError(f"probabilities sum to {math.fsum(probs)}, not 1")
            object.__setattr__(self, "probs", probs)
        elif self.kind == "geometric":
            q = _as_number(self.q)
            if not 0 < q < 1:
                raise ValueError("geometric parameter must lie in (0, 1)")
            object.__setattr__(self, "q", q)
        else:
            raise ValueError(f"unknown distribution kind {self.kind!r}")

    @classmethod
    def finite(cls, probs: Sequence) -> "DiscreteDist":
        return cls("finite", tuple(probs))

    @classmethod
    def uniform(cls, q: int) -> "DiscreteDist":
        if q < 1:
            raise ValueError("alphabet size must be >= 1")
        return cls("finite", tuple(Fraction(1, q) for _ in range(q)))

    @classmethod
    def geometric(cls, q) -> "DiscreteDist":
        return cls("geometric", q=q)

    @property
    def exact(self) -> bool:
        if self.kind == "finite":
            return all(isinstance(p, Fraction) for p in self.probs)
        return isinstance(self.q, Fraction)

    @property
    def support_size(self) -> int | None:
        return len(self.probs) if self.kind == "finite" else None

    def prob(self, i: int) -> Number:
        if i < 0:
            raise UnknownSymbol(f"negative symbol {i}")
        if self.kind == "finite":
            if i >= len(self.probs):
                raise UnknownSymbol(f"symbol {i} outside support of size {len(self.probs)}")
            return self.probs[i]
        return (1 - self.q) * self.q**i

    def word_prob(self, w: Sequence[int]) -> Number:
        p = Fraction(1) if self.exact else 1.0
        for letter in w:
            p *= self.prob(letter)
        return p

    def power_sum(self, m: int) -> Number:
        """sum_i p_i ** m (exact closed form for the geometric family)."""
        if self.kind == "finite":
            return sum(p**m for p in self.probs)
        return (1 - self.q) ** m / (1 - self.q**m)

    def max_prob(self) -> Number:
        return max(self.probs) if self.kind == "finite" else 1 - self.q

    def finite_probs(self) -> tuple:
        if self.kind != "finite":
            raise ValueError("operation needs a finite-support distribution")
        return self.probs

    def truncated_probs(self, tol: float = GEOMETRIC_TAIL_TOL) -> tuple[tuple, float]:
        """Probabilities of the leading symbols and the mass left out.

        Finite laws are returned whole; geometric laws stop once the
        cumulative mass exceeds ``1 - tol``.
        """
        if self.kind == "finite":
            return self.probs, 0.0
        q = float(self.q)
        m = max(1, math.ceil(math.log(tol) / math.log(q)))
        probs = tuple(self.prob(i) for i in range(m))
        return probs, q**m

    def float_probs(self, tol: float = GEOMETRIC_TAIL_TOL) -> list[float]:
        return [float(p) for p in self.truncated_probs(tol)[0]]

    def to_json(self) -> dict:
        def enc(x):
            return str(x) if isinstance(x, Fraction) else x

        if self.kind == "finite":
            return {"kind": "finite", "probs": [enc(p) for p in self.probs]}
        return {"kind": "geometric", "q": enc(self.q)}

    @classmethod
    def from_json(cls, data: dict) -> "DiscreteDist":
        try:
            kind = data["kind"]
            if kind == "finite":
                return cls.finite(data["probs"])
            if kind == "geometric":
                return cls.geometric(data["q"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad distribution spec: {exc}") from exc
        raise ParseError(f"unknown distribution kind {kind!r}")

    def label(self) -> str:
        if self.kind == "geometric":
            return f"geom:{self.q}"
        if len(set(self.probs)) == 1:
            return f"uniform:{len(self.probs)}"
        return "finite:" + ",".join(map(str, self.probs))


def parse_dist(spec: str) -> DiscreteDist:
    """Parse ``uniform:<q>``, ``geom:<q>``, ``file:<path>`` or a bare JSON path."""
    try:
        if spec.startswith("uniform:"):
            return DiscreteDist.uniform(int(spec.split(":", 1)[1]))
        if spec.startswith("geom:"):
            return DiscreteDist.geometric(Fraction(spec.split(":", 1)[1]))
        path = spec.split(":", 1)[1] if spec.startswith("file:") else spec
        return DiscreteDist.from_json(json.loads(Path(path).read_text()))
    except ParseError:
        raise
    except (ValueError, OSError, ZeroDivisionError) as exc:
        raise ParseError(f"bad distribution spec {spec!r}: {exc}") from exc
