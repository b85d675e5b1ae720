"""Line-oriented problem files.

::

    # a comment
    vars: x y
    ideal: x*y - t^2
    perturbed: x*y - t^2 - t^9
    k: 9
    order: 16

Keys are ``vars``, ``ideal``, ``perturbed``, ``k``, ``divisor``, ``r``,
``cap``, ``order`` and ``box`` (``L,d``).  ``ideal`` and ``perturbed`` take
comma-separated polynomials and may be repeated to continue the list.  The
base variable ``t`` is always present and must not be declared.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError
from .rings import Polynomial, Ring, parse_polynomial

KEYS = ("vars", "ideal", "perturbed", "k", "divisor", "r", "cap", "order", "box")
_LIST_KEYS = {"ideal", "perturbed"}
_INT_KEYS = {"k", "r", "cap", "order"}
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*$")


@dataclass(frozen=True)
class ProblemSpec:
    variables: tuple[str, ...]
    ideal: tuple[str, ...] = ()
    perturbed: tuple[str, ...] | None = None
    k: int | None = None
    divisor: tuple[str, int] | None = None
    cap: int | None = None
    order: int | None = None
    box: tuple[int, int] | None = None
    _ring: Ring | None = field(default=None, compare=False, repr=False)

    def ring(self) -> Ring:
        if self._ring is None:
            object.__setattr__(self, "_ring", Ring(self.variables))
        return self._ring

    def ideal_polys(self) -> list[Polynomial]:
        return [parse_polynomial(self.ring(), s) for s in self.ideal]

    def perturbed_polys(self) -> list[Polynomial] | None:
        if self.perturbed is None:
            return None
        return [parse_polynomial(self.ring(), s) for s in self.perturbed]

    def as_dict(self) -> dict:
        return {
            "vars": list(self.variables),
            "ideal": list(self.ideal),
            "perturbed": None if self.perturbed is None else list(self.perturbed),
            "k": self.k,
            "divisor": None if self.divisor is None else {"w": self.divisor[0], "r": self.divisor[1]},
            "cap": self.cap,
            "order": self.order,
            "box": None if self.box is None else list(self.box),
        }

    @classmethod
    def from_dict(cls, d: dict) -> ProblemSpec:
        div = d.get("divisor")
        box = d.get("box")
        spec = cls(
            variables=tuple(d["vars"]),
            ideal=tuple(d.get("ideal") or ()),
            perturbed=None if d.get("perturbed") is None else tuple(d["perturbed"]),
            k=d.get("k"),
            divisor=None if div is None else (div["w"], int(div["r"])),
            cap=d.get("cap"),
            order=d.get("order"),
            box=None if box is None else (int(box[0]), int(box[1])),
        )
        return parse_problem(render_problem(spec))


def render_problem(spec: ProblemSpec) -> str:
    lines = [f"vars: {' '.join(spec.variables)}", f"ideal: {', '.join(spec.ideal)}"]
    if spec.perturbed is not None:
        lines.append(f"perturbed: {', '.join(spec.perturbed)}")
    if spec.k is not None:
        lines.append(f"k: {spec.k}")
    if spec.divisor is not None:
        lines.append(f"divisor: {spec.divisor[0]}")
        lines.append(f"r: {spec.divisor[1]}")
    if spec.cap is not None:
        lines.append(f"cap: {spec.cap}")
    if spec.order is not None:
        lines.append(f"order: {spec.order}")
    if spec.box is not None:
        lines.append(f"box: {spec.box[0]},{spec.box[1]}")
    return "\n".join(lines) + "\n"


def _int(value: str, line: int, col: int, key: str, minimum: int = 0) -> int:
    try:
        v = int(value)
    except ValueError:
        raise ParseError(f"{key} must be an integer", line, col) from None
    if v < minimum:
        raise ParseError(f"{key} must be at least {minimum}", line, col)
    return v


def _split_list(value: str, col: int) -> list[tuple[str, int]]:
    out = []
    start = 0
    for piece in value.split(","):
        lead = len(piece) - len(piece.lstrip())
        out.append((piece.strip(), col + start + lead))
        start += len(piece) + 1
    return out


def parse_problem(text: str) -> ProblemSpec:
    """Parse a problem file; :class:`ParseError` carries line and column."""
    seen: dict[str, tuple[str, int, int]] = {}
    lists: dict[str, list[tuple[str, int, int]]] = {"ideal": [], "perturbed": []}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if ":" not in body:
            col = len(body) - len(body.lstrip()) + 1
            raise ParseError("expected 'key: value'", lineno, col)
        key_part, value = body.split(":", 1)
        key = key_part.strip()
        key_col = len(key_part) - len(key_part.lstrip()) + 1
        if key not in KEYS:
            raise ParseError(f"unknown key {key!r}", lineno, key_col)
        vcol = len(key_part) + 1 + (len(value) - len(value.lstrip())) + 1
        value = value.strip()
        if key in _LIST_KEYS:
            if not value:
                lists[key].append(("", lineno, vcol))
                continue
            for piece, c in _split_list(value, vcol - 1):
                if not piece:
                    raise ParseError("empty polynomial in list", lineno, c + 1)
                lists[key].append((piece, lineno, c))
            continue
        if key in seen:
            raise ParseError(f"duplicate key {key!r}", lineno, key_col)
        seen[key] = (value, lineno, vcol)

    if "vars" not in seen:
        raise ParseError("missing 'vars' line", None, None)
    vtext, vline, vcol = seen["vars"]
    names = vtext.replace(",", " ").split()
    for nm in names:
        if not _IDENT.match(nm):
            raise ParseError(f"invalid variable name {nm!r}", vline, vcol + vtext.find(nm))
        if nm == "t":
            raise ParseError("'t' is the base variable and cannot be declared", vline, vcol + vtext.find(nm))
    if len(set(names)) != len(names):
        raise ParseError("duplicate variable name", vline, vcol)
    ring = Ring(names)

    def polys(key: str) -> tuple[str, ...]:
        out = []
        for piece, line, col in lists[key]:
            if not piece:
                continue
            p = parse_polynomial(ring, piece, line, col)
            del p
            out.append(piece)
        return tuple(out)

    ideal = polys("ideal")
    perturbed = polys("perturbed") if lists["perturbed"] else None
    ints = {}
    for key in _INT_KEYS:
        if key in seen:
            v, line, col = seen[key]
            ints[key] = _int(v, line, col, key, 0 if key == "r" else 1)
    box = None
    if "box" in seen:
        v, line, col = seen["box"]
        parts = v.split(",")
        if len(parts) != 2:
            raise ParseError("box must be 'L,d'", line, col)
        box = (_int(parts[0].strip(), line, col, "box L", 1), _int(parts[1].strip(), line, col, "box d", 0))
    divisor = None
    if "divisor" in seen:
        v, line, col = seen["divisor"]
        if v not in names:
            raise ParseError(f"divisor variable {v!r} is not declared", line, col)
        if "r" not in ints:
            raise ParseError("'divisor' needs an 'r' line", line, col)
        divisor = (v, ints["r"])
    elif "r" in ints:
        _, line, col = seen["r"]
        raise ParseError("'r' given without 'divisor'", line, col)
    if perturbed is not None:
        if "k" not in ints:
            line = lists["perturbed"][0][1]
            raise ParseError("'perturbed' requires 'k'", line, 1)
        if len(perturbed) != len(ideal):
            line = lists["perturbed"][0][1]
            raise ParseError("'perturbed' must list as many polynomials as 'ideal'", line, 1)
    return ProblemSpec(
        variables=tuple(names),
        ideal=ideal,
        perturbed=perturbed,
        k=ints.get("k"),
        divisor=divisor,
        cap=ints.get("cap"),
        order=ints.get("order"),
        box=box,
        _ring=ring,
    )
