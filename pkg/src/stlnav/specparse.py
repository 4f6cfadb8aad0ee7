"""Parser for the textual navigation specification language.

A specification is a conjunction of clauses::

    spec   := clause { "and" clause }
    clause := "alw" [ window ] "(" body ")"
            | "ev" window "(" body ")"
    window := "_[" number "," number "]"
    body   := [ "not" "(" ] atom [ ")" ]
    atom   := "X(1:2,t)" "in" "[" pair { ";" pair } "]"
    pair   := number "," number

Whitespace is insignificant between tokens; keywords are
case-sensitive; numbers are decimal literals with an optional sign and
fraction.  Region atoms list corner coordinates and denote the
axis-aligned bounding box of the listed points.

The navigation fragment gives every clause a role: an "alw" clause
must wrap its atom in not(...) and names an obstacle; an "ev" clause
must not, and names a goal.  An "alw" without a window is closed to
[0, task_end], where task_end is the largest goal window end, so a
specification needs at least one "ev" clause.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import SpecSyntaxError
from .formula import (
    Always,
    And,
    Atom,
    Eventually,
    Formula,
    Interval,
    Not,
)
from .regions import Polytope, region_from_coords

_NUMBER_RE = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)")
_IDENT_RE = re.compile(r"[A-Za-z]+")
_PUNCT = set("()[],;:_")


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident" | "number" | punctuation itself
    text: str
    pos: int

    @property
    def value(self) -> float:
        return float(self.text)


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    i = 0
    n = len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        m = _NUMBER_RE.match(src, i)
        if m:
            tokens.append(_Token("number", m.group(0), i))
            i = m.end()
            continue
        m = _IDENT_RE.match(src, i)
        if m:
            tokens.append(_Token("ident", m.group(0), i))
            i = m.end()
            continue
        if c in _PUNCT:
            tokens.append(_Token(c, c, i))
            i += 1
            continue
        raise SpecSyntaxError(f"unexpected character {c!r}", i, "a token")
    tokens.append(_Token("end", "", n))
    return tokens


@dataclass
class ParsedSpec:
    """A parsed specification with its named region table.

    ``formula`` is the conjunction of all clauses in source order.
    ``regions`` maps region ids (obs1, obs2, ..., goal1, goal2, ...) to
    polytopes and ``roles`` tags each id as obstacle or goal.
    ``goal_windows`` is ordered by window start; ``alw_windows`` keeps
    the (materialized) window of every obstacle clause.  ``task_end``
    is the largest goal window end in seconds.  ``warnings`` records
    parse-time diagnoses such as overlapping goal windows, which only
    become hard errors when the specification is encoded.
    """

    formula: Formula
    regions: dict[str, Polytope]
    roles: dict[str, str]
    goal_windows: list[tuple[str, Interval]]
    alw_windows: list[tuple[str, Interval]]
    task_end: float
    warnings: list[str] = field(default_factory=list)


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected: str):
        tok = self.peek()
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise SpecSyntaxError(f"unexpected {what}", tok.pos, expected)

    def expect(self, kind: str, expected: str) -> _Token:
        if self.peek().kind != kind:
            self.fail(expected)
        return self.advance()

    def expect_ident(self, word: str) -> _Token:
        tok = self.peek()
        if tok.kind != "ident" or tok.text != word:
            self.fail(f"{word!r}")
        return self.advance()

    def number(self, expected: str = "a number") -> float:
        return self.expect("number", expected).value

    def window(self) -> Interval:
        self.expect("_", "'_[' to open a window")
        self.expect("[", "'[' after '_'")
        pos = self.peek().pos
        a = self.number("window start")
        self.expect(",", "',' between window bounds")
        b = self.number("window end")
        self.expect("]", "']' to close the window")
        try:
            return Interval(a, b)
        except ValueError as e:
            raise SpecSyntaxError(str(e), pos, "a window with 0 <= start <= end")

    def coordinates(self) -> Polytope:
        self.expect("[", "'[' to open the coordinate list")
        xs, ys = [], []
        while True:
            xs.append(self.number("an x coordinate"))
            self.expect(",", "',' between coordinates")
            ys.append(self.number("a y coordinate"))
            if self.peek().kind == ";":
                self.advance()
                continue
            break
        self.expect("]", "']' to close the coordinate list")
        return region_from_coords(xs, ys)

    def atom_region(self) -> Polytope:
        self.expect_ident("X")
        self.expect("(", "'(' after 'X'")
        one = self.expect("number", "'1' in the position selector")
        if one.value != 1.0:
            raise SpecSyntaxError(
                f"position selector starts at {one.text}", one.pos, "'1:2'"
            )
        self.expect(":", "':' in the position selector")
        two = self.expect("number", "'2' in the position selector")
        if two.value != 2.0:
            raise SpecSyntaxError(
                f"position selector ends at {two.text}", two.pos, "'1:2'"
            )
        self.expect(",", "',' before 't'")
        self.expect_ident("t")
        self.expect(")", "')' after the state reference")
        self.expect_ident("in")
        return self.coordinates()

    def clause(self) -> tuple[str, Interval | None, bool, Polytope, int]:
        """(kind, window, negated, region, position) for one clause."""
        tok = self.peek()
        if tok.kind != "ident" or tok.text not in ("alw", "ev"):
            self.fail("'alw' or 'ev'")
        kind = self.advance().text
        window = None
        if kind == "ev":
            if self.peek().kind != "_":
                self.fail("a window: 'ev' needs one")
            window = self.window()
        elif self.peek().kind == "_":
            window = self.window()
        self.expect("(", f"'(' after {kind!r}")
        negated = False
        not_pos = self.peek().pos
        if self.peek().kind == "ident" and self.peek().text == "not":
            negated = True
            self.advance()
            self.expect("(", "'(' after 'not'")
        region = self.atom_region()
        if negated:
            self.expect(")", "')' closing 'not'")
        self.expect(")", f"')' closing the {kind!r} clause")
        if kind == "alw" and not negated:
            raise SpecSyntaxError(
                "an 'alw' clause must negate its region (obstacle avoidance)",
                not_pos,
                "'not('",
            )
        if kind == "ev" and negated:
            raise SpecSyntaxError(
                "an 'ev' clause cannot negate its region (goal reaching)",
                not_pos,
                "a region atom",
            )
        return kind, window, negated, region, tok.pos


def parse(src: str) -> ParsedSpec:
    """Parse specification text; malformed input raises SpecSyntaxError."""
    tokens = _tokenize(src)
    p = _Parser(tokens)
    clauses = [p.clause()]
    while p.peek().kind == "ident" and p.peek().text == "and":
        p.advance()
        clauses.append(p.clause())
    if p.peek().kind != "end":
        p.fail("'and' or end of input")

    goals = [(w, reg, pos) for kind, w, _, reg, pos in clauses if kind == "ev"]
    if not goals:
        raise SpecSyntaxError(
            "specification needs at least one 'ev' clause to bound the task",
            tokens[-1].pos,
            "an 'ev' clause",
        )
    task_end = max(w.b for w, _, _ in goals)

    regions: dict[str, Polytope] = {}
    roles: dict[str, str] = {}
    parts: list[Formula] = []
    goal_windows: list[tuple[str, Interval]] = []
    alw_windows: list[tuple[str, Interval]] = []
    n_obs = n_goal = 0
    for kind, window, _, region, _ in clauses:
        if kind == "alw":
            n_obs += 1
            rid = f"obs{n_obs}"
            iv = window if window is not None else Interval(0.0, task_end)
            regions[rid] = region
            roles[rid] = "obstacle"
            alw_windows.append((rid, iv))
            parts.append(Always(iv, Not(Atom(rid))))
        else:
            n_goal += 1
            rid = f"goal{n_goal}"
            regions[rid] = region
            roles[rid] = "goal"
            goal_windows.append((rid, window))
            parts.append(Eventually(window, Atom(rid)))

    goal_windows.sort(key=lambda gw: (gw[1].a, gw[1].b, gw[0]))
    warnings = []
    for (ra, wa), (rb, wb) in zip(goal_windows, goal_windows[1:]):
        if wb.a <= wa.b:
            warnings.append(
                f"goal windows overlap: {ra} [{wa.a}, {wa.b}] and "
                f"{rb} [{wb.a}, {wb.b}]; encoding will fail"
            )

    formula = parts[0] if len(parts) == 1 else And(tuple(parts))
    return ParsedSpec(
        formula=formula,
        regions=regions,
        roles=roles,
        goal_windows=goal_windows,
        alw_windows=alw_windows,
        task_end=task_end,
        warnings=warnings,
    )


def _fmt(x: float) -> str:
    s = repr(float(x))
    if "e" in s or "E" in s:
        s = format(float(x), ".12f").rstrip("0")
        if s.endswith("."):
            s += "0"
    return s


def _fmt_region(region: Polytope) -> str:
    # faces of region_from_coords boxes are ordered +x, -x, +y, -y
    xhi, xlo = region.l[0], -region.l[1]
    yhi, ylo = region.l[2], -region.l[3]
    return (
        f"X(1:2,t) in [{_fmt(xlo)},{_fmt(ylo)}; {_fmt(xhi)},{_fmt(yhi)}]"
    )


def format_spec(spec: ParsedSpec) -> str:
    """Pretty-print back to specification text.

    Regions print as their two extreme corners, windows as their
    (materialized) bounds; re-parsing the result reproduces the same
    formula and region table.
    """
    clauses = []
    children = (
        spec.formula.children if isinstance(spec.formula, And) else (spec.formula,)
    )
    for child in children:
        if isinstance(child, Always):
            rid = child.child.child.region_id
            iv = child.interval
            clauses.append(
                f"alw_[{_fmt(iv.a)},{_fmt(iv.b)}] (not({_fmt_region(spec.regions[rid])}))"
            )
        else:
            rid = child.child.region_id
            iv = child.interval
            clauses.append(
                f"ev_[{_fmt(iv.a)},{_fmt(iv.b)}] ({_fmt_region(spec.regions[rid])})"
            )
    return " and ".join(clauses)
