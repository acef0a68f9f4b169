"""Reader for the linear subset of the CPLEX LP format.

Supported: objective sense + linear objective, linear constraints,
Bounds, General/Binary sections, End. Quadratic brackets, indicator
arrows and semi-continuous sections raise UnsupportedConstruct. There
is deliberately no LP writer; MPS is the interchange format.
"""

import re

import numpy as np

from .errors import InvalidConfig, MalformedFile, UnsupportedConstruct
from .instance import (
    BINARY,
    CONTINUOUS,
    INTEGER,
    SENSE_EQ,
    SENSE_GE,
    SENSE_LE,
    make_instance,
)

_INF = float("inf")
_BIG = 1e30

_TOKEN = re.compile(
    r"""
    (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_!#$%&.][A-Za-z0-9_!#$%&.]*)
  | (?P<op><=|=<|>=|=>|==|->|[<>=+\-:\[\]^*/])
    """,
    re.VERBOSE,
)

_OBJ_KEYWORDS = {"minimize", "minimum", "min", "maximize", "maximum", "max"}
_MAX_KEYWORDS = {"maximize", "maximum", "max"}
_SECTION_STARTS = {
    "subject": "constraints",
    "such": "constraints",
    "st": "constraints",
    "s.t.": "constraints",
    "bounds": "bounds",
    "bound": "bounds",
    "general": "general",
    "generals": "general",
    "gen": "general",
    "integer": "general",
    "integers": "general",
    "binary": "binary",
    "binaries": "binary",
    "bin": "binary",
    "semi-continuous": "semi",
    "semi": "semi",
    "semis": "semi",
    "sos": "sos",
    "end": "end",
}


class _Tok:
    __slots__ = ("kind", "text", "line")

    def __init__(self, kind, text, line):
        self.kind = kind
        self.text = text
        self.line = line


def _tokenize(text):
    tokens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("\\", 1)[0]
        pos = 0
        while pos < len(line):
            ch = line[pos]
            if ch.isspace():
                pos += 1
                continue
            mo = _TOKEN.match(line, pos)
            if not mo:
                raise MalformedFile(f"unexpected character {ch!r}", line=lineno, column=pos + 1)
            kind = mo.lastgroup
            tokens.append(_Tok(kind, mo.group(), lineno))
            pos = mo.end()
    return tokens


class _Parser:
    def __init__(self, tokens, name):
        self.toks = tokens
        self.i = 0
        self.name = name
        self.maximize = False
        self.obj = {}
        self.rows = []  # (name, coefs dict, sense, rhs)
        self.domains = {}
        self.low = {}
        self.upp = {}
        self.order = []

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        t = self.peek()
        if t is not None:
            self.i += 1
        return t

    def _keyword(self):
        """Section keyword at the current position, if any."""
        t = self.peek()
        if t is None or t.kind != "name":
            return None
        word = t.text.lower()
        if word in ("subject", "such"):
            nxt = self.i + 1
            if nxt < len(self.toks) and self.toks[nxt].kind == "name" and self.toks[
                nxt
            ].text.lower() in ("to", "that"):
                return "constraints"
            return None
        return _SECTION_STARTS.get(word)

    def _eat_keyword(self, section):
        t = self.take()
        if section == "constraints" and t.text.lower() in ("subject", "such"):
            self.take()

    def _var(self, name):
        if name not in self.domains:
            self.domains[name] = CONTINUOUS
            self.order.append(name)

    def parse(self):
        t = self.peek()
        if t is None:
            raise MalformedFile("empty LP file")
        if t.kind != "name" or t.text.lower() not in _OBJ_KEYWORDS:
            raise MalformedFile("LP files must start with an objective sense", line=t.line)
        self.maximize = t.text.lower() in _MAX_KEYWORDS
        self.take()

        t = self.peek()
        if (
            t is not None
            and t.kind == "name"
            and self.i + 1 < len(self.toks)
            and self.toks[self.i + 1].kind == "op"
            and self.toks[self.i + 1].text == ":"
        ):
            self.take()
            self.take()
        coefs, _, _ = self._expression(stop_at_relop=False)
        self.obj = coefs

        while True:
            section = self._keyword()
            if section is None:
                t = self.peek()
                if t is None:
                    break
                raise MalformedFile(f"unexpected token {t.text!r}", line=t.line)
            if section in ("semi", "sos"):
                raise UnsupportedConstruct(f"{section} section", line=self.peek().line)
            self._eat_keyword(section)
            if section == "constraints":
                self._constraints()
            elif section == "bounds":
                self._bounds()
            elif section == "general":
                self._name_list(INTEGER)
            elif section == "binary":
                self._name_list(BINARY)
            elif section == "end":
                break
        return self._build()

    def _expression(self, stop_at_relop):
        """Parse a linear expression; constants fold into the returned offset."""
        coefs = {}
        const = 0.0
        sign = 1.0
        pending = None  # coefficient waiting for a variable name
        while True:
            t = self.peek()
            if t is None:
                break
            if t.kind == "op":
                if t.text in ("+", "-"):
                    if pending is not None:
                        const += sign * pending
                        pending = None
                    sign = 1.0 if t.text == "+" else -1.0
                    self.take()
                    continue
                if t.text in ("[", "^", "*", "/"):
                    raise UnsupportedConstruct("nonlinear expression", line=t.line)
                if t.text == "->":
                    raise UnsupportedConstruct("indicator constraint", line=t.line)
                if stop_at_relop:
                    break
                raise MalformedFile(f"unexpected operator {t.text!r}", line=t.line)
            if t.kind == "num":
                if pending is not None:
                    const += sign * pending
                    sign = 1.0
                pending = float(t.text)
                self.take()
                continue
            # name: either a variable or the start of the next section.
            # Section keywords win, like every LP reader in practice.
            if self._keyword() is not None:
                break
            name = t.text
            self._var(name)
            c = sign * (pending if pending is not None else 1.0)
            coefs[name] = coefs.get(name, 0.0) + c
            pending = None
            sign = 1.0
            self.take()
        if pending is not None:
            const += sign * pending
        return coefs, const, sign

    def _relop(self):
        t = self.peek()
        if t is None or t.kind != "op" or t.text not in ("<=", "=<", "<", ">=", "=>", ">", "=", "=="):
            return None
        self.take()
        if t.text in ("<=", "=<", "<"):
            return SENSE_LE
        if t.text in (">=", "=>", ">"):
            return SENSE_GE
        return SENSE_EQ

    def _signed_number(self):
        sign = 1.0
        t = self.peek()
        while t is not None and t.kind == "op" and t.text in ("+", "-"):
            if t.text == "-":
                sign = -sign
            self.take()
            t = self.peek()
        if t is None:
            raise MalformedFile("number expected at end of file")
        if t.kind == "num":
            self.take()
            return sign * float(t.text)
        if t.kind == "name" and t.text.lower() in ("inf", "infinity"):
            self.take()
            return sign * _INF
        raise MalformedFile(f"number expected, got {t.text!r}", line=t.line)

    def _constraints(self):
        while True:
            if self._keyword() is not None or self.peek() is None:
                return
            row_name = None
            t = self.peek()
            if (
                t.kind == "name"
                and self.i + 1 < len(self.toks)
                and self.toks[self.i + 1].kind == "op"
                and self.toks[self.i + 1].text == ":"
            ):
                row_name = t.text
                self.take()
                self.take()
            start = self.peek()
            coefs, const, _ = self._expression(stop_at_relop=True)
            sense = self._relop()
            if sense is None:
                where = self.peek() or start
                raise MalformedFile(
                    "constraint lacks a relational operator", line=where.line if where else None
                )
            rhs = self._signed_number()
            if not coefs:
                raise MalformedFile(
                    "constraint has no variables", line=start.line if start else None
                )
            self.rows.append((row_name, coefs, sense, rhs - const))

    def _bounds(self):
        while True:
            if self._keyword() is not None or self.peek() is None:
                return
            t = self.peek()
            if t.kind == "name" and t.text.lower() not in ("inf", "infinity"):
                name = t.text
                self.take()
                nxt = self.peek()
                if nxt is not None and nxt.kind == "name" and nxt.text.lower() == "free":
                    self.take()
                    self._var(name)
                    self.low[name] = -_INF
                    self.upp[name] = _INF
                    continue
                self._var(name)
                sense = self._relop()
                if sense is None:
                    raise MalformedFile(f"bound for {name!r} lacks an operator", line=t.line)
                v = self._signed_number()
                self._apply_bound(name, sense, v)
                continue
            # number-first form: v <= x [<= v2]
            v = self._signed_number()
            sense = self._relop()
            t = self.peek()
            if sense is None or t is None or t.kind != "name":
                raise MalformedFile("malformed bound line", line=t.line if t else None)
            name = t.text
            self.take()
            self._var(name)
            flipped = {SENSE_LE: SENSE_GE, SENSE_GE: SENSE_LE, SENSE_EQ: SENSE_EQ}[sense]
            self._apply_bound(name, flipped, v)
            second = self._relop()
            if second is not None:
                v2 = self._signed_number()
                self._apply_bound(name, second, v2)

    def _apply_bound(self, name, sense, v):
        if abs(v) >= _BIG:
            v = _INF if v > 0 else -_INF
        if sense == SENSE_LE:
            self.upp[name] = v
        elif sense == SENSE_GE:
            self.low[name] = v
        else:
            self.low[name] = v
            self.upp[name] = v

    def _name_list(self, domain):
        while True:
            if self._keyword() is not None:
                return
            t = self.peek()
            if t is None:
                return
            if t.kind != "name":
                raise MalformedFile(f"variable name expected, got {t.text!r}", line=t.line)
            self._var(t.text)
            self.domains[t.text] = domain
            self.take()

    def _build(self):
        names = self.order
        index = {s: j for j, s in enumerate(names)}
        n = len(names)
        objective = np.zeros(n, dtype=np.float64)
        for s, c in self.obj.items():
            objective[index[s]] = c

        rows, cols, vals, senses, rhs, row_names = [], [], [], [], [], []
        for i, (rname, coefs, sense, b) in enumerate(self.rows):
            row_names.append(rname if rname is not None else f"c{i}")
            senses.append(sense)
            rhs.append(b)
            for s, c in coefs.items():
                rows.append(i)
                cols.append(index[s])
                vals.append(c)
        if len(set(row_names)) != len(row_names):
            seen = {}
            for i, s in enumerate(row_names):
                if s in seen:
                    raise MalformedFile(f"duplicate constraint name {s!r}")
                seen[s] = i

        lower = np.zeros(n, dtype=np.float64)
        upper = np.full(n, _INF, dtype=np.float64)
        domains = [self.domains[s] for s in names]
        for j, d in enumerate(domains):
            if d == BINARY:
                upper[j] = 1.0
        for s, v in self.low.items():
            lower[index[s]] = v
        for s, v in self.upp.items():
            j = index[s]
            upper[j] = v
            if v < 0.0 and s not in self.low:
                lower[j] = -_INF
        for j, d in enumerate(domains):
            if d == BINARY and (lower[j] < 0.0 or upper[j] > 1.0):
                domains[j] = INTEGER

        try:
            return make_instance(
                name=self.name,
                minimize=not self.maximize,
                objective=objective,
                rows=rows,
                cols=cols,
                vals=vals,
                senses=senses,
                rhs=rhs,
                lower=lower,
                upper=upper,
                integrality=domains,
                var_names=names,
                row_names=row_names,
            )
        except InvalidConfig as exc:
            raise MalformedFile(str(exc)) from exc


def parse_lp(text, name=""):
    """Parse CPLEX-LP text into a canonical instance."""
    return _Parser(_tokenize(text), name).parse()
