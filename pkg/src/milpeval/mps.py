"""Free-format MPS reading and writing.

The reader accepts the linear MILP subset: NAME, OBJSENSE, ROWS,
COLUMNS (with INTORG/INTEND markers), RHS, BOUNDS, ENDATA. Constructs
outside that subset (RANGES, objective constants, extra free rows,
semi-continuous bounds) raise UnsupportedConstruct; anything broken
raises MalformedFile with its line number. The writer emits numbers
with 17 significant digits so write -> parse reproduces every float
bit for bit.
"""

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

_ROW_SENSE = {"L": SENSE_LE, "G": SENSE_GE, "E": SENSE_EQ}
_SECTIONS = {"NAME", "OBJSENSE", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA"}
_INF = float("inf")


def _num(token, lineno):
    try:
        v = float(token)
    except ValueError:
        raise MalformedFile(f"expected a number, got {token!r}", line=lineno) from None
    if v != v:
        raise MalformedFile(f"NaN value {token!r}", line=lineno)
    return v


def parse_mps(text):
    """Parse free-format MPS text into a canonical instance."""
    name = ""
    maximize = False
    obj_row = None
    row_names = []
    row_index = {}
    senses = []
    rhs_map = {}

    col_names = []
    col_index = {}
    col_domain = []
    obj_coef = []
    ent_rows = []
    ent_cols = []
    ent_vals = []

    lower_override = {}
    upper_override = {}
    bv_cols = set()

    section = None
    saw_rows = False
    saw_columns = False
    in_integer_block = False
    done = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        if done:
            break
        line = raw.rstrip()
        if not line.strip():
            continue
        if line.lstrip().startswith("*"):
            continue

        header = line[0] not in (" ", "\t")
        tokens = line.split()

        if header:
            word = tokens[0].upper()
            if word not in _SECTIONS:
                raise MalformedFile(f"unknown section {tokens[0]!r}", line=lineno)
            if word == "NAME":
                name = tokens[1] if len(tokens) > 1 else ""
                section = "NAME"
            elif word == "OBJSENSE":
                section = "OBJSENSE"
                if len(tokens) > 1:
                    maximize = _parse_objsense(tokens[1], lineno)
            elif word == "RANGES":
                raise UnsupportedConstruct("RANGES section", line=lineno)
            elif word == "ENDATA":
                done = True
            else:
                section = word
                if word == "ROWS":
                    saw_rows = True
                elif word == "COLUMNS":
                    if not saw_rows:
                        raise MalformedFile("COLUMNS section before any ROWS section", line=lineno)
                    saw_columns = True
            continue

        if section == "OBJSENSE":
            maximize = _parse_objsense(tokens[0], lineno)

        elif section == "ROWS":
            if len(tokens) != 2:
                raise MalformedFile("ROWS lines need a sense and a name", line=lineno)
            kind, rname = tokens[0].upper(), tokens[1]
            if kind == "N":
                if obj_row is not None:
                    raise UnsupportedConstruct("additional free (N) row", line=lineno)
                obj_row = rname
            elif kind in _ROW_SENSE:
                if rname in row_index or rname == obj_row:
                    raise MalformedFile(f"duplicate row name {rname!r}", line=lineno)
                row_index[rname] = len(row_names)
                row_names.append(rname)
                senses.append(_ROW_SENSE[kind])
            else:
                raise MalformedFile(f"unknown row sense {tokens[0]!r}", line=lineno)

        elif section == "COLUMNS":
            if len(tokens) >= 3 and tokens[1] == "'MARKER'":
                marker = tokens[2].strip("'").upper()
                if marker == "INTORG":
                    in_integer_block = True
                elif marker == "INTEND":
                    in_integer_block = False
                else:
                    raise MalformedFile(f"unknown marker {tokens[2]!r}", line=lineno)
                continue
            if len(tokens) < 3 or len(tokens) % 2 == 0:
                raise MalformedFile("COLUMNS lines need a column then row/value pairs", line=lineno)
            cname = tokens[0]
            if cname not in col_index:
                col_index[cname] = len(col_names)
                col_names.append(cname)
                col_domain.append(INTEGER if in_integer_block else CONTINUOUS)
                obj_coef.append(0.0)
            j = col_index[cname]
            for rname, vtok in zip(tokens[1::2], tokens[2::2]):
                v = _num(vtok, lineno)
                if rname == obj_row:
                    obj_coef[j] += v
                elif rname in row_index:
                    ent_rows.append(row_index[rname])
                    ent_cols.append(j)
                    ent_vals.append(v)
                else:
                    raise MalformedFile(f"unknown row {rname!r}", line=lineno)

        elif section == "RHS":
            if len(tokens) < 3 or len(tokens) % 2 == 0:
                raise MalformedFile("RHS lines need a set name then row/value pairs", line=lineno)
            for rname, vtok in zip(tokens[1::2], tokens[2::2]):
                v = _num(vtok, lineno)
                if rname == obj_row:
                    raise UnsupportedConstruct("objective constant (RHS on the free row)", line=lineno)
                if rname not in row_index:
                    raise MalformedFile(f"unknown row {rname!r}", line=lineno)
                rhs_map[row_index[rname]] = v

        elif section == "BOUNDS":
            _parse_bound_line(
                tokens, lineno, col_index, col_domain, lower_override, upper_override, bv_cols
            )

        elif section in (None, "NAME"):
            raise MalformedFile("data line outside any section", line=lineno)

    if not saw_rows:
        raise MalformedFile("ROWS section missing")
    if obj_row is None:
        raise MalformedFile("no objective (N) row declared")
    if not saw_columns:
        raise MalformedFile("COLUMNS section missing")

    n = len(col_names)
    m = len(row_names)
    lower = np.zeros(n, dtype=np.float64)
    upper = np.full(n, _INF, dtype=np.float64)
    for j in range(n):
        if col_domain[j] == BINARY:
            upper[j] = 1.0
    for j, v in lower_override.items():
        lower[j] = v
    for j, v in upper_override.items():
        upper[j] = v
        # Legacy rule: a negative upper bound without an explicit lower
        # sends the lower bound to -inf instead of clashing with 0.
        if v < 0.0 and j not in lower_override and j not in bv_cols:
            lower[j] = -_INF

    for j in bv_cols:
        if lower[j] < 0.0 or upper[j] > 1.0:
            col_domain[j] = INTEGER

    rhs = np.zeros(m, dtype=np.float64)
    for i, v in rhs_map.items():
        rhs[i] = v

    try:
        return make_instance(
            name=name,
            minimize=not maximize,
            objective=obj_coef,
            rows=ent_rows,
            cols=ent_cols,
            vals=ent_vals,
            senses=senses,
            rhs=rhs,
            lower=lower,
            upper=upper,
            integrality=col_domain,
            var_names=col_names,
            row_names=row_names,
        )
    except InvalidConfig as exc:
        raise MalformedFile(str(exc)) from exc


def _parse_objsense(token, lineno):
    word = token.upper()
    if word in ("MAX", "MAXIMIZE"):
        return True
    if word in ("MIN", "MINIMIZE"):
        return False
    raise MalformedFile(f"unknown objective sense {token!r}", line=lineno)


def _parse_bound_line(tokens, lineno, col_index, col_domain, lower, upper, bv_cols):
    kind = tokens[0].upper()
    no_value = kind in ("FR", "MI", "PL", "BV")
    need = 3 if no_value else 4
    if len(tokens) < need:
        raise MalformedFile(f"{kind} bound line is too short", line=lineno)
    cname = tokens[2]
    if cname not in col_index:
        raise MalformedFile(f"unknown column {cname!r}", line=lineno)
    j = col_index[cname]

    if kind == "LO":
        lower[j] = _num(tokens[3], lineno)
    elif kind == "UP":
        upper[j] = _num(tokens[3], lineno)
    elif kind == "FX":
        v = _num(tokens[3], lineno)
        lower[j] = v
        upper[j] = v
    elif kind == "FR":
        lower[j] = -_INF
        upper[j] = _INF
    elif kind == "MI":
        lower[j] = -_INF
    elif kind == "PL":
        upper[j] = _INF
    elif kind == "BV":
        col_domain[j] = BINARY
        bv_cols.add(j)
        lower.pop(j, None)
        upper.pop(j, None)
    elif kind == "LI":
        if col_domain[j] == CONTINUOUS:
            col_domain[j] = INTEGER
        lower[j] = _num(tokens[3], lineno)
    elif kind == "UI":
        if col_domain[j] == CONTINUOUS:
            col_domain[j] = INTEGER
        upper[j] = _num(tokens[3], lineno)
    elif kind == "SC":
        raise UnsupportedConstruct("semi-continuous bound", line=lineno)
    else:
        raise MalformedFile(f"unknown bound type {tokens[0]!r}", line=lineno)


def _fmt(v):
    return format(float(v), ".17g")


def write_mps(inst):
    """Render an instance as free-format MPS text."""
    m, n = inst.num_rows, inst.num_cols
    row_names = list(inst.row_names) if inst.row_names is not None else [f"R{i}" for i in range(m)]
    col_names = list(inst.var_names) if inst.var_names is not None else [f"C{j}" for j in range(n)]
    _check_names(row_names, "row")
    _check_names(col_names, "column")

    taken = set(row_names)
    obj_name = "OBJ"
    k = 0
    while obj_name in taken:
        obj_name = f"OBJ{k}"
        k += 1

    out = []
    title = inst.name if inst.name and not any(c.isspace() for c in inst.name) else ""
    out.append(f"NAME {title}".rstrip())
    if not inst.minimize:
        out.append("OBJSENSE")
        out.append("    MAX")

    out.append("ROWS")
    out.append(f" N {obj_name}")
    sense_letter = {SENSE_LE: "L", SENSE_GE: "G", SENSE_EQ: "E"}
    for i in range(m):
        out.append(f" {sense_letter[inst.senses[i]]} {row_names[i]}")

    # Column-major entry lists. Canonical storage is row-major, so regroup.
    by_col = [[] for _ in range(n)]
    for r, c, v in zip(inst.rows, inst.cols, inst.vals):
        by_col[int(c)].append((int(r), float(v)))

    out.append("COLUMNS")
    marker = 0
    in_int = False
    for j in range(n):
        want_int = inst.integrality[j] != CONTINUOUS
        if want_int and not in_int:
            out.append(f"    M{marker} 'MARKER' 'INTORG'")
            marker += 1
            in_int = True
        elif not want_int and in_int:
            out.append(f"    M{marker} 'MARKER' 'INTEND'")
            marker += 1
            in_int = False
        wrote = False
        if inst.objective[j] != 0.0:
            out.append(f"    {col_names[j]} {obj_name} {_fmt(inst.objective[j])}")
            wrote = True
        for r, v in by_col[j]:
            out.append(f"    {col_names[j]} {row_names[r]} {_fmt(v)}")
            wrote = True
        if not wrote:
            # Register otherwise-empty columns with an explicit zero.
            out.append(f"    {col_names[j]} {obj_name} 0")
    if in_int:
        out.append(f"    M{marker} 'MARKER' 'INTEND'")

    out.append("RHS")
    for i in range(m):
        if inst.rhs[i] != 0.0:
            out.append(f"    RHS {row_names[i]} {_fmt(inst.rhs[i])}")

    out.append("BOUNDS")
    for j in range(n):
        lb, ub = float(inst.lower[j]), float(inst.upper[j])
        cn = col_names[j]
        dom = inst.integrality[j]
        if dom == BINARY:
            out.append(f" BV BND {cn}")
            if lb != 0.0:
                out.append(f" LO BND {cn} {_fmt(lb)}")
            if ub != 1.0:
                out.append(f" UP BND {cn} {_fmt(ub)}")
        elif dom == INTEGER:
            # Integer default bounds differ between readers, so always
            # spell both out.
            if lb == ub:
                out.append(f" FX BND {cn} {_fmt(lb)}")
                continue
            out.append(f" MI BND {cn}" if lb == -_INF else f" LO BND {cn} {_fmt(lb)}")
            out.append(f" PL BND {cn}" if ub == _INF else f" UP BND {cn} {_fmt(ub)}")
        else:
            if lb == -_INF and ub == _INF:
                out.append(f" FR BND {cn}")
            elif lb == ub:
                out.append(f" FX BND {cn} {_fmt(lb)}")
            else:
                if lb == -_INF:
                    out.append(f" MI BND {cn}")
                elif lb != 0.0:
                    out.append(f" LO BND {cn} {_fmt(lb)}")
                if ub != _INF:
                    out.append(f" UP BND {cn} {_fmt(ub)}")

    out.append("ENDATA")
    return "\n".join(out) + "\n"


def _check_names(names, what):
    seen = set()
    for s in names:
        if not s or any(c.isspace() for c in s):
            raise InvalidConfig(f"{what} name {s!r} is not a single token")
        if s in seen:
            raise InvalidConfig(f"duplicate {what} name {s!r}")
        seen.add(s)
