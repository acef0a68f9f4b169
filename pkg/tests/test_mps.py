import numpy as np
import pytest

from milpeval.errors import MalformedFile, UnsupportedConstruct
from milpeval.instance import make_instance
from milpeval.mps import parse_mps, write_mps

SMALL = """\
NAME small
ROWS
 N  COST
 L  LIM1
 G  LIM2
 E  EQ1
COLUMNS
    X1  COST  1.0  LIM1  2.0
    X1  LIM2  3.0
    M1  'MARKER'  'INTORG'
    X2  COST  -2.5  LIM1  1.0
    M2  'MARKER'  'INTEND'
    X3  EQ1  1.0
RHS
    RHS  LIM1  10.0  LIM2  1.5
    RHS  EQ1  4.0
BOUNDS
 UP BND  X1  4.0
 BV BND  X2
 FR BND  X3
ENDATA
"""


def test_parse_small_file():
    inst = parse_mps(SMALL)
    assert inst.name == "small"
    assert inst.minimize is True
    assert inst.num_rows == 3
    assert inst.num_cols == 3
    assert inst.row_names == ["LIM1", "LIM2", "EQ1"]
    assert inst.var_names == ["X1", "X2", "X3"]
    assert list(inst.objective) == [1.0, -2.5, 0.0]
    assert inst.senses == ["<=", ">=", "="]
    assert list(inst.rhs) == [10.0, 1.5, 4.0]
    assert inst.integrality == ["continuous", "binary", "continuous"]
    assert list(inst.lower) == [0.0, 0.0, -np.inf]
    assert list(inst.upper) == [4.0, 1.0, np.inf]
    assert list(zip(inst.rows, inst.cols, inst.vals)) == [
        (0, 0, 2.0),
        (0, 1, 1.0),
        (1, 0, 3.0),
        (2, 2, 1.0),
    ]


def test_objsense_maximize():
    text = SMALL.replace("NAME small\n", "NAME small\nOBJSENSE\n    MAX\n")
    assert parse_mps(text).minimize is False


def test_integer_marker_without_explicit_bounds_defaults():
    text = """\
NAME t
ROWS
 N obj
 L r0
COLUMNS
    A  'MARKER'  'INTORG'
    x  obj  1.0  r0  1.0
    B  'MARKER'  'INTEND'
RHS
    RHS  r0  5.0
ENDATA
"""
    inst = parse_mps(text)
    assert inst.integrality == ["integer"]
    assert list(inst.lower) == [0.0]
    assert list(inst.upper) == [np.inf]


def test_round_trip_bit_exact():
    inst = make_instance(
        name="rt",
        minimize=False,
        objective=[0.1, -1 / 3, 7e-20],
        rows=[0, 0, 1],
        cols=[0, 1, 2],
        vals=[1e30 * 0 + 0.3, -2.25, 1 / 7],
        senses=["<=", "="],
        rhs=[np.pi, -1.5],
        lower=[0.0, -np.inf, -4.5],
        upper=[1.0, np.inf, 4.5],
        integrality=["binary", "continuous", "integer"],
    )
    back = parse_mps(write_mps(inst))
    assert back == inst
    # And a second trip is textually stable.
    assert write_mps(back) == write_mps(inst)


def test_round_trip_generated_instances():
    from dataclasses import replace

    from milpeval.generators import GenParams, generate_instance

    for family in ("sc", "ca", "is", "cfl"):
        sizes = {
            "sc": dict(constraints_range=(8, 14), variables_range=(15, 25), density_range=(0.15, 0.3)),
            "ca": dict(constraints_range=(8, 14), variables_range=(15, 25), density_range=(0.15, 0.3)),
            "is": dict(variables_range=(14, 20), density_range=(0.15, 0.3)),
            "cfl": dict(constraints_range=(4, 7)),
        }
        params = replace(GenParams(family=family, **sizes[family]), seed=3)
        inst = generate_instance(params)[0]
        assert parse_mps(write_mps(inst)) == inst


def test_ranges_section_rejected():
    text = SMALL.replace("BOUNDS", "RANGES\n    RNG  LIM1  5.0\nBOUNDS")
    with pytest.raises(UnsupportedConstruct):
        parse_mps(text)


def test_second_free_row_rejected():
    text = SMALL.replace(" N  COST\n", " N  COST\n N  COST2\n")
    with pytest.raises(UnsupportedConstruct):
        parse_mps(text)


def test_objective_constant_rejected():
    text = SMALL.replace("    RHS  EQ1  4.0\n", "    RHS  EQ1  4.0  COST  1.0\n")
    with pytest.raises(UnsupportedConstruct):
        parse_mps(text)


def test_semicontinuous_bound_rejected():
    text = SMALL.replace(" FR BND  X3\n", " SC BND  X3  5.0\n")
    with pytest.raises(UnsupportedConstruct):
        parse_mps(text)


def test_malformed_inputs_report_lines():
    with pytest.raises(MalformedFile):
        parse_mps("GARBAGE\n")
    with pytest.raises(MalformedFile):
        parse_mps("ROWS\n N obj\nENDATA\n")  # no COLUMNS
    with pytest.raises(MalformedFile):
        parse_mps("COLUMNS\n    x  obj  1.0\n")  # COLUMNS before ROWS
    err = None
    try:
        parse_mps(SMALL.replace("LIM1  2.0", "LIM1  abc"))
    except MalformedFile as exc:
        err = exc
    assert err is not None
    assert err.line is not None


def test_unknown_row_reference_rejected():
    with pytest.raises(MalformedFile):
        parse_mps(SMALL.replace("X3  EQ1  1.0", "X3  NOPE  1.0"))
    with pytest.raises(MalformedFile):
        parse_mps(SMALL.replace("RHS  EQ1  4.0", "RHS  NOPE  4.0"))


def test_duplicate_row_name_rejected():
    with pytest.raises(MalformedFile):
        parse_mps(SMALL.replace(" G  LIM2\n", " G  LIM2\n L  LIM2\n"))


def test_unknown_bound_column_rejected():
    with pytest.raises(MalformedFile):
        parse_mps(SMALL.replace(" UP BND  X1  4.0", " UP BND  NOPE  4.0"))


def test_nan_value_rejected():
    with pytest.raises(MalformedFile):
        parse_mps(SMALL.replace("LIM1  10.0", "LIM1  nan"))


def test_writer_emits_parseable_headers():
    inst = parse_mps(SMALL)
    text = write_mps(inst)
    lines = text.splitlines()
    assert lines[0].startswith("NAME")
    assert "OBJSENSE" not in text  # minimize is the default
    assert lines[-1] == "ENDATA"
    # Binary columns ride inside an integer marker block with a BV bound.
    assert "'INTORG'" in text
    assert " BV BND X2" in text
