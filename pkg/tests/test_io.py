import os

import numpy as np
import pytest

from milpeval.errors import MalformedFile, UnknownFormat, UnsupportedConstruct
from milpeval.io import (
    list_instance_files,
    parse_instance,
    read_instance,
    sniff_format,
    write_instance,
)
from milpeval.lpfile import parse_lp
from milpeval.mps import write_mps

LP = """\
\\ tiny model
minimize
 obj: 2 x + 3 y - z
subject to
 c1: x + y <= 10
 c2: x - 2 z >= -4
 c3: y + z = 3
bounds
 0 <= x <= 5
 z free
binary
 y
end
"""


def test_parse_lp_small():
    inst = parse_lp(LP, name="tiny")
    assert inst.name == "tiny"
    assert inst.minimize is True
    assert inst.var_names == ["x", "y", "z"]
    assert list(inst.objective) == [2.0, 3.0, -1.0]
    assert inst.senses == ["<=", ">=", "="]
    assert list(inst.rhs) == [10.0, -4.0, 3.0]
    assert inst.integrality == ["continuous", "binary", "continuous"]
    assert list(inst.lower) == [0.0, 0.0, -np.inf]
    assert list(inst.upper) == [5.0, 1.0, np.inf]
    assert list(zip(inst.rows, inst.cols, inst.vals)) == [
        (0, 0, 1.0),
        (0, 1, 1.0),
        (1, 0, 1.0),
        (1, 2, -2.0),
        (2, 1, 1.0),
        (2, 2, 1.0),
    ]


def test_parse_lp_maximize_and_general():
    text = "maximize\n obj: x + y\nsubject to\n c: x + y <= 4\ngeneral\n x\nend\n"
    inst = parse_lp(text)
    assert inst.minimize is False
    assert inst.integrality == ["integer", "continuous"]


def test_parse_lp_rejects_quadratic():
    text = "minimize\n obj: x + [ x ^ 2 ] / 2\nsubject to\n c: x <= 1\nend\n"
    with pytest.raises((UnsupportedConstruct, MalformedFile)):
        parse_lp(text)


def test_parse_lp_rejects_sos():
    text = "minimize\n obj: x\nsubject to\n c: x <= 1\nsos\n s1: x:1\nend\n"
    with pytest.raises(UnsupportedConstruct):
        parse_lp(text)


def test_parse_lp_requires_objective_first():
    with pytest.raises(MalformedFile):
        parse_lp("subject to\n c: x <= 1\nend\n")
    with pytest.raises(MalformedFile):
        parse_lp("")


def test_sniff_format():
    assert sniff_format("* comment\nNAME x\n") == "mps"
    assert sniff_format("NAME x\nROWS\n") == "mps"
    assert sniff_format("\\ comment\nminimize\n") == "lp"
    assert sniff_format("Minimize\n obj: x\n") == "lp"
    with pytest.raises(UnknownFormat):
        sniff_format("hello world\n")
    with pytest.raises(UnknownFormat):
        sniff_format("   \n\n")


def test_parse_instance_dispatch(tmp_path):
    inst = parse_lp(LP, name="tiny")
    mps_path = tmp_path / "tiny.mps"
    write_instance(inst, mps_path)
    again = read_instance(mps_path)
    assert again == inst
    assert again.name == "tiny"

    lp_path = tmp_path / "model.lp"
    lp_path.write_text(LP)
    from_lp = read_instance(lp_path)
    assert from_lp == inst
    assert from_lp.name == "model"

    # Raw text with newlines parses directly, extension-free.
    assert parse_instance(LP) == inst
    assert parse_instance(write_mps(inst)) == inst

    with pytest.raises(UnknownFormat):
        parse_instance(LP, format="xml")


def test_parse_instance_name_override(tmp_path):
    p = tmp_path / "foo.mps"
    inst = parse_lp(LP, name="x")
    write_instance(inst, p)
    assert parse_instance(p, name="fancy").name == "fancy"


def test_list_instance_files(tmp_path):
    (tmp_path / "b.mps").write_text("NAME b\n")
    (tmp_path / "a.lp").write_text("minimize\n")
    (tmp_path / "c.MPS").write_text("NAME c\n")
    (tmp_path / "notes.txt").write_text("skip me\n")
    (tmp_path / "gen_meta.json").write_text("{}\n")
    got = list_instance_files(tmp_path)
    assert [os.path.basename(p) for p in got] == ["a.lp", "b.mps", "c.MPS"]
