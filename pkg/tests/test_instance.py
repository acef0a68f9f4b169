import numpy as np
import pytest

from milpeval.errors import InvalidConfig
from milpeval.instance import instance_stats, make_instance


def build(**overrides):
    fields = dict(
        name="t",
        minimize=True,
        objective=[1.0, 2.0],
        rows=[0, 0, 1],
        cols=[0, 1, 1],
        vals=[1.0, 2.0, 3.0],
        senses=["<=", ">="],
        rhs=[4.0, 5.0],
        lower=[0.0, 0.0],
        upper=[1.0, 10.0],
        integrality=["binary", "integer"],
    )
    fields.update(overrides)
    return make_instance(**fields)


def test_triplets_sorted_row_major():
    inst = build(rows=[1, 0, 0], cols=[1, 1, 0], vals=[3.0, 2.0, 1.0])
    assert list(inst.rows) == [0, 0, 1]
    assert list(inst.cols) == [0, 1, 1]
    assert list(inst.vals) == [1.0, 2.0, 3.0]


def test_duplicate_entries_summed():
    inst = build(rows=[0, 0, 0, 1], cols=[0, 0, 1, 1], vals=[1.0, 4.0, 2.0, 3.0])
    assert list(inst.rows) == [0, 0, 1]
    assert list(inst.cols) == [0, 1, 1]
    assert list(inst.vals) == [5.0, 2.0, 3.0]


def test_zeros_dropped_including_cancellations():
    inst = build(rows=[0, 0, 0, 1], cols=[0, 0, 1, 1], vals=[1.0, -1.0, 2.0, 3.0])
    assert list(inst.rows) == [0, 1]
    assert list(inst.cols) == [1, 1]
    assert list(inst.vals) == [2.0, 3.0]
    assert inst.nnz == 2


def test_empty_matrix_allowed():
    inst = build(rows=[], cols=[], vals=[])
    assert inst.nnz == 0
    assert inst.num_rows == 2
    assert inst.num_cols == 2


def test_equality_ignores_names():
    a = build()
    b = build(name="other", var_names=["x", "y"], row_names=["r1", "r2"])
    assert a == b
    assert a != build(vals=[1.0, 2.0, 4.0])
    assert a != build(minimize=False)
    assert a.__eq__(42) is NotImplemented


def test_shape_validation():
    with pytest.raises(InvalidConfig):
        build(objective=[[1.0, 2.0]])
    with pytest.raises(InvalidConfig):
        build(senses=["<="])
    with pytest.raises(InvalidConfig):
        build(lower=[0.0])
    with pytest.raises(InvalidConfig):
        build(integrality=["binary"])
    with pytest.raises(InvalidConfig):
        build(rows=[0, 0], cols=[0, 1, 1], vals=[1.0, 2.0, 3.0])


def test_value_validation():
    with pytest.raises(InvalidConfig):
        build(senses=["<=", "=="])
    with pytest.raises(InvalidConfig):
        build(integrality=["binary", "boolean"])
    with pytest.raises(InvalidConfig):
        build(objective=[np.inf, 1.0])
    with pytest.raises(InvalidConfig):
        build(rhs=[np.nan, 1.0])
    with pytest.raises(InvalidConfig):
        build(lower=[np.nan, 0.0])
    with pytest.raises(InvalidConfig):
        build(vals=[1.0, np.inf, 2.0])
    with pytest.raises(InvalidConfig):
        build(lower=[2.0, 0.0], upper=[1.0, 10.0])
    with pytest.raises(InvalidConfig):
        build(upper=[2.0, 10.0])  # binary above 1


def test_index_validation():
    with pytest.raises(InvalidConfig):
        build(rows=[0, 0, 2])
    with pytest.raises(InvalidConfig):
        build(cols=[0, 1, -1])


def test_name_count_validation():
    with pytest.raises(InvalidConfig):
        build(var_names=["x"])
    with pytest.raises(InvalidConfig):
        build(row_names=["r"])


def test_infinite_bounds_allowed():
    inst = build(
        lower=[0.0, -np.inf],
        upper=[1.0, np.inf],
    )
    assert inst.lower[1] == -np.inf
    assert inst.upper[1] == np.inf


def test_instance_stats_counts():
    inst = make_instance(
        name="s",
        minimize=False,
        objective=[1.0, 1.0, 1.0],
        rows=[0, 1, 2],
        cols=[0, 1, 2],
        vals=[1.0, 1.0, 1.0],
        senses=["<=", ">=", "="],
        rhs=[1.0, 2.0, 3.0],
        lower=[0.0, 0.0, 0.0],
        upper=[1.0, 5.0, 5.0],
        integrality=["binary", "integer", "continuous"],
    )
    s = instance_stats(inst)
    assert (s.num_rows, s.num_cols, s.nnz) == (3, 3, 3)
    assert (s.num_binary, s.num_integer, s.num_continuous) == (1, 1, 1)
    assert (s.num_le, s.num_ge, s.num_eq) == (1, 1, 1)
