import json
import os
from dataclasses import replace

import numpy as np
import pytest

from milpeval._seeds import derive_seed
from milpeval.errors import InvalidConfig
from milpeval.generators import (
    FAMILIES,
    GENERATOR_VERSION,
    GenParams,
    default_params,
    generate_batch,
    generate_instance,
)
from milpeval.io import read_instance

SMALL = {
    "sc": dict(constraints_range=(8, 14), variables_range=(15, 25), density_range=(0.15, 0.3)),
    "ca": dict(constraints_range=(8, 14), variables_range=(15, 25), density_range=(0.15, 0.3)),
    "is": dict(variables_range=(14, 20), density_range=(0.15, 0.3)),
    "cfl": dict(constraints_range=(4, 7)),
}


def small(family, seed=0):
    return replace(GenParams(family=family, **SMALL[family]), seed=seed)


def test_families_tuple():
    assert FAMILIES == ("sc", "ca", "cfl", "is")


def test_default_ranges_follow_size_table():
    p = default_params("sc")
    assert p.constraints_range == (200, 800)
    assert p.variables_range == (400, 1600)
    assert p.density_range == (0.05, 0.2)
    p = default_params("ca")
    assert p.constraints_range == (50, 200)
    assert p.variables_range == (80, 600)
    assert p.density_range == (0.02, 0.1)
    p = default_params("cfl")
    assert p.constraints_range == (50, 150)
    assert p.facility_ratio == 0.5
    p = default_params("is")
    assert p.variables_range == (480, 520)
    assert p.density_range == (0.01, 0.015)


def test_set_cover_structure():
    inst, meta = generate_instance(small("sc", seed=2))
    m, n = inst.num_rows, inst.num_cols
    assert (m, n) == (meta["rows"], meta["columns"])
    assert inst.minimize is True
    assert set(inst.senses) == {">="}
    assert np.all(inst.rhs == 1.0)
    assert np.all(inst.vals == 1.0)
    assert inst.integrality == ["binary"] * n
    assert np.all(inst.objective >= 1)
    # The repair pass guarantees every row is coverable.
    assert set(range(m)) == set(int(r) for r in inst.rows)


def test_set_cover_rows_covered_across_seeds():
    for seed in range(30):
        inst, _ = generate_instance(small("sc", seed=seed))
        assert len(set(int(r) for r in inst.rows)) == inst.num_rows


def test_independent_set_structure():
    inst, meta = generate_instance(small("is", seed=4))
    n = inst.num_cols
    assert n == meta["nodes"]
    assert inst.num_rows == meta["edges"]
    assert inst.minimize is False
    assert np.all(inst.objective == 1.0)
    assert inst.integrality == ["binary"] * n
    # Every row is x_u + x_v <= 1 over two distinct nodes.
    assert inst.nnz == 2 * inst.num_rows
    for r in range(inst.num_rows):
        members = inst.cols[inst.rows == r]
        assert len(members) == 2
        assert members[0] != members[1]
    # No duplicate edges.
    pairs = {tuple(sorted(inst.cols[inst.rows == r])) for r in range(inst.num_rows)}
    assert len(pairs) == inst.num_rows


def test_combinatorial_auction_structure():
    inst, meta = generate_instance(small("ca", seed=5))
    assert inst.minimize is False
    assert inst.num_cols == meta["bids"]
    assert set(inst.senses) == {"<="}
    assert np.all(inst.rhs == 1.0)
    # Item rows carry no gaps: every row has at least one bid.
    counts = np.bincount(inst.rows, minlength=inst.num_rows)
    assert counts.min() >= 1
    # Every bid asks for the same number of items.
    bid_counts = np.bincount(inst.cols, minlength=inst.num_cols)
    assert bid_counts.max() == bid_counts.min() == meta["bid_size"]


def test_cfl_structure():
    inst, meta = generate_instance(small("cfl", seed=6))
    c, f = meta["customers"], meta["facilities"]
    assert inst.num_cols == f + c * f
    assert inst.num_rows == c + f + c * f
    assert inst.minimize is True
    assert inst.integrality[:f] == ["binary"] * f
    assert inst.integrality[f:] == ["continuous"] * (c * f)
    assert inst.senses[:c] == ["="] * c
    assert inst.senses[c:] == ["<="] * (f + c * f)
    # Total capacity carries a margin over total demand.
    demand_rows = inst.rhs[:c]
    assert np.all(demand_rows == 1.0)


def test_generation_deterministic():
    for family in FAMILIES:
        a, _ = generate_instance(small(family, seed=9))
        b, _ = generate_instance(small(family, seed=9))
        assert a == b
        c, _ = generate_instance(small(family, seed=10))
        assert a != c


def test_params_validation():
    with pytest.raises(InvalidConfig):
        GenParams(family="knapsack")
    with pytest.raises(InvalidConfig):
        GenParams(family="sc", constraints_range=(0, 5))
    with pytest.raises(InvalidConfig):
        GenParams(family="sc", constraints_range=(9, 5))
    with pytest.raises(InvalidConfig):
        GenParams(family="sc", density_range=(0.0, 0.5))
    with pytest.raises(InvalidConfig):
        GenParams(family="sc", density_range=(0.5, 1.5))
    with pytest.raises(InvalidConfig):
        GenParams(family="sc", value_range=(0, 10))
    with pytest.raises(InvalidConfig):
        GenParams(family="cfl", facility_ratio=0.0)


def test_batch_writes_files_and_meta(tmp_path):
    out = tmp_path / "batch"
    paths = generate_batch("sc", 5, 42, out, params=small("sc"))
    assert [os.path.basename(p) for p in paths] == [f"sc_{i}.mps" for i in range(5)]
    meta = json.loads((out / "gen_meta.json").read_text())
    assert meta["family"] == "sc"
    assert meta["generator_version"] == GENERATOR_VERSION
    assert meta["root_seed"] == 42
    assert meta["count"] == 5
    assert len(meta["instances"]) == 5
    for i, entry in enumerate(meta["instances"]):
        assert entry["name"] == f"sc_{i}"
        assert entry["seed"] == derive_seed(42, i)


def test_batch_byte_identical_across_runs(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    generate_batch("ca", 4, 7, a, params=small("ca"))
    generate_batch("ca", 4, 7, b, params=small("ca"))
    for name in sorted(os.listdir(a)):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_batch_slice_regenerable(tmp_path):
    out = tmp_path / "full"
    generate_batch("is", 6, 99, out, params=small("is"))
    inst3 = read_instance(out / "is_3.mps")
    # Instance 3 regenerates alone from its derived seed.
    again, _ = generate_instance(replace(small("is"), seed=derive_seed(99, 3)))
    again.name = "is_3"
    assert again == inst3


def test_batch_validation(tmp_path):
    with pytest.raises(InvalidConfig):
        generate_batch("sc", 0, 1, tmp_path / "x")
    with pytest.raises(InvalidConfig):
        generate_batch("sc", 2, 1, tmp_path / "y", params=small("ca"))


def test_derive_seed_properties():
    assert derive_seed(1, 0) == derive_seed(1, 0)
    assert derive_seed(1, 0) != derive_seed(1, 1)
    assert derive_seed(1, 0) != derive_seed(2, 0)
    assert 0 <= derive_seed(123, 456) < 2**63
