import json

import pytest

from csverify.degenerations import curve_cs_instance, cycle_graph, theta_graph
from csverify.filtration import FilteredSpace, full_subspace
from csverify.generators import GenProfile, gen_adversarial, gen_cs_instance, split_seed
from csverify.linalg import Matrix, Q, span_of_vectors
from csverify.monodromy import NilpotentOp, monodromy_filtration
from csverify.serialize import (
    SerializationError,
    centered_filtration_from_json,
    centered_filtration_to_json,
    dumps,
    filtered_space_from_json,
    filtered_space_to_json,
    graph_from_json,
    graph_to_json,
    hypothesis_report_to_json,
    instance_from_json,
    instance_to_json,
    matrix_from_json,
    matrix_to_json,
    nilpotent_from_json,
    nilpotent_to_json,
    profile_from_json,
    profile_to_json,
    q_from_str,
)
from csverify.verifier import MalformedInstanceError, check_instance_hypotheses


def test_rational_parse_and_format():
    assert q_from_str("3/4") == Q(3, 4)
    assert q_from_str("-7") == Q(-7)
    assert q_from_str(5) == Q(5)
    for bad in ("x", "1/0", "1/2/3", None, 1.5):
        with pytest.raises(SerializationError):
            q_from_str(bad)


def test_matrix_round_trip_and_shape_check():
    m = Matrix.from_rows([[Q(1, 2), 3], [0, Q(-5, 7)]])
    assert matrix_from_json(matrix_to_json(m), 2, 2) == m
    with pytest.raises(SerializationError):
        matrix_from_json(matrix_to_json(m), 3, 2)
    with pytest.raises(SerializationError):
        matrix_from_json([[]], 1, 2)


def test_filtered_space_round_trip():
    fs = FilteredSpace(3, {0: span_of_vectors([[1, 0, 0]], 3),
                           2: span_of_vectors([[1, 0, 0], [0, 1, 1]], 3),
                           5: full_subspace(3)})
    assert filtered_space_from_json(filtered_space_to_json(fs)) == fs
    assert filtered_space_from_json({"dim": 0, "steps": {}}) == FilteredSpace.zero()
    with pytest.raises(SerializationError):
        filtered_space_from_json({"steps": {}})


def test_nilpotent_round_trip():
    fs = FilteredSpace.pure(2, 0)
    op = NilpotentOp(fs, Matrix.from_rows([[0, 1], [0, 0]]))
    parsed = nilpotent_from_json(nilpotent_to_json(op))
    assert parsed.space == op.space and parsed.matrix == op.matrix


def test_centered_filtration_round_trip():
    fs = FilteredSpace.pure(2, 0)
    op = NilpotentOp(fs, Matrix.from_rows([[0, 1], [0, 0]]))
    cf = monodromy_filtration(op, 1)
    parsed = centered_filtration_from_json(centered_filtration_to_json(cf))
    assert parsed == cf


def test_graph_round_trip():
    for g in (cycle_graph(1), cycle_graph(4), theta_graph()):
        assert graph_from_json(graph_to_json(g)) == g
    custom = graph_from_json({"vertices": 2, "edges": [[0, 1], [1, 0]], "self": [-5, 1]})
    assert custom.self_intersections == (-5, 1)


def test_profile_round_trip():
    p = GenProfile(seed=42, max_dim_per_node=9, degree_range=(-2, 3),
                   weight_spread=2, broken_hypothesis="B_bound")
    assert profile_from_json(profile_to_json(p)) == p


def test_instance_round_trip_generated():
    for i in range(6):
        inst = gen_cs_instance(GenProfile(seed=split_seed(900, i), max_dim_per_node=8),
                               verify=False)
        assert instance_from_json(instance_to_json(inst)) == inst


def test_instance_round_trip_negative_degrees():
    inst = gen_cs_instance(GenProfile(seed=31, max_dim_per_node=6, degree_range=(-3, 1)),
                           verify=False)
    assert any(k < 0 for k in inst.A)
    assert instance_from_json(instance_to_json(inst)) == inst


def test_instance_round_trip_adversarial_and_fixture():
    adv = gen_adversarial(GenProfile(seed=3, broken_hypothesis="strictness"))
    assert instance_from_json(instance_to_json(adv)) == adv
    fix = curve_cs_instance(cycle_graph(3))
    parsed = instance_from_json(instance_to_json(fix))
    assert parsed == fix
    assert parsed.profile == "geometric"


def test_dumps_deterministic():
    inst = gen_cs_instance(GenProfile(seed=1, max_dim_per_node=5))
    assert dumps(instance_to_json(inst)) == dumps(instance_to_json(inst))


def test_report_json_round_trips_as_json():
    inst = gen_adversarial(GenProfile(seed=8, broken_hypothesis="column_exact"))
    payload = hypothesis_report_to_json(check_instance_hypotheses(inst))
    assert json.loads(dumps(payload)) == payload
    assert payload["clean"] is False


def test_malformed_instance_json():
    with pytest.raises(SerializationError):
        instance_from_json({"A": {}})  # no range
    with pytest.raises(SerializationError):
        instance_from_json({"range": [0, 1], "A": {"0": {"dim": 1, "steps": {}}}})
    good = instance_to_json(gen_cs_instance(GenProfile(seed=4, max_dim_per_node=4)))
    bad = json.loads(json.dumps(good))
    for fam in ("A", "B", "C", "P"):
        if bad[fam]:
            k, fs = next(iter(bad[fam].items()))
            fs["dim"] += 1  # break a shape
            with pytest.raises((SerializationError, MalformedInstanceError)):
                instance_from_json(bad)
            break
