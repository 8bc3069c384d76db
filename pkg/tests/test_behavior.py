import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import RULES, rule_box
from postselect.behavior import (
    Behavior,
    JointDist,
    canonical,
    effective_prior,
    from_joint,
    load_box,
    marginal_pair,
    mix,
    output_marginal,
    parse_box_name,
    signaling_deviation,
    to_joint,
    white_noise,
)
from postselect.errors import ShapeError, UndefinedSettingError
from postselect.published import PRINTED, from_printed, printed_mixture, published_box, to_printed

CANON = {"WN": "I", "LV": "II", "SINGLET": "III", "PR": "IV", "NL": "VI"}


@pytest.mark.parametrize("name", sorted(RULES))
def test_canonical_matches_rule(name):
    box = canonical(name)
    want = rule_box(RULES[name])
    for (x, y, u, v), p in want.items():
        assert box[(x, y), (u, v)] == pytest.approx(p, abs=1e-12)


@pytest.mark.parametrize("name,table", sorted(CANON.items()))
def test_canonical_matches_printed_table(name, table):
    assert np.abs(canonical(name).table - published_box(table).table).max() < 1e-12


def test_printed_layout_roundtrip():
    rng = np.random.default_rng(1)
    t = rng.random((4, 4))
    assert np.array_equal(to_printed(from_printed(t)), t)
    # Table II: u = v = 0 deterministically sits in printed row (y, v) = (0, 0), columns (x, u) = (0, 0), (1, 0)
    lv = from_printed(PRINTED["II"])
    assert lv[0, 0] == 1 and lv[2, 0] == 1


@pytest.mark.parametrize("name", sorted(RULES))
def test_canonical_no_signaling(name):
    assert signaling_deviation(canonical(name)) < 1e-12


def test_mixture_is_normalized_and_matches_printed_ratio():
    for c in (0.0, 0.25, 0.5, 0.75, 1.0):
        box = canonical("BCHSH-MIX", c)
        assert np.allclose(box.table.sum(axis=1), 1.0)
        # the printed table shows (1 +- c)/2 in the nonzero pattern; ours is half of that
        assert np.allclose(box.table * 2, from_printed(printed_mixture("V", c)))


def test_mixture_needs_weight():
    with pytest.raises(ValueError):
        canonical("BCHSH-MIX")
    with pytest.raises(ValueError):
        canonical("NLMIX", 1.5)
    with pytest.raises(ValueError):
        canonical("nope")


@pytest.mark.parametrize(
    "table",
    [np.zeros((3, 4)), np.full((4, 4), 0.3), -np.eye(4) + 0.5],
)
def test_invalid_tables_rejected(table):
    with pytest.raises(ValueError):
        Behavior.full(table)


def test_shape_error_is_value_error():
    with pytest.raises(ShapeError):
        Behavior(2, np.zeros((8, 8)), np.ones(8, bool))


def test_undefined_setting_must_be_empty():
    t = np.full((4, 4), 0.25)
    with pytest.raises(ValueError):
        Behavior(2, t, np.array([True, True, True, False]))
    t[3] = 0
    b = Behavior(2, t, np.array([True, True, True, False]))
    assert not b.is_full
    with pytest.raises(UndefinedSettingError):
        b.require_full()


def test_table_is_read_only():
    b = canonical("PR")
    with pytest.raises(ValueError):
        b.table[0, 0] = 1.0


def test_json_roundtrip_with_undefined(tmp_path):
    t = np.zeros((4, 4))
    t[0, 0] = 1
    t[2] = 0.25
    b = Behavior(2, t, np.array([True, False, True, False]))
    d = b.to_dict()
    assert d["settings"][1] is None
    back = Behavior.from_json(b.to_json())
    assert back.allclose(b)
    path = tmp_path / "box.json"
    path.write_text(b.to_json())
    assert load_box(str(path)).allclose(b)


@pytest.mark.parametrize("bad", [
    {"parties": 2, "settings": [[1, 0, 0, 0]] * 3},
    {"parties": 2, "settings": [[1, 0, 0]] * 4},
    {"parties": 4, "settings": []},
])
def test_from_dict_rejects_bad_shapes(bad):
    with pytest.raises(ValueError):
        Behavior.from_dict(bad)


def test_parse_box_name():
    assert parse_box_name("wn3").parties == 3
    assert parse_box_name("bchsh-mix:0.5").allclose(canonical("BCHSH-MIX", 0.5))
    assert parse_box_name("PR").allclose(canonical("PR"))


def test_white_noise_tripartite():
    w3 = white_noise(3)
    assert w3.table.shape == (8, 8)
    assert np.all(w3.table == 0.125)


def test_marginal_pair_of_uniform_is_white_noise():
    for keep in ((0, 1), (0, 2), (1, 2)):
        assert marginal_pair(white_noise(3), keep).allclose(canonical("WN"))


def test_marginal_pair_of_product():
    # three-party box whose first two parties hold a PR box and the third outputs w = z
    pr = canonical("PR").table
    t = np.zeros((8, 8))
    for s in range(8):
        x, y, z = s >> 2, (s >> 1) & 1, s & 1
        for o in range(8):
            u, v, w = o >> 2, (o >> 1) & 1, o & 1
            t[s, o] = pr[2 * x + y, 2 * u + v] * (w == z)
    box = Behavior.full(t)
    assert marginal_pair(box, (0, 1)).allclose(canonical("PR"))
    with pytest.raises(ShapeError):
        marginal_pair(canonical("PR"))


def test_output_marginal_and_prior():
    pr = canonical("PR")
    assert np.allclose(output_marginal(pr, 0, 1, 1), [0.5, 0.5])
    assert np.allclose(output_marginal(white_noise(3), 2, 0, (1, 1)), [0.5, 0.5])
    t = np.zeros((4, 4))
    t[0, 0] = 1
    partial = Behavior(2, t, np.array([True, False, False, False]))
    assert np.allclose(effective_prior(partial), [1, 0, 0, 0])
    with pytest.raises(UndefinedSettingError):
        output_marginal(partial, 0, 1, 1)


def test_joint_roundtrip():
    j = to_joint(canonical("SINGLET"))
    assert isinstance(j, JointDist)
    assert j.variables == ("x", "y", "u", "v")
    assert math.isclose(j.mass.sum(), 1.0)
    assert from_joint(j).allclose(canonical("SINGLET"))


@st.composite
def boxes(draw):
    rows = []
    for _ in range(4):
        w = draw(st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4))
        rows.append(np.array(w) / sum(w))
    return Behavior.full(np.array(rows))


@settings(max_examples=60, deadline=None)
@given(boxes(), boxes(), st.floats(0, 1))
def test_mix_stays_a_box(a, b, w):
    m = mix(a, b, w)
    assert np.allclose(m.table.sum(axis=1), 1.0)
    assert np.allclose(m.table, w * a.table + (1 - w) * b.table)


@settings(max_examples=60, deadline=None)
@given(boxes())
def test_json_roundtrip_property(box):
    assert Behavior.from_dict(json.loads(box.to_json())).allclose(box, 0.0)
