import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rotvort import resonance
from rotvort.linstab import R_MINUS, R_PLUS, eigenvalues_closed
from rotvort.model import ModelParams


def test_first_member_of_family_is_the_boundary():
    assert resonance.resonance_bn(1) == [R_MINUS, R_PLUS]


@pytest.mark.parametrize("n", [2, 3, 5])
def test_family_points_are_resonant(n):
    # each member makes omega_56 = n omega_34, whatever gamma
    pts = resonance.resonance_bn(n)
    assert pts
    for g in (1.1, 9 / 7, 1.9):
        for r in pts:
            w = resonance.pair_frequencies(r, g)
            assert abs(w[2] - n * w[1]) < 1e-10 * np.max(w)


def test_gamma2_family_hit_verified():
    r = resonance.resonance_bn(4, gamma2_family=True)
    assert any(abs(x + 0.2057) < 1e-3 for x in r)


def test_relations_are_normalised():
    rels = resonance.relations(3)
    assert len(rels) == len(set(rels))
    for m in rels:
        assert 2 <= sum(map(abs, m)) <= 3
        assert np.gcd.reduce(np.abs(m)) == 1
        assert next(v for v in m if v != 0) > 0


def test_frozen_low_order_hits_in_cyclonic_left_interval():
    hits = [h for h in resonance.resonance_scan(ModelParams(), 3) if h.in_sigma_plus]
    pos = sorted(round(h.b_star_over_l, 5) for h in hits)
    assert pos == [-0.2, -0.16757]
    assert all(abs(h.b_star_over_l - R_MINUS) < 0.05 for h in hits)


def test_hits_satisfy_relation_in_sorted_frequencies():
    for h in resonance.resonance_scan(ModelParams(), 4):
        w = eigenvalues_closed(h.b_star_over_l, ModelParams(l=1.0)).omegas
        assert abs(np.dot(h.relation, w)) < 1e-8 * np.max(w)


def test_accumulation_near_left_boundary():
    counts = [len(resonance.hits_near(resonance.resonance_scan(ModelParams(), n), R_MINUS, 0.05)) for n in (2, 3, 4)]
    assert counts == sorted(counts) and counts[-1] > counts[0]


@given(st.floats(1.01, 1.99))
def test_gamma_free_hits_do_not_move(g):
    ref = [(h.pair_relation, h.b_star_over_l) for h in resonance.resonance_scan(ModelParams(), 4) if not h.gamma_dependent]
    got = [(h.pair_relation, h.b_star_over_l) for h in resonance.resonance_scan(ModelParams(gamma=g), 4) if not h.gamma_dependent]
    assert [m for m, _ in got] == [m for m, _ in ref]
    np.testing.assert_allclose([r for _, r in got], [r for _, r in ref], rtol=0, atol=1e-10)


def test_csv(tmp_path):
    hits = resonance.resonance_scan(ModelParams(), 2)
    resonance.write_hits_csv(hits, tmp_path / "h.csv")
    lines = open(tmp_path / "h.csv").read().splitlines()
    assert lines[0] == "b_star_over_l,k1,k2,k3,order,gamma"
    assert len(lines) == len(hits) + 1


def test_bad_order_rejected():
    with pytest.raises(ValueError):
        resonance.resonance_scan(ModelParams(), 5)
