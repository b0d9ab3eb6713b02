"""Estimator arithmetic on hand-built samples."""

import numpy as np
import pytest

from _helpers import build_network, build_sample, rdsi_oracle_sample
from rdslab.errors import ValidationError
from rdslab.estimate import (
    ego_matrix,
    estimate_all,
    mean_degree_estimate,
    observed_matrix,
    rdsi,
    rdsi_ego,
    rdsi_from_parts,
    rdsii,
    sample_proportion,
)
from rdslab.netcore import Group
from rdslab.rdssim import RdsConfig, run_rds


def seeded_chain(groups, degrees=None, shares=None):
    """One seed followed by a single chain with the given non-seed groups."""
    rows = [(0, -1, 0, 2, 1, 1)]
    for k, g in enumerate(groups):
        d = 2 if degrees is None else degrees[k]
        if shares is None:
            na = d // 2
        else:
            na = shares[k]
        rows.append((k + 1, k, g, d, na, d - na))
    return build_sample(rows)


class TestSampleProportion:
    def test_all_a(self):
        assert sample_proportion(seeded_chain([0, 0, 0])) == 1.0

    def test_balanced(self):
        assert sample_proportion(seeded_chain([0, 1, 0, 1])) == 0.5

    def test_seeds_never_count(self):
        # The seed is group A; only the single B non-seed counts.
        assert sample_proportion(seeded_chain([1])) == 0.0

    def test_requires_nonseed(self):
        with pytest.raises(ValidationError):
            sample_proportion(build_sample([(0, -1, 0, 2, 1, 1)]))

    def test_complete_graph_mean_recovers_share(self):
        # Uniform inclusion: recruitment on a complete graph keeps every
        # subset equally likely, so the average composition is the truth.
        n = 20
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
        groups = [0] * 6 + [1] * 14
        net = build_network(edges, groups)
        cfg = RdsConfig(n_seeds=2, coupons=2, target_size=10)
        reps = 4000
        vals = np.empty(reps)
        for r in range(reps):
            vals[r] = sample_proportion(run_rds(net, cfg, 40_000 + r))
        assert abs(vals.mean() - 0.3) <= 0.01


class TestObservedMatrix:
    def test_single_group_chain(self):
        m = observed_matrix(seeded_chain([0, 0, 0]))
        assert m.s_aa == 1.0 and m.s_ab == 0.0
        assert m.s_ba is None and not m.row_b_defined

    def test_hand_counted_mix(self):
        # Non-seed recruitments A to B, A to A, and B to A.
        rows = [
            (0, -1, 0, 2, 1, 1),  # seed
            (1, 0, 0, 2, 1, 1),   # A1 (edge from seed excluded)
            (2, 1, 1, 2, 1, 1),   # B1 by A1
            (2, 1, 0, 2, 1, 1),   # A2 by A1
            (3, 2, 0, 2, 1, 1),   # A3 by B1
        ]
        m = observed_matrix(build_sample(rows))
        assert m.s_ab == 0.5 and m.s_aa == 0.5
        assert m.s_ba == 1.0 and m.s_bb == 0.0

    def test_seed_recruitments_are_excluded(self):
        # The seed's own A-to-B link may not leak into the matrix.
        rows = [
            (0, -1, 0, 2, 1, 1),  # seed A
            (1, 0, 1, 2, 1, 1),   # B1 by the seed
            (2, 1, 1, 2, 1, 1),   # B2 by B1
        ]
        m = observed_matrix(build_sample(rows))
        assert m.s_ab is None
        assert m.s_bb == 1.0


class TestMeanDegree:
    def test_two_degrees(self):
        sample = seeded_chain([0, 0], degrees=[2, 4])
        assert mean_degree_estimate(sample, Group.A) == pytest.approx(8 / 3, rel=1e-14)

    def test_equal_degrees_identity(self):
        sample = seeded_chain([1, 1, 1], degrees=[6, 6, 6])
        assert mean_degree_estimate(sample, Group.B) == 6.0

    def test_single_member(self):
        sample = seeded_chain([1], degrees=[1], shares=[1])
        assert mean_degree_estimate(sample, Group.B) == 1.0

    def test_empty_group_rejected(self):
        with pytest.raises(ValidationError):
            mean_degree_estimate(seeded_chain([0, 0]), Group.B)


class TestRdsi:
    def test_from_parts_oracle(self):
        est = rdsi_from_parts(0.5, 0.5, 8 / 3, 1.5)
        assert est == pytest.approx(0.36, rel=1e-12)

    def test_from_parts_undefined_without_cross_links(self):
        assert rdsi_from_parts(0.0, 0.0, 3.0, 3.0) is None

    def test_end_to_end_oracle_sample(self):
        assert rdsi(rdsi_oracle_sample()) == pytest.approx(0.36, rel=1e-12)

    def test_single_group_boundaries(self):
        assert rdsi(seeded_chain([0, 0])) == 1.0
        assert rdsi(seeded_chain([1, 1])) == 0.0

    def test_no_cross_recruitment_is_undefined(self):
        # Both groups present but recruitment never crosses: two seeds
        # each recruiting within their own group.
        rows = [
            (0, -1, 0, 2, 1, 1),
            (0, -1, 1, 2, 1, 1),
            (1, 0, 0, 2, 1, 1),
            (1, 1, 1, 2, 1, 1),
            (2, 2, 0, 2, 1, 1),
            (2, 3, 1, 2, 1, 1),
        ]
        assert rdsi(build_sample(rows)) is None


class TestRdsii:
    def test_oracle_sample(self):
        assert rdsii(rdsi_oracle_sample()) == pytest.approx(0.36, rel=1e-12)

    def test_equal_degrees_reduce_to_sample_proportion(self):
        sample = seeded_chain([0, 1, 1, 0, 1], degrees=[4] * 5)
        assert rdsii(sample) == sample_proportion(sample)

    def test_all_b(self):
        assert rdsii(seeded_chain([1, 1])) == 0.0


class TestEgoMatrix:
    def test_one_term(self):
        sample = seeded_chain([0], degrees=[4], shares=[1])
        assert ego_matrix(sample).s_ab == pytest.approx(0.75)

    def test_two_term_average(self):
        sample = seeded_chain([0, 0], degrees=[2, 4], shares=[1, 3])
        assert ego_matrix(sample).s_ab == pytest.approx((0.5 + 0.25) / 2)

    def test_rows_sum_to_one_exactly(self):
        m = ego_matrix(rdsi_oracle_sample())
        assert m.s_aa + m.s_ab == 1.0
        assert m.s_ba + m.s_bb == 1.0

    def test_missing_group_row(self):
        m = ego_matrix(seeded_chain([0, 0]))
        assert m.s_ba is None and m.s_ab is not None


class TestRdsiEgo:
    def test_substitution_identity(self):
        # Reported shares equal to the observed recruitment proportions
        # collapse the ego variant onto the recruitment-based estimate.
        rows = [
            (0, -1, 0, 2, 1, 1),
            (1, 0, 0, 2, 1, 1),   # A1: one A and one B alter, share 0.5
            (2, 1, 1, 2, 2, 0),   # B1 by A1: both alters A, share 1.0
            (2, 1, 0, 2, 1, 1),   # A2 by A1
            (3, 2, 0, 2, 1, 1),   # A3 by B1
        ]
        sample = build_sample(rows)
        m_obs = observed_matrix(sample)
        m_ego = ego_matrix(sample)
        assert m_ego.s_ab == m_obs.s_ab and m_ego.s_ba == m_obs.s_ba
        assert rdsi_ego(sample) == rdsi(sample)

    def test_symmetric_pair(self):
        rows = [
            (0, -1, 0, 2, 1, 1),
            (1, 0, 0, 2, 1, 1),
            (2, 1, 1, 2, 1, 1),
        ]
        assert rdsi_ego(build_sample(rows)) == pytest.approx(0.5, rel=1e-12)


class TestEstimateAll:
    def test_full_set_on_oracle_sample(self):
        est = estimate_all(rdsi_oracle_sample())
        d = est.to_dict()
        assert d["rdsi"] == pytest.approx(0.36, rel=1e-12)
        assert d["rdsii"] == pytest.approx(0.36, rel=1e-12)
        assert d["sample"] == 0.5
        assert d["s_ab"] == 0.5 and d["s_ba"] == 0.5
        assert d["mean_degree_a"] == pytest.approx(8 / 3, rel=1e-14)
        assert d["mean_degree_b"] == pytest.approx(1.5, rel=1e-14)
        assert est.n_nonseed == 8

    def test_seed_attributes_are_irrelevant(self):
        base = rdsi_oracle_sample()
        rows = [
            (0, -1, 1, 9, 0, 9),  # same seeds, wildly different fields
            (0, -1, 0, 7, 7, 0),
        ]
        mutated = build_sample(
            rows
            + [
                (
                    int(base.wave[i]),
                    int(base.recruiter_index[i]),
                    int(base.true_group[i]),
                    int(base.reported_degree[i]),
                    int(base.reported_n_a[i]),
                    int(base.reported_n_b[i]),
                )
                for i in range(2, base.size)
            ]
        )
        assert estimate_all(mutated).to_dict() == estimate_all(base).to_dict()

    def test_scale_invariance(self):
        base = rdsi_oracle_sample()
        c = 3
        scaled = build_sample(
            [
                (
                    int(base.wave[i]),
                    int(base.recruiter_index[i]),
                    int(base.true_group[i]),
                    c * int(base.reported_degree[i]),
                    c * int(base.reported_n_a[i]),
                    c * int(base.reported_n_b[i]),
                )
                for i in range(base.size)
            ]
        )
        a = estimate_all(base)
        b = estimate_all(scaled)
        assert b.rdsii == pytest.approx(a.rdsii, rel=1e-12)
        assert b.rdsi == pytest.approx(a.rdsi, rel=1e-12)
        assert b.rdsi_ego == pytest.approx(a.rdsi_ego, rel=1e-12)
        assert b.s_ego.s_ab == pytest.approx(a.s_ego.s_ab, rel=1e-12)
        assert b.mean_degree_a == pytest.approx(c * a.mean_degree_a, rel=1e-12)

    def test_single_group_degree_sentinel(self):
        est = estimate_all(seeded_chain([0, 0]))
        assert est.mean_degree_b is None
        assert est.rdsi == 1.0
