"""Loewner pencil: closure, partitioning, assembly, realification, reduction."""

import numpy as np
import pytest

from beamloewner import (
    FrequencyDataSet,
    ImaginaryResidue,
    InconsistentConjugate,
    NodeCollision,
    OverTruncation,
    build_pencil,
    conjugate_close,
    eval_tf,
    eval_tf_grid,
    partition,
    realify,
    reduce,
    sample_grid,
    select_order,
    stagnation_index,
    svd_augmented,
    verify_pencil,
)
from beamloewner.loewner import PartitionedData

from conftest import assert_multiset_close, order6_system, random_stable_system


def fit_realified(system, nodes, r):
    """Close, split (alternate), build, realify, reduce; returns the model."""
    data = FrequencyDataSet(np.asarray(nodes, dtype=complex), system.eval_many(nodes))
    pencil = realify(build_pencil(partition(conjugate_close(data), "alternate")))
    return reduce(pencil, r=r), data


class TestConjugateClose:
    def test_single_pair(self):
        data = FrequencyDataSet(np.array([1j]), np.array([1 + 2j]))
        closed = conjugate_close(data)
        assert np.array_equal(closed.nodes, [1j, -1j])
        assert np.array_equal(closed.values, [1 + 2j, 1 - 2j])

    def test_real_node_unchanged(self):
        data = FrequencyDataSet(np.array([0.0]), np.array([3.0]))
        closed = conjugate_close(data)
        assert np.array_equal(closed.nodes, [0.0])
        assert np.array_equal(closed.values, [3.0])

    def test_beam_grid_doubles_except_zero(self, beam_small_damping):
        data = sample_grid(beam_small_damping, 0.0, 250.0, 1000)
        closed = conjugate_close(data)
        assert len(closed) == 2 * 1000 - 1  # f = 0 is self-conjugate

    def test_pairs_adjacent(self):
        data = FrequencyDataSet(np.array([1j, 3j, 0.0]), np.array([1j, 2.0, 5.0]))
        closed = conjugate_close(data)
        assert np.array_equal(closed.nodes, [1j, -1j, 3j, -3j, 0.0])

    def test_existing_consistent_partner_kept_once(self):
        data = FrequencyDataSet(
            np.array([2j, -2j]), np.array([1 + 1j, 1 - 1j])
        )
        closed = conjugate_close(data)
        assert len(closed) == 2
        assert np.array_equal(closed.nodes, [2j, -2j])

    def test_inconsistent_partner_raises(self):
        data = FrequencyDataSet(
            np.array([2j, -2j]), np.array([1 + 1j, 1 + 0.5j])
        )
        with pytest.raises(InconsistentConjugate):
            conjugate_close(data)

    def test_complex_value_at_real_node_raises(self):
        data = FrequencyDataSet(np.array([0.0]), np.array([1 + 1j]))
        with pytest.raises(InconsistentConjugate):
            conjugate_close(data)


class TestPartition:
    def test_alternate_interlaces(self):
        nodes = np.array([1.0, 2.0, 3.0, 4.0])
        data = FrequencyDataSet(nodes, nodes + 10)
        pd = partition(data, "alternate")
        assert np.array_equal(pd.mu, [1.0, 3.0])
        assert np.array_equal(pd.lam, [2.0, 4.0])
        assert np.array_equal(pd.v, [11.0, 13.0])
        assert np.array_equal(pd.w, [12.0, 14.0])

    def test_half_half(self):
        nodes = np.array([1.0, 2.0, 3.0, 4.0])
        data = FrequencyDataSet(nodes, nodes)
        pd = partition(data, "half_half")
        assert np.array_equal(pd.mu, [1.0, 2.0])
        assert np.array_equal(pd.lam, [3.0, 4.0])

    def test_odd_count(self):
        nodes = np.arange(1.0, 6.0)
        pd = partition(FrequencyDataSet(nodes, nodes), "alternate")
        assert pd.mu.size == 3 and pd.lam.size == 2

    def test_conjugate_pairs_stay_together(self):
        data = conjugate_close(
            FrequencyDataSet(np.array([0.0, 1j, 2j, 3j]), np.array([1.0, 1j, 2j, 3j]))
        )
        for scheme in ("alternate", "half_half"):
            pd = partition(data, scheme)
            for side in (pd.mu, pd.lam):
                nonreal = set(side[side.imag != 0].tolist())
                assert {np.conj(s) for s in nonreal} == nonreal

    def test_unknown_scheme(self):
        data = FrequencyDataSet(np.array([1.0, 2.0]), np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            partition(data, "thirds")

    def test_collision_detected(self):
        with pytest.raises(NodeCollision):
            PartitionedData(
                mu=np.array([1.0, 2.0]), v=np.array([1.0, 1.0]),
                lam=np.array([2.0, 3.0]), w=np.array([1.0, 1.0]),
            )


class TestBuildPencil:
    def test_constant_data(self):
        pd = PartitionedData(
            mu=np.array([1.0, 3.0]), v=np.array([5.0, 5.0]),
            lam=np.array([2.0, 4.0]), w=np.array([5.0, 5.0]),
        )
        pencil = build_pencil(pd)
        assert np.array_equal(pencil.L, np.zeros((2, 2)))
        assert np.allclose(pencil.Ls, 5.0 * np.ones((2, 2)), rtol=1e-14)

    def test_hand_example_one_over_s_plus_one(self):
        # H(s) = 1/(s+1) sampled at mu = 0, lambda = 1
        pd = PartitionedData(
            mu=np.array([0.0]), v=np.array([1.0]),
            lam=np.array([1.0]), w=np.array([0.5]),
        )
        pencil = build_pencil(pd)
        assert pencil.L[0, 0] == pytest.approx(-0.5)
        assert pencil.Ls[0, 0] == pytest.approx(0.5)
        model = reduce(pencil, r=1)
        for s in (0.0, 1.0, 2.0, 1j):
            assert eval_tf(model, s) == pytest.approx(1.0 / (s + 1.0), rel=1e-12)

    def test_hand_example_one_over_s(self):
        pd = PartitionedData(
            mu=np.array([1.0]), v=np.array([1.0]),
            lam=np.array([2.0]), w=np.array([0.5]),
        )
        pencil = build_pencil(pd)
        assert pencil.L[0, 0] == pytest.approx(-0.5)
        assert pencil.Ls[0, 0] == pytest.approx(0.0, abs=1e-15)
        model = reduce(pencil, r=1)
        for s in (1.0, 3.0, 0.5 + 2j):
            assert eval_tf(model, s) == pytest.approx(1.0 / s, rel=1e-12)


class TestVerifyPencil:
    def test_identities_hold_by_construction(self, synth6):
        nodes = 1j * np.linspace(0.5, 15.0, 20)
        data = FrequencyDataSet(nodes, synth6.eval_many(nodes))
        pencil = build_pencil(partition(conjugate_close(data), "alternate"))
        diag = verify_pencil(pencil)
        assert diag.max_residual() <= 1e-10

    def test_corruption_detected(self, synth6):
        nodes = 1j * np.linspace(0.5, 15.0, 16)
        data = FrequencyDataSet(nodes, synth6.eval_many(nodes))
        pencil = build_pencil(partition(conjugate_close(data), "alternate"))
        pencil.L[0, 0] += 1.0  # corrupt one entry
        diag = verify_pencil(pencil)
        assert diag.max_residual() > 1e-3

    def test_constant_data_degenerate_sylvester(self):
        pd = PartitionedData(
            mu=np.array([1.0]), v=np.array([2.0]),
            lam=np.array([3.0]), w=np.array([2.0]),
        )
        diag = verify_pencil(build_pencil(pd))
        # L = 0 and V 1^T - 1 W = 0: the first equation reads 0 = 0
        assert diag.sylvester_L == 0.0


class TestRealify:
    def test_real_node_passthrough(self):
        pd = PartitionedData(
            mu=np.array([0.0]), v=np.array([1.0]),
            lam=np.array([1.0]), w=np.array([0.5]),
        )
        pencil = build_pencil(pd)
        rp = realify(pencil)
        assert rp.flavor == "realified"
        assert np.array_equal(rp.L, pencil.L.real)
        assert np.array_equal(rp.M, pencil.M.real)

    def test_pair_node_block_is_rotation(self):
        s = 0.3 + 2.0j
        h = 1.5 - 0.7j
        data = conjugate_close(FrequencyDataSet(np.array([s, 5j]), np.array([h, 2j])))
        pencil = build_pencil(partition(data, "alternate"))
        rp = realify(pencil)
        expected = np.array([[s.real, s.imag], [-s.imag, s.real]])
        assert np.allclose(rp.M[:2, :2], expected, rtol=1e-14)

    def test_identities_preserved(self, beam_small_damping):
        data = conjugate_close(sample_grid(beam_small_damping, 0.0, 80.0, 60))
        pencil = build_pencil(partition(data, "alternate"))
        rp = realify(pencil)
        assert verify_pencil(rp).max_residual() <= 1e-10

    def test_spectrum_preserved(self, synth6):
        # generalized eigenvalues of (-Ls, -L) must survive realification
        nodes = 1j * np.linspace(0.5, 9.0, 6)
        data = FrequencyDataSet(nodes, synth6.eval_many(nodes))
        pencil = build_pencil(partition(conjugate_close(data), "alternate"))
        rp = realify(pencil)
        ev_complex = np.linalg.eigvals(np.linalg.solve(pencil.L, pencil.Ls))
        ev_real = np.linalg.eigvals(np.linalg.solve(rp.L, rp.Ls))
        assert_multiset_close(ev_complex, ev_real, tol=1e-8)

    def test_mispaired_data_raises(self):
        # non-closed data: a lone complex node cannot be realified
        pd = PartitionedData(
            mu=np.array([1j]), v=np.array([1 + 1j]),
            lam=np.array([2j]), w=np.array([0.5]),
        )
        with pytest.raises(ImaginaryResidue):
            realify(build_pencil(pd))

    def test_double_realify_rejected(self):
        pd = PartitionedData(
            mu=np.array([0.0]), v=np.array([1.0]),
            lam=np.array([1.0]), w=np.array([0.5]),
        )
        rp = realify(build_pencil(pd))
        with pytest.raises(ValueError):
            realify(rp)


class TestSvdAugmented:
    def test_constant_rank_one(self):
        # L = 0 and Ls = all-ones: [L, Ls] has the single singular value 4
        pd = PartitionedData(
            mu=np.array([1.0, 3.0, 5.0, 7.0]), v=np.full(4, 2.0),
            lam=np.array([2.0, 4.0, 6.0, 8.0]), w=np.full(4, 2.0),
        )
        report = svd_augmented(build_pencil(pd))
        assert report.sigma_row[0] == pytest.approx(2.0 * 4.0, rel=1e-13)
        assert np.all(report.sigma_row[1:] <= 1e-12 * report.sigma_row[0])

    def test_exact_order_visible_in_rank(self, synth6):
        nodes = 1j * np.linspace(0.3, 20.0, 25)
        data = FrequencyDataSet(nodes, synth6.eval_many(nodes))
        pencil = realify(build_pencil(partition(conjugate_close(data), "alternate")))
        report = svd_augmented(pencil)
        assert np.sum(report.sigma_col_norm > 1e-10) == synth6.order
        assert np.sum(report.sigma_row_norm > 1e-10) == synth6.order

    def test_nonincreasing(self, synth6):
        nodes = 1j * np.linspace(0.3, 20.0, 15)
        data = FrequencyDataSet(nodes, synth6.eval_many(nodes))
        report = svd_augmented(build_pencil(partition(conjugate_close(data), "alternate")))
        assert np.all(np.diff(report.sigma_row) <= 0)
        assert np.all(np.diff(report.sigma_col) <= 0)


class TestReduce:
    def test_exact_recovery_order6(self, synth6):
        nodes = 1j * np.linspace(0.5, 15.0, 40)
        model, data = fit_realified(synth6, nodes, r=6)
        assert model.order == 6
        assert not np.iscomplexobj(model.E)
        h_fit = eval_tf_grid(model, data.nodes)
        rel = np.abs(h_fit - data.values) / np.abs(data.values)
        assert rel.max() <= 1e-8

    def test_exact_recovery_random_orders(self):
        rng = np.random.default_rng(99)
        for order in (1, 2, 3, 5, 8, 10):
            system = random_stable_system(rng, order)
            n_nodes = 2 * order + 4
            nodes = 1j * np.linspace(0.4, 25.0, n_nodes)
            model, data = fit_realified(system, nodes, r=order)
            h_fit = eval_tf_grid(model, data.nodes)
            rel = np.abs(h_fit - data.values) / np.abs(data.values)
            assert rel.max() <= 1e-8, f"order {order}"

    def test_tolerance_based_selection(self, synth6):
        nodes = 1j * np.linspace(0.5, 15.0, 30)
        data = FrequencyDataSet(nodes, synth6.eval_many(nodes))
        pencil = realify(build_pencil(partition(conjugate_close(data), "alternate")))
        report = svd_augmented(pencil)
        assert select_order(report, 1e-10) == 6
        model = reduce(pencil, tol=1e-10, report=report)
        assert model.order == 6

    def test_partition_invariance_full_rank(self, synth6):
        nodes = 1j * np.linspace(0.5, 15.0, 40)
        data = FrequencyDataSet(nodes, synth6.eval_many(nodes))
        closed = conjugate_close(data)
        models = {}
        for scheme in ("alternate", "half_half"):
            pencil = realify(build_pencil(partition(closed, scheme)))
            models[scheme] = reduce(pencil, r=6)
        check = 1j * np.linspace(0.77, 14.3, 29)  # disjoint from the samples
        h_alt = eval_tf_grid(models["alternate"], check)
        h_hh = eval_tf_grid(models["half_half"], check)
        assert np.max(np.abs(h_alt - h_hh) / np.abs(h_alt)) <= 1e-6

    def test_complex_flavor_also_recovers(self, synth6):
        nodes = 1j * np.linspace(0.5, 15.0, 40)
        data = FrequencyDataSet(nodes, synth6.eval_many(nodes))
        pencil = build_pencil(partition(conjugate_close(data), "alternate"))
        model = reduce(pencil, r=6)
        h_fit = eval_tf_grid(model, data.nodes)
        assert np.max(np.abs(h_fit - data.values) / np.abs(data.values)) <= 1e-8

    def test_over_truncation(self):
        pd = PartitionedData(
            mu=np.array([1.0, 3.0, 5.0, 7.0]), v=np.full(4, 2.0),
            lam=np.array([2.0, 4.0, 6.0, 8.0]), w=np.full(4, 2.0),
        )
        pencil = build_pencil(pd)
        with pytest.raises(OverTruncation):
            reduce(pencil, r=2)  # data has rank 1

    def test_requires_exactly_one_selector(self, synth6):
        nodes = 1j * np.linspace(0.5, 15.0, 10)
        data = FrequencyDataSet(nodes, synth6.eval_many(nodes))
        pencil = build_pencil(partition(conjugate_close(data), "alternate"))
        with pytest.raises(ValueError):
            reduce(pencil)
        with pytest.raises(ValueError):
            reduce(pencil, r=2, tol=1e-8)


class TestStagnationIndex:
    def test_plateau_detected(self):
        # eight decaying values, then flat: the plateau starts at the
        # ninth singular value (1-based)
        sigma = np.concatenate([10.0 ** -np.arange(8.0), np.full(15, 1e-8)])
        assert stagnation_index(sigma) == 9

    def test_no_plateau(self):
        sigma = 10.0 ** -np.arange(30.0)
        assert stagnation_index(sigma) == 30

    def test_flat_from_start(self):
        assert stagnation_index(np.ones(20)) == 1

    def test_short_runs_ignored(self):
        # the 5-value plateau at the start is shorter than the run
        # length, so only the final flat region (from value 13 on) counts
        sigma = np.concatenate([
            np.full(5, 1.0), 10.0 ** -np.arange(1.0, 8.0), np.full(12, 1e-8)
        ])
        assert stagnation_index(sigma, run_length=10) == 13