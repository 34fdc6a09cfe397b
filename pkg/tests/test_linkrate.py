import numpy as np
import pytest

from beamswarm.channel import cascaded_spatial, realize_channels, split_phases, to_beamspace
from beamswarm.linkrate import (
    RateReport,
    SumRateEvaluator,
    evaluate_solution,
    mrt_precoder,
    sinr,
    sum_rate,
    validate_beam_set,
)
from beamswarm.pso import Solution
from beamswarm.scenario import derive_stream, make_config


class TestMrtPrecoder:
    def test_full_mask_conjugate(self):
        w = mrt_precoder(np.array([1.0, 1.0j, 0.0]), [0, 1, 2])
        assert w == pytest.approx(np.array([1.0, -1.0j, 0.0]) / np.sqrt(2))

    def test_single_beam_mask(self):
        w = mrt_precoder(np.array([3.0, 4.0]), [0])
        assert w == pytest.approx(np.array([1.0, 0.0]))

    def test_matched_filter_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            h = rng.normal(size=8) + 1j * rng.normal(size=8)
            mask = rng.choice(8, size=3, replace=False)
            w = mrt_precoder(h, mask)
            assert np.linalg.norm(w) == pytest.approx(1.0, abs=1e-12)
            assert abs(h @ w) == pytest.approx(
                np.linalg.norm(h[mask]), rel=1e-12
            )

    def test_degenerate_channel_zero_vector(self):
        h = np.array([0.0, 0.0, 1.0 + 1.0j])
        w = mrt_precoder(h, [0, 1])
        assert np.all(w == 0.0)


def test_validate_beam_set():
    assert list(validate_beam_set([3, 1], 4, 2)) == [1, 3]
    with pytest.raises(ValueError, match="unique"):
        validate_beam_set([1, 1], 4, 2)
    with pytest.raises(ValueError, match="exactly"):
        validate_beam_set([1], 4, 2)
    with pytest.raises(ValueError, match="lie in"):
        validate_beam_set([1, 4], 4, 2)


def _random_beamspace(rng, n=8, k=3):
    return rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))


class TestSinr:
    def test_single_user_matched_filter(self):
        rng = np.random.default_rng(1)
        h = _random_beamspace(rng, 6, 1)
        p = np.array([2.5])
        got = sinr(0, h, np.arange(6), p, 1e-3)
        assert got == pytest.approx(2.5 * np.linalg.norm(h) ** 2 / 1e-3, rel=1e-12)

    def test_zero_power_zero_sinr(self):
        rng = np.random.default_rng(2)
        h = _random_beamspace(rng, 6, 2)
        assert sinr(0, h, np.arange(6), np.array([0.0, 1.0]), 1e-3) == 0.0

    def test_orthogonal_masked_channels(self):
        # users live on disjoint beams, so cross terms vanish
        h = np.zeros((4, 2), dtype=complex)
        h[[0, 1], 0] = [1.0, 1.0j]
        h[[2, 3], 1] = [2.0, -1.0]
        p = np.array([3.0, 5.0])
        mask = np.arange(4)
        for k in range(2):
            expected = p[k] * np.linalg.norm(h[:, k]) ** 2 / 1e-2
            assert sinr(k, h, mask, p, 1e-2) == pytest.approx(expected, rel=1e-12)

    def test_noise_domain_error(self):
        h = _random_beamspace(np.random.default_rng(3), 4, 2)
        with pytest.raises(ValueError, match="sigma2"):
            sinr(0, h, np.arange(4), np.array([1.0, 1.0]), 0.0)


class TestSumRate:
    def test_zero_powers(self):
        h = _random_beamspace(np.random.default_rng(4), 6, 3)
        report = sum_rate(h, np.arange(6), np.zeros(3), 1e-3)
        assert report.sum_rate == 0.0
        assert np.all(report.per_ue_rate == 0.0)

    def test_single_user_closed_form(self):
        h = _random_beamspace(np.random.default_rng(5), 6, 1)
        mask = np.array([1, 4])
        p, s2 = 10.0, 1e-4
        report = sum_rate(h, mask, np.array([p]), s2)
        expected = np.log2(1 + p * np.linalg.norm(h[mask, 0]) ** 2 / s2)
        assert report.sum_rate == pytest.approx(expected, rel=1e-12)

    def test_report_invariants(self):
        rng = np.random.default_rng(6)
        h = _random_beamspace(rng, 8, 4)
        p = rng.random(4)
        report = sum_rate(h, np.array([0, 2, 5]), p, 1e-3)
        assert isinstance(report, RateReport)
        assert report.sum_rate == pytest.approx(report.per_ue_rate.sum(), rel=1e-12)
        assert np.all(report.per_ue_rate >= 0.0)
        assert np.all(report.per_ue_sinr >= 0.0)

    def test_beamspace_equals_spatial_under_full_mask(self):
        cfg = make_config(n_antennas=16, n_users=3, n_ris=2, m_total=8,
                          n_selected_beams=16)
        rng = derive_stream(cfg.rng_seed, 7)
        ch = realize_channels(cfg, rng)
        phases = rng.uniform(0, 2 * np.pi, 8)
        powers = rng.random(3)
        powers *= cfg.total_power / powers.sum()
        h_bar = cascaded_spatial(ch, phases)
        h_beam = to_beamspace(h_bar, ch.dft_matrix)
        full = np.arange(16)
        r_beam = sum_rate(h_beam, full, powers, cfg.noise_variance)
        r_spatial = sum_rate(h_bar, full, powers, cfg.noise_variance)
        assert r_beam.sum_rate == pytest.approx(r_spatial.sum_rate, rel=1e-9)
        assert r_beam.per_ue_sinr == pytest.approx(r_spatial.per_ue_sinr, rel=1e-9)

    def test_signal_norm_monotone_in_mask(self):
        rng = np.random.default_rng(8)
        h = _random_beamspace(rng, 8, 2)
        mask = [1, 3, 6]
        larger = [1, 3, 5, 6]
        for k in range(2):
            assert np.linalg.norm(h[larger, k]) >= np.linalg.norm(h[mask, k])

    def test_scale_covariance(self):
        rng = np.random.default_rng(9)
        h = _random_beamspace(rng, 8, 3)
        p = rng.random(3)
        a = sum_rate(h, [0, 1, 2, 3], p, 1e-3)
        b = sum_rate(h, [0, 1, 2, 3], 7.0 * p, 7.0 * 1e-3)
        assert a.per_ue_sinr == pytest.approx(b.per_ue_sinr, rel=1e-12)

    def test_column_phase_rotation_invariance(self):
        rng = np.random.default_rng(10)
        h = _random_beamspace(rng, 8, 3)
        p = rng.random(3)
        rotated = h.copy()
        rotated[:, 1] *= np.exp(1j * 1.234)
        a = sum_rate(h, [0, 2, 4], p, 1e-3)
        b = sum_rate(rotated, [0, 2, 4], p, 1e-3)
        assert a.sum_rate == pytest.approx(b.sum_rate, rel=1e-12)

    def test_degenerate_user_rate_zero_no_interference(self):
        # user 0 has no energy on the selected beams
        h = np.zeros((4, 2), dtype=complex)
        h[2:, 0] = [1.0, 2.0]
        h[:2, 1] = [1.0, 1.0j]
        p = np.array([5.0, 5.0])
        report = sum_rate(h, [0, 1], p, 1e-3)
        assert report.per_ue_rate[0] == 0.0
        # user 0's zero precoder must not interfere with user 1
        expected = np.log2(1 + 5.0 * 2.0 / 1e-3)
        assert report.per_ue_rate[1] == pytest.approx(expected, rel=1e-12)


def _solution_for(cfg, rng):
    n, k, m = cfg.n_antennas, cfg.n_users, cfg.total_uc
    scores = rng.random(n)
    order = np.argsort(-scores, kind="stable")[: cfg.n_selected_beams]
    powers = rng.random(k)
    powers *= cfg.total_power / powers.sum()
    return Solution(
        beam_scores=scores,
        beam_set=np.sort(order),
        powers=powers,
        phases=rng.uniform(0, 2 * np.pi, m),
    )


class TestEvaluateSolution:
    def test_composition_identity(self):
        cfg = make_config(n_antennas=8, n_users=2, n_ris=1, m_total=4,
                          n_selected_beams=8)
        ch = realize_channels(cfg, derive_stream(0, 1))
        sol = Solution(
            beam_scores=np.ones(8),
            beam_set=np.arange(8),
            powers=np.full(2, cfg.total_power / 2),
            phases=np.zeros(4),
        )
        direct = sum_rate(
            to_beamspace(ch.bs_ris[0] @ ch.ris_ue[0], ch.dft_matrix),
            np.arange(8),
            sol.powers,
            cfg.noise_variance,
        )
        assert evaluate_solution(ch, sol, cfg.noise_variance) == pytest.approx(
            direct.sum_rate, rel=1e-12
        )

    def test_against_verbatim_single_expression_oracle(self):
        # independent evaluation: explicit diagonal mask and phase matrices,
        # one expression per user, no shared library code paths
        cfg = make_config(n_antennas=4, n_users=2, n_ris=1, m_total=4,
                          n_selected_beams=2)
        ch = realize_channels(cfg, derive_stream(3, 1))
        rng = derive_stream(4, 1)
        sol = _solution_for(cfg, rng)

        u = ch.dft_matrix
        phi = np.diag(np.exp(1j * sol.phases))
        h = u @ (ch.bs_ris[0] @ phi @ ch.ris_ue[0])
        delta = np.zeros((4, 4))
        delta[sol.beam_set, sol.beam_set] = 1.0
        w = []
        for k in range(2):
            masked = delta @ h[:, k]
            w.append(masked.conj() / np.linalg.norm(masked))
        total = 0.0
        for k in range(2):
            signal = sol.powers[k] * abs(h[:, k] @ (delta @ w[k])) ** 2
            interference = sum(
                sol.powers[i] * abs(h[:, k] @ (delta @ w[i])) ** 2
                for i in range(2)
                if i != k
            )
            total += np.log2(1 + signal / (interference + cfg.noise_variance))
        assert evaluate_solution(ch, sol, cfg.noise_variance) == pytest.approx(
            total, rel=1e-10
        )

    def test_user_permutation_symmetry(self):
        cfg = make_config(n_antennas=8, n_users=3, n_ris=2, m_total=6,
                          n_selected_beams=4)
        ch = realize_channels(cfg, derive_stream(5, 1))
        rng = derive_stream(6, 1)
        sol = _solution_for(cfg, rng)
        perm = np.array([2, 0, 1])
        from beamswarm.channel import ChannelSet

        permuted = ChannelSet(
            ch.bs_ris,
            tuple(g[:, perm] for g in ch.ris_ue),
            ch.dft_matrix,
        )
        sol_perm = Solution(sol.beam_scores, sol.beam_set, sol.powers[perm],
                            sol.phases)
        h = to_beamspace(cascaded_spatial(ch, sol.phases), ch.dft_matrix)
        h_perm = to_beamspace(cascaded_spatial(permuted, sol.phases), ch.dft_matrix)
        r = sum_rate(h, sol.beam_set, sol.powers, cfg.noise_variance)
        r_perm = sum_rate(h_perm, sol.beam_set, sol.powers[perm], cfg.noise_variance)
        assert r_perm.per_ue_rate == pytest.approx(r.per_ue_rate[perm], rel=1e-12)
        assert r_perm.sum_rate == pytest.approx(r.sum_rate, rel=1e-12)
        assert evaluate_solution(permuted, sol_perm, cfg.noise_variance) == (
            pytest.approx(evaluate_solution(ch, sol, cfg.noise_variance), rel=1e-12)
        )


class TestSumRateEvaluator:
    def test_matches_reference_path_on_batches(self):
        cfg = make_config(n_antennas=8, n_users=3, n_ris=2, m_total=10,
                          n_selected_beams=4)
        ch = realize_channels(cfg, derive_stream(7, 1))
        ev = SumRateEvaluator(ch)
        rng = derive_stream(8, 1)
        batch = 5
        phases = rng.uniform(0, 2 * np.pi, (10, batch))
        powers = rng.random((3, batch))
        powers *= cfg.total_power / powers.sum(axis=0, keepdims=True)
        beam_sets = np.stack(
            [np.sort(rng.choice(8, size=4, replace=False)) for _ in range(batch)],
            axis=1,
        )
        got = ev.sum_rates(phases, beam_sets, powers, cfg.noise_variance)
        for a in range(batch):
            sol = Solution(
                beam_scores=np.zeros(8),
                beam_set=beam_sets[:, a],
                powers=powers[:, a],
                phases=phases[:, a],
            )
            want = evaluate_solution(ch, sol, cfg.noise_variance)
            assert got[a] == pytest.approx(want, rel=1e-10)

    def test_beamspace_channels_match_composition(self):
        cfg = make_config(n_antennas=8, n_users=2, n_ris=2, m_total=6,
                          n_selected_beams=4)
        ch = realize_channels(cfg, derive_stream(9, 1))
        ev = SumRateEvaluator(ch)
        phases = derive_stream(10, 1).uniform(0, 2 * np.pi, 6)
        h = ev.beamspace_channels(phases)[0]  # (K, N)
        want = to_beamspace(cascaded_spatial(ch, phases), ch.dft_matrix)
        assert h.T == pytest.approx(want, rel=1e-10)

    def test_degenerate_column_handled(self):
        # hand-built channels where both users vanish on the selected beams
        from beamswarm.channel import ChannelSet

        n, m = 4, 2
        c = np.zeros((n, m), dtype=complex)
        c[2, 0] = 1.0
        c[3, 1] = 1.0
        g = np.array([[0.0, 1.0], [0.0, 1.0j]])
        ch = ChannelSet((c,), (g,), np.eye(n, dtype=complex))
        ev = SumRateEvaluator(ch)
        q = ev.sum_rates(
            np.zeros((2, 1)),
            np.array([[0], [1]]),
            np.full((2, 1), 1.0),
            1e-3,
        )
        assert q[0] == 0.0  # both users land on unselected beams -> rates 0

    def test_noise_domain_error(self):
        cfg = make_config(n_antennas=4, n_users=2, n_ris=1, m_total=2,
                          n_selected_beams=2)
        ch = realize_channels(cfg, derive_stream(11, 1))
        ev = SumRateEvaluator(ch)
        with pytest.raises(ValueError, match="noise_variance"):
            ev.sum_rates(np.zeros((2, 1)), np.array([[0], [1]]),
                         np.ones((2, 1)), -1.0)
