import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from conftest import AB
from hbsa.hilbert import (
    ATOL,
    PHI_MINUS,
    PHI_PLUS,
    PSI_MINUS,
    PSI_PLUS,
    Dof,
    PhotonId,
    QubitAddress,
    basis_state,
    bell_state,
    equal_up_to_global_phase,
    tensor,
)
from hbsa.elements import bs_hadamard
from hbsa.kerr import (
    Coupling,
    HomodyneModel,
    KerrParams,
    ModelViolation,
    ProbeId,
    ProbeOutcome,
    TaggedState,
    apply_couplings,
    attach_probes,
    couplings_for,
    cross_kerr,
    error_probability,
    homodyne_x,
    misclassification_rate,
    standard_couplings,
    strip_probes,
)

A, B = PhotonId.A, PhotonId.B
IDEAL = HomodyneModel.ideal()
P2_COUPLINGS = [Coupling(ProbeId.P2, A, Dof.S, 1, +1), Coupling(ProbeId.P2, B, Dof.S, 1, -1)]


def quad_error(theta, alpha):
    """Misread probability of the unshifted class, by direct integration of its x density."""
    mean0 = 2 * alpha
    threshold = alpha * (1 + math.cos(theta))
    val, _ = integrate.quad(lambda x: math.exp(-0.5 * (x - mean0) ** 2) / math.sqrt(2 * math.pi), -np.inf, threshold)
    return val


class TestProbes:
    def test_attach_zero_tags(self):
        s = bell_state(PSI_PLUS, Dof.S, AB)
        t = attach_probes(s)
        assert not t.tags.any()
        assert t.base.norm() == pytest.approx(1.0, abs=ATOL)
        assert strip_probes(t) is s

    def test_strip_refuses_live_tags(self):
        t = apply_couplings(attach_probes(bell_state(PSI_PLUS, Dof.S, AB)), P2_COUPLINGS)
        with pytest.raises(ValueError):
            strip_probes(t)

    def test_unmatched_branch_untouched(self):
        s = basis_state([QubitAddress(A, Dof.S)], [0])
        t = cross_kerr(attach_probes(s), Coupling(ProbeId.P1, A, Dof.S, 1, +1))
        assert t.tags[0, ProbeId.P1] == 0
        assert t.tags[1, ProbeId.P1] == 1

    def test_psi_branches_opposite_sign(self):
        t = apply_couplings(attach_probes(bell_state(PSI_PLUS, Dof.S, AB)), P2_COUPLINGS)
        # index 0b01 = |rl>, 0b10 = |lr>
        assert t.tags[0b01, ProbeId.P2] == -1
        assert t.tags[0b10, ProbeId.P2] == +1

    def test_phi_branches_cancel(self):
        t = apply_couplings(attach_probes(bell_state(PHI_PLUS, Dof.S, AB)), P2_COUPLINGS)
        # |rr> and |ll>: 0 and +1 - 1
        assert t.tags[0b00, ProbeId.P2] == 0
        assert t.tags[0b11, ProbeId.P2] == 0

    def test_amplitudes_untouched(self):
        s = bell_state(PSI_MINUS, Dof.F, AB)
        t = apply_couplings(attach_probes(s), couplings_for(ProbeId.P1))
        np.testing.assert_array_equal(t.base.amplitudes, s.amplitudes)

    def test_missing_qubit(self):
        with pytest.raises(ValueError):
            cross_kerr(attach_probes(bell_state(PHI_PLUS, Dof.P, AB)), P2_COUPLINGS[0])

    def test_tag_bound(self):
        s = basis_state([QubitAddress(A, Dof.S), QubitAddress(B, Dof.S)], [1, 1])
        c = [Coupling(ProbeId.P1, A, Dof.S, 1, +1), Coupling(ProbeId.P1, B, Dof.S, 1, +1)]
        t = apply_couplings(attach_probes(s), c)
        with pytest.raises(ModelViolation):
            homodyne_x(t, ProbeId.P1, IDEAL, np.random.default_rng(0))
        with pytest.raises(ModelViolation):
            cross_kerr(t, c[0])


class TestStandardCouplings:
    def test_layout(self):
        cs = standard_couplings()
        assert len(cs) == 6
        assert [(c.probe, c.photon, c.dof, c.mode_value, c.sign) for c in cs[:2]] == [
            (ProbeId.P1, A, Dof.F, 1, 1),
            (ProbeId.P1, B, Dof.F, 1, -1),
        ]
        assert {c.dof for c in couplings_for(ProbeId.P2)} == {Dof.S}
        assert {c.dof for c in couplings_for(ProbeId.P3)} == {Dof.F}

    @pytest.mark.parametrize("label,shift", [(PHI_PLUS, 0), (PHI_MINUS, 0), (PSI_PLUS, 1), (PSI_MINUS, 1)])
    def test_p1_net_tags(self, label, shift):
        s = bell_state(label, Dof.F, AB)
        t = apply_couplings(attach_probes(s), couplings_for(ProbeId.P1))
        live = np.abs(s.amplitudes) > ATOL
        assert set(np.abs(t.tags[live, ProbeId.P1])) == {shift}

    def test_p3_after_hadamards_flags_phi_minus(self, rng):
        s = bell_state(PHI_MINUS, Dof.F, AB)
        s = bs_hadamard(bs_hadamard(s, A, Dof.F), B, Dof.F)
        t = apply_couplings(attach_probes(s), couplings_for(ProbeId.P3))
        out, _ = homodyne_x(t, ProbeId.P3, IDEAL, rng)
        assert out is ProbeOutcome.THETA


class TestIdealHomodyne:
    def test_no_tags(self, rng):
        s = bell_state(PSI_PLUS, Dof.F, AB)
        out, post = homodyne_x(attach_probes(s), ProbeId.P1, IDEAL, rng)
        assert out is ProbeOutcome.ZERO
        np.testing.assert_allclose(post.base.amplitudes, s.amplitudes, atol=ATOL)

    def test_psi_keeps_coherence(self, rng):
        s = bell_state(PSI_PLUS, Dof.F, AB)
        t = apply_couplings(attach_probes(s), couplings_for(ProbeId.P1))
        out, post = homodyne_x(t, ProbeId.P1, IDEAL, rng)
        assert out is ProbeOutcome.THETA
        np.testing.assert_allclose(post.base.amplitudes, s.amplitudes, atol=ATOL)
        assert not post.tags[:, ProbeId.P1].any()

    def test_superposition_collapses(self, rng):
        # (phi+ + psi+)/sqrt2 on F: half the weight shifts
        s = bell_state(PHI_PLUS, Dof.F, AB)
        s = s.with_amplitudes((s.amplitudes + bell_state(PSI_PLUS, Dof.F, AB).amplitudes) / math.sqrt(2))
        seen = {}
        for _ in range(400):
            out, post = homodyne_x(apply_couplings(attach_probes(s), couplings_for(ProbeId.P1)), ProbeId.P1, IDEAL, rng)
            seen[out] = seen.get(out, 0) + 1
            target = PHI_PLUS if out is ProbeOutcome.ZERO else PSI_PLUS
            assert equal_up_to_global_phase(post.base, bell_state(target, Dof.F, AB))
            assert post.base.norm() == pytest.approx(1.0, abs=ATOL)
        assert abs(seen[ProbeOutcome.ZERO] / 400 - 0.5) < 5 * math.sqrt(0.25 / 400)

    def test_only_one_probe_cleared(self, rng):
        s = tensor(bell_state(PSI_PLUS, Dof.F, AB), bell_state(PSI_MINUS, Dof.S, AB))
        t = apply_couplings(attach_probes(s), couplings_for(ProbeId.P1) + couplings_for(ProbeId.P2))
        _, post = homodyne_x(t, ProbeId.P1, IDEAL, rng)
        assert not post.tags[:, ProbeId.P1].any()
        assert post.tags[:, ProbeId.P2].any()


class TestGaussianModel:
    def test_requires_alpha(self):
        with pytest.raises(ValueError):
            HomodyneModel.gaussian(0.3, 0.0)

    def test_params_validation(self):
        with pytest.raises(ValueError):
            KerrParams(-0.1, 1.0)
        with pytest.raises(ValueError):
            KerrParams(2.0, 1.0)
        with pytest.raises(ValueError):
            KerrParams(0.5, -1.0)

    def test_theta_zero_is_coin_flip(self):
        assert error_probability(KerrParams(0.0, 10.0)) == 0.5
        rate = misclassification_rate(KerrParams(0.0, 10.0), 20_000, np.random.default_rng(7))
        assert abs(rate - 0.5) < 5 * math.sqrt(0.25 / 20_000)

    @pytest.mark.parametrize("theta,alpha", [(0.1, 5.0), (0.5, 3.0), (1.2, 1.0), (math.pi / 2, 0.7), (0.3, 40.0)])
    def test_analytic_matches_quadrature(self, theta, alpha):
        assert error_probability(KerrParams(theta, alpha)) == pytest.approx(quad_error(theta, alpha), rel=1e-7, abs=1e-14)

    def test_large_separation_tail(self):
        # alpha (1 - cos theta) = 6
        theta = math.pi / 3
        p = error_probability(KerrParams(theta, 6 / (1 - math.cos(theta))))
        assert p < 1e-9
        assert p == pytest.approx(quad_error(theta, 12.0), rel=1e-6)

    def test_monotone_in_alpha(self):
        for theta in (0.05, 0.4, 1.0):
            values = [error_probability(KerrParams(theta, a)) for a in np.linspace(0, 60, 241)]
            assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0, math.pi / 2), st.floats(0, 100))
    def test_bounded(self, theta, alpha):
        p = error_probability(KerrParams(theta, alpha))
        assert 0.0 <= p <= 0.5

    def test_gaussian_readout_statistics(self, rng):
        params = KerrParams(0.4, 8.0)
        model = HomodyneModel("gaussian", params)
        s = bell_state(PSI_MINUS, Dof.F, AB)
        t = apply_couplings(attach_probes(s), couplings_for(ProbeId.P1))
        n = 4000
        wrong = sum(homodyne_x(t, ProbeId.P1, model, rng)[0] is ProbeOutcome.ZERO for _ in range(n))
        p = error_probability(params)
        assert abs(wrong / n - p) <= 5 * math.sqrt(p * (1 - p) / n)

    def test_gaussian_post_state_normalized(self, rng):
        model = HomodyneModel.gaussian(0.2, 2.0)
        s = bell_state(PHI_PLUS, Dof.F, AB)
        s = s.with_amplitudes((s.amplitudes + bell_state(PSI_PLUS, Dof.F, AB).amplitudes) / math.sqrt(2))
        for _ in range(50):
            _, post = homodyne_x(apply_couplings(attach_probes(s), couplings_for(ProbeId.P1)), ProbeId.P1, model, rng)
            assert post.base.norm() == pytest.approx(1.0, abs=ATOL)


def test_tagged_state_shape_check():
    s = bell_state(PHI_PLUS, Dof.F, AB)
    with pytest.raises(ValueError):
        TaggedState(s, np.zeros((3, 3)))
