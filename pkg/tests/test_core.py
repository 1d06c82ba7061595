import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slmqudit.core import DensityMatrix, ModeGeometry, QuditState, fidelity, validate_geometry

MM = 1e-3


def geometry(omega_z=0.1 * MM, chi=0.5 * MM, T=0.1 * MM, N=10, pixel=None):
    return ModeGeometry(omega_z=omega_z, chi=chi, D=3, T=T, f=0.5, k=2 * np.pi / 810e-9,
                        pixel_len=pixel if pixel is not None else T / N, N=N)


class TestGeometry:
    def test_valid(self):
        assert validate_geometry(geometry()) == []

    def test_paths_overlap(self):
        (v,) = validate_geometry(geometry(chi=0.15 * MM))
        assert v.predicate == "chi > 2*omega_z"
        assert v.margin == pytest.approx(-0.05 * MM)

    def test_period_too_long(self):
        (v,) = validate_geometry(geometry(T=0.2 * MM))
        assert v.predicate == "T < pi*omega_z/2"
        assert v.margin < 0

    def test_pixels_do_not_tile(self):
        (v,) = validate_geometry(geometry(pixel=0.011 * MM))
        assert v.predicate == "N*pixel_len == T"

    def test_pure(self):
        g = geometry(chi=0.1 * MM, T=0.3 * MM)
        assert validate_geometry(g) == validate_geometry(g)
        assert len(validate_geometry(g)) == 2

    def test_derived(self):
        g = geometry()
        assert g.delta_y == pytest.approx(2 * np.pi * g.f / (g.T * g.k))
        assert g.omega_f == pytest.approx(2 * g.f / (g.omega_z * g.k))
        assert g.order_position(2) == pytest.approx(2 * g.delta_y)

    def test_overlap_at_period_bound_is_not_small(self):
        # the period condition alone leaves neighbouring spots overlapping noticeably
        g = geometry(T=np.pi * 0.1 * MM / 2 * 0.999)
        assert validate_geometry(g) == []
        assert g.mode_overlap() > 0.1

    @pytest.mark.parametrize("field", ["omega_z", "chi", "T"])
    def test_rejects_nonpositive(self, field):
        with pytest.raises(ValueError):
            geometry(**{field: -1.0})


class TestStates:
    def test_prepare_normalizes(self):
        s = QuditState.prepare([3, 4j])
        assert s.norm_sq == pytest.approx(1.0)

    def test_pairs_accepted(self):
        s = QuditState([[0.6, 0.0], [0.0, 0.8]])
        np.testing.assert_allclose(s.amps, [0.6, 0.8j])

    def test_rejects_super_normalized(self):
        with pytest.raises(ValueError):
            QuditState([1.0, 0.1])

    def test_zero_state_has_no_normalized_form(self):
        s = QuditState([0, 0])
        assert s.norm_sq == 0
        with pytest.raises(ValueError):
            s.normalized()

    def test_immutable(self):
        s = QuditState.basis(3, 1)
        with pytest.raises(ValueError):
            s.amps[0] = 1

    def test_density(self):
        rho = QuditState.prepare([1, 1j]).density()
        assert rho.violations() == []
        assert rho.trace == pytest.approx(1.0)

    def test_density_violations(self):
        assert "hermitian" in DensityMatrix([[0.5, 1], [0, 0.5]]).violations()
        assert "positive semidefinite" in DensityMatrix([[1, 0], [0, -0.5]]).violations()
        assert "0 <= trace <= 1" in DensityMatrix(np.eye(2)).violations()


class TestFidelity:
    def test_examples(self):
        e = [QuditState.basis(3, i) for i in range(3)]
        assert fidelity(e[0], e[0]) == 1
        assert fidelity(e[0], e[1]) == 0
        a = QuditState.prepare([1, 1])
        b = QuditState.prepare([1, -1])
        assert fidelity(a, b) == pytest.approx(0, abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity(QuditState.basis(2, 0), QuditState.basis(3, 0))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
    def test_symmetric_and_phase_invariant(self, seed, p1, p2):
        r = np.random.default_rng(seed)
        a = QuditState.prepare(r.normal(size=4) + 1j * r.normal(size=4))
        b = QuditState.prepare(r.normal(size=4) + 1j * r.normal(size=4))
        f = fidelity(a, b)
        assert 0 <= f <= 1
        assert fidelity(b, a) == pytest.approx(f, abs=1e-12)
        ap = QuditState(a.amps * np.exp(1j * p1))
        bp = QuditState(b.amps * np.exp(1j * p2))
        assert fidelity(ap, bp) == pytest.approx(f, abs=1e-12)
