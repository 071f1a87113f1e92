import numpy as np
import pytest

from daq import DcaConfig, compute_params, dca_range, density_center, quantile
from daq.errors import DegenerateRange, EmptyInput
from daq.formats import build_nf_format

from oracles import quantile_ref

NF4 = build_nf_format(4)


class TestQuantile:
    def test_median_odd(self):
        assert quantile([1, 2, 3, 4, 5], 50) == 3

    def test_interpolated_quartile(self):
        # position (5-1)*0.25 = 1 exactly
        assert quantile([1, 2, 3, 4, 5], 25) == quantile_ref([1, 2, 3, 4, 5], 25) == 2

    def test_endpoints(self):
        data = [7.5, -2, 0, 11]
        assert quantile(data, 0) == min(data)
        assert quantile(data, 100) == max(data)

    def test_empty(self):
        with pytest.raises(EmptyInput):
            quantile([], 50)

    def test_matches_numpy_and_oracle(self, rng):
        for _ in range(30):
            data = rng.normal(size=int(rng.integers(2, 40)))
            p = float(rng.uniform(0, 100))
            mine = quantile(data, p)
            assert mine == pytest.approx(quantile_ref(data, p), rel=1e-12, abs=1e-15)
            assert mine == pytest.approx(float(np.percentile(data, p)), rel=1e-9)


class TestDensityCenter:
    @pytest.mark.parametrize("m", [0.0, 2.275, 10.0, 25.0])
    def test_symmetric_sample(self, m):
        assert density_center([-3, -1, 0, 1, 3], DcaConfig(m)) == pytest.approx(0.0, abs=1e-15)

    def test_m_zero_is_midrange(self):
        data = [-2.0, 1.0, 7.0]
        assert density_center(data, DcaConfig(0.0)) == (7.0 - 2.0) / 2 - 0.0  # (min+max)/2
        assert density_center(data, DcaConfig(0.0)) == 2.5

    def test_outlier_sample(self):
        # quantiles at 25/75 are -0.5 and 0.5 by the interpolation oracle
        data = [-1.0, -0.5, 0.0, 0.5, 8.0]
        assert quantile_ref(data, 25) == -0.5 and quantile_ref(data, 75) == 0.5
        assert density_center(data, DcaConfig(25.0)) == 0.0

    def test_invalid_rate(self):
        with pytest.raises(ValueError):
            DcaConfig(50.0)
        with pytest.raises(ValueError):
            DcaConfig(-1.0)


class TestDcaRange:
    def test_symmetric_sample_gives_minmax(self):
        r = dca_range([-3, -1, 0, 1, 3], DcaConfig(10.0))
        assert r.alpha == -3.0 and r.beta == 3.0

    def test_expands_below_data(self):
        r = dca_range([-1.0, -0.5, 0.0, 0.5, 8.0], DcaConfig(25.0))
        assert r.alpha == -8.0 and r.beta == 8.0
        assert r.alpha < -1.0  # expands past the data minimum

    def test_two_points_m0(self):
        r = dca_range([0.0, 1.0], DcaConfig(0.0))
        assert r.alpha == 0.0 and r.beta == 1.0

    def test_all_equal_rejected(self):
        with pytest.raises(DegenerateRange):
            dca_range([2.0, 2.0, 2.0])

    def test_containment_and_symmetry(self, rng):
        cfg = DcaConfig(2.275)
        for _ in range(500):
            w = rng.normal(0, float(rng.uniform(0.01, 2)), size=int(rng.integers(2, 128)))
            if w.max() == w.min():
                continue
            r = dca_range(w, cfg)
            assert r.alpha <= w.min() and r.beta >= w.max()
            c = density_center(w, cfg)
            assert (r.beta - c) == pytest.approx(c - r.alpha, rel=1e-12)

    def test_translation_and_scale_equivariance(self, rng):
        cfg = DcaConfig(5.0)
        w = rng.normal(size=64)
        r = dca_range(w, cfg)
        shifted = dca_range(w + 10.0, cfg)
        assert shifted.alpha == pytest.approx(r.alpha + 10.0, rel=1e-12)
        assert shifted.beta == pytest.approx(r.beta + 10.0, rel=1e-12)
        scaled = dca_range(3.0 * w, cfg)
        assert scaled.alpha == pytest.approx(3.0 * r.alpha, rel=1e-12)
        assert scaled.beta == pytest.approx(3.0 * r.beta, rel=1e-12)

    def test_center_projects_to_zero_under_nf(self, rng):
        cfg = DcaConfig(2.275)
        for _ in range(20):
            w = rng.normal(1.5, 0.3, size=96)
            c = density_center(w, cfg)
            p = compute_params(dca_range(w, cfg), NF4)
            assert c / p.s + p.z == pytest.approx(0.0, abs=1e-6)
