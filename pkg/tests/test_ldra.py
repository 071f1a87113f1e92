import numpy as np
import pytest

from daq import LdraConfig, finite_diff_sign, group_loss, lr_at, optimize
from daq.errors import ShapeMismatch
from daq.formats import build_int_format, build_nf_format
from daq.quantizer import QuantParams

from oracles import scalar_int_code

INT4 = build_int_format(4)
NF2 = build_nf_format(2)
NF4 = build_nf_format(4)


class TestGroupLoss:
    def test_zero_for_representable_weights(self, rng):
        p = QuantParams(0.3, 2.0)
        w = p.s * (INT4.codebook[rng.integers(0, 16, size=24)] - p.z)
        x = rng.normal(size=(24, 6))
        assert group_loss(w, x, p, INT4) == 0.0

    def test_zero_for_zero_calibration(self):
        w = np.array([0.1, 0.7, -0.3])
        x = np.zeros((3, 5))
        assert group_loss(w, x, QuantParams(1.0, 0.0), NF4) == 0.0

    def test_scalar_worked_example(self):
        # t = 0.35/0.2 + 5 = 6.75 -> code 7, w~ = 0.4, loss = (0.8 - 0.7)^2
        assert scalar_int_code(0.35, 0.2, 5.0, 4) == 7
        loss = group_loss([0.35], [[2.0]], QuantParams(0.2, 5.0), INT4)
        assert loss == pytest.approx(0.01, rel=1e-12)

    def test_nonnegative(self, rng):
        for _ in range(20):
            w = rng.normal(size=8)
            x = rng.normal(size=(8, 3))
            assert group_loss(w, x, QuantParams(0.05, 0.0), NF4) >= 0.0

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            group_loss(np.zeros(4), np.zeros((5, 2)), QuantParams(1.0, 0.0), NF4)


class TestFiniteDiffSign:
    def test_quadratic_positive_slope(self):
        assert finite_diff_sign(lambda x: x * x, 1.0, 1e-4) == 1

    def test_quadratic_at_minimum(self):
        assert finite_diff_sign(lambda x: x * x, 0.0, 1e-4) == 0

    def test_flat_plateau(self):
        assert finite_diff_sign(lambda x: 7.5, 0.3, 1e-4) == 0

    def test_negative_slope(self):
        assert finite_diff_sign(lambda x: -3 * x, 0.0, 1e-4) == -1

    def test_one_sided_at_domain_edge(self):
        calls = []

        def f(x):
            calls.append(x)
            assert x > 0.0  # never evaluated outside the domain
            return (x - 1.0) ** 2

        out = finite_diff_sign(f, 5e-5, 1e-4, min_x=0.0)
        assert out == -1
        assert calls == [5e-5 + 1e-4, 5e-5]

    def test_codomain(self, rng):
        for _ in range(50):
            a, b = rng.normal(size=2)
            out = finite_diff_sign(lambda x: a * x + b, float(rng.normal()), 1e-4)
            assert out in (-1, 0, 1)


class TestLrAt:
    def test_t0_is_eta0(self):
        assert lr_at(LdraConfig(), 0) == 1e-3

    def test_direct_substitution(self):
        assert lr_at(LdraConfig(eta0=1e-3, decay=0.05), 20) == 5e-4

    def test_no_decay(self):
        cfg = LdraConfig(decay=0.0)
        assert all(lr_at(cfg, t) == cfg.eta0 for t in range(0, 100, 7))

    def test_strictly_decreasing(self):
        cfg = LdraConfig(decay=0.05)
        etas = [lr_at(cfg, t) for t in range(50)]
        assert all(a > b for a, b in zip(etas, etas[1:]))


def random_instance(rng, n=16, samples=8, fmt=NF2):
    w = rng.normal(0, 0.05, size=n)
    x = rng.normal(size=(n, samples))
    lo, hi = float(w.min()), float(w.max())
    s = (hi - lo) / (fmt.x_max - fmt.x_min)
    init = QuantParams(s, fmt.x_min - lo / s)
    return w, x, init


class TestOptimize:
    def test_zero_loss_early_exit(self, rng):
        p = QuantParams(0.25, 1.0)
        w = p.s * (NF4.codebook[rng.integers(0, 16, size=12)] - p.z)
        x = rng.normal(size=(12, 4))
        best, trace = optimize(w, x, p, NF4)
        assert best == p
        assert trace.stop_reason == "zero_loss"
        assert trace.iterations_run == 0

    def test_noop_config_returns_init(self, rng):
        w, x, init = random_instance(rng)
        cfg = LdraConfig(optimize_scale=False, optimize_zero=False)
        best, trace = optimize(w, x, init, NF2, cfg)
        assert best == init
        assert trace.stop_reason == "nothing_to_optimize"
        assert trace.steps == []

    def test_never_hurts(self, rng):
        cfg = LdraConfig(max_iters=60)
        for _ in range(50):
            w, x, init = random_instance(rng)
            init_loss = group_loss(w, x, init, NF2)
            best, trace = optimize(w, x, init, NF2, cfg)
            assert trace.best_loss <= init_loss
            assert group_loss(w, x, best, NF2) == trace.best_loss

    def test_deterministic(self, rng):
        w, x, init = random_instance(rng)
        cfg = LdraConfig(max_iters=80)
        _, t1 = optimize(w, x, init, NF2, cfg)
        _, t2 = optimize(w, x, init, NF2, cfg)
        assert t1.steps == t2.steps
        assert t1.best_loss == t2.best_loss
        assert t1.best_params == t2.best_params

    def test_best_loss_is_trace_minimum(self, rng):
        w, x, init = random_instance(rng)
        _, trace = optimize(w, x, init, NF2, LdraConfig(max_iters=100))
        observed = [loss for _, _, loss in trace.steps] + [trace.init_loss]
        assert trace.best_loss == min(observed)

    def test_plateau_halts(self):
        # exact-binary construction: both weights quantize to code 0 under
        # every probe, and the init sits on the symmetric vertex of the
        # remaining quadratic, so both centered differences are exactly zero
        w = np.array([0.25, 0.375])
        x = np.eye(2)
        init = QuantParams(1.0, -0.3125)
        cfg = LdraConfig(eps=2.0**-13, max_iters=50)
        init_loss = group_loss(w, x, init, INT4)
        assert init_loss > 0.0
        best, trace = optimize(w, x, init, INT4, cfg)
        assert trace.stop_reason == "plateau"
        assert trace.iterations_run == 0
        assert best == init

    def test_first_step_uses_eta0(self, rng):
        w, x, init = random_instance(rng)
        _, trace = optimize(w, x, init, NF2, LdraConfig(max_iters=5))
        if trace.steps:
            t, eta, _ = trace.steps[0]
            assert t == 0 and eta == 1e-3

    def test_scale_stays_positive(self, rng):
        w = rng.normal(0, 1e-5, size=8)
        w[0] = 1e-4
        x = rng.normal(size=(8, 4))
        init = QuantParams(1e-7, 0.0)
        best, _ = optimize(w, x, init, NF2, LdraConfig(max_iters=200))
        assert best.s > 0.0

    def test_patience_stops_early(self, rng):
        w, x, init = random_instance(rng)
        cfg = LdraConfig(max_iters=1000, patience=5)
        _, trace = optimize(w, x, init, NF2, cfg)
        assert trace.iterations_run <= 1000
        if trace.stop_reason == "patience":
            tail = [loss for _, _, loss in trace.steps[-5:]]
            assert all(loss >= trace.best_loss for loss in tail)
