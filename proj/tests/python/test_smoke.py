"""Smoke tests for the python extension module.

Run directly (ctest sets PYTHONPATH to the build tree) or via pytest.
"""

import math

import lrdemp


def test_fgn_covariance():
    assert lrdemp.fgn_covariance(0.75, 0) == 1.0
    assert abs(lrdemp.fgn_covariance(0.75, 1) - (2**1.5 - 2) / 2) < 1e-12


def test_hermite_eval():
    assert lrdemp.hermite_eval(2, 1.0) == 0.0
    assert lrdemp.hermite_eval(1, 3.5) == 3.5
    assert abs(lrdemp.hermite_eval(3, 2.0) - 2.0) < 1e-12


def test_generate_path_deterministic():
    model = lrdemp.CovarianceModel.fgn(0.75)
    a = lrdemp.generate_path(model, 64, 7)
    b = lrdemp.generate_path(model, 64, 7)
    assert a.values == b.values
    assert len(a) == 64
    spectrum = lrdemp.circulant_spectrum(model, 64)
    assert min(spectrum) >= -1e-10 * max(spectrum)


def test_subordination_and_profile():
    model = lrdemp.CovarianceModel.white()
    path = lrdemp.generate_path(model, 16, 3)
    square = lrdemp.SubordinationFunction.square()
    sample = lrdemp.subordinate(path, square)
    assert all(abs(y - x * x) < 1e-15 for x, y in zip(path.values, sample.y))
    assert lrdemp.hermite_rank(square) == 2
    assert abs(lrdemp.marginal_cdf(square, 1.0) - (2 * 0.8413447460685429 - 1)) < 1e-9
    assert abs(lrdemp.hermite_coefficient(lrdemp.SubordinationFunction.identity(), 1, 0.0)
               + 1 / math.sqrt(2 * math.pi)) < 1e-12


def test_custom_monotone_python_callable():
    g = lrdemp.SubordinationFunction.custom_monotone(
        lambda s: s**3 + s, True, -2.0, 2.0)
    ((lo, hi),) = g.sublevel(10.0)
    assert math.isinf(lo)
    assert abs(hi - 2.0) < 1e-8


def test_normalization_and_depth():
    assert abs(lrdemp.normalization_dN(lrdemp.CovarianceModel.white(), 1, 100) - 10) < 1e-12
    assert lrdemp.chaining_depth(1024, 32.0, 1.0) == 9


def test_sequential_empirical():
    rows = lrdemp.sequential_empirical(
        [0.5, -1.0, 2.0], "identity", [], [-2.0, 0.0, 2.0], [1 / 3, 2 / 3, 1.0], 1.0)
    assert abs(rows[1][1]) < 1e-12  # floor(3 * 2/3) = 2 terms cancel at x = 0


def test_ks_and_slope():
    assert lrdemp.ks_distance_two_sample([1.0, 2.0], [1.0, 2.0]) == 0.0
    fit = lrdemp.slope_fit([(math.log(n), math.log(4.0 / n)) for n in (16, 64, 256)])
    assert fit["ok"]
    assert abs(fit["slope"] + 1.0) < 1e-9


def test_small_reduction_experiment():
    report = lrdemp.run_reduction_experiment({
        "hurst": 0.75,
        "g": "identity",
        "n_ladder": [64, 128],
        "replications": 40,
        "epsilon_grid": [0.25],
        "master_seed": 5,
        "workers": 2,
    })
    assert report["kind"] == "reduction"
    assert report["rank"] == 1
    decay = report["decay"][0]
    assert len(decay["p_hat"]) == 2
    assert all(0.0 <= p <= 1.0 for p in decay["p_hat"])


def main():
    tests = [(name, fn) for name, fn in sorted(globals().items())
             if name.startswith("test_") and callable(fn)]
    for name, fn in tests:
        fn()
        print(f"ok {name}")
    print(f"{len(tests)} smoke tests passed")


if __name__ == "__main__":
    main()
