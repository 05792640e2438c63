import numpy as np
import pytest
from scipy.stats import multivariate_normal, norm

from accuracy_limit.density_limit import (GaussianClassDensity, GridSpec, MixtureProblem,
                                          accuracy_from_confusion, confusion_grid, confusion_mc,
                                          limit_curve, two_class_problem)
from accuracy_limit.errors import ConfigurationError, CoverageError, DomainError, NumericError

GRID = GridSpec.cube(2, 8.0, 0.01)


def test_density_matches_scipy_and_integrates():
    mu, s = [0.3, -0.2], [[1.2, 0.4], [0.4, 0.8]]
    g = GaussianClassDensity(mu, s)
    x = np.random.default_rng(0).normal(size=(50, 2))
    assert np.allclose(g.logpdf(x), multivariate_normal(mu, s).logpdf(x), atol=1e-12)
    ax = GridSpec.cube(2, 8.0, 0.02).axes()
    xx = np.stack(np.meshgrid(*ax, indexing="ij"), -1).reshape(-1, 2)
    assert abs(g.pdf(xx).sum() * 0.02 ** 2 - 1) < 1e-3


def test_singular_density_gets_ridge_with_warning():
    with pytest.warns(RuntimeWarning):
        g = GaussianClassDensity([0, 0], np.ones((2, 2)))
    assert g.ridged


def test_priors_validated():
    c = [GaussianClassDensity([0], [[1]]), GaussianClassDensity([1], [[1]])]
    with pytest.raises(ConfigurationError):
        MixtureProblem(c, [0.6, 0.5])
    with pytest.raises(ConfigurationError):
        MixtureProblem(c[:1])


def test_posterior_examples():
    same = two_class_problem(0.0)
    assert np.allclose(same.posterior([1.3, -0.4]), [0.5, 0.5])
    p = two_class_problem(1.0)
    assert np.allclose(p.posterior([0.0, 0.0]), [0.5, 0.5])
    assert p.posterior([10.0, 0.0])[1] > 0.9999
    with pytest.raises(NumericError):
        p.posterior([np.nan, 0.0])


def test_posterior_far_tail_is_uniform():
    p = two_class_problem(1.0)
    assert np.allclose(p.posterior([1e6, 1e6]), [0.5, 0.5])


def test_ideal_class_ties_and_extremes():
    p = two_class_problem(1.0)
    assert p.ideal_class([0.0, 0.0]) == 0
    assert p.ideal_class([3.0, 0.0]) == 1
    same = two_class_problem(0.0)
    assert np.all(same.ideal_class(np.random.default_rng(0).normal(size=(100, 2))) == 0)


@pytest.mark.parametrize("d", [0.0, 0.5, 1.0, 2.0, 3.0])
def test_grid_matches_closed_form(d):
    res = confusion_grid(two_class_problem(d), GRID)
    assert abs(res.accuracy - norm.cdf(d / 2)) < 0.002
    assert np.allclose(res.matrix.sum(axis=0), 1.0, atol=1e-6)


def test_grid_d1_precise():
    assert abs(confusion_grid(two_class_problem(1.0), GRID).accuracy - 0.6915) < 0.001


def test_grid_far_classes():
    assert confusion_grid(two_class_problem(5.0), GRID).accuracy >= 0.99


def test_correlation_only_problem_closed_form():
    # equal means, correlations +r and -r: the ideal rule is sign(x1 x2); accuracy 1/2 + arcsin(r)/pi
    res = confusion_grid(two_class_problem(0.0, 0.75, -0.75), GRID)
    assert abs(res.accuracy - (0.5 + np.arcsin(0.75) / np.pi)) < 1e-3


def test_grid_coverage_error():
    with pytest.raises(CoverageError):
        confusion_grid(two_class_problem(1.0), GridSpec.cube(2, 1.5, 0.05))


def test_grid_spec_validation():
    with pytest.raises(ConfigurationError):
        GridSpec([0, 0, 0, 0], [1, 1, 1, 1], 0.1)
    with pytest.raises(ConfigurationError):
        GridSpec([1.0], [0.0], 0.1)


def test_one_dimensional_grid():
    p = MixtureProblem([GaussianClassDensity([0.0], [[1.0]]), GaussianClassDensity([2.0], [[1.0]])])
    assert abs(confusion_grid(p, GridSpec([-10], [12], 0.001)).accuracy - norm.cdf(1.0)) < 1e-4


def test_mc_close_to_closed_form():
    res = confusion_mc(two_class_problem(1.0), 1_000_000, np.random.default_rng(3))
    assert abs(res.accuracy - norm.cdf(0.5)) < 0.002
    assert np.allclose(res.matrix.sum(axis=0), 1.0, atol=1e-12)
    assert res.stderr.shape == (2, 2)


def test_mc_identical_classes_go_to_zero():
    res = confusion_mc(two_class_problem(0.0), 2000, np.random.default_rng(0))
    assert np.array_equal(res.matrix, [[1.0, 1.0], [0.0, 0.0]])


def test_mc_three_class_near_identity():
    cls = [GaussianClassDensity(m, np.eye(2)) for m in ([0, 0], [20, 0], [0, 20])]
    res = confusion_mc(MixtureProblem(cls), 30_000, np.random.default_rng(1))
    assert np.allclose(res.matrix, np.eye(3), atol=1e-3)


def test_mc_needs_samples():
    with pytest.raises(DomainError):
        confusion_mc(two_class_problem(1.0), 500, np.random.default_rng(0))


def test_accuracy_from_confusion_examples():
    assert accuracy_from_confusion(np.eye(3)) == 1.0
    assert accuracy_from_confusion(np.full((2, 2), 0.5)) == 0.5
    assert accuracy_from_confusion([[0.7, 0.4], [0.3, 0.6]]) == pytest.approx(0.65, abs=1e-15)
    with pytest.raises(DomainError):
        accuracy_from_confusion([[0.7, 0.4], [0.2, 0.6]])


def test_limit_curve_strictly_increasing():
    curve = limit_curve(np.arange(0, 5.01, 0.5))
    assert np.all(np.diff(curve.accuracy) > 0)
    assert abs(curve.accuracy[0] - 0.5) < 1e-3 and curve.accuracy[-1] >= 0.99


def test_sine_transform_keeps_mc_limit():
    # the transformed ideal classifier labels each transformed point by the ideal class of its
    # pre-image; arcsin recovers it on the principal branch, the stored sample elsewhere
    p = two_class_problem(1.0)
    rng = np.random.default_rng(4)
    x, y = p.sample(20_000, rng)
    base = np.mean(p.ideal_class(x) == y)
    z = np.sin(x)
    pre = np.where(np.abs(x) <= np.pi / 2, np.arcsin(z), x)   # invert where sin is one-to-one
    assert np.mean(p.ideal_class(pre) == y) == base
