import cmath
import math

import numpy as np
import pytest

import modelspace as ms


def test_kernel_closed_form():
    b = ms.InnerFunction.blaschke([0.5 + 0.2j, -0.3 + 0.6j])
    z = 0.4 - 0.1j
    assert ms.kernel_norm(b, z) ** 2 == pytest.approx(ms.kernel_norm_squared_closed_form(b, z), rel=1e-10)


def test_clark_gram_is_identity():
    b = ms.InnerFunction.monomial(5)
    mu = ms.clark_measure(b, cmath.exp(0.25j * math.pi))
    g = ms.embedding_gram(b, mu)
    assert np.max(np.abs(g - np.eye(5))) < 1e-8
    rep = ms.singular_values(b, mu, [2.0])
    assert rep["schatten"]["2"] == pytest.approx(math.sqrt(5))


def test_volberg_treil_spiral_fails():
    theta = ms.inner_from_dict(
        {"generator": {"name": "spiral", "params": {"base": 2, "twist": 1, "angle": 0}, "truncation": 40}}
    )
    mu = ms.DiscMeasure([(1.0 + 0j, 1.0)])
    rep = ms.check_volberg_treil(theta, 0.5, mu, 7)
    assert rep["verdict"] == "fails_with_witness"
    assert rep["witness"]["ratio"] > rep["witness"]["threshold"]
    assert rep["convention"] == "lenE"


def test_dyadic_sums():
    mu = ms.DiscMeasure([(0j, 1.0)])
    z2 = ms.InnerFunction.monomial(2)
    assert ms.schatten_necessary_sum(z2, 0.5, mu, 2.0, 8)["value"] == pytest.approx(2.0)
    assert ms.luecking_sum(mu, 2.0, 8)["value"] == pytest.approx(2.0)


def test_measure_documents_and_errors():
    theta = ms.InnerFunction.monomial(2)
    mu = ms.measure_from_dict({"clark": {"re": 1.0, "im": 0.0}}, theta)
    assert mu.total_mass == pytest.approx(1.0)
    with pytest.raises(ms.ConfigError):
        ms.measure_from_dict({"atoms": [{"re": 0.1}]})
    with pytest.raises(ms.ModelspaceError):
        ms.kernel_norm(theta, 0.5, 0.5)
