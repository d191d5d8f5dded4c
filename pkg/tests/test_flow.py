import math
from fractions import Fraction

import pytest

from boolrg.families import (
    mod_p_sym,
    parity,
    planted_near_polynomial,
    random_polynomial,
    random_table,
)
from boolrg.flow import (
    ClassifyConfig,
    FlowStep,
    FlowTrace,
    Phase,
    analytic_density,
    classification_from_json,
    classification_to_json,
    classify,
    density_recursion_step,
    empirical_flow,
    flow_trace_from_csv,
    flow_trace_to_csv,
    small_p_prediction,
)
from boolrg.symmetric import sym_flow
from boolrg.truth_table import TruthTable, anf_to_table


def exact_degree_poly(n, xi, base_seed):
    for k in range(50):
        a = random_polynomial(n, xi, 0.3, base_seed + 7919 * k)
        if a.degree == xi and a.terms:
            return a
    raise AssertionError("no exact-degree polynomial found")


def test_analytic_density_examples():
    for ell in range(8):
        assert analytic_density(0.5, ell) == 0.5
    assert analytic_density(0.25, 1) == pytest.approx(3 / 8, abs=1e-15)
    assert analytic_density(0.25, 2) == pytest.approx(15 / 32, abs=1e-15)
    # 2*(3/8)*(5/8) = 15/32 closes the loop between recursion and closed form
    assert density_recursion_step(3 / 8) == 15 / 32
    assert analytic_density(0.0, 5) == 0.0
    assert analytic_density(1.0, 0) == 1.0
    assert analytic_density(1.0, 3) == 0.0
    with pytest.raises(ValueError):
        analytic_density(1.2, 1)
    with pytest.raises(ValueError):
        analytic_density(0.5, -1)


def test_analytic_density_satisfies_recursion_on_grid():
    for i in range(1000):
        p0 = (i + 0.5) / 1000
        p = p0
        for ell in range(1, 12):
            p = density_recursion_step(p)
            assert abs(analytic_density(p0, ell) - p) < 1e-12


def test_analytic_density_monotone_toward_half():
    for p0 in (1e-6, 0.01, 0.2, 0.49):
        prev = p0
        for ell in range(1, 40):
            cur = analytic_density(p0, ell)
            assert cur >= prev - 1e-15
            prev = cur
        assert abs(prev - 0.5) < 1e-9


def test_small_p_prediction():
    assert small_p_prediction(2**-20, 10) == 2**-10
    assert small_p_prediction(0.0, 7) == 0.0
    assert small_p_prediction(0.5, 30) == 1.0
    with pytest.raises(ValueError):
        small_p_prediction(-0.1, 1)


def test_small_p_tracks_closed_form_while_small():
    # relative error under 2% whenever the prediction is still below 0.01
    for k in range(10, 31):
        p0 = 2.0**-k
        ell = 0
        while small_p_prediction(p0, ell) < 0.01:
            exact = analytic_density(p0, ell)
            assert abs(small_p_prediction(p0, ell) - exact) <= 0.02 * exact
            ell += 1


def test_empirical_flow_parity():
    trace = empirical_flow(parity(8), (3, 6, 1))
    assert [float(d) for d in trace.densities()] == [0.5, 1.0, 0.0, 0.0]
    assert [s.var for s in trace.steps] == [3, 6, 1]
    assert [s.remaining_arity for s in trace.steps] == [7, 6, 5]


def test_empirical_flow_degree2_zero_from_step_three():
    t = anf_to_table(exact_degree_poly(12, 2, 31))
    trace = empirical_flow(t, tuple(range(1, 9)))
    for step in trace.steps[2:]:
        assert step.density == 0


def test_empirical_flow_tracks_analytic():
    # 4-sigma binomial band around the closed form, one fixed seed
    n, p0 = 20, 0.3
    trace = empirical_flow(random_table(n, p0, seed=77), tuple(range(1, 11)))
    for ell, d in enumerate(trace.densities()):
        p = analytic_density(p0, ell)
        band = 4 * math.sqrt(p * (1 - p) / 2 ** (n - ell))
        assert abs(float(d) - p) <= band


def test_flow_trace_validation():
    with pytest.raises(ValueError):
        FlowTrace(4, Fraction(1, 2), (FlowStep(1, 2, Fraction(0)),))
    with pytest.raises(ValueError):
        FlowTrace(4, Fraction(1, 2), (FlowStep(1, 3, Fraction(3, 2)),))


def test_flow_csv_round_trip_exact():
    trace = empirical_flow(random_table(9, 0.4, 3), (2, 9, 4))
    text = flow_trace_to_csv(trace)
    assert text.splitlines()[0] == (
        "step,remaining_arity,decimated_var,density_num,density_den"
    )
    assert flow_trace_from_csv(text) == trace


def test_flow_csv_round_trip_symmetric():
    result = sym_flow(mod_p_sym(200, 3), 6)
    text = flow_trace_to_csv(result.trace)
    assert text.splitlines()[0] == (
        "step,remaining_arity,decimated_var,density_real"
    )
    parsed = flow_trace_from_csv(text)
    assert parsed.start_arity == 200
    assert [s.var for s in parsed.steps] == [None] * 6
    for got, want in zip(parsed.densities(), result.trace.densities()):
        assert got == float(want)


def test_flow_csv_analytic_column_is_tolerated():
    trace = empirical_flow(random_table(8, 0.25, 5), (1, 2))
    text = flow_trace_to_csv(trace, analytic_p0=0.25)
    header = text.splitlines()[0]
    assert header.endswith(",analytic_density")
    assert flow_trace_from_csv(text) == trace


def test_classify_parity_annihilated():
    report = classify(parity(12))
    assert report.label is Phase.ANNIHILATED
    assert report.xi == 1


def test_classify_polynomials_annihilated_at_their_degree():
    for xi in (1, 2, 3, 4):
        t = anf_to_table(exact_degree_poly(12, xi, 100 + xi))
        report = classify(t)
        assert report.label is Phase.ANNIHILATED
        assert report.xi == xi


def test_classify_zero_function():
    report = classify(TruthTable.constant(10, 0))
    assert report.label is Phase.ANNIHILATED
    assert report.xi == 0


def test_classify_mod3_composite():
    report = classify(mod_p_sym(1000, 3))
    assert report.label is Phase.COMPOSITE_SUSPECT
    assert report.thresholds["engine"] == "symmetric"


def test_classify_majority_composite():
    from boolrg.families import majority_sym

    report = classify(majority_sym(1000))
    assert report.label is Phase.COMPOSITE_SUSPECT


def test_classify_random_generic():
    report = classify(random_table(16, 0.5, seed=2))
    assert report.label is Phase.GENERIC


def test_classify_planted_near_polynomial():
    plant = planted_near_polynomial(12, 2, 2**-9, seed=5)
    report = classify(plant.table)
    assert report.label is Phase.NEAR_POLYNOMIAL
    assert report.xi == 2
    assert report.detector is not None
    assert float(report.remainder_density) < 0.01


def test_classify_small_arity_is_unclassified():
    report = classify(random_table(4, 0.5, seed=1))
    assert report.label in (Phase.UNCLASSIFIED, Phase.ANNIHILATED)


def test_classify_deterministic():
    t = random_table(14, 0.5, seed=6)
    cfg = ClassifyConfig(seed=3)
    a = classification_to_json(classify(t, cfg))
    b = classification_to_json(classify(t, cfg))
    assert a == b


def test_classification_json_round_trip():
    plant = planted_near_polynomial(12, 2, 2**-9, seed=5)
    report = classify(plant.table)
    text = classification_to_json(report)
    parsed = classification_from_json(text)
    assert parsed.label is report.label
    assert parsed.xi == report.xi
    assert parsed.traces == report.traces
    assert parsed.thresholds == report.thresholds
    assert parsed.detector.remainder_density == report.detector.remainder_density

    generic = classify(random_table(12, 0.5, seed=9))
    parsed = classification_from_json(classification_to_json(generic))
    assert parsed.label is generic.label
    assert parsed.detector is None


def test_classify_config_validation():
    with pytest.raises(ValueError):
        ClassifyConfig(burn_in=-1)
    with pytest.raises(ValueError):
        ClassifyConfig(steps=4, annihilation_cap=6)


def test_generic_calibration():
    # >= 95% of seeded balanced random tables at n=16 classify GENERIC
    labels = [classify(random_table(16, 0.5, seed=s)).label for s in range(200)]
    generic = sum(label is Phase.GENERIC for label in labels)
    assert generic >= 190

    # and every low-degree polynomial lands on its exact degree
    for xi in (1, 2, 3, 4):
        for s in range(5):
            t = anf_to_table(exact_degree_poly(12, xi, 1000 * xi + s))
            report = classify(t)
            assert report.label is Phase.ANNIHILATED and report.xi == xi
