"""Differential forms, matrix inversion over a Weil algebra, and symplectic brackets."""

import numpy as np
import pytest

from weiljet.algebra import make_truncated_algebra
from weiljet.bundle import (
    BaseVectorField,
    BundleFunction,
    NearPoint,
    functions_equal,
    prolong_function,
    prolong_vector_field,
    sample_near_point,
)
from weiljet.errors import DegreeError, InvalidSymplecticStructure, SingularRealPart
from weiljet.expression import eval_real, parse_expr
from weiljet.poisson import ProlongedPoisson
from weiljet.symplectic import (
    BaseForm,
    SymplecticStructure,
    base_hamiltonian_field,
    base_interior_product,
    bundle_exterior_derivative,
    check_global_witness_symplectic,
    exterior_derivative,
    hamiltonian_field,
    interior_product,
    inverse_bivector,
    is_locally_hamiltonian_symplectic,
    prolong_form,
    symplectic_bracket,
    weil_matrix_inverse,
)
from weiljet.sampling import random_base_form

DUAL = make_truncated_algebra(1, 1)
T3 = make_truncated_algebra(1, 2)

CANONICAL = SymplecticStructure(BaseForm(2, 2, {(0, 1): 1.0}))
CURVED = SymplecticStructure(BaseForm(2, 2, {(0, 1): "1 + x0^2"}))


def test_coefficient_lookup_is_signed():
    omega = BaseForm(2, 2, {(0, 1): 1.0})
    assert eval_real(omega.coefficient((1, 0)), [0.0, 0.0]) == pytest.approx(-1.0)
    assert eval_real(omega.coefficient((0, 0)), [0.0, 0.0]) == pytest.approx(0.0)
    with pytest.raises(DegreeError):
        BaseForm(2, 2, {(1, 0): 1.0})


def test_form_evaluation_is_the_determinant_pairing():
    omega = BaseForm(2, 2, {(0, 1): 1.0})
    x = BaseVectorField([parse_expr("x0", 2), parse_expr("x1", 2)])
    y = BaseVectorField([parse_expr("1", 2), parse_expr("0", 2)])
    value = omega.evaluate([x, y])
    rng = np.random.default_rng(1)
    for point in rng.uniform(-2, 2, (5, 2)):
        assert eval_real(value, point) == pytest.approx(-point[1])


def test_exterior_derivative_oracle():
    # d(x0 dx1) = dx0 ^ dx1
    alpha = BaseForm(1, 2, {(1,): "x0"})
    got = exterior_derivative(alpha)
    assert got.degree == 2
    assert eval_real(got.coefficient((0, 1)), [0.4, -0.3]) == pytest.approx(1.0)


def test_exterior_derivative_squares_to_zero():
    rng = np.random.default_rng(31)
    for _ in range(4):
        alpha = random_base_form(3, 1, rng)
        dd = exterior_derivative(exterior_derivative(alpha))
        for key, entry in dd.coeffs.items():
            for point in rng.uniform(-2, 2, (4, 3)):
                assert eval_real(entry, point) == pytest.approx(0.0, abs=1e-9)


def test_top_degree_derivative_is_empty():
    top = exterior_derivative(BaseForm(2, 2, {(0, 1): "x0 * x1"}))
    assert top.degree == 3
    assert top.coeffs == {}


def test_gradient_of_a_scalar_form():
    dd = exterior_derivative(BaseForm(0, 2, {(): "x0 * x1"}))
    assert eval_real(dd.coefficient((0,)), [2.0, 3.0]) == pytest.approx(3.0)
    assert eval_real(dd.coefficient((1,)), [2.0, 3.0]) == pytest.approx(2.0)


def test_interior_product_contracts_the_first_slot():
    omega = BaseForm(2, 2, {(0, 1): 1.0})
    pulled = base_interior_product(BaseVectorField([parse_expr("1", 2), parse_expr("0", 2)]), omega)
    assert pulled.degree == 1
    assert eval_real(pulled.coefficient((1,)), [0.0, 0.0]) == pytest.approx(1.0)
    assert eval_real(pulled.coefficient((0,)), [0.0, 0.0]) == pytest.approx(0.0)


def test_matrix_inverse_matches_a_dual_number_oracle():
    # A + tB inverts to A^{-1} - t A^{-1} B A^{-1} when t^2 = 0
    rng = np.random.default_rng(23)
    real = rng.uniform(-1, 1, (3, 3)) + 3 * np.eye(3)
    nil = rng.uniform(-1, 1, (3, 3))
    rows = [
        [DUAL.element([real[i, j], nil[i, j]]) for j in range(3)]
        for i in range(3)
    ]
    got = weil_matrix_inverse(rows)
    inv = np.linalg.inv(real)
    correction = -inv @ nil @ inv
    for i in range(3):
        for j in range(3):
            np.testing.assert_allclose(
                got[i][j].coeffs, [inv[i, j], correction[i, j]], atol=1e-9
            )


def test_matrix_inverse_is_exact_at_full_depth():
    rng = np.random.default_rng(29)
    rows = [
        [
            T3.element(np.concatenate([[4 * np.eye(2)[i, j] + rng.uniform(-1, 1)], rng.uniform(-1, 1, 2)]))
            for j in range(2)
        ]
        for i in range(2)
    ]
    inverse = weil_matrix_inverse(rows)
    for i in range(2):
        for j in range(2):
            acc = T3.zero()
            for k in range(2):
                acc = acc + rows[i][k] * inverse[k][j]
            target = T3.unit() if i == j else T3.zero()
            assert acc.almost_equal(target, tol=1e-9)


def test_truncating_the_neumann_tail_is_detected():
    entry = T3.unit() + T3.basis_element(1)
    exact = weil_matrix_inverse([[entry]])[0][0]
    assert (entry * exact).almost_equal(T3.unit(), tol=1e-12)
    short = weil_matrix_inverse([[entry]], terms=T3.height)[0][0]
    assert not (entry * short).almost_equal(T3.unit(), tol=1e-6)


def test_singular_real_part_is_rejected():
    with pytest.raises(SingularRealPart):
        weil_matrix_inverse([[T3.basis_element(1)]])


def test_structure_validation():
    with pytest.raises(InvalidSymplecticStructure):
        SymplecticStructure(BaseForm(2, 3, {(0, 1): 1.0, (1, 2): 1.0}))
    with pytest.raises(InvalidSymplecticStructure):
        SymplecticStructure(BaseForm(2, 4, {(0, 1): 1.0}))
    with pytest.raises(DegreeError):
        SymplecticStructure(BaseForm(1, 2, {(0,): 1.0}))


def test_hamiltonian_field_oracles():
    rng = np.random.default_rng(7)
    point = sample_near_point(DUAL, 2, rng)
    # the energy rotates: X_H = (x1, -x0)
    energy = prolong_function(parse_expr("(x0^2 + x1^2) / 2", 2), DUAL)
    field = hamiltonian_field(energy, CANONICAL, DUAL)
    assert field.components[0].evaluate(point).almost_equal(point.coords[1], tol=1e-9)
    assert field.components[1].evaluate(point).almost_equal(
        point.coords[0] * DUAL.from_real(-1.0), tol=1e-9
    )
    # coordinate functions move each other: X_{x1} = (1, 0) and X_{x0} = (0, -1)
    first = hamiltonian_field(prolong_function(parse_expr("x1", 2), DUAL), CANONICAL, DUAL)
    assert first.components[0].evaluate(point).almost_equal(DUAL.unit(), tol=1e-9)
    assert first.components[1].evaluate(point).almost_equal(DUAL.zero(), tol=1e-9)


def test_symplectic_bracket_of_coordinates():
    x0 = prolong_function(parse_expr("x0", 2), DUAL)
    x1 = prolong_function(parse_expr("x1", 2), DUAL)
    bracket = symplectic_bracket(x0, x1, CANONICAL, DUAL)
    point = sample_near_point(DUAL, 2, np.random.default_rng(3))
    assert bracket.evaluate(point).almost_equal(DUAL.from_real(-1.0), tol=1e-10)


def test_inverse_bivector_oracles():
    flat = inverse_bivector(CANONICAL)
    assert eval_real(flat.entry(0, 1), [0.5, 0.5]) == pytest.approx(-1.0)
    curved = inverse_bivector(CURVED)
    rng = np.random.default_rng(11)
    for point in rng.uniform(-2, 2, (6, 2)):
        assert eval_real(curved.entry(0, 1), point) == pytest.approx(
            -1.0 / (1.0 + point[0] ** 2), abs=1e-10
        )


def test_bracket_coincides_with_the_inverse_bivector_bracket():
    f = prolong_function(parse_expr("x0^2 + x1", 2), T3)
    g = prolong_function(parse_expr("sin(x0) * x1", 2), T3)
    via_form = symplectic_bracket(f, g, CURVED, T3)
    via_bivector = ProlongedPoisson(inverse_bivector(CURVED), T3).bracket(f, g)
    assert functions_equal(via_form, via_bivector, samples=8, rng=np.random.default_rng(5))


def test_local_decision_for_flat_and_curved_structures():
    rng = np.random.default_rng(13)
    for structure in (CANONICAL, CURVED):
        base = base_hamiltonian_field(parse_expr("x0 * x1 + x1^2", 2), structure)
        good = prolong_vector_field(base, DUAL)
        assert is_locally_hamiltonian_symplectic(
            good, structure, DUAL, samples=10, rng=np.random.default_rng(0)
        )
        bad = prolong_vector_field(
            BaseVectorField([parse_expr("0", 2), parse_expr("x1", 2)]), DUAL
        )
        assert not is_locally_hamiltonian_symplectic(
            bad, structure, DUAL, samples=10, rng=np.random.default_rng(0)
        )


def test_global_witness_signs():
    energy = prolong_function(parse_expr("(x0^2 + x1^2) / 2", 2), DUAL)
    field = hamiltonian_field(energy, CANONICAL, DUAL)
    verdict = check_global_witness_symplectic(
        field, energy, CANONICAL, DUAL, sigma=1, rng=np.random.default_rng(2)
    )
    assert verdict.ok and verdict.matched_sign == 1
    flipped = check_global_witness_symplectic(
        field, energy, CANONICAL, DUAL, sigma=-1, rng=np.random.default_rng(2)
    )
    assert not flipped.ok
    assert flipped.matched_sign == 1
    negated = field.scaled(BundleFunction.constant(-1.0, DUAL, 2))
    reverse = check_global_witness_symplectic(
        negated, energy, CANONICAL, DUAL, sigma=-1, rng=np.random.default_rng(2)
    )
    assert reverse.ok and reverse.matched_sign == -1
    stray = prolong_function(parse_expr("x0 * x1", 2), DUAL)
    assert not check_global_witness_symplectic(
        field, stray, CANONICAL, DUAL, sigma=1, rng=np.random.default_rng(2)
    ).ok


def test_prolonged_contraction_of_a_hamiltonian_field_is_closed():
    omega = prolong_form(CURVED.form, T3)
    fn = prolong_function(parse_expr("x0^2 * x1", 2), T3)
    field = hamiltonian_field(fn, CURVED, T3)
    closed = bundle_exterior_derivative(interior_product(field, omega))
    rng = np.random.default_rng(17)
    probe_x = prolong_vector_field(BaseVectorField([parse_expr("1", 2), parse_expr("0", 2)]), T3)
    probe_y = prolong_vector_field(BaseVectorField([parse_expr("0", 2), parse_expr("1", 2)]), T3)
    paired = closed.contract([probe_x, probe_y])
    for _ in range(5):
        point = sample_near_point(T3, 2, rng)
        assert paired.evaluate(point).almost_equal(T3.zero(), tol=1e-8)


def test_scaled_contraction_is_function_linear():
    omega = prolong_form(CANONICAL.form, DUAL)
    fn = prolong_function(parse_expr("x0 + x1^2", 2), DUAL)
    field = hamiltonian_field(fn, CANONICAL, DUAL)
    weight = prolong_function(parse_expr("x0 * x1", 2), DUAL)
    left = interior_product(field.scaled(weight), omega)
    right = interior_product(field, omega).scaled(weight)
    probe = prolong_vector_field(BaseVectorField([parse_expr("1", 2), parse_expr("1", 2)]), DUAL)
    a = left.contract([probe])
    b = right.contract([probe])
    assert functions_equal(a, b, samples=8, rng=np.random.default_rng(8))
