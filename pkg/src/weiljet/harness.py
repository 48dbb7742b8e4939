"""Randomized verification suite for the library's structural identities.

Every check names one identity, owns a seeded RNG stream, and reports the
worst residual it saw together with a witness that replays it.  Checks draw
algebras from a small battery of truncated algebras and compare both sides of
each identity at randomly sampled near-points.

Mutation mode reroutes a core operation (evaluation, field application, the
Poisson derivation, or matrix inversion) through an intentionally wrong
variant; the suite must catch each built-in mutation with at least one
failing check.
"""

from __future__ import annotations

import json
import time
import zlib
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .algebra import WeilAlgebra, WeilElement, make_truncated_algebra
from .bundle import (
    DEFAULT_BOX,
    BaseVectorField,
    BundleFunction,
    NearPoint,
    Term,
    apply_field,
    lie_bracket,
    max_difference,
    prolong_function,
    prolong_vector_field,
    pushforward_map,
    sample_near_point,
)
from .expression import (
    ScalarExpr,
    add,
    compose,
    const,
    differentiate,
    eval_real,
    eval_weil,
    mul,
    var,
)
from .poisson import (
    BaseCochain,
    PoissonCochain,
    PoissonStructure,
    ProlongedPoisson,
    adjoint_differential,
    check_global_witness_poisson,
    is_locally_hamiltonian_poisson,
    poisson_derivation,
    prolonged_adjoint_differential,
    prolonged_bracket,
)
from .sampling import (
    DEFAULT_SEED,
    random_base_field,
    random_base_form,
    random_bundle_function,
    random_expression,
    random_polynomial,
    sample_element,
)
from .symplectic import (
    BaseForm,
    SymplecticStructure,
    base_hamiltonian_field,
    base_interior_product,
    check_global_witness_symplectic,
    exterior_derivative,
    hamiltonian_field,
    increasing_tuples,
    interior_product,
    inverse_bivector,
    is_locally_hamiltonian_symplectic,
    prolong_form,
    symplectic_bracket,
    weil_matrix_inverse,
)

# decision thresholds used inside verdict-agreement checks
_VERDICT_TOL = 1e-8
_OPEN_MARGIN = 1e-3


# -- algebra battery ---------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraSpec:
    """One battery member: a truncated algebra named by a short key."""

    key: str
    width: int
    height: int
    label: str

    def build(self) -> WeilAlgebra:
        return battery_algebra(self.key)


BATTERY: tuple[AlgebraSpec, ...] = (
    AlgebraSpec("dual", 1, 1, "dual numbers"),
    AlgebraSpec("t3", 1, 2, "one variable, height 2"),
    AlgebraSpec("t4", 1, 3, "one variable, height 3"),
    AlgebraSpec("m2", 2, 1, "two variables, height 1"),
    AlgebraSpec("m3", 2, 2, "two variables, height 2"),
)

_BATTERY_BY_KEY = {spec.key: spec for spec in BATTERY}
ALL_ALGEBRAS = tuple(spec.key for spec in BATTERY)

_ALGEBRA_CACHE: dict[str, WeilAlgebra] = {}


def battery_algebra(key: str) -> WeilAlgebra:
    """The battery algebra for a key, built once and shared."""
    spec = _BATTERY_BY_KEY.get(key)
    if spec is None:
        raise ValueError(f"unknown battery algebra {key!r}; "
                         f"known keys: {', '.join(ALL_ALGEBRAS)}")
    cached = _ALGEBRA_CACHE.get(key)
    if cached is None:
        cached = make_truncated_algebra(spec.width, spec.height)
        _ALGEBRA_CACHE[key] = cached
    return cached


# -- specs and reports ---------------------------------------------------------------

@dataclass(frozen=True)
class CheckSpec:
    """Configuration for one named check.

    ``samples`` is the near-point count per comparison (matrix count for the
    inverse check), ``expressions`` the number of random inputs per slot.
    """

    name: str
    claim: str
    tolerance: float
    samples: int = 32
    expressions: int = 8
    seed: int = DEFAULT_SEED
    algebras: tuple[str, ...] = ALL_ALGEBRAS
    arities: tuple[int, ...] = (1, 2, 3, 4)


class CheckReport:
    """Outcome of one check: verdict, worst residual, and a replay witness."""

    __slots__ = ("name", "passed", "worst_residual", "witness", "elapsed")

    def __init__(self, name: str, passed: bool, worst_residual: float,
                 witness: dict | None, elapsed: float = 0.0):
        self.name = name
        self.passed = bool(passed)
        self.worst_residual = float(worst_residual)
        self.witness = witness
        self.elapsed = float(elapsed)

    def to_json(self, include_timing: bool = False) -> dict:
        out = {
            "name": self.name,
            "passed": self.passed,
            "worst_residual": self.worst_residual,
            "witness": self.witness,
        }
        if include_timing:
            out["elapsed"] = self.elapsed
        return out

    def json_line(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_json(include_timing=include_timing),
                          sort_keys=True, separators=(",", ":"))

    def __repr__(self):
        status = "pass" if self.passed else "FAIL"
        return f"CheckReport({self.name}: {status}, worst={self.worst_residual:.3e})"


# -- routed operations and mutations ---------------------------------------------------

@dataclass(frozen=True)
class Ops:
    """The operations checks route through, so mutations can replace them."""

    eval_weil: Callable
    apply_field: Callable
    tau_field: Callable
    matrix_inverse: Callable


def default_ops() -> Ops:
    return Ops(
        eval_weil=lambda f, coords: eval_weil(f, coords),
        apply_field=apply_field,
        tau_field=poisson_derivation,
        matrix_inverse=weil_matrix_inverse,
    )


def _dropped_partial(fn: BundleFunction, index: int) -> BundleFunction:
    # product rule with the final pullback branch dropped on genuine products
    out = BundleFunction.zero(fn.algebra, fn.arity)
    for term in fn.terms:
        pulls = term.pullbacks
        limit = len(pulls) - 1 if len(pulls) >= 2 else len(pulls)
        for j in range(limit):
            rest = pulls[:j] + pulls[j + 1:]
            dp = differentiate(pulls[j], index)
            out = out + BundleFunction(fn.algebra, fn.arity,
                                       [Term(term.coeff, rest + (dp,), term.lazies)])
        for k, lz in enumerate(term.lazies):
            rest_lz = term.lazies[:k] + term.lazies[k + 1:]
            base = BundleFunction(fn.algebra, fn.arity,
                                  [Term(term.coeff, pulls, rest_lz)])
            out = out + base * lz.partial(index)
    return out


def _mutate_tau_sign_flip(ops: Ops) -> Ops:
    base = ops.tau_field

    def flipped(structure, fn):
        return -base(structure, fn)

    return replace(ops, tau_field=flipped)


def _mutate_leibniz_drop(ops: Ops) -> Ops:
    def lossy_apply(vector_field, fn):
        out = BundleFunction.zero(fn.algebra, fn.arity)
        for i, comp in enumerate(vector_field.components):
            out = out + comp * _dropped_partial(fn, i)
        return out

    return replace(ops, apply_field=lossy_apply)


def _mutate_taylor_truncate(ops: Ops) -> Ops:
    def truncated(f, coords):
        algebra = coords[0].algebra
        return eval_weil(f, coords, order_cap=max(algebra.height - 1, 0))

    return replace(ops, eval_weil=truncated)


def _mutate_bivector_transpose(ops: Ops) -> Ops:
    base = ops.tau_field

    def transposed(structure, fn):
        twisted = ProlongedPoisson(structure.base.transpose(), structure.algebra)
        return base(twisted, fn)

    return replace(ops, tau_field=transposed)


def _mutate_neumann_skip(ops: Ops) -> Ops:
    def skipped(rows):
        algebra = rows[0][0].algebra
        return weil_matrix_inverse(rows, terms=algebra.height)

    return replace(ops, matrix_inverse=skipped)


MUTATIONS: dict[str, Callable[[Ops], Ops]] = {
    "tau_sign_flip": _mutate_tau_sign_flip,
    "leibniz_drop": _mutate_leibniz_drop,
    "taylor_truncate": _mutate_taylor_truncate,
    "bivector_transpose": _mutate_bivector_transpose,
    "neumann_skip": _mutate_neumann_skip,
}

# checks guaranteed to catch each mutation; used by tests and scripted runs
MUTATION_TARGETS: dict[str, tuple[str, ...]] = {
    "tau_sign_flip": ("tau_calculus", "prop4_prop5_global_witness"),
    "leibniz_drop": ("leibniz_derivation",),
    "taylor_truncate": ("taylor_coefficients", "dual_forward_derivative"),
    "bivector_transpose": ("tau_calculus",),
    "neumann_skip": ("matrix_inverse_neumann",),
}


# -- shared helpers ----------------------------------------------------------------

class _Tracker:
    """Running maximum residual with the witness that produced it."""

    __slots__ = ("worst", "witness")

    def __init__(self):
        self.worst = -1.0
        self.witness = None

    def update(self, residual: float, witness: dict):
        residual = float(residual)
        if residual > self.worst:
            self.worst = residual
            self.witness = witness

    def result(self) -> tuple[float, dict | None]:
        return max(self.worst, 0.0), self.witness


def _coords_json(point: NearPoint) -> list:
    return [[float(v) for v in c.coeffs] for c in point.coords]


def _element_diff(a: WeilElement, b: WeilElement) -> float:
    return float(np.max(np.abs(a.coeffs - b.coeffs)))


def _field_texts(field: BaseVectorField) -> list[str]:
    return [c.text for c in field.components]


def _poisson_structures() -> list[tuple[str, PoissonStructure]]:
    return [("canonical2", PoissonStructure.canonical(2)),
            ("rotational3", PoissonStructure.rotational())]


def _small_generators(arity: int) -> list[ScalarExpr]:
    gens: list[ScalarExpr] = [var(i, arity) for i in range(arity)]
    gens.append(mul(var(0, arity), var(arity - 1, arity)))
    return gens


def _base_poisson_defect(theta: BaseVectorField, structure: PoissonStructure,
                         gens: Sequence[ScalarExpr],
                         points: np.ndarray) -> float:
    """Worst sampled residual of the base bracket-compatibility defect."""
    defect = adjoint_differential(BaseCochain(1, theta), structure).value
    worst = 0.0
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            expr = defect(gens[i], gens[j])
            for x in points:
                worst = max(worst, abs(eval_real(expr, x.tolist())))
    return worst


def _base_symplectic_defect(theta: BaseVectorField, structure: SymplecticStructure,
                            points: np.ndarray) -> float:
    """Worst sampled coefficient of d(i_theta Omega) on the base."""
    closed = exterior_derivative(base_interior_product(theta, structure.form))
    worst = 0.0
    for expr in closed.coeffs.values():
        for x in points:
            worst = max(worst, abs(eval_real(expr, x.tolist())))
    return worst


# -- checks -----------------------------------------------------------------------

def _check_morphism_function_lift(spec: CheckSpec, ops: Ops,
                                  rng: np.random.Generator):
    tracker = _Tracker()
    for key in spec.algebras:
        algebra = battery_algebra(key)
        for idx in range(spec.expressions):
            n = spec.arities[idx % len(spec.arities)]
            f = random_expression(n, rng)
            g = random_expression(n, rng)
            lam = round(float(rng.uniform(-2.0, 2.0)), 3)
            cases = (
                ("sum", add(f, g), lambda fv, gv: fv + gv),
                ("scale", mul(const(lam, n), f), lambda fv, gv: fv * lam),
                ("product", mul(f, g), lambda fv, gv: fv * gv),
            )
            for _ in range(spec.samples):
                xi = sample_near_point(algebra, n, rng)
                fv = ops.eval_weil(f, xi.coords)
                gv = ops.eval_weil(g, xi.coords)
                for label, combined, expected in cases:
                    residual = _element_diff(ops.eval_weil(combined, xi.coords),
                                             expected(fv, gv))
                    tracker.update(residual, {
                        "algebra": key, "identity": label, "f": f.text,
                        "g": g.text, "scalar": lam, "point": _coords_json(xi),
                    })
    return tracker.result()


def _check_dual_forward_derivative(spec: CheckSpec, ops: Ops,
                                   rng: np.random.Generator):
    tracker = _Tracker()
    algebra = battery_algebra("dual")
    step = 1e-5
    for idx in range(spec.expressions):
        n = spec.arities[idx % len(spec.arities)]
        f = random_expression(n, rng)
        grads = [differentiate(f, d) for d in range(n)]
        for _ in range(spec.samples):
            x = rng.uniform(DEFAULT_BOX[0], DEFAULT_BOX[1], size=n)
            base = x.tolist()
            for d in range(n):
                coords = tuple(
                    algebra.element([base[k], 1.0]) if k == d
                    else algebra.from_real(base[k]) for k in range(n))
                slope = float(ops.eval_weil(f, coords).coeffs[1])
                exact = eval_real(grads[d], base)
                bumped = list(base)
                bumped[d] = base[d] + step
                upper = eval_real(f, bumped)
                bumped[d] = base[d] - step
                lower = eval_real(f, bumped)
                fd = (upper - lower) / (2.0 * step)
                residual = max(abs(slope - fd) / max(1.0, abs(fd)),
                               abs(slope - exact) / max(1.0, abs(exact)))
                tracker.update(residual, {
                    "f": f.text, "direction": d, "x": [float(v) for v in base],
                    "slope": slope, "finite_difference": float(fd),
                })
    return tracker.result()


def _check_taylor_coefficients(spec: CheckSpec, ops: Ops,
                               rng: np.random.Generator):
    tracker = _Tracker()
    for key in spec.algebras:
        if _BATTERY_BY_KEY[key].width != 1:
            continue
        algebra = battery_algebra(key)
        height = algebra.height
        for _ in range(spec.expressions):
            f = random_expression(1, rng)
            derivs = [f]
            for _ in range(height):
                derivs.append(differentiate(derivs[-1], 0))
            for _ in range(spec.samples):
                x = float(rng.uniform(DEFAULT_BOX[0], DEFAULT_BOX[1]))
                jet = ops.eval_weil(f, (algebra.from_real(x)
                                        + algebra.basis_element(1),))
                factorial = 1.0
                for k in range(height + 1):
                    if k:
                        factorial *= k
                    expected = eval_real(derivs[k], [x]) / factorial
                    tracker.update(abs(float(jet.coeffs[k]) - expected), {
                        "algebra": key, "f": f.text, "x": x, "order": k,
                        "coefficient": float(jet.coeffs[k]),
                        "expected": float(expected),
                    })
    return tracker.result()


def _check_lie_morphism_fields(spec: CheckSpec, ops: Ops,
                               rng: np.random.Generator):
    tracker = _Tracker()
    for key in spec.algebras:
        algebra = battery_algebra(key)
        for idx in range(spec.expressions):
            n = spec.arities[idx % len(spec.arities)]
            theta1 = random_base_field(n, rng)
            theta2 = random_base_field(n, rng)
            f = random_polynomial(n, rng, max_degree=2)
            lifted1 = prolong_vector_field(theta1, algebra)
            lifted2 = prolong_vector_field(theta2, algebra)
            scaled_base = BaseVectorField(
                [mul(f, c) for c in theta1.components])
            summed_base = BaseVectorField(
                [add(a, b) for a, b in zip(theta1.components, theta2.components)])
            cases = (
                ("bracket", prolong_vector_field(theta1.bracket(theta2), algebra),
                 lie_bracket(lifted1, lifted2)),
                ("scaling", prolong_vector_field(scaled_base, algebra),
                 lifted1.scaled(BundleFunction.from_expr(f, algebra))),
                ("sum", prolong_vector_field(summed_base, algebra),
                 lifted1 + lifted2),
            )
            for label, lhs, rhs in cases:
                for i in range(n):
                    residual, point = max_difference(
                        lhs.components[i], rhs.components[i],
                        samples=spec.samples, rng=rng)
                    tracker.update(residual, {
                        "algebra": key, "identity": label, "component": i,
                        "theta1": _field_texts(theta1),
                        "theta2": _field_texts(theta2),
                        "factor": f.text, "point": _coords_json(point),
                    })
    return tracker.result()


def _check_functoriality_composition(spec: CheckSpec, ops: Ops,
                                     rng: np.random.Generator):
    tracker = _Tracker()
    for key in spec.algebras:
        algebra = battery_algebra(key)
        for _ in range(spec.expressions):
            smooth_map = [random_polynomial(2, rng, max_degree=2, max_terms=3)
                          for _ in range(2)]
            g = random_expression(2, rng)
            composed = compose(g, smooth_map)
            for _ in range(spec.samples):
                xi = sample_near_point(algebra, 2, rng)
                eta = pushforward_map(smooth_map, xi)
                residual = _element_diff(ops.eval_weil(composed, xi.coords),
                                         ops.eval_weil(g, eta.coords))
                tracker.update(residual, {
                    "algebra": key, "map": [c.text for c in smooth_map],
                    "g": g.text, "point": _coords_json(xi),
                })
    return tracker.result()


def _check_prop1_cochain_prolongation(spec: CheckSpec, ops: Ops,
                                      rng: np.random.Generator):
    tracker = _Tracker()
    for key in spec.algebras:
        algebra = battery_algebra(key)
        for sname, structure in _poisson_structures():
            n = structure.arity
            prolonged = ProlongedPoisson(structure, algebra)
            for _ in range(spec.expressions):
                eta = random_base_field(n, rng, max_degree=2)
                base_defect = adjoint_differential(
                    BaseCochain(1, eta), structure).value
                lifted_defect = prolonged_adjoint_differential(
                    PoissonCochain(1, prolong_vector_field(eta, algebra)),
                    prolonged).value
                for _ in range(6):
                    f = random_polynomial(n, rng, max_degree=2)
                    g = random_polynomial(n, rng, max_degree=2)
                    lhs = lifted_defect(prolong_function(f, algebra),
                                        prolong_function(g, algebra))
                    rhs = prolong_function(base_defect(f, g), algebra)
                    residual, point = max_difference(lhs, rhs,
                                                     samples=spec.samples, rng=rng)
                    tracker.update(residual, {
                        "algebra": key, "structure": sname,
                        "eta": _field_texts(eta), "f": f.text, "g": g.text,
                        "point": _coords_json(point),
                    })
    return tracker.result()


def _check_prop2_local_iff(spec: CheckSpec, ops: Ops, rng: np.random.Generator):
    structure = PoissonStructure.rotational()
    n = structure.arity
    gens = _small_generators(n)
    probe = rng.uniform(DEFAULT_BOX[0], DEFAULT_BOX[1], size=(4, n))
    cases: list[tuple[str, BaseVectorField, float]] = []
    for _ in range(spec.expressions):
        f = random_polynomial(n, rng, max_degree=2)
        theta = structure.ad(f)
        cases.append(("closed", theta, _base_poisson_defect(theta, structure,
                                                            gens, probe)))
    for _ in range(spec.expressions):
        theta, defect = None, 0.0
        for _ in range(50):
            candidate = random_base_field(n, rng, max_degree=2)
            value = _base_poisson_defect(candidate, structure, gens, probe)
            if value > defect:
                theta, defect = candidate, value
            if defect > _OPEN_MARGIN:
                break
        cases.append(("open", theta, defect))
    disagreements = 0
    witness = None
    for key in spec.algebras:
        algebra = battery_algebra(key)
        prolonged = ProlongedPoisson(structure, algebra)
        for kind, theta, base_defect in cases:
            base_verdict = base_defect <= _VERDICT_TOL
            lifted_verdict = is_locally_hamiltonian_poisson(
                prolong_vector_field(theta, algebra), prolonged, gens,
                samples=spec.samples, tol=_VERDICT_TOL, rng=rng)
            if lifted_verdict != base_verdict:
                disagreements += 1
                witness = {
                    "algebra": key, "kind": kind, "theta": _field_texts(theta),
                    "base_defect": float(base_defect),
                    "base_verdict": base_verdict,
                    "lifted_verdict": lifted_verdict,
                }
    if witness is None:
        witness = {"cases": len(cases) * len(spec.algebras), "disagreements": 0}
    return float(disagreements), witness


def _check_prop3_bracket_derivation(spec: CheckSpec, ops: Ops,
                                    rng: np.random.Generator):
    tracker = _Tracker()
    for key in spec.algebras:
        algebra = battery_algebra(key)
        for sname, structure in _poisson_structures():
            n = structure.arity
            prolonged = ProlongedPoisson(structure, algebra)
            chi = random_polynomial(n, rng, max_degree=3)
            derivation = poisson_derivation(prolonged,
                                            prolong_function(chi, algebra))
            if not is_locally_hamiltonian_poisson(
                    derivation, prolonged, _small_generators(n),
                    samples=spec.samples, tol=_VERDICT_TOL, rng=rng):
                tracker.update(1.0, {
                    "algebra": key, "structure": sname, "chi": chi.text,
                    "reason": "premise field failed the local test",
                })
                continue
            for _ in range(spec.expressions):
                phi = prolong_function(random_polynomial(n, rng, max_degree=2),
                                       algebra)
                psi = prolong_function(random_polynomial(n, rng, max_degree=2),
                                       algebra)
                lhs = ops.apply_field(derivation,
                                      prolonged_bracket(prolonged, phi, psi))
                rhs = (prolonged_bracket(prolonged,
                                         ops.apply_field(derivation, phi), psi)
                       + prolonged_bracket(prolonged, phi,
                                           ops.apply_field(derivation, psi)))
                residual, point = max_difference(lhs, rhs,
                                                 samples=spec.samples, rng=rng)
                tracker.update(residual, {
                    "algebra": key, "structure": sname, "chi": chi.text,
                    "point": _coords_json(point),
                })
    return tracker.result()


def _check_prop4_prop5_global_witness(spec: CheckSpec, ops: Ops,
                                      rng: np.random.Generator):
    tracker = _Tracker()
    for key in spec.algebras:
        algebra = battery_algebra(key)
        for sname, structure in _poisson_structures():
            n = structure.arity
            prolonged = ProlongedPoisson(structure, algebra)
            f = random_polynomial(n, rng, max_degree=3)
            lifted_potential = prolong_function(f, algebra)
            lifted_field = prolong_vector_field(structure.ad(f), algebra)
            derivation = ops.tau_field(prolonged, lifted_potential)
            for i in range(n):
                residual, point = max_difference(
                    lifted_field.components[i], derivation.components[i],
                    samples=spec.samples, rng=rng)
                tracker.update(residual, {
                    "algebra": key, "structure": sname, "part": "field",
                    "f": f.text, "component": i, "point": _coords_json(point),
                })
            for _ in range(spec.expressions):
                psi = random_bundle_function(algebra, n, rng)
                residual, point = max_difference(
                    apply_field(lifted_field, psi),
                    apply_field(derivation, psi),
                    samples=spec.samples, rng=rng)
                tracker.update(residual, {
                    "algebra": key, "structure": sname, "part": "bracket",
                    "f": f.text, "point": _coords_json(point),
                })
            if not check_global_witness_poisson(
                    lifted_field, lifted_potential, prolonged,
                    samples=spec.samples, tol=_VERDICT_TOL, rng=rng):
                tracker.update(1.0, {
                    "algebra": key, "structure": sname, "part": "witness",
                    "f": f.text,
                })
    return tracker.result()


def _check_prop6_interior_prolongation(spec: CheckSpec, ops: Ops,
                                       rng: np.random.Generator):
    tracker = _Tracker()
    n = spec.arities[0]
    for key in spec.algebras:
        algebra = battery_algebra(key)
        for degree in (1, 2):
            for _ in range(spec.expressions):
                theta = random_base_field(n, rng, max_degree=2)
                omega = random_base_form(n, degree, rng)
                lhs = prolong_form(base_interior_product(theta, omega), algebra)
                rhs = interior_product(prolong_vector_field(theta, algebra),
                                       prolong_form(omega, algebra))
                for idx in increasing_tuples(n, degree - 1):
                    residual, point = max_difference(
                        lhs.coefficient(idx), rhs.coefficient(idx),
                        samples=spec.samples, rng=rng)
                    tracker.update(residual, {
                        "algebra": key, "degree": degree, "index": list(idx),
                        "theta": _field_texts(theta), "point": _coords_json(point),
                    })
    return tracker.result()


def _check_thm1_bracket_coincidence(spec: CheckSpec, ops: Ops,
                                    rng: np.random.Generator):
    tracker = _Tracker()
    for key in spec.algebras:
        algebra = battery_algebra(key)
        for n in spec.arities:
            structure = SymplecticStructure.canonical(n)
            bivector = inverse_bivector(structure)
            prolonged = ProlongedPoisson(bivector, algebra)
            for _ in range(spec.expressions):
                phi = random_bundle_function(algebra, n, rng)
                psi = random_bundle_function(algebra, n, rng)
                lhs = symplectic_bracket(phi, psi, structure, algebra)
                rhs = apply_field(ops.tau_field(prolonged, phi), psi)
                residual, point = max_difference(lhs, rhs,
                                                 samples=spec.samples, rng=rng)
                tracker.update(residual, {
                    "algebra": key, "arity": n, "part": "bracket",
                    "point": _coords_json(point),
                })
            f = random_polynomial(n, rng, max_degree=3)
            solved = hamiltonian_field(prolong_function(f, algebra),
                                       structure, algebra)
            lifted = prolong_vector_field(base_hamiltonian_field(f, structure),
                                          algebra)
            for i in range(n):
                residual, point = max_difference(
                    solved.components[i], lifted.components[i],
                    samples=spec.samples, rng=rng)
                tracker.update(residual, {
                    "algebra": key, "arity": n, "part": "field", "f": f.text,
                    "component": i, "point": _coords_json(point),
                })
    return tracker.result()


def _check_thm2_symplectic_derivation(spec: CheckSpec, ops: Ops,
                                      rng: np.random.Generator):
    tracker = _Tracker()
    structure = SymplecticStructure.canonical(2)
    bivector = inverse_bivector(structure)
    for key in spec.algebras:
        algebra = battery_algebra(key)
        prolonged = ProlongedPoisson(bivector, algebra)
        f = random_polynomial(2, rng, max_degree=3)
        lifted_field = prolong_vector_field(base_hamiltonian_field(f, structure),
                                            algebra)
        if not is_locally_hamiltonian_symplectic(
                lifted_field, structure, algebra,
                samples=spec.samples, tol=_VERDICT_TOL, rng=rng):
            tracker.update(1.0, {
                "algebra": key, "f": f.text,
                "reason": "premise field failed the local test",
            })
            continue
        # one anchor pair through the pointwise-solved bracket itself
        phi0 = prolong_function(random_polynomial(2, rng, max_degree=2), algebra)
        psi0 = prolong_function(random_polynomial(2, rng, max_degree=2), algebra)
        lhs0 = ops.apply_field(lifted_field,
                               symplectic_bracket(phi0, psi0, structure, algebra))
        rhs0 = (symplectic_bracket(ops.apply_field(lifted_field, phi0), psi0,
                                   structure, algebra)
                + symplectic_bracket(phi0, ops.apply_field(lifted_field, psi0),
                                     structure, algebra))
        residual, point = max_difference(lhs0, rhs0, samples=spec.samples, rng=rng)
        tracker.update(residual, {
            "algebra": key, "f": f.text, "part": "solved_bracket",
            "point": _coords_json(point),
        })
        # remaining pairs through the equivalent inverse-bivector bracket
        for _ in range(spec.expressions):
            phi = prolong_function(random_polynomial(2, rng, max_degree=2),
                                   algebra)
            psi = prolong_function(random_polynomial(2, rng, max_degree=2),
                                   algebra)
            lhs = ops.apply_field(lifted_field,
                                  prolonged_bracket(prolonged, phi, psi))
            rhs = (prolonged_bracket(prolonged,
                                     ops.apply_field(lifted_field, phi), psi)
                   + prolonged_bracket(prolonged, phi,
                                       ops.apply_field(lifted_field, psi)))
            residual, point = max_difference(lhs, rhs,
                                             samples=spec.samples, rng=rng)
            tracker.update(residual, {
                "algebra": key, "f": f.text, "part": "bivector_bracket",
                "point": _coords_json(point),
            })
    return tracker.result()


def _check_prop7_symplectic_global(spec: CheckSpec, ops: Ops,
                                   rng: np.random.Generator):
    tracker = _Tracker()
    structure = SymplecticStructure.canonical(2)
    for key in spec.algebras:
        algebra = battery_algebra(key)
        for _ in range(spec.expressions):
            f = random_polynomial(2, rng, max_degree=3)
            lifted_field = prolong_vector_field(
                base_hamiltonian_field(f, structure), algebra)
            verdict = check_global_witness_symplectic(
                lifted_field, prolong_function(f, algebra), structure, algebra,
                sigma=1, samples=spec.samples, tol=spec.tolerance, rng=rng)
            residual = verdict.residual if verdict.ok else max(verdict.residual, 1.0)
            tracker.update(residual, {
                "algebra": key, "f": f.text,
                "matched_sign": verdict.matched_sign,
            })
    return tracker.result()


def _mat_mul(a, b, size):
    return [[sum((a[i][k] * b[k][j] for k in range(size)),
                 a[0][0].algebra.zero()) for j in range(size)]
            for i in range(size)]


def _check_matrix_inverse_neumann(spec: CheckSpec, ops: Ops,
                                  rng: np.random.Generator):
    tracker = _Tracker()
    for key in spec.algebras:
        algebra = battery_algebra(key)
        dim = algebra.dim
        for trial in range(spec.samples):
            size = 2 + (trial % 3)
            while True:
                real = rng.uniform(-2.0, 2.0, size=(size, size))
                if np.linalg.cond(real) < 100.0:
                    break
            rows = [[algebra.element(np.concatenate(
                         ([real[i][j]], rng.uniform(-1.0, 1.0, dim - 1))))
                     for j in range(size)] for i in range(size)]
            inverse = ops.matrix_inverse(rows)
            product = _mat_mul(rows, inverse, size)
            residual = 0.0
            for i in range(size):
                for j in range(size):
                    target = algebra.from_real(1.0 if i == j else 0.0)
                    residual = max(residual,
                                   _element_diff(product[i][j], target))
            tracker.update(residual, {
                "algebra": key, "size": size,
                "matrix": [[[float(v) for v in entry.coeffs] for entry in row]
                           for row in rows],
            })
    return tracker.result()


def _check_leibniz_derivation(spec: CheckSpec, ops: Ops,
                              rng: np.random.Generator):
    tracker = _Tracker()
    n = spec.arities[0]
    for key in spec.algebras:
        algebra = battery_algebra(key)
        for _ in range(spec.expressions):
            theta = random_base_field(n, rng, max_degree=2)
            lifted = prolong_vector_field(theta, algebra)
            phi = prolong_function(random_polynomial(n, rng, max_degree=2),
                                   algebra)
            psi = prolong_function(random_polynomial(n, rng, max_degree=2),
                                   algebra)
            chi = random_bundle_function(algebra, n, rng)
            for label, left, right in (("pullbacks", phi, psi),
                                       ("mixed", phi, chi)):
                lhs = ops.apply_field(lifted, left * right)
                rhs = (ops.apply_field(lifted, left) * right
                       + left * ops.apply_field(lifted, right))
                residual, point = max_difference(lhs, rhs,
                                                 samples=spec.samples, rng=rng)
                tracker.update(residual, {
                    "algebra": key, "case": label,
                    "theta": _field_texts(theta), "point": _coords_json(point),
                })
    return tracker.result()


def _check_tau_calculus(spec: CheckSpec, ops: Ops, rng: np.random.Generator):
    tracker = _Tracker()
    for key in spec.algebras:
        algebra = battery_algebra(key)
        for sname, structure in _poisson_structures():
            n = structure.arity
            prolonged = ProlongedPoisson(structure, algebra)
            for _ in range(spec.expressions):
                f = random_polynomial(n, rng, max_degree=2)
                g = random_polynomial(n, rng, max_degree=2)
                anchored = apply_field(
                    ops.tau_field(prolonged, prolong_function(f, algebra)),
                    prolong_function(g, algebra))
                residual, point = max_difference(
                    anchored, prolong_function(structure.bracket(f, g), algebra),
                    samples=spec.samples, rng=rng)
                tracker.update(residual, {
                    "algebra": key, "structure": sname, "identity": "base_anchor",
                    "f": f.text, "g": g.text, "point": _coords_json(point),
                })
                phi = random_bundle_function(algebra, n, rng)
                psi = random_bundle_function(algebra, n, rng)
                scale = sample_element(algebra, rng)
                tau_phi = ops.tau_field(prolonged, phi)
                tau_psi = ops.tau_field(prolonged, psi)
                cases = (
                    ("additivity", ops.tau_field(prolonged, phi + psi),
                     tau_phi + tau_psi),
                    ("module_linearity", ops.tau_field(prolonged, phi * scale),
                     tau_phi.scaled(BundleFunction.constant(scale, algebra, n))),
                    ("leibniz", ops.tau_field(prolonged, phi * psi),
                     tau_psi.scaled(phi) + tau_phi.scaled(psi)),
                )
                for label, lhs, rhs in cases:
                    for i in range(n):
                        residual, point = max_difference(
                            lhs.components[i], rhs.components[i],
                            samples=spec.samples, rng=rng)
                        tracker.update(residual, {
                            "algebra": key, "structure": sname,
                            "identity": label, "component": i,
                            "point": _coords_json(point),
                        })
    return tracker.result()


def _check_bracket_prolongation_poisson(spec: CheckSpec, ops: Ops,
                                        rng: np.random.Generator):
    tracker = _Tracker()
    for key in spec.algebras:
        algebra = battery_algebra(key)
        for sname, structure in _poisson_structures():
            n = structure.arity
            prolonged = ProlongedPoisson(structure, algebra)
            zero = BundleFunction.zero(algebra, n)
            for _ in range(spec.expressions):
                f = random_polynomial(n, rng, max_degree=2)
                g = random_polynomial(n, rng, max_degree=2)
                lhs = prolonged.bracket(prolong_function(f, algebra),
                                        prolong_function(g, algebra))
                rhs = prolong_function(structure.bracket(f, g), algebra)
                residual, point = max_difference(lhs, rhs,
                                                 samples=spec.samples, rng=rng)
                tracker.update(residual, {
                    "algebra": key, "structure": sname,
                    "identity": "prolongation", "f": f.text, "g": g.text,
                    "point": _coords_json(point),
                })
                phi = random_bundle_function(algebra, n, rng)
                psi = random_bundle_function(algebra, n, rng)
                skew = prolonged.bracket(phi, psi) + prolonged.bracket(psi, phi)
                residual, point = max_difference(skew, zero,
                                                 samples=spec.samples, rng=rng)
                tracker.update(residual, {
                    "algebra": key, "structure": sname,
                    "identity": "antisymmetry", "point": _coords_json(point),
                })
    return tracker.result()


def _check_poisson_leibniz(spec: CheckSpec, ops: Ops, rng: np.random.Generator):
    tracker = _Tracker()
    for key in spec.algebras:
        algebra = battery_algebra(key)
        for sname, structure in _poisson_structures():
            n = structure.arity
            prolonged = ProlongedPoisson(structure, algebra)
            for _ in range(spec.expressions):
                phi1 = random_bundle_function(algebra, n, rng)
                phi2 = random_bundle_function(algebra, n, rng)
                phi3 = random_bundle_function(algebra, n, rng)
                lhs = prolonged.bracket(phi1 * phi2, phi3)
                rhs = (prolonged.bracket(phi1, phi3) * phi2
                       + phi1 * prolonged.bracket(phi2, phi3))
                residual, point = max_difference(lhs, rhs,
                                                 samples=spec.samples, rng=rng)
                tracker.update(residual, {
                    "algebra": key, "structure": sname,
                    "point": _coords_json(point),
                })
    return tracker.result()


def _check_chain_rule_soundness(spec: CheckSpec, ops: Ops,
                                rng: np.random.Generator):
    tracker = _Tracker()
    for key in spec.algebras:
        algebra = battery_algebra(key)
        for idx in range(spec.expressions):
            n = spec.arities[idx % len(spec.arities)]
            theta = random_base_field(n, rng)
            f = random_expression(n, rng)
            lifted = prolong_vector_field(theta, algebra)
            lhs = ops.apply_field(lifted, prolong_function(f, algebra))
            rhs = prolong_function(theta.apply_to(f), algebra)
            residual, point = max_difference(lhs, rhs,
                                             samples=spec.samples, rng=rng)
            tracker.update(residual, {
                "algebra": key, "identity": "chain",
                "theta": _field_texts(theta), "f": f.text,
                "point": _coords_json(point),
            })
            for i in range(n):
                coordinate = prolong_function(var(i, n), algebra)
                residual, point = max_difference(
                    apply_field(lifted, coordinate), lifted.components[i],
                    samples=spec.samples, rng=rng)
                tracker.update(residual, {
                    "algebra": key, "identity": "coordinate", "component": i,
                    "theta": _field_texts(theta), "point": _coords_json(point),
                })
    return tracker.result()


def _check_jacobi_field_bracket(spec: CheckSpec, ops: Ops,
                                rng: np.random.Generator):
    tracker = _Tracker()
    n = spec.arities[0]
    for key in spec.algebras:
        algebra = battery_algebra(key)
        zero = BundleFunction.zero(algebra, n)
        for _ in range(spec.expressions):
            fields = [prolong_vector_field(random_base_field(n, rng, max_degree=2),
                                           algebra) for _ in range(3)]
            x, y, z = fields
            skew = lie_bracket(x, y) + lie_bracket(y, x)
            cyclic = (lie_bracket(lie_bracket(x, y), z)
                      + lie_bracket(lie_bracket(y, z), x)
                      + lie_bracket(lie_bracket(z, x), y))
            for label, combo in (("antisymmetry", skew), ("jacobi", cyclic)):
                for i in range(n):
                    residual, point = max_difference(
                        combo.components[i], zero,
                        samples=spec.samples, rng=rng)
                    tracker.update(residual, {
                        "algebra": key, "identity": label, "component": i,
                        "point": _coords_json(point),
                    })
    return tracker.result()


def _symplectic_structures() -> list[tuple[str, SymplecticStructure]]:
    curved = SymplecticStructure(BaseForm(2, 2, {(0, 1): "1 + x0^2"}))
    return [("canonical2", SymplecticStructure.canonical(2)),
            ("curved2", curved)]


def _check_symplectic_local_equivalence(spec: CheckSpec, ops: Ops,
                                        rng: np.random.Generator):
    disagreements = 0
    witness = None
    cases_total = 0
    for sname, structure in _symplectic_structures():
        n = structure.arity
        probe = rng.uniform(DEFAULT_BOX[0], DEFAULT_BOX[1], size=(4, n))
        cases: list[tuple[str, BaseVectorField, float]] = []
        for _ in range(spec.expressions):
            f = random_polynomial(n, rng, max_degree=2)
            theta = base_hamiltonian_field(f, structure)
            cases.append(("closed", theta,
                          _base_symplectic_defect(theta, structure, probe)))
        for _ in range(spec.expressions):
            theta, defect = None, 0.0
            for _ in range(50):
                candidate = random_base_field(n, rng, max_degree=2)
                value = _base_symplectic_defect(candidate, structure, probe)
                if value > defect:
                    theta, defect = candidate, value
                if defect > _OPEN_MARGIN:
                    break
            cases.append(("open", theta, defect))
        for key in spec.algebras:
            algebra = battery_algebra(key)
            for kind, theta, base_defect in cases:
                cases_total += 1
                base_verdict = base_defect <= _VERDICT_TOL
                lifted_verdict = is_locally_hamiltonian_symplectic(
                    prolong_vector_field(theta, algebra), structure, algebra,
                    samples=spec.samples, tol=_VERDICT_TOL, rng=rng)
                if lifted_verdict != base_verdict:
                    disagreements += 1
                    witness = {
                        "structure": sname, "algebra": key, "kind": kind,
                        "theta": _field_texts(theta),
                        "base_defect": float(base_defect),
                        "base_verdict": base_verdict,
                        "lifted_verdict": lifted_verdict,
                    }
    if witness is None:
        witness = {"cases": cases_total, "disagreements": 0}
    return float(disagreements), witness


# -- registry and runner ------------------------------------------------------------

_CHECKS: tuple[tuple[CheckSpec, Callable], ...] = (
    (CheckSpec("morphism_function_lift",
               "sums, scalar multiples, and products lift through prolongation",
               1e-9, samples=32, expressions=8),
     _check_morphism_function_lift),
    (CheckSpec("dual_forward_derivative",
               "dual-number nilpotent parts recover first derivatives, checked "
               "against symbolic and central finite differences",
               1e-6, samples=4, expressions=20, algebras=("dual",)),
     _check_dual_forward_derivative),
    (CheckSpec("taylor_coefficients",
               "single-variable jets carry k-th derivatives over k! as "
               "coefficients",
               1e-7, samples=4, expressions=8,
               algebras=("dual", "t3", "t4"), arities=(1,)),
     _check_taylor_coefficients),
    (CheckSpec("lie_morphism_fields",
               "field prolongation preserves brackets, function scaling, and "
               "sums",
               1e-8, samples=6, expressions=8, arities=(1, 2, 3)),
     _check_lie_morphism_fields),
    (CheckSpec("functoriality_composition",
               "composition with a polynomial map lifts through the "
               "pushforward of near-points",
               1e-9, samples=8, expressions=8, arities=(2,)),
     _check_functoriality_composition),
    (CheckSpec("prop1_cochain_prolongation",
               "the adjoint differential of a lifted 1-cochain is the lifted "
               "base defect",
               1e-8, samples=6, expressions=4),
     _check_prop1_cochain_prolongation),
    (CheckSpec("prop2_local_iff",
               "base and lifted local-hamiltonicity verdicts agree (residual "
               "counts disagreements)",
               0.5, samples=4, expressions=6, arities=(3,)),
     _check_prop2_local_iff),
    (CheckSpec("prop3_bracket_derivation",
               "locally hamiltonian fields derive the prolonged Poisson "
               "bracket",
               1e-8, samples=4, expressions=10),
     _check_prop3_bracket_derivation),
    (CheckSpec("prop4_prop5_global_witness",
               "hamiltonian fields prolong to the Poisson derivation of the "
               "lifted potential, as fields and on brackets",
               1e-8, samples=6, expressions=10),
     _check_prop4_prop5_global_witness),
    (CheckSpec("prop6_interior_prolongation",
               "interior products commute with prolongation in degrees 1 and 2",
               1e-8, samples=6, expressions=4, arities=(3,)),
     _check_prop6_interior_prolongation),
    (CheckSpec("thm1_bracket_coincidence",
               "the symplectic bracket equals the inverse-bivector Poisson "
               "bracket, and hamiltonian fields commute with prolongation",
               1e-8, samples=4, expressions=5, arities=(2, 4)),
     _check_thm1_bracket_coincidence),
    (CheckSpec("thm2_symplectic_derivation",
               "locally hamiltonian fields derive the prolonged symplectic "
               "bracket",
               1e-8, samples=4, expressions=10, arities=(2,)),
     _check_thm2_symplectic_derivation),
    (CheckSpec("prop7_symplectic_global",
               "lifted hamiltonian fields certify their lifted potentials "
               "under the configured sign",
               1e-8, samples=4, expressions=8, arities=(2,)),
     _check_prop7_symplectic_global),
    (CheckSpec("matrix_inverse_neumann",
               "nilpotent-series inverses of matrices with well-conditioned "
               "real part multiply back to the identity",
               1e-9, samples=50, expressions=0),
     _check_matrix_inverse_neumann),
    (CheckSpec("leibniz_derivation",
               "prolonged fields satisfy the Leibniz rule on products",
               1e-9, samples=8, expressions=4, arities=(2,)),
     _check_leibniz_derivation),
    (CheckSpec("tau_calculus",
               "the Poisson derivation map anchors to base brackets and is "
               "additive, module-linear, and Leibniz",
               1e-8, samples=4, expressions=3),
     _check_tau_calculus),
    (CheckSpec("bracket_prolongation_poisson",
               "the prolonged bracket restricts to the lifted base bracket "
               "and is antisymmetric",
               1e-8, samples=6, expressions=4),
     _check_bracket_prolongation_poisson),
    (CheckSpec("poisson_leibniz",
               "the prolonged bracket is a derivation in its function slots",
               1e-8, samples=6, expressions=4),
     _check_poisson_leibniz),
    (CheckSpec("chain_rule_soundness",
               "applying a prolonged field matches the lifted directional "
               "derivative; canonical components reconstruct the field",
               1e-9, samples=8, expressions=6, arities=(1, 2, 3)),
     _check_chain_rule_soundness),
    (CheckSpec("jacobi_field_bracket",
               "the bracket of prolonged fields is antisymmetric and "
               "satisfies the Jacobi identity",
               1e-8, samples=4, expressions=2, arities=(2,)),
     _check_jacobi_field_bracket),
    (CheckSpec("symplectic_local_equivalence",
               "base and lifted symplectic local tests agree, including a "
               "curved structure (residual counts disagreements)",
               0.5, samples=3, expressions=3, arities=(2,)),
     _check_symplectic_local_equivalence),
)

_REGISTRY: dict[str, tuple[Callable, CheckSpec]] = {
    spec.name: (fn, spec) for spec, fn in _CHECKS
}

CHECK_NAMES = tuple(sorted(_REGISTRY))


def default_specs(*, seed: int = DEFAULT_SEED, name_filter: str | None = None,
                  names: Sequence[str] | None = None,
                  algebras: Sequence[str] | None = None,
                  samples: int | None = None) -> list[CheckSpec]:
    """The registered specs, reseeded and optionally filtered or resized."""
    wanted = None if names is None else set(names)
    if wanted is not None:
        unknown = wanted - set(CHECK_NAMES)
        if unknown:
            raise ValueError(f"unknown check {sorted(unknown)[0]!r}")
    out = []
    for name in CHECK_NAMES:
        if wanted is not None and name not in wanted:
            continue
        if name_filter and name_filter not in name:
            continue
        spec = replace(_REGISTRY[name][1], seed=seed)
        if algebras is not None:
            keep = tuple(k for k in spec.algebras if k in algebras)
            if not keep:
                continue
            spec = replace(spec, algebras=keep)
        if samples is not None:
            spec = replace(spec, samples=samples)
        out.append(spec)
    return out


def run_suite(specs: Sequence[CheckSpec] | None = None, *,
              ops: Ops | None = None,
              mutation: str | None = None) -> list[CheckReport]:
    """Run checks and return their reports sorted by name.

    Failures are data: no exception escapes a check.  ``mutation`` reroutes
    the named core operation through its intentionally wrong variant.
    """
    if specs is None:
        specs = default_specs()
    if ops is None:
        ops = default_ops()
    if mutation is not None:
        mutator = MUTATIONS.get(mutation)
        if mutator is None:
            raise ValueError(f"unknown mutation {mutation!r}; "
                             f"known: {', '.join(sorted(MUTATIONS))}")
        ops = mutator(ops)
    reports = []
    for spec in sorted(specs, key=lambda s: s.name):
        entry = _REGISTRY.get(spec.name)
        if entry is None:
            raise ValueError(f"unknown check {spec.name!r}")
        fn = entry[0]
        rng = np.random.default_rng([spec.seed,
                                     zlib.crc32(spec.name.encode("ascii"))])
        start = time.perf_counter()
        residual, witness = fn(spec, ops, rng)
        elapsed = time.perf_counter() - start
        reports.append(CheckReport(spec.name, residual <= spec.tolerance,
                                   residual, witness, elapsed))
    return reports


__all__ = [
    "ALL_ALGEBRAS",
    "BATTERY",
    "CHECK_NAMES",
    "MUTATIONS",
    "MUTATION_TARGETS",
    "AlgebraSpec",
    "CheckReport",
    "CheckSpec",
    "Ops",
    "battery_algebra",
    "default_ops",
    "default_specs",
    "run_suite",
]
