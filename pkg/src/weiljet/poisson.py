"""Poisson structures and their prolongation to near-point spaces.

A Poisson structure on an open subset of R^n is an antisymmetric bivector
pi_ij of expressions whose bracket {f,g} = sum pi_ij df/dx_i dg/dx_j
satisfies the Jacobi identity (sampled at construction).  Prolonging over a
Weil algebra A gives a bracket on representable A-valued functions that is
computed structurally: on a pullback f^A the associated derivation is the
prolongation of the base hamiltonian field of f, and it extends to products
by the Leibniz rule and to algebra-element coefficients linearly.

The cochain complex in degrees 0..2 carries the differential of the adjoint
representation: functions go to their hamiltonian derivations, vector fields
go to their bracket-compatibility defect.  A field is locally hamiltonian
when that defect vanishes, globally hamiltonian when a potential function
produces it exactly; both tests are sampled, never searched.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .algebra import WeilAlgebra, WeilElement
from .bundle import (
    DEFAULT_BOX,
    BaseVectorField,
    BundleFunction,
    BundleVectorField,
    Term,
    apply_field,
    max_difference,
    prolong_function,
    prolong_vector_field,
)
from .errors import AlgebraMismatch, ArityError, DegreeError, InvalidPoissonStructure
from .expression import (
    Const,
    ScalarExpr,
    add,
    const,
    differentiate,
    eval_real,
    mul,
    neg,
    parse_expr,
    sub,
    var,
)


def _coerce_entry(value, arity: int) -> ScalarExpr:
    if isinstance(value, ScalarExpr):
        if value.arity != arity:
            raise ArityError("bivector entry arity does not match the structure")
        return value
    if isinstance(value, str):
        return parse_expr(value, arity)
    if isinstance(value, (int, float)):
        return const(float(value), arity)
    raise TypeError(f"cannot read a bivector entry from {type(value).__name__}")


class PoissonStructure:
    """Antisymmetric bivector on a base open, stored as its upper triangle."""

    def __init__(self, arity: int, bivector: dict, *, validate: bool = True,
                 samples: int = 12, tol: float = 1e-8,
                 rng: np.random.Generator | None = None,
                 box: tuple[float, float] = DEFAULT_BOX):
        if arity < 1:
            raise ArityError("a Poisson structure needs at least one coordinate")
        entries: dict[tuple[int, int], ScalarExpr] = {}
        for key, raw in bivector.items():
            i, j = key
            if not (0 <= i < arity and 0 <= j < arity):
                raise ArityError(f"bivector index {key} out of range")
            if i == j:
                raise InvalidPoissonStructure("diagonal bivector entries must be zero")
            expr = _coerce_entry(raw, arity)
            if i > j:
                i, j, expr = j, i, neg(expr)
            if (i, j) in entries:
                raise InvalidPoissonStructure(f"duplicate bivector entry for {(i, j)}")
            if not (isinstance(expr, Const) and expr.value == 0.0):
                entries[(i, j)] = expr
        self.arity = arity
        self._entries = entries
        self._ad_cache: dict[ScalarExpr, BaseVectorField] = {}
        if validate:
            self._validate_jacobi(samples, tol, rng, box)

    def _validate_jacobi(self, samples, tol, rng, box):
        """Sampled Jacobi identity on coordinate triples."""
        n = self.arity
        if n < 3:
            return
        if rng is None:
            rng = np.random.default_rng(42)
        defects = []
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    acc: ScalarExpr = const(0.0, n)
                    for m in range(n):
                        acc = add(acc, mul(self.entry(i, m),
                                           differentiate(self.entry(j, k), m)))
                        acc = add(acc, mul(self.entry(j, m),
                                           differentiate(self.entry(k, i), m)))
                        acc = add(acc, mul(self.entry(k, m),
                                           differentiate(self.entry(i, j), m)))
                    defects.append(((i, j, k), acc))
        for (i, j, k), defect in defects:
            for _ in range(samples):
                x = rng.uniform(box[0], box[1], size=n)
                value = eval_real(defect, x)
                if abs(value) > tol:
                    raise InvalidPoissonStructure(
                        f"Jacobi identity fails on coordinates {(i, j, k)}: "
                        f"residual {value:.3e} at {tuple(round(v, 4) for v in x)}")

    def entry(self, i: int, j: int) -> ScalarExpr:
        """Signed component pi_ij (antisymmetric in its indices)."""
        if i == j:
            return const(0.0, self.arity)
        if i < j:
            return self._entries.get((i, j), const(0.0, self.arity))
        return neg(self._entries.get((j, i), const(0.0, self.arity)))

    @property
    def upper_entries(self) -> dict[tuple[int, int], ScalarExpr]:
        return dict(self._entries)

    def bracket(self, f: ScalarExpr, g: ScalarExpr) -> ScalarExpr:
        """The bracket {f,g} as a symbolic expression."""
        if f.arity != self.arity or g.arity != self.arity:
            raise ArityError("bracket arguments do not match the structure arity")
        acc: ScalarExpr = const(0.0, self.arity)
        for (i, j), entry in self._entries.items():
            mixed = sub(mul(differentiate(f, i), differentiate(g, j)),
                        mul(differentiate(f, j), differentiate(g, i)))
            acc = add(acc, mul(entry, mixed))
        return acc

    def ad(self, f: ScalarExpr) -> BaseVectorField:
        """Hamiltonian field of f: the derivation g -> {f,g}."""
        cached = self._ad_cache.get(f)
        if cached is not None:
            return cached
        if f.arity != self.arity:
            raise ArityError("function arity does not match the structure")
        comps = []
        for j in range(self.arity):
            acc: ScalarExpr = const(0.0, self.arity)
            for k in range(self.arity):
                if k != j:
                    acc = add(acc, mul(self.entry(k, j), differentiate(f, k)))
            comps.append(acc)
        field = BaseVectorField(comps)
        self._ad_cache[f] = field
        return field

    def transpose(self) -> "PoissonStructure":
        """Sign-flipped structure (itself Poisson; used by mutation testing)."""
        flipped = {key: neg(expr) for key, expr in self._entries.items()}
        return PoissonStructure(self.arity, flipped, validate=False)

    @classmethod
    def canonical(cls, arity: int) -> "PoissonStructure":
        """{x_{2k}, x_{2k+1}} = 1 on an even-dimensional base."""
        if arity % 2 != 0:
            raise ArityError("the canonical structure needs an even arity")
        return cls(arity, {(2 * k, 2 * k + 1): 1.0 for k in range(arity // 2)},
                   validate=False)

    @classmethod
    def rotational(cls) -> "PoissonStructure":
        """Linear structure on R^3 with {x0,x1} = x2 and cyclic permutations."""
        return cls(3, {(0, 1): var(2, 3),
                       (0, 2): neg(var(1, 3)),
                       (1, 2): var(0, 3)}, validate=False)

    def __repr__(self):
        inner = ", ".join(f"{k}: {e.text}" for k, e in sorted(self._entries.items()))
        return f"PoissonStructure(arity={self.arity}, {{{inner}}})"


def base_bracket(structure: PoissonStructure, f: ScalarExpr,
                 g: ScalarExpr) -> ScalarExpr:
    """Module-level alias for the symbolic base bracket."""
    return structure.bracket(f, g)


class ProlongedPoisson:
    """A base Poisson structure together with the Weil algebra it is
    prolonged over."""

    def __init__(self, base: PoissonStructure, algebra: WeilAlgebra):
        self.base = base
        self.algebra = algebra

    @property
    def arity(self) -> int:
        return self.base.arity

    def derivation(self, fn: BundleFunction) -> BundleVectorField:
        return poisson_derivation(self, fn)

    def bracket(self, f: BundleFunction, g: BundleFunction) -> BundleFunction:
        return prolonged_bracket(self, f, g)

    def __repr__(self):
        return f"ProlongedPoisson({self.base!r}, {self.algebra!r})"


def poisson_derivation(structure: ProlongedPoisson,
                       fn: BundleFunction) -> BundleVectorField:
    """The derivation psi -> {fn, psi} of the prolonged bracket.

    Computed structurally: a pullback f^A contributes the prolonged base
    hamiltonian field of f; products contribute by the Leibniz rule; algebra
    coefficients pass through linearly.  Requires a representable function.
    """
    if fn.arity != structure.arity:
        raise ArityError("function arity does not match the structure")
    if not fn.algebra.compatible_with(structure.algebra):
        raise AlgebraMismatch("function algebra does not match the prolongation")
    if not fn.is_representable:
        raise ValueError("the Poisson derivation needs a representable function")
    algebra, n = structure.algebra, structure.arity
    components = []
    for i in range(n):
        terms = []
        for term in fn.terms:
            for j, p in enumerate(term.pullbacks):
                rest = term.pullbacks[:j] + term.pullbacks[j + 1:]
                comp = structure.base.ad(p).components[i]
                if isinstance(comp, Const) and comp.value == 0.0:
                    continue
                terms.append(Term(term.coeff, rest + (comp,)))
        components.append(BundleFunction(algebra, n, terms))
    return BundleVectorField(components)


def prolonged_bracket(structure: ProlongedPoisson, f: BundleFunction,
                      g: BundleFunction) -> BundleFunction:
    """{f, g} over the algebra: apply the derivation of f to g."""
    return apply_field(poisson_derivation(structure, f), g)


# -- cochains and the adjoint differential -------------------------------------

def _check_degree_payload(degree, value, fn_type, field_type):
    if degree == 0:
        if not isinstance(value, fn_type):
            raise DegreeError(f"degree-0 cochains hold a {fn_type.__name__}")
    elif degree == 1:
        if not isinstance(value, field_type):
            raise DegreeError(f"degree-1 cochains hold a {field_type.__name__}")
    elif degree == 2:
        if not callable(value):
            raise DegreeError("degree-2 cochains hold a pair evaluator")
    else:
        raise DegreeError(f"unsupported cochain degree {degree}")


class BaseCochain:
    """Poisson cochain on the base: a function, a vector field, or a lazy
    alternating pair form."""

    __slots__ = ("degree", "value")

    def __init__(self, degree: int, value):
        _check_degree_payload(degree, value, ScalarExpr, BaseVectorField)
        self.degree = degree
        self.value = value


class PoissonCochain:
    """Prolonged Poisson cochain in degrees 0..2."""

    __slots__ = ("degree", "value")

    def __init__(self, degree: int, value):
        _check_degree_payload(degree, value, BundleFunction, BundleVectorField)
        self.degree = degree
        self.value = value


def adjoint_differential(cochain: BaseCochain,
                         structure: PoissonStructure) -> BaseCochain:
    """Differential of the adjoint representation on the base.

    Degree 0: a function goes to its hamiltonian field.  Degree 1: a field
    goes to its bracket-compatibility defect (f,g) -> {f,Xg} - {g,Xf} - X{f,g}.
    """
    if cochain.degree == 0:
        return BaseCochain(1, structure.ad(cochain.value))
    if cochain.degree == 1:
        field = cochain.value

        def defect(f: ScalarExpr, g: ScalarExpr) -> ScalarExpr:
            return sub(sub(structure.bracket(f, field.apply_to(g)),
                           structure.bracket(g, field.apply_to(f))),
                       field.apply_to(structure.bracket(f, g)))

        return BaseCochain(2, defect)
    raise DegreeError("the adjoint differential is defined in degrees 0 and 1")


def prolonged_adjoint_differential(cochain: PoissonCochain,
                                   structure: ProlongedPoisson) -> PoissonCochain:
    """Differential of the adjoint representation over the algebra.

    Degree 0: a function goes to its Poisson derivation.  Degree 1: a field X
    goes to the defect (f,g) -> {f,Xg} - {g,Xf} - X{f,g}, with all brackets
    taken over the algebra.  The pair evaluator accepts representable
    arguments; X itself may have opaque (solved) components.
    """
    if cochain.degree == 0:
        return PoissonCochain(1, poisson_derivation(structure, cochain.value))
    if cochain.degree == 1:
        field = cochain.value

        def defect(f: BundleFunction, g: BundleFunction) -> BundleFunction:
            left = apply_field(poisson_derivation(structure, f),
                               apply_field(field, g))
            right = apply_field(poisson_derivation(structure, g),
                                apply_field(field, f))
            through = apply_field(field, prolonged_bracket(structure, f, g))
            return left - right - through

        return PoissonCochain(2, defect)
    raise DegreeError("the adjoint differential is defined in degrees 0 and 1")


def prolong_base_cochain(cochain: BaseCochain, algebra: WeilAlgebra) -> PoissonCochain:
    """Prolong a degree-0 or degree-1 base cochain over the algebra."""
    if cochain.degree == 0:
        return PoissonCochain(0, prolong_function(cochain.value, algebra))
    if cochain.degree == 1:
        return PoissonCochain(1, prolong_vector_field(cochain.value, algebra))
    raise DegreeError("only degree-0 and degree-1 cochains prolong directly")


# -- hamiltonian decision procedures -------------------------------------------

def default_generators(arity: int) -> list[ScalarExpr]:
    """Coordinates and their pairwise products."""
    gens = [var(i, arity) for i in range(arity)]
    for i in range(arity):
        for j in range(i, arity):
            gens.append(mul(var(i, arity), var(j, arity)))
    return gens


def _random_unit_scale(algebra: WeilAlgebra, rng: np.random.Generator) -> WeilElement:
    # invertible scale: augmentation kept away from zero
    coeffs = rng.uniform(-1.0, 1.0, size=algebra.dim)
    coeffs[0] = rng.uniform(0.5, 1.5) * (1.0 if rng.uniform() < 0.5 else -1.0)
    return algebra.element(coeffs)


def poisson_closedness_defect(field: BundleVectorField, structure: ProlongedPoisson,
                              gens: Sequence[ScalarExpr] | None = None, *,
                              samples: int = 32,
                              rng: np.random.Generator | None = None,
                              box: tuple[float, float] = DEFAULT_BOX):
    """Worst residual of the prolonged adjoint differential of the field on
    generator pairs with random invertible algebra scales.

    Returns (residual, witness) where the witness records the pair, the
    scales, and the worst near-point.  The defect pair form scales linearly
    in both slots, so scaled generator pairs decide closedness for the whole
    representable class.
    """
    algebra, n = structure.algebra, structure.arity
    if gens is None:
        gens = default_generators(n)
    if not gens:
        raise ValueError("closedness needs a nonempty generator list")
    if rng is None:
        rng = np.random.default_rng(42)
    prolonged = [prolong_function(g, algebra) for g in gens]
    defect = prolonged_adjoint_differential(PoissonCochain(1, field), structure).value
    zero = BundleFunction.zero(algebra, n)
    worst = -1.0
    witness = None
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            a = _random_unit_scale(algebra, rng)
            b = _random_unit_scale(algebra, rng)
            pair_value = defect(prolonged[i] * a, prolonged[j] * b)
            residual, point = max_difference(pair_value, zero, samples=samples,
                                             rng=rng, box=box)
            if residual > worst:
                worst = residual
                witness = {
                    "left": gens[i].text,
                    "right": gens[j].text,
                    "left_scale": [float(c) for c in a.coeffs],
                    "right_scale": [float(c) for c in b.coeffs],
                    "point": [[float(v) for v in c.coeffs] for c in point.coords],
                }
    return max(worst, 0.0), witness


def is_locally_hamiltonian_poisson(field: BundleVectorField,
                                   structure: ProlongedPoisson,
                                   gens: Sequence[ScalarExpr] | None = None, *,
                                   samples: int = 32, tol: float = 1e-9,
                                   rng: np.random.Generator | None = None,
                                   box: tuple[float, float] = DEFAULT_BOX) -> bool:
    """Sampled test that the field is closed for the adjoint differential."""
    residual, _ = poisson_closedness_defect(field, structure, gens,
                                            samples=samples, rng=rng, box=box)
    return residual <= tol


def check_global_witness_poisson(field: BundleVectorField, witness: BundleFunction,
                                 structure: ProlongedPoisson, *,
                                 samples: int = 32, tol: float = 1e-9,
                                 rng: np.random.Generator | None = None,
                                 box: tuple[float, float] = DEFAULT_BOX) -> bool:
    """True when the field equals the Poisson derivation of the witness
    componentwise (sampled)."""
    if rng is None:
        rng = np.random.default_rng(42)
    candidate = poisson_derivation(structure, witness)
    if field.arity != candidate.arity:
        raise ArityError("field arity does not match the structure")
    for mine, theirs in zip(field.components, candidate.components):
        residual, _ = max_difference(mine, theirs, samples=samples, rng=rng, box=box)
        if residual > tol:
            return False
    return True
