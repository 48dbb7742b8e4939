"""JSON readers and writers for the public object kinds.

Schemas:
  algebra     {"family":"truncated","width":k,"height":h}
              {"family":"table","dim":d,"constants":[[[...]]]}
  element     {"coeffs":[...]}
  near point  {"algebra":{...}, "coords":[{"coeffs":[...]} ,...]}
  vector field  ["expr", ...]                       (prolonged base field)
                [[{"coeff":..., "pullbacks":[...]}], ...]   (terms per component)
  function    "expr" or {"terms":[{"coeff":..., "pullbacks":[...]}]}
  poisson     {"arity":n, "bivector":{"01":"expr", ...}}   (upper triangle)
  form        {"degree":p, "arity":n, "coeffs":{"0,1":"expr", ...}}

Term coefficients are a plain number (a real multiple of the unit) or a full
coefficient vector.  Bivector keys accept both the two-digit and the
comma-separated spellings.  Everything emitted here parses back through the
matching reader.
"""

from __future__ import annotations

import json
from typing import Sequence

from .algebra import WeilAlgebra, WeilElement, make_truncated_algebra, validate_algebra
from .bundle import (
    BaseVectorField,
    BundleFunction,
    BundleVectorField,
    NearPoint,
    Term,
)
from .errors import ParseError
from .expression import parse_expr
from .poisson import PoissonStructure
from .symplectic import BaseForm


# -- algebras -------------------------------------------------------------------

def algebra_to_json(algebra: WeilAlgebra) -> dict:
    family = algebra.family
    if family[0] == "truncated":
        return {"family": "truncated", "width": family[1], "height": family[2]}
    return {"family": "table", "dim": algebra.dim,
            "constants": algebra.structure_constants.tolist()}


def algebra_from_json(obj: dict) -> WeilAlgebra:
    if not isinstance(obj, dict) or "family" not in obj:
        raise ParseError("an algebra object needs a 'family' key")
    if obj["family"] == "truncated":
        return make_truncated_algebra(int(obj["width"]), int(obj["height"]))
    if obj["family"] == "table":
        return validate_algebra(obj["constants"])
    raise ParseError(f"unknown algebra family {obj['family']!r}")


def parse_algebra_spec(text: str) -> WeilAlgebra:
    """Read an algebra from a compact spec: 'dual', 'truncated:k,h', or the
    JSON object form."""
    text = text.strip()
    if text == "dual":
        return make_truncated_algebra(1, 1)
    if text.startswith("truncated:"):
        body = text[len("truncated:"):]
        try:
            width, height = (int(part) for part in body.split(","))
        except ValueError:
            raise ParseError(f"expected 'truncated:k,h', got {text!r}") from None
        return make_truncated_algebra(width, height)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"algebra spec is not valid JSON: {exc}") from None
    return algebra_from_json(obj)


# -- elements and points ----------------------------------------------------------

def element_to_json(element: WeilElement) -> dict:
    return {"coeffs": [float(c) for c in element.coeffs]}


def element_from_json(obj, algebra: WeilAlgebra) -> WeilElement:
    if isinstance(obj, dict):
        obj = obj.get("coeffs")
    if not isinstance(obj, (list, tuple)):
        raise ParseError("an element needs a 'coeffs' list")
    return algebra.element([float(v) for v in obj])


def point_to_json(point: NearPoint) -> dict:
    return {"algebra": algebra_to_json(point.algebra),
            "coords": [element_to_json(c) for c in point.coords]}


def point_from_json(obj: dict, algebra: WeilAlgebra | None = None) -> NearPoint:
    if not isinstance(obj, dict) or "coords" not in obj:
        raise ParseError("a near-point object needs a 'coords' list")
    if algebra is None:
        if "algebra" not in obj:
            raise ParseError("a near-point needs an embedded or provided algebra")
        algebra = algebra_from_json(obj["algebra"])
    return NearPoint([element_from_json(c, algebra) for c in obj["coords"]])


# -- functions and fields ----------------------------------------------------------

def _term_from_json(obj: dict, algebra: WeilAlgebra, arity: int) -> Term:
    if not isinstance(obj, dict):
        raise ParseError("a term must be an object with 'coeff' and 'pullbacks'")
    raw = obj.get("coeff", 1.0)
    if isinstance(raw, (int, float)):
        coeff = algebra.from_real(float(raw))
    else:
        coeff = element_from_json(raw, algebra)
    pulls = [parse_expr(text, arity) for text in obj.get("pullbacks", [])]
    return Term(coeff, pulls)


def _term_to_json(term: Term) -> dict:
    if term.lazies:
        raise ValueError("solved components have no serialized form")
    return {"coeff": [float(c) for c in term.coeff.coeffs],
            "pullbacks": [p.text for p in term.pullbacks]}


def bundle_function_to_json(fn: BundleFunction) -> dict:
    return {"terms": [_term_to_json(t) for t in fn.terms]}


def bundle_function_from_json(obj, algebra: WeilAlgebra, arity: int) -> BundleFunction:
    if isinstance(obj, str):
        return BundleFunction.from_expr(parse_expr(obj, arity), algebra)
    if isinstance(obj, dict) and "terms" in obj:
        terms = [_term_from_json(t, algebra, arity) for t in obj["terms"]]
        return BundleFunction(algebra, arity, terms)
    raise ParseError("a function is an expression string or a terms object")


def base_field_from_json(obj, arity: int | None = None) -> BaseVectorField:
    if not isinstance(obj, list) or not all(isinstance(c, str) for c in obj):
        raise ParseError("a base field is a list of expression strings")
    n = len(obj) if arity is None else arity
    return BaseVectorField([parse_expr(text, n) for text in obj])


def field_to_json(field) -> list:
    if isinstance(field, BaseVectorField):
        return [c.text for c in field.components]
    if isinstance(field, BundleVectorField):
        return [bundle_function_to_json(c)["terms"] for c in field.components]
    raise TypeError(f"cannot serialize {type(field).__name__}")


def bundle_field_from_json(obj, algebra: WeilAlgebra) -> BundleVectorField:
    """Read a prolonged field: expression strings prolong componentwise;
    term lists build each component directly."""
    if not isinstance(obj, list) or not obj:
        raise ParseError("a vector field is a nonempty list")
    n = len(obj)
    if all(isinstance(c, str) for c in obj):
        return BundleVectorField([
            BundleFunction.from_expr(parse_expr(text, n), algebra) for text in obj])
    comps = []
    for entry in obj:
        if not isinstance(entry, list):
            raise ParseError("each component is an expression string or a term list")
        terms = [_term_from_json(t, algebra, n) for t in entry]
        comps.append(BundleFunction(algebra, n, terms))
    return BundleVectorField(comps)


# -- structures ---------------------------------------------------------------------

def _pair_key_from_json(key: str) -> tuple[int, int]:
    if "," in key:
        parts = key.split(",")
    else:
        parts = list(key)
    if len(parts) != 2:
        raise ParseError(f"bivector key {key!r} must name two indices")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"bivector key {key!r} must name two indices") from None


def poisson_to_json(structure: PoissonStructure) -> dict:
    biv = {f"{i}{j}": expr.text
           for (i, j), expr in sorted(structure.upper_entries.items())}
    return {"arity": structure.arity, "bivector": biv}


def poisson_from_json(obj: dict) -> PoissonStructure:
    if not isinstance(obj, dict) or "arity" not in obj or "bivector" not in obj:
        raise ParseError("a Poisson object needs 'arity' and 'bivector'")
    arity = int(obj["arity"])
    bivector = {_pair_key_from_json(k): v for k, v in obj["bivector"].items()}
    return PoissonStructure(arity, bivector)


def parse_poisson_spec(text: str) -> PoissonStructure:
    """'canonical:n', 'rotational', or the JSON object form."""
    text = text.strip()
    if text.startswith("canonical:"):
        try:
            arity = int(text[len("canonical:"):])
        except ValueError:
            raise ParseError(f"expected 'canonical:n', got {text!r}") from None
        return PoissonStructure.canonical(arity)
    if text == "rotational":
        return PoissonStructure.rotational()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"Poisson spec is not valid JSON: {exc}") from None
    return poisson_from_json(obj)


def form_to_json(form: BaseForm) -> dict:
    coeffs = {",".join(str(i) for i in idx): expr.text
              for idx, expr in sorted(form.coeffs.items())}
    return {"degree": form.degree, "arity": form.arity, "coeffs": coeffs}


def form_from_json(obj: dict, arity: int | None = None) -> BaseForm:
    if not isinstance(obj, dict) or "degree" not in obj:
        raise ParseError("a form object needs 'degree' and 'coeffs'")
    coeffs = {}
    top = -1
    for key, raw in obj.get("coeffs", {}).items():
        try:
            idx = tuple(int(p) for p in key.split(",")) if key else ()
        except ValueError:
            raise ParseError(f"bad coefficient key {key!r}") from None
        coeffs[idx] = raw
        top = max(top, max(idx, default=-1))
    if arity is None:
        arity = obj.get("arity")
    if arity is None:
        arity = top + 1
    if arity < 1:
        raise ParseError("cannot infer the form arity; provide one")
    return BaseForm(int(obj["degree"]), int(arity), coeffs)


def parse_symplectic_spec(text: str, arity: int | None = None):
    """'canonical:n' or a form JSON object; returns a SymplecticStructure."""
    from .symplectic import SymplecticStructure
    text = text.strip()
    if text.startswith("canonical:"):
        try:
            size = int(text[len("canonical:"):])
        except ValueError:
            raise ParseError(f"expected 'canonical:n', got {text!r}") from None
        return SymplecticStructure.canonical(size)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"symplectic spec is not valid JSON: {exc}") from None
    return SymplecticStructure(form_from_json(obj, arity))


__all__ = [
    "algebra_to_json", "algebra_from_json", "parse_algebra_spec",
    "element_to_json", "element_from_json",
    "point_to_json", "point_from_json",
    "bundle_function_to_json", "bundle_function_from_json",
    "base_field_from_json", "bundle_field_from_json", "field_to_json",
    "poisson_to_json", "poisson_from_json", "parse_poisson_spec",
    "form_to_json", "form_from_json", "parse_symplectic_spec",
]
