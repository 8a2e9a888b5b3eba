"""Seeded random generators shared by the property tests and the acceptance run."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, product

from hypothesis import strategies as st

from momap import linalg
from momap.complex import LieAction, TotalCochain
from momap.forms import DifferentialForm, VectorField, contract, lie_derivative
from momap.lie import LieAlgebra, aff1
from momap.parser import parse_vector_field
from momap.scalars import ModelManifold, ScalarFn

#: hypothesis strategy yielding seeded generators; shrinks toward seed 0
rngs = st.integers(min_value=0, max_value=2 ** 32).map(random.Random)

COEFFS = [Fraction(c) for c in (1, -1, 2, -2, 3)] + [Fraction(1, 2), Fraction(-1, 3), Fraction(5, 4)]


def manifold(rng: random.Random, max_torus: int = 2, max_affine: int = 2, min_dim: int = 1) -> ModelManifold:
    while True:
        M = ModelManifold(rng.randint(0, max_torus), rng.randint(0, max_affine))
        if M.dim >= min_dim:
            return M


def monomial(rng: random.Random, M: ModelManifold, max_freq: int = 3, max_poly: int = 3) -> ScalarFn:
    f = ScalarFn.constant(M, rng.choice(COEFFS))
    if M.torus_dim:
        freq = [rng.randint(-max_freq, max_freq) for _ in range(M.torus_dim)]
        trig = ScalarFn.cos if rng.random() < 0.5 else ScalarFn.sin
        f = f * trig(M, freq) if any(freq) else f
    budget = rng.randint(0, max_poly)
    for _ in range(budget):
        if M.affine_dim:
            f = f * ScalarFn.variable(M, f"z{rng.randint(1, M.affine_dim)}")
    return f


def scalar(rng: random.Random, M: ModelManifold, terms: int = 2, **kw) -> ScalarFn:
    f = ScalarFn.zero(M)
    for _ in range(rng.randint(1, terms)):
        f = f + monomial(rng, M, **kw)
    return f


def form(rng: random.Random, M: ModelManifold, degree: int, terms: int = 2, **kw) -> DifferentialForm:
    if degree < 0 or degree > M.dim:
        return DifferentialForm.zero(M, max(degree, 0))
    tuples = list(combinations(range(M.dim), degree))
    values = {}
    for _ in range(rng.randint(1, terms)):
        idx = rng.choice(tuples)
        values[idx] = values.get(idx, ScalarFn.zero(M)) + scalar(rng, M, 1, **kw)
    return DifferentialForm(M, degree, values)


def any_form(rng: random.Random, M: ModelManifold, **kw) -> DifferentialForm:
    return form(rng, M, rng.randint(0, M.dim), **kw)


def field(rng: random.Random, M: ModelManifold, terms: int = 2, **kw) -> VectorField:
    comps = {}
    for _ in range(rng.randint(1, terms)):
        j = rng.randrange(M.dim)
        comps[j] = comps.get(j, ScalarFn.zero(M)) + scalar(rng, M, 1, **kw)
    return VectorField(M, comps)


def cochain(rng: random.Random, M: ModelManifold, dim: int, total_degree: int, **kw) -> TotalCochain:
    values = {}
    for k in range(1, dim + 1):
        if not 0 <= total_degree - k <= M.dim:
            continue
        for tup in combinations(range(dim), k):
            if rng.random() < 0.6:
                values[tup] = form(rng, M, total_degree - k, 1, **kw)
    return TotalCochain(M, dim, total_degree, values)


# -- actions used across the suite --------------------------------------------------

def torus_action(affine: int = 1) -> LieAction:
    M = ModelManifold(2, affine)
    return LieAction(LieAlgebra.abelian(2), [VectorField.basis(M, "theta1"), VectorField.basis(M, "theta2")])


def aff1_action() -> LieAction:
    M = ModelManifold(0, 3)
    return LieAction(aff1(), [parse_vector_field("par_z1", M), parse_vector_field("z1*par_z1 - z2*par_z2", M)])


def circle_action() -> LieAction:
    M = ModelManifold(1, 2)
    return LieAction(LieAlgebra.abelian(1), [VectorField.basis(M, "theta1")])


def translation_action() -> LieAction:
    M = ModelManifold(0, 2)
    return LieAction(LieAlgebra.abelian(2), [VectorField.basis(M, "z1"), VectorField.basis(M, "z2")])


ACTIONS = {"torus": torus_action, "aff1": aff1_action, "circle": circle_action, "translations": translation_action}


# -- invariant and equivariant inputs via exact nullspaces ----------------------------

def _coords(form: DifferentialForm, tag=()) -> dict:
    out = {}
    for idx, coeff in form.terms.items():
        for mono, (re_, im_) in coeff.terms.items():
            if re_:
                out[tag + (idx, mono, 0)] = re_
            if im_:
                out[tag + (idx, mono, 1)] = im_
    return out


def form_ansatz(M: ModelManifold, degree: int, poly: int, freq: int) -> list:
    zs = []
    for exps in product(range(poly + 1), repeat=M.affine_dim):
        if sum(exps) <= poly:
            f = ScalarFn.constant(M, 1)
            for j, e in enumerate(exps):
                f = f * ScalarFn.variable(M, f"z{j + 1}") ** e if e else f
            zs.append(f)
    trig = [ScalarFn.constant(M, 1)]
    if M.torus_dim and freq:
        for m in product(range(-freq, freq + 1), repeat=M.torus_dim):
            if any(m) and m > tuple(-x for x in m):
                trig += [ScalarFn.cos(M, m), ScalarFn.sin(M, m)]
    return [DifferentialForm(M, degree, {idx: z * t})
            for idx in combinations(range(M.dim), degree) for z in zs for t in trig]


def _kernel_combos(images: list, count: int) -> list:
    """Nullspace vectors of the linear map basis_i -> images[i] (dicts of coordinates)."""
    rows = sorted(set().union(*images), key=repr) if images else []
    matrix = [[img.get(r, Fraction(0)) for img in images] for r in rows]
    return linalg.nullspace(matrix, ncols=len(images)) if rows else [
        [Fraction(int(i == j)) for j in range(len(images))] for i in range(len(images))]


def invariant_basis(A: LieAction, degree: int, poly: int = 2, freq: int = 1) -> list:
    basis = form_ansatz(A.manifold, degree, poly, freq)
    images = []
    for b in basis:
        img = {}
        for i, v in enumerate(A.generators):
            img.update(_coords(lie_derivative(v, b), (i,)))
        images.append(img)
    out = []
    for vec in _kernel_combos(images, len(basis)):
        f = DifferentialForm.zero(A.manifold, degree)
        for c, b in zip(vec, basis):
            if c:
                f = f + b * c
        out.append(f)
    return [f for f in out if f]


def equivariant_basis(A: LieAction, degree: int, poly: int = 2, freq: int = 1) -> list:
    """Maps F: g -> Omega^degree, equivariant with iota(v_x) F(x) = 0, as lists of forms."""
    single = form_ansatz(A.manifold, degree, poly, freq)
    basis = [(slot, b) for slot in range(A.dim) for b in single]
    images = []
    for slot, b in basis:
        img = {}
        for i, v in enumerate(A.generators):
            # L_{v_i} F(e_slot) - F([e_i, e_slot]); the bracket part lands in other slots
            for key, val in _coords(lie_derivative(v, b), ("eq", i, slot)).items():
                img[key] = img.get(key, 0) + val
            for j in range(A.dim):
                c = A.algebra.bracket(i, j).get(slot)
                if c:
                    for key, val in _coords(b, ("eq", i, j)).items():
                        img[key] = img.get(key, 0) - c * val
        if degree:
            for i in range(A.dim):
                for key, val in _coords(contract(A.generators[i], b), ("self",) + tuple(sorted((i, slot)))).items():
                    img[key] = img.get(key, 0) + val
        images.append({k: v for k, v in img.items() if v})
    out = []
    for vec in _kernel_combos(images, len(basis)):
        F = [DifferentialForm.zero(A.manifold, degree) for _ in range(A.dim)]
        for c, (slot, b) in zip(vec, basis):
            if c:
                F[slot] = F[slot] + b * c
        if any(F):
            out.append(F)
    return out


def combination(rng: random.Random, basis: list, zero):
    """Random rational combination of 1..3 basis elements (forms or lists of forms)."""
    picks = rng.sample(range(len(basis)), min(len(basis), rng.randint(1, 3)))
    acc = zero
    for i in picks:
        c = rng.choice(COEFFS)
        b = basis[i]
        acc = [a + x * c for a, x in zip(acc, b)] if isinstance(b, list) else acc + b * c
    return acc


# -- Cartan calculus relations --------------------------------------------------------

def lie_derivative_coordinates(v: VectorField, alpha: DifferentialForm) -> DifferentialForm:
    """L_v by the coordinate formula, independent of Cartan's formula:
    L_v(f dx^I) = v(f) dx^I + f sum_r dx^{i_1} ^ .. ^ d(v^{i_r}) ^ .. ^ dx^{i_k}."""
    from momap.forms import exterior_d, wedge
    M = alpha.manifold.join(v.manifold)
    out = DifferentialForm.zero(M, alpha.degree)
    for idx, f in alpha.terms.items():
        out = out + DifferentialForm(M, alpha.degree, {idx: v.apply(f)})
        for r, i in enumerate(idx):
            dv = exterior_d(DifferentialForm.scalar(v.component(i), M))
            piece = wedge(wedge(DifferentialForm.monomial(M, idx[:r]), dv), DifferentialForm.monomial(M, idx[r + 1:]))
            out = out + piece * f
    return out


def cartan_relation_residuals(v, w, alpha, beta) -> dict:
    """Left minus right side of the seven calculus relations; all must vanish."""
    from momap.forms import exterior_d as d, lie_bracket, wedge

    def i(x, a):
        return contract(x, a) if a.degree else DifferentialForm.zero(a.manifold, 0)

    L = lie_derivative_coordinates
    p = alpha.degree
    sign = 1 if p % 2 == 0 else -1
    vw = lie_bracket(v, w)
    return {
        "d squared": d(d(alpha)),
        "contractions anticommute": i(v, i(w, alpha)) + i(w, i(v, alpha)),
        "L commutes with d": L(v, d(alpha)) - d(L(v, alpha)),
        "homotopy formula": d(i(v, alpha)) + i(v, d(alpha)) - L(v, alpha),
        "L bracket": L(v, L(w, alpha)) - L(w, L(v, alpha)) - L(vw, alpha),
        "L and contraction": L(v, i(w, alpha)) - i(w, L(v, alpha)) - i(vw, alpha),
        "graded Leibniz": (d(wedge(alpha, beta)) - wedge(d(alpha), beta) - wedge(alpha, d(beta)) * sign)
        + (i(v, wedge(alpha, beta)) - wedge(i(v, alpha), beta) - wedge(alpha, i(v, beta)) * sign)
        + (L(v, wedge(alpha, beta)) - wedge(L(v, alpha), beta) - wedge(alpha, L(v, beta))),
    }


# -- corpus helpers --------------------------------------------------------------------

def corpus(*required: str) -> list:
    """Bundled scenarios carrying all ``required`` entries."""
    from momap.scenario import bundled_names, load
    out = []
    for name in bundled_names():
        sc = load(name)
        if all(r in sc.forms or r in sc.maps or r in sc.family for r in required):
            out.append(sc)
    return out


def perturb(rng: random.Random, f, family: str):
    """Perturb a moment map so that a chosen equation family breaks (when possible).

    "moment": add a non-closed term to some f_1(e_i); "morphism": add a non-closed
    term to an f_k with k >= 2; "top": add a nonzero constant to an f_n value
    whose bracket images reach the top equation.
    """
    from momap.momentmap import MomentMapCandidate
    from momap.forms import exterior_d
    c = f.components
    M, n, dim = c.manifold, f.n, c.dim
    if family == "moment":
        k = 1
    elif family == "morphism":
        k = rng.randint(2, n) if n >= 2 else None
    else:
        k = n
    if k is None or k > dim:
        return None
    tup = tuple(sorted(rng.sample(range(dim), k)))
    if family == "top":
        # f_n takes function values; a constant is closed, so only the top equation can notice it
        delta = DifferentialForm.scalar(ScalarFn.constant(M, rng.choice(COEFFS)), M)
    else:
        delta = form(rng, M, n - k, max_freq=2, max_poly=2)
        if not exterior_d(delta):
            return None
    return MomentMapCandidate(n, TotalCochain(M, dim, n, {**c.values, tup: c.value(tup) + delta}))
