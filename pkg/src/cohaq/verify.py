"""Identity-verification engine.

Every suite expands into a deterministic list of *cases*.  A case is a tuple
``(label, check_name, args)`` of plain Python data (polynomials travel as
canonical strings), so cases can be evaluated in worker processes; each
check returns ``(passed, detail)`` where ``detail`` describes the first
discrepancy in canonical form.

Identities are checked exactly: fraction identities by cross
multiplication, series identities coefficientwise.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

from cohaq.cohomology import (
    CohClass,
    act_pullback,
    direct_sum_pullback,
    gamma,
    power_sum,
    relabel_leg,
    taut_coproduct,
    taut_specialize,
    taut_translate,
)
from cohaq.coproducts import (
    act_leg,
    delta_loc,
    delta_loc_expanded,
    delta_loc_leg,
    delta_z,
    delta_z_leg,
    pullback_leg,
    shuffle_legs,
    shuffle_product,
    shuffle_product_naive,
)
from cohaq.enumerative import bps_invariants
from cohaq.extdata import psi_dual_series, psi_series, r_matrix, r_taut_generic, euler_classes
from cohaq.poly import W, Z, Poly, format_poly, parse_poly, xkey
from cohaq.quiver import (
    DimVector,
    Quiver,
    QuiverError,
    cartan_matrix,
    dims_up_to,
    euler_form,
    euler_form_antisym,
    sign_twists,
    splits,
    triple,
)
from cohaq.spectral import SpectralFraction, expand_at_infinity, fraction_eq
from cohaq.yangian import (
    ExtendedElement,
    check_r2,
    check_r3,
    compare_coproducts,
    extended_product,
    phi_component,
    phi_component_coeffs,
    phi_first_order,
    phi_generic,
)

Frac = SpectralFraction


# ---------------------------------------------------------------------------
# records
# ---------------------------------------------------------------------------


@dataclass
class CaseResult:
    label: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    """Outcome of one suite on one quiver.

    ``status`` is ``"pass"``, ``"fail"`` or ``"skipped"``; a skipped suite
    carries the reason it does not apply (never a silent pass).
    """

    name: str
    anchor: str
    status: str
    cases: int = 0
    failures: int = 0
    counterexample: str | None = None
    reason: str | None = None
    notes: list[str] = field(default_factory=list)


@dataclass
class Report:
    quiver: dict
    max_dim: int
    suites: list[SuiteResult]

    @property
    def passed(self) -> bool:
        return all(s.status != "fail" for s in self.suites)

    def to_json(self) -> str:
        data = {
            "schema": "cohaq.verify/1",
            "quiver": self.quiver,
            "max_dim": self.max_dim,
            "passed": self.passed,
            "suites": [asdict(s) for s in self.suites],
        }
        return json.dumps(data, indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"quiver: {json.dumps(self.quiver, sort_keys=True)}", f"max-dim: {self.max_dim}"]
        for s in self.suites:
            head = f"[{s.status.upper():7}] {s.name:14} {s.cases:5d} cases"
            if s.status == "fail":
                head += f", {s.failures} failed"
            lines.append(head + f"  -- {s.anchor}")
            if s.reason:
                lines.append(f"          reason: {s.reason}")
            for note in s.notes:
                lines.append(f"          note: {note}")
            if s.counterexample:
                lines.append(f"          first counterexample: {s.counterexample}")
        lines.append("result: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _first_term(p: Poly) -> str:
    terms = p.sorted_terms()
    if not terms:
        return "0"
    mono, c = terms[0]
    single = Poly.const(c)
    for k, e in mono:
        single = single * Poly.var(k) ** e
    return format_poly(single)


def _frac_result(lhs, rhs) -> tuple[bool, str]:
    lhs, rhs = Frac.coerce(lhs), Frac.coerce(rhs)
    if fraction_eq(lhs, rhs):
        return True, ""
    n1, d1 = lhs.expand()
    n2, d2 = rhs.expand()
    diff = n1 * d2 - n2 * d1
    return False, f"lhs - rhs has leading cross-multiplied term {_first_term(diff)}"


def _poly_result(lhs: Poly, rhs: Poly) -> tuple[bool, str]:
    if lhs == rhs:
        return True, ""
    return False, f"lhs - rhs has leading term {_first_term(lhs - rhs)}"


def _dims(q: Quiver, d) -> DimVector:
    return q.dim(tuple(d))


def _qspec(q: Quiver):
    """Picklable description of a quiver (tripled quivers keep their base)."""
    if q.is_tripled:
        return {"tripled": q.base.to_dict()}
    return {"quiver": q.to_dict()}


def _qload(spec) -> Quiver:
    if "tripled" in spec:
        return triple(Quiver.from_dict(spec["tripled"]))
    return Quiver.from_dict(spec["quiver"])


def _seed(*parts) -> int:
    text = json.dumps(parts, sort_keys=True, default=str)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def random_class(q: Quiver, d: DimVector, rng: random.Random, max_degree: int = 4) -> Poly:
    """A random vertex-symmetric class: products of power sums and ``h``'s."""
    gens: list[tuple[Poly, int]] = []
    for v, n in enumerate(d):
        if n:
            gens += [(power_sum(v, k, n), k) for k in range(1, max_degree + 1)]
    for k in range(1, q.torus_rank + 1):
        gens.append((Poly.var(("h", k)), 1))
    out = Poly()
    for _ in range(rng.randint(1, 3)):
        term = Poly.const(rng.choice([-3, -2, -1, 1, 2, 3]))
        if rng.random() < 0.3:
            term = term / rng.choice([2, 3])
        budget = rng.randint(0, max_degree)
        while gens and budget > 0:
            g, deg = rng.choice(gens)
            if deg > budget:
                break
            term = term * g
            budget -= deg
        out = out + term
    return out


def _generators(q: Quiver, d: DimVector, max_degree: int) -> list[Poly]:
    """``1`` and the power sums ``p_{v,k}`` with ``k <= max_degree``."""
    out = [Poly.const(1)]
    for v, n in enumerate(d):
        if n:
            out += [power_sum(v, k, n) for k in range(1, max_degree + 1)]
    return out


def _spec_z() -> Poly:
    return Poly.var(Z)


def _spec_w() -> Poly:
    return Poly.var(W)


# ---------------------------------------------------------------------------
# checks (module level so that worker processes can import them)
# ---------------------------------------------------------------------------


def check_psi_mult_left(q, d1, d2, d3):
    """``(oplus* (x) id) Psi_{d1+d2,d3} = Psi_{d1,d3} Psi_{d2,d3}``."""
    d1, d2, d3 = (_dims(q, d) for d in (d1, d2, d3))
    big = psi_series(q, d1 + d2, d3, 1, Z, (5, 3))
    lhs = pullback_leg(big, d1, d2, 5, 1, 2)
    rhs = psi_series(q, d1, d3, 1, Z, (1, 3)) * psi_series(q, d2, d3, 1, Z, (2, 3))
    return _frac_result(lhs, rhs)


def check_psi_mult_right(q, d1, d2, d3):
    """``(id (x) oplus*) Psi_{d1,d2+d3} = Psi_{d1,d2} Psi_{d1,d3}``."""
    d1, d2, d3 = (_dims(q, d) for d in (d1, d2, d3))
    big = psi_series(q, d1, d2 + d3, 1, Z, (1, 6))
    lhs = pullback_leg(big, d2, d3, 6, 2, 3)
    rhs = psi_series(q, d1, d2, 1, Z, (1, 2)) * psi_series(q, d1, d3, 1, Z, (1, 3))
    return _frac_result(lhs, rhs)


def check_psi_translate(q, d1, d2, leg):
    """``act_{w,1} Psi(z) = Psi(z - w)`` and ``act_{w,2} Psi(z) = Psi(z + w)``."""
    d1, d2 = _dims(q, d1), _dims(q, d2)
    psi = psi_series(q, d1, d2, 1, Z, (1, 2))
    dim = d1 if leg == 1 else d2
    lhs = act_leg(psi, dim, W, leg)
    shift = _spec_z() - _spec_w() if leg == 1 else _spec_z() + _spec_w()
    rhs = psi_series(q, d1, d2, 1, shift, (1, 2))
    return _frac_result(lhs, rhs)


def check_psi_euler(q, d1, d2, sign):
    """``Psi(Ext, +-z)`` is the Euler class with the second leg moved by ``+-z``."""
    d1, d2 = _dims(q, d1), _dims(q, d2)
    e0, e1, _ = euler_classes(q, d1, d2)
    s = _spec_z() * sign
    rhs = Frac.ratio(act_pullback(e0, d2, s, 2), act_pullback(e1, d2, s, 2))
    return _frac_result(psi_series(q, d1, d2, sign, Z, (1, 2)), rhs)


def check_psi_dual(q, d1, d2):
    """``Psi(sigma* Ext^dual, z) = (-1)^rk Psi(sigma* Ext, -z)``."""
    d1, d2 = _dims(q, d1), _dims(q, d2)
    lhs = psi_dual_series(q, d1, d2, Z, (1, 2))
    rhs = psi_series(q, d2, d1, -1, Z, (2, 1))
    if euler_form(q, d2, d1) % 2:
        rhs = -rhs
    return _frac_result(lhs, rhs)


def check_davison_joyce(q, d, poly, d1, d2):
    """``act_{z,1} Delta_loc(a) = Delta(a, z)``, plus the two localised constructions agree."""
    d, d1, d2 = _dims(q, d), _dims(q, d1), _dims(q, d2)
    a = CohClass(q, d, parse_poly(poly))
    loc = delta_loc(a, d1, d2)
    ok, detail = _frac_result(loc, delta_loc_expanded(a, d1, d2))
    if not ok:
        return False, "localised coproduct constructions differ: " + detail
    return _frac_result(act_leg(loc, d1, Z, 1), delta_z(a, d1, d2))


def check_counit(q, d, poly):
    """``(eps (x) id) Delta(z) = id`` and ``(id (x) eps) Delta(z) = act_z`` (a polynomial in z)."""
    d = _dims(q, d)
    a = CohClass(q, d, parse_poly(poly))
    zero = q.zero()
    left = delta_z(a, zero, d)
    ok, detail = _frac_result(left, relabel_leg(a.poly, d, 0, 2))
    if not ok:
        return False, "left counit: " + detail
    right = delta_z(a, d, zero)
    expect = act_pullback(relabel_leg(a.poly, d, 0, 1), d, Z, 1)
    ok, detail = _frac_result(right, expect)
    if not ok:
        return False, "right counit: " + detail
    return True, ""


def check_coassoc(q, d, poly, d1, d2, d3):
    """``(Delta(z) (x) id) Delta(w) = (id (x) Delta(w)) Delta(z + w)``."""
    d, d1, d2, d3 = (_dims(q, x) for x in (d, d1, d2, d3))
    f = parse_poly(poly)
    z, w = _spec_z(), _spec_w()
    inner = delta_z_leg(q, f, d1 + d2, d3, w, 0, (5, 3))
    lhs = delta_z_leg(q, inner, d1, d2, z, 5, (1, 2))
    inner = delta_z_leg(q, f, d1, d2 + d3, z + w, 0, (1, 6))
    rhs = delta_z_leg(q, inner, d2, d3, w, 6, (2, 3))
    return _frac_result(lhs, rhs)


def check_colocality(q, d, poly, d1, d2):
    """``Delta_{d1,d2}(a, z) = (-1)^chi(d1,d2) sigma R_{d2,d1}(z) Delta_{d2,d1}(act_z a, -z)``."""
    d, d1, d2 = (_dims(q, x) for x in (d, d1, d2))
    f = parse_poly(poly)
    z = _spec_z()
    lhs = delta_z_leg(q, f, d1, d2, z, 0, (1, 2))
    moved = act_pullback(f, d, z, 0)
    rhs = r_matrix(q, d2, d1, "full", Z, (2, 1)) * delta_z_leg(q, moved, d2, d1, -z, 0, (2, 1))
    if euler_form(q, d1, d2) % 2:
        rhs = -rhs
    return _frac_result(lhs, rhs)


def _hexagon_factor(k: int, num: Poly) -> Frac:
    return Frac.linear_product([num], [_spec_z()]) ** k


def check_hexagon(q, d1, d2, d3, which, mode):
    """Spectral hexagons of ``R_taut`` (with the chi~ correction) or of the full ``R``."""
    d1, d2, d3 = (_dims(q, x) for x in (d1, d2, d3))
    z, w = _spec_z(), _spec_w()
    if which == 1:
        big = r_matrix(q, d1 + d2, d3, mode, Z, (5, 3))
        lhs = act_leg(pullback_leg(big, d1, d2, 5, 1, 2), d1, w, 1)
        rhs = r_matrix(q, d1, d3, mode, z - w, (1, 3)) * r_matrix(q, d2, d3, mode, Z, (2, 3))
        if mode == "taut":
            rhs = rhs * _hexagon_factor(euler_form_antisym(q, d3, d1), z - w)
    else:
        big = r_matrix(q, d1, d2 + d3, mode, Z, (1, 6))
        lhs = act_leg(pullback_leg(big, d2, d3, 6, 2, 3), d2, w, 2)
        rhs = r_matrix(q, d1, d2, mode, z + w, (1, 2)) * r_matrix(q, d1, d3, mode, Z, (1, 3))
        if mode == "taut":
            rhs = rhs * _hexagon_factor(euler_form_antisym(q, d2, d1), z + w)
    return _frac_result(lhs, rhs)


def _bialgebra_sides(q, a: CohClass, b: CohClass, c1, c2, variant):
    twist = "psi" if variant == "psi" else None
    d, e = a.dim, b.dim
    prod = shuffle_product(a, b, twist)

    def delta(f, x1, x2, legs):
        if variant == "localised":
            return delta_loc_leg(q, f, x1, x2, 0, legs)
        out = delta_z_leg(q, f, x1, x2, Z, 0, legs)
        if variant == "psi" and sign_twists(q, x1, x2)[1]:
            out = -out
        return out

    def mult(f, x1, x2, legs, out_leg):
        out = shuffle_legs(q, f, x1, x2, legs, out_leg)
        if variant == "psi" and sign_twists(q, x1, x2)[1]:
            out = -out
        return out

    lhs = delta(prod.poly, c1, c2, (5, 6))
    rhs = Frac(0)
    for a1, a2 in splits(d):
        rest = [x - y for x, y in zip(c1, a1)]
        if any(x < 0 or x > y for x, y in zip(rest, e)):
            continue
        b1 = DimVector(rest)
        b2 = e - b1
        da = delta(a.poly, a1, a2, (1, 2))
        db = delta(b.poly, b1, b2, (3, 4))
        mode = "localised" if variant == "localised" else "full"
        braid = r_matrix(q, a2, b1, mode, Z, (2, 3))
        if variant == "psi":
            sign = -1 if (euler_form(q, a2, a2) * euler_form(q, b1, b1)) % 2 else 1
        else:
            sign = -1 if euler_form(q, b1, a2) % 2 else 1
        body = Frac.coerce(da) * db * braid
        step = mult(body, a1, b1, (1, 3), 5)
        step = mult(step, a2, b2, (2, 4), 6)
        rhs = rhs + (step if sign > 0 else -step)
    return lhs, rhs


def check_bialgebra(q, d, pa, e, pb, c1, c2, variant):
    """``Delta(a * b) = Delta(a) *_R Delta(b)`` on the ``(c1, c2)`` component."""
    d, e, c1, c2 = (_dims(q, x) for x in (d, e, c1, c2))
    a = CohClass(q, d, parse_poly(pa))
    b = CohClass(q, e, parse_poly(pb))
    lhs, rhs = _bialgebra_sides(q, a, b, c1, c2, variant)
    return _frac_result(lhs, rhs)


def check_supercommutative(q, d, pa, e, pb):
    """``a * b = (-1)^chi(d,e) b * a``."""
    d, e = _dims(q, d), _dims(q, e)
    a = CohClass(q, d, parse_poly(pa))
    b = CohClass(q, e, parse_poly(pb))
    lhs = shuffle_product(a, b).poly
    rhs = shuffle_product(b, a).poly
    if euler_form(q, d, e) % 2:
        rhs = -rhs
    return _poly_result(lhs, rhs)


def check_shuffle(q, d, pa, e, pb, f, pc):
    """Associativity of the shuffle product, and agreement with the naive fraction sum."""
    d, e, f = (_dims(q, x) for x in (d, e, f))
    a = CohClass(q, d, parse_poly(pa))
    b = CohClass(q, e, parse_poly(pb))
    c = CohClass(q, f, parse_poly(pc))
    ab = shuffle_product(a, b)
    ok, detail = _poly_result(ab.poly, shuffle_product_naive(a, b).poly)
    if not ok:
        return False, "Vandermonde and naive shuffle sums differ: " + detail
    return _poly_result(shuffle_product(ab, c).poly, shuffle_product(a, shuffle_product(b, c)).poly)


def check_taut_specialise(q, v, r, d):
    """Specialisation intertwines translation and coproduct with act and the direct-sum pullback."""
    d = _dims(q, d)
    g = gamma(v, r)
    spec = taut_specialize(g, d)
    lhs = taut_specialize(taut_translate(g, Z), d)
    ok, detail = _poly_result(lhs, act_pullback(spec, d, Z, 0))
    if not ok:
        return False, "translation: " + detail
    for d1, d2 in splits(d):
        cop = taut_coproduct(g, 0, 1, 2)
        lhs = taut_specialize(taut_specialize(cop, d1, 1), d2, 2)
        rhs = direct_sum_pullback(CohClass(q, d, spec), d1, d2).poly
        ok, detail = _poly_result(lhs, rhs)
        if not ok:
            return False, f"coproduct at split {d1}+{d2}: " + detail
    return True, ""


def check_act_composition(q, d, poly):
    """``act_z act_w = act_{z+w}`` and coassociativity of the direct-sum pullback."""
    d = _dims(q, d)
    p = parse_poly(poly)
    lhs = act_pullback(act_pullback(p, d, W, 0), d, Z, 0)
    ok, detail = _poly_result(lhs, act_pullback(p, d, _spec_z() + _spec_w(), 0))
    if not ok:
        return False, "act composition: " + detail
    for d1, d2, d3 in splits(d, 3):
        left = pullback_leg(pullback_leg(p, d1 + d2, d3, 0, 5, 3), d1, d2, 5, 1, 2)
        right = pullback_leg(pullback_leg(p, d1, d2 + d3, 0, 1, 6), d2, d3, 6, 2, 3)
        ok, detail = _poly_result(left, right)
        if not ok:
            return False, f"pullback coassociativity at {d1}+{d2}+{d3}: " + detail
    return True, ""


def check_r_taut(q, d1, d2, order):
    """Generic ``R_taut`` specialises to the componentwise expansion; leading term ``1``."""
    d1, d2 = _dims(q, d1), _dims(q, d2)
    generic = r_taut_generic(q, order)
    if generic.coeff(0) != Poly.const(1):
        return False, f"leading coefficient is {generic.coeff(0)}, expected 1"
    comp = expand_at_infinity(r_matrix(q, d1, d2, "taut", Z, (1, 2)), Z, order)
    for k in range(0, order + 1):
        lhs = taut_specialize(taut_specialize(generic.coeff(-k), d1, 1), d2, 2)
        ok, detail = _poly_result(lhs, comp.coeff(-k))
        if not ok:
            return False, f"coefficient of z^-{k}: " + detail
    return True, ""


def check_phi_specialise(q, i, d, order):
    """Generic ``Phi_{i,r}`` specialise to the component expansion."""
    d = _dims(q, d)
    generic = phi_generic(q, i, order)
    comp = phi_component_coeffs(q, i, d, order)
    for r in range(order):
        ok, detail = _poly_result(taut_specialize(generic[r], d), comp[r])
        if not ok:
            return False, f"Phi[{i + 1},{r}]: " + detail
    return True, ""


def check_phi_structure(q, i, order):
    """Group-like coproduct, translation formula and first-order term of ``Phi_{i,r}``."""
    h = Poly.var(("h", 1))
    phis = phi_generic(q, i, order)
    legs = {}
    for leg in (1, 2):
        legs[leg] = [p.rename({g: ("g", leg) + g[2:] for g in p.variables() if g[0] == "g"}) for p in phis]
    for r in range(order):
        cop = taut_coproduct(phis[r], 0, 1, 2)
        expect = legs[1][r] + legs[2][r]
        for r1 in range(r):
            expect = expect + h * legs[1][r1] * legs[2][r - 1 - r1]
        ok, detail = _poly_result(cop, expect)
        if not ok:
            return False, f"coproduct of Phi[{i + 1},{r}]: " + detail
        z = _spec_z()
        expect = Poly()
        for r1 in range(r + 1):
            expect = expect + phis[r1] * z ** (r - r1) * math.comb(r, r1)
        ok, detail = _poly_result(taut_translate(phis[r], Z), expect)
        if not ok:
            return False, f"translation of Phi[{i + 1},{r}]: " + detail
        first = phis[r].subs({("h", 1): 0})
        ok, detail = _poly_result(first, phi_first_order(q, i, r))
        if not ok:
            return False, f"first-order term of Phi[{i + 1},{r}]: " + detail
    cartan = cartan_matrix(q.base)
    for j in range(q.n):
        val = taut_specialize(phis[0], q.delta(j))
        if val != Poly.const(cartan[i][j]):
            return False, f"Phi[{i + 1},0] at delta_{j + 1} is {val}, expected c = {cartan[i][j]}"
    return True, ""


def check_phi_rmatrix(q, i, d):
    """``R(z)_{(delta_i, d)}`` with leg-1 root ``x`` equals ``Phi_{i,d}(x - z)``."""
    d = _dims(q, d)
    lhs = r_matrix(q, q.delta(i), d, "full", Z, (1, 2))
    x = Poly.var(xkey(i + 1, 1, 1))
    rhs = phi_component(q, i, d, ("u",), 2).subs({("u",): x - _spec_z()})
    return _frac_result(lhs, rhs)


def check_r1(q, i, j, r, s):
    """Cartan elements commute: ``Phi_{i,r} Phi_{j,s} = Phi_{j,s} Phi_{i,r}``."""
    a = ExtendedElement.unit(phi_generic(q, i, r + 1)[r])
    b = ExtendedElement.unit(phi_generic(q, j, s + 1)[s])
    lhs, rhs = extended_product(q, a, b), extended_product(q, b, a)
    return (True, "") if lhs == rhs else (False, f"{lhs} != {rhs}")


def check_r2_case(q, i, j, s):
    ok, lhs, rhs = check_r2(q, i, j, s)
    return (True, "") if ok else (False, f"[Phi[{i + 1},0], x[{j + 1}]^({s})]: {lhs} != {rhs}")


def check_r3_case(q, i, j, max_r, s):
    phis = phi_generic(q, i, max_r + 2)
    for r in range(max_r + 1):
        ok, lhs, rhs = check_r3(q, i, j, r, s, phis)
        if not ok:
            return False, f"r={r}, s={s}: {lhs} != {rhs}"
    return True, ""


def check_drinfeld(q, i, max_exp, order):
    res = compare_coproducts(q, [i], max_exp, order)
    return (True, "") if res.passed else (False, res.failure)


def check_bps(q, max_dim, order):
    res = bps_invariants(q, max_dim, order)
    if not res.integral:
        bad = [str(d) for d, s in res.omega.items() if not s.is_integral()]
        return False, f"non-integral Omega at {', '.join(bad)}"
    if not res.reconstructs:
        return False, "plethystic exponential of Omega does not reproduce the characters"
    return True, ""


CHECKS: dict[str, Callable] = {
    name: fn for name, fn in globals().items() if name.startswith("check_") and callable(fn)
}


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Suite:
    name: str
    anchor: str
    build: Callable  # (quiver, max_dim, options) -> (cases, notes) or raises Unsupported


class Unsupported(Exception):
    """The suite does not apply to the given quiver."""


def _pairs(q: Quiver, max_total: int, allow_zero: bool = True):
    for d in dims_up_to(q, max_total, include_zero=True):
        for d1, d2 in splits(d):
            if allow_zero or (d1.size and d2.size):
                if d.size:
                    yield d1, d2


def _triples(q: Quiver, max_total: int):
    for d in dims_up_to(q, max_total):
        for t in splits(d, 3):
            yield t


def _build_psi(q, max_dim, opts):
    cases = []
    for d1, d2, d3 in _triples(q, max_dim):
        args = (tuple(d1), tuple(d2), tuple(d3))
        cases.append((f"multiplicative-left {d1},{d2},{d3}", "check_psi_mult_left", args))
        cases.append((f"multiplicative-right {d1},{d2},{d3}", "check_psi_mult_right", args))
    for d1, d2 in _pairs(q, max_dim):
        args = (tuple(d1), tuple(d2))
        cases.append((f"translate-leg1 {d1},{d2}", "check_psi_translate", args + (1,)))
        cases.append((f"translate-leg2 {d1},{d2}", "check_psi_translate", args + (2,)))
        cases.append((f"euler+ {d1},{d2}", "check_psi_euler", args + (1,)))
        cases.append((f"euler- {d1},{d2}", "check_psi_euler", args + (-1,)))
        cases.append((f"dual {d1},{d2}", "check_psi_dual", args))
    return cases, []


def _random_classes(q, max_dim, count, tag, max_degree=4):
    dims = list(dims_up_to(q, max_dim))
    rng = random.Random(_seed(tag, q.to_dict(), max_dim))
    out = []
    for k in range(max(count, len(dims))):
        d = dims[k % len(dims)]
        out.append((d, format_poly(random_class(q, d, rng, max_degree))))
    return out


def _build_davison_joyce(q, max_dim, opts):
    cases = []
    for d, poly in _random_classes(q, max_dim, opts.get("classes", 20), "davison-joyce"):
        for d1, d2 in splits(d):
            cases.append((f"class {poly} at {d}, split {d1}+{d2}", "check_davison_joyce",
                          (tuple(d), poly, tuple(d1), tuple(d2))))
        cases.append((f"counit, class {poly} at {d}", "check_counit", (tuple(d), poly)))
    return cases, []


def _build_coassoc(q, max_dim, opts):
    cases = []
    triple_dim = min(max_dim, 3)
    for d, poly in _random_classes(q, triple_dim, opts.get("classes", 6), "coassoc", 3):
        for d1, d2, d3 in splits(d, 3):
            cases.append((f"coassociativity, class {poly} at {d}, split {d1}+{d2}+{d3}", "check_coassoc",
                          (tuple(d), poly, tuple(d1), tuple(d2), tuple(d3))))
    return cases, []


def _build_hexagon(q, max_dim, opts):
    cases = []
    for d1, d2, d3 in _triples(q, max_dim):
        args = (tuple(d1), tuple(d2), tuple(d3))
        for which in (1, 2):
            for mode in ("taut", "full"):
                cases.append((f"hexagon {which} ({mode}) {d1},{d2},{d3}", "check_hexagon", args + (which, mode)))
    return cases, []


def _build_bialgebra(q, max_dim, opts):
    if not q.is_symmetric:
        raise Unsupported("the bialgebra identities need a symmetric quiver")
    deg = opts.get("degree", 3)
    cases = []
    notes = []
    for d, e in _pairs(q, max_dim, allow_zero=False):
        for pa in _generators(q, d, deg):
            for pb in _generators(q, e, deg):
                sa, sb = format_poly(pa), format_poly(pb)
                for c1, c2 in splits(d + e):
                    for variant in ("plain", "psi", "localised"):
                        cases.append((f"{variant}: ({sa} at {d}) * ({sb} at {e}), component {c1}+{c2}",
                                      "check_bialgebra", (tuple(d), sa, tuple(e), sb, tuple(c1), tuple(c2), variant)))
                if q.is_weight_symmetric:
                    cases.append((f"supercommutativity ({sa} at {d}), ({sb} at {e})", "check_supercommutative",
                                  (tuple(d), sa, tuple(e), sb)))
    if not q.is_weight_symmetric:
        notes.append("supercommutativity skipped: arrow weights are not symmetric under reversal")
    for d in dims_up_to(q, max_dim):
        for a, b, c in splits(d, 3):
            if not (a.size and b.size and c.size):
                continue
            for pa in _generators(q, a, 1):
                sa = format_poly(pa)
                sb, sc = "1", format_poly(_generators(q, c, 1)[-1])
                cases.append((f"shuffle associativity ({sa} at {a}),(1 at {b}),({sc} at {c})", "check_shuffle",
                              (tuple(a), sa, tuple(b), sb, tuple(c), sc)))
    return cases, notes


def _build_taut(q, max_dim, opts):
    cases = []
    rmax = opts.get("rank", 5)
    for d in dims_up_to(q, min(max_dim, 3)):
        for v in range(q.n):
            for r in range(1, rmax + 1):
                cases.append((f"specialisation of g[{v + 1},{r}] at {d}", "check_taut_specialise", (v, r, tuple(d))))
    for d, poly in _random_classes(q, max_dim, opts.get("classes", 8), "taut", 6):
        cases.append((f"act/pullback structure, class {poly} at {d}", "check_act_composition", (tuple(d), poly)))
    order = opts.get("order", 5)
    for d1, d2 in _pairs(q, min(max_dim, 3)):
        cases.append((f"generic R_taut at {d1},{d2} to z^-{order}", "check_r_taut", (tuple(d1), tuple(d2), order)))
    return cases, []


def _tripled(q: Quiver) -> Quiver:
    if q.is_tripled:
        return q
    return triple(q)


def _build_phi(q, max_dim, opts):
    order = opts.get("rank", 5) + 1
    cases = []
    for i in range(q.n):
        for d in dims_up_to(q, min(max_dim, 3), include_zero=True):
            cases.append((f"Phi[{i + 1}] specialises at {d}", "check_phi_specialise", (i, tuple(d), order)))
        cases.append((f"Phi[{i + 1}] coproduct/translation/first order/Cartan", "check_phi_structure", (i, order)))
        for d in dims_up_to(q, min(max_dim, 2)):
            cases.append((f"R-matrix restriction to (delta_{i + 1}, {d})", "check_phi_rmatrix", (i, tuple(d))))
    return cases, []


def _simply_laced_loop_free(base: Quiver) -> bool:
    a = base.arrow_matrix()
    n = base.n
    return all(a[i][i] == 0 for i in range(n)) and all(a[i][j] + a[j][i] <= 1 for i in range(n) for j in range(n) if i != j)


def _build_yangian(q, max_dim, opts):
    rs = opts.get("rs", 4)
    checks = opts.get("checks", ("r1", "r2", "r3", "drinfeld"))
    cases = []
    notes = []
    r3_ok = _simply_laced_loop_free(q.base)
    for i in range(q.n):
        for j in range(q.n):
            if "r1" in checks:
                cases.append((f"R1 Phi[{i + 1},1] Phi[{j + 1},2]", "check_r1", (i, j, 1, 2)))
            for s in range(rs + 1):
                if "r2" in checks:
                    cases.append((f"R2 i={i + 1} j={j + 1} s={s}", "check_r2_case", (i, j, s)))
                if "r3" in checks and r3_ok:
                    cases.append((f"R3 i={i + 1} j={j + 1} r<={rs} s={s}", "check_r3_case", (i, j, rs, s)))
    if "r3" in checks and not r3_ok:
        notes.append("R3 skipped: the base quiver is not simply laced and loop free")
    if "drinfeld" in checks:
        order, max_exp = opts.get("order", 8), opts.get("max_exp", 4)
        for i in range(q.n):
            cases.append((f"Drinfeld = vertex coproduct at vertex {i + 1}, n<={max_exp}, to z^-{order}",
                          "check_drinfeld", (i, max_exp, order)))
    return cases, notes


def _build_bps(q, max_dim, opts):
    if not q.is_symmetric:
        raise Unsupported("BPS extraction needs a symmetric quiver")
    order = opts.get("bps_order", 20)
    return [(f"integrality and reconstruction, |d|<={max_dim}, to q^{order}", "check_bps", (max_dim, order))], []


def _build_colocality(q, max_dim, opts):
    if not q.is_symmetric:
        raise Unsupported("colocality needs a symmetric quiver")
    cases = []
    for d, poly in _random_classes(q, max_dim, opts.get("classes", 10), "colocality", 3):
        for d1, d2 in splits(d):
            cases.append((f"class {poly} at {d}, split {d1}+{d2}", "check_colocality",
                          (tuple(d), poly, tuple(d1), tuple(d2))))
    return cases, []


SUITES: dict[str, Suite] = {
    s.name: s
    for s in [
        Suite("psi", "Psi-series multiplicativity, translation, Euler-class and duality properties", _build_psi),
        Suite("davison-joyce", "translating the localised coproduct gives the vertex coproduct; counit axioms",
              _build_davison_joyce),
        Suite("coassoc", "vertex coassociativity of the Joyce-Liu coproduct", _build_coassoc),
        Suite("colocality", "colocality: the vertex coproduct is cocommutative up to the braiding",
              _build_colocality),
        Suite("hexagon", "spectral hexagons: R_taut with the chi~ correction, full R uncorrected", _build_hexagon),
        Suite("bialgebra", "W=0 CoHA bialgebra compatibility, supercommutativity, shuffle associativity",
              _build_bialgebra),
        Suite("taut", "tautological ring: specialisation, translation, coproduct, generic R_taut", _build_taut),
        Suite("phi", "Phi-series of the tripled quiver: specialisation, group-like coproduct, Cartan values",
              _build_phi),
        Suite("yangian", "Yangian relations R1-R3 and Drinfeld = extended vertex coproduct", _build_yangian),
        Suite("bps", "cohomological integrality of the W=0 CoHA via plethystic logarithm", _build_bps),
    ]
}
SUITE_NAMES = list(SUITES)

TRIPLED_SUITES = {"phi", "yangian"}


def list_suites() -> list[dict]:
    return [{"name": s.name, "anchor": s.anchor} for s in SUITES.values()]


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------


def _run_case(job) -> CaseResult:
    qspec, label, check, args = job
    q = _qload(qspec)
    try:
        ok, detail = CHECKS[check](q, *args)
    except (ArithmeticError, ValueError, QuiverError) as exc:
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CaseResult(label, bool(ok), detail)


def thread_count() -> int:
    raw = os.environ.get("COHAQ_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_suite(name: str, q: Quiver, max_dim: int, options: dict | None = None,
              executor: ProcessPoolExecutor | None = None) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(name)
    suite = SUITES[name]
    opts = dict(options or {})
    target = q
    notes: list[str] = []
    try:
        if name in TRIPLED_SUITES:
            if q.torus_rank and not q.is_tripled:
                notes.append("arrow weights of the input quiver are discarded by tripling")
            target = _tripled(q)
        cases, extra = suite.build(target, max_dim, opts)
    except Unsupported as exc:
        return SuiteResult(name, suite.anchor, "skipped", reason=str(exc))
    notes += extra
    qspec = _qspec(target)
    jobs = [(qspec, label, check, args) for label, check, args in cases]
    if executor is not None and len(jobs) > 1:
        results = list(executor.map(_run_case, jobs, chunksize=max(1, len(jobs) // 64)))
    else:
        results = [_run_case(j) for j in jobs]
    failures = [r for r in results if not r.passed]
    status = "fail" if failures else "pass"
    counter = None
    if failures:
        counter = f"{failures[0].label}: {failures[0].detail}"
    return SuiteResult(name, suite.anchor, status, len(results), len(failures), counter, None, notes)


def verify(q: Quiver, suites: Sequence[str] | str = "all", max_dim: int = 3, options: dict | None = None,
           threads: int | None = None) -> Report:
    """Run the requested suites and return a deterministic :class:`Report`."""
    if max_dim < 0:
        raise ValueError("max_dim must be nonnegative")
    names = list(SUITE_NAMES) if suites == "all" else list(suites)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(", ".join(unknown))
    threads = thread_count() if threads is None else threads
    results = []
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            for n in names:
                results.append(run_suite(n, q, max_dim, options, ex))
    else:
        for n in names:
            results.append(run_suite(n, q, max_dim, options))
    return Report(q.to_dict(), max_dim, results)
