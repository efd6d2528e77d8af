# services/transport.py
# Maps between glued spaces, generic composition of admissible maps,
# pullbacks and pushforwards.

from __future__ import annotations
from dataclasses import dataclass
from typing import Tuple

from services.errors import PreconditionError, SpaceMismatch
from services.glueing import AdmissibleMap, SumSpace, glue_one_sided, make_admissible
from services.spaces import SpaceMap, identity_map, is_continuous


@dataclass(frozen=True)
class SumMap:
    """psi + phi from source = X +_{f,g} Y to target = Z +_{h,j} W."""
    source: SumSpace
    target: SumSpace
    psi: SpaceMap
    phi: SpaceMap

    def __post_init__(self):
        if self.psi.domain != self.source.left or self.psi.codomain != self.target.left:
            raise SpaceMismatch("psi must run between the left halves")
        if self.phi.domain != self.source.right or self.phi.codomain != self.target.right:
            raise SpaceMismatch("phi must run between the right halves")


def total_map(m: SumMap) -> SpaceMap:
    shift = m.target.left.n
    return SpaceMap(m.source.total, m.target.total, m.psi.table + tuple(shift + t for t in m.phi.table))


def identity_sum_map(source: SumSpace, target: SumSpace) -> SumMap:
    return SumMap(source, target, identity_map(source.left), identity_map(source.right))


def diagram_continuity(m: SumMap) -> bool:
    if not is_continuous(m.psi) or not is_continuous(m.phi):
        raise PreconditionError("diagram_continuity needs psi and phi continuous on the halves")
    f, g = m.source.f, m.source.g
    h, j = m.target.f, m.target.g
    Z, W = m.target.left, m.target.right
    for z in range(Z.n):
        if f.apply(m.psi.preimage(Z.down[z])) & ~m.phi.preimage(h.gen[z]):
            return False
    for w in range(W.n):
        if g.apply(m.phi.preimage(W.down[w])) & ~m.psi.preimage(j.gen[w]):
            return False
    return True


# ---------- closed-set transports induced by point maps ----------
def closure_image_map(pi: SpaceMap) -> AdmissibleMap:
    """A -> Cl(pi(A)), from Closed(domain) to Closed(codomain)."""
    dom, cod = pi.domain, pi.codomain
    return AdmissibleMap(dom, cod, tuple(cod.closure(pi.image(d)) for d in dom.down))


def closure_preimage_map(varpi: SpaceMap) -> AdmissibleMap:
    """B -> Cl(varpi^-1(B)), from Closed(codomain) to Closed(domain)."""
    dom, cod = varpi.domain, varpi.codomain
    return AdmissibleMap(cod, dom, tuple(dom.closure(varpi.preimage(d)) for d in cod.down))


def preimage_map(pi: SpaceMap) -> AdmissibleMap:
    if not is_continuous(pi):
        raise PreconditionError("preimage transport needs a continuous map")
    dom, cod = pi.domain, pi.codomain
    return AdmissibleMap(cod, dom, tuple(pi.preimage(d) for d in cod.down))


def compose_through(sigma: AdmissibleMap, f: AdmissibleMap, pi: AdmissibleMap) -> AdmissibleMap:
    """sigma ∘ f ∘ pi, validated as an admissible map."""
    if pi.target != f.source or f.target != sigma.source:
        raise SpaceMismatch("admissible maps do not chain")
    return make_admissible(pi.source, sigma.target, [sigma.apply(f.apply(a)) for a in pi.gen])


def pullback(f: AdmissibleMap, pi: SpaceMap, varpi: SpaceMap) -> AdmissibleMap:
    """f* over pi: Y -> X and varpi: Z -> W; continuity is not required."""
    if pi.codomain != f.source or varpi.codomain != f.target:
        raise SpaceMismatch("pullback maps must land in the source and target of f")
    return compose_through(closure_preimage_map(varpi), f, closure_image_map(pi))


def pushforward(f: AdmissibleMap, pi: SpaceMap, varpi: SpaceMap) -> AdmissibleMap:
    """f_* over continuous pi: X -> Y and varpi: W -> Z."""
    if pi.domain != f.source or varpi.domain != f.target:
        raise SpaceMismatch("pushforward maps must start at the source and target of f")
    if not is_continuous(varpi):
        raise PreconditionError("pushforward needs a continuous varpi")
    return compose_through(closure_image_map(varpi), f, preimage_map(pi))


def pullback_glueing(s: SumSpace, pi: SpaceMap, varpi: SpaceMap) -> Tuple[SumSpace, SumMap]:
    """Y +_{f*} Z together with pi + varpi into s."""
    fs = pullback(s.f, pi, varpi)
    pulled = glue_one_sided(pi.domain, varpi.domain, fs)
    return pulled, SumMap(pulled, s, pi, varpi)


def pushforward_glueing(s: SumSpace, pi: SpaceMap, varpi: SpaceMap) -> Tuple[SumSpace, SumMap]:
    """Y +_{f_*} Z together with pi + varpi out of s."""
    fs = pushforward(s.f, pi, varpi)
    pushed = glue_one_sided(pi.codomain, varpi.codomain, fs)
    return pushed, SumMap(s, pushed, pi, varpi)


def cube_premises(pi1: AdmissibleMap, pi2: AdmissibleMap, sigma1: AdmissibleMap, sigma2: AdmissibleMap,
                  mu: SpaceMap, nu: SpaceMap, psi: SpaceMap, phi: SpaceMap) -> bool:
    """The two inclusions pi1∘psi⁻¹ ⊆ mu⁻¹∘pi2 and sigma1∘nu⁻¹ ⊆ phi⁻¹∘sigma2, on generators."""
    Y2, W2 = psi.codomain, nu.codomain
    for y in range(Y2.n):
        if pi1.apply(psi.preimage(Y2.down[y])) & ~mu.preimage(pi2.gen[y]):
            return False
    for w in range(W2.n):
        if sigma1.apply(nu.preimage(W2.down[w])) & ~phi.preimage(sigma2.gen[w]):
            return False
    return True


def pullback_functor(pi: SpaceMap, morphism: SumMap) -> SumMap:
    """Carry id+varpi: Y+_f Z -> Y+_g W along pi: X -> Y to id+varpi: X+_{f*} Z -> X+_{g*} W."""
    psi = morphism.psi
    if psi.domain != psi.codomain or psi.table != tuple(range(psi.domain.n)):
        raise PreconditionError("pullback_functor acts on morphisms that are the identity on the base")
    if pi.codomain != psi.domain:
        raise SpaceMismatch("pi must land in the shared base")
    Z, W = morphism.source.right, morphism.target.right
    fs = pullback(morphism.source.f, pi, identity_map(Z))
    gs = pullback(morphism.target.f, pi, identity_map(W))
    X = pi.domain
    return SumMap(glue_one_sided(X, Z, fs), glue_one_sided(X, W, gs), identity_map(X), morphism.phi)
