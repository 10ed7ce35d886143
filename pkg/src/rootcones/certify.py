"""Machine checks of the root-system inequality and its supporting facts.

The central claim: on the cone of dual-space points that vanish on I,
where the weighted dual weight of alpha dominates the others outside I
and is nonnegative, alpha itself dominates its weighted dual weight.
Two independent routes verify it: a constructive conic-combination
certificate assembled from the mixed-basis coefficient expansion, and an
extreme-ray oracle that evaluates the objective on every ray of the cone.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .cones import ConeSpec, extreme_rays, satisfies
from .errors import (
    CertificateFailure,
    NotIrreducible,
    PreconditionViolated,
)
from .linalg import (
    Vector,
    block_coefficient_matrix,
    determinant,
    dot,
    invert,
    solve,
    unit_vec,
    vec,
    vec_sub,
)
from .roots import (
    RootSystem,
    WeightTable,
    classify_irreducible,
    connected_to,
    is_connected_subset,
)


@dataclass(frozen=True)
class CoefficientExpansion:
    """alpha written over the mixed basis I + {dual weights outside I}."""

    alpha: int
    subset: tuple[int, ...]
    on_roots: tuple[tuple[int, Fraction], ...]
    on_weights: tuple[tuple[int, Fraction], ...]

    def root_coefficient(self, beta: int) -> Fraction:
        return dict(self.on_roots)[beta]

    def weight_coefficient(self, gamma: int) -> Fraction:
        return dict(self.on_weights)[gamma]


def expand_coefficients(
    rs: RootSystem, wt: WeightTable, alpha: int, subset: Iterable[int]
) -> CoefficientExpansion:
    """Expand alpha over I and the dual weights outside I, exactly.

    Computed by the block re-basing formula, then cross-checked by an
    independent linear solve in the same basis. The off-diagonal
    coefficients must come out non-positive; a violation would disprove
    the sign property this toolkit exists to check, so it stops the run.
    """
    rs.check_root(alpha)
    subset = tuple(sorted(set(subset)))
    for i in subset:
        rs.check_root(i)
    rest = tuple(i for i in range(rs.rank) if i not in subset)
    perm = subset + rest
    m = len(subset)
    a_perm = rs.gramm.submatrix(perm, perm)
    b = rs.gramm.submatrix(subset, subset)
    c = rs.gramm.submatrix(subset, rest)
    d = block_coefficient_matrix(a_perm, b, c)
    row = d.row(perm.index(alpha))
    on_roots = tuple((beta, row[k]) for k, beta in enumerate(subset))
    on_weights = tuple((gamma, row[m + k]) for k, gamma in enumerate(rest))
    # Independent route: solve for alpha over the explicit basis vectors.
    columns = [list(unit_vec(rs.rank, beta)) for beta in subset]
    columns += [list(wt.dual[gamma]) for gamma in rest]
    direct = solve(columns, unit_vec(rs.rank, alpha))
    assert direct is not None and list(direct) == list(row), (
        "block formula disagrees with the direct solve"
    )
    for delta, coeff in on_roots + on_weights:
        assert delta == alpha or coeff <= 0, (
            f"sign property fails at {rs.root_label(delta)}: {coeff}"
        )
    return CoefficientExpansion(
        alpha=alpha, subset=subset, on_roots=on_roots, on_weights=on_weights
    )


def expansion_mass_identity(exp: CoefficientExpansion, wt: WeightTable) -> bool:
    """Whether the coefficient masses sum to one."""
    total = sum((coeff for _, coeff in exp.on_roots), Fraction(0))
    total += sum((coeff * wt.d[gamma] for gamma, coeff in exp.on_weights), Fraction(0))
    return total == 1


@dataclass(frozen=True)
class Certificate:
    """Outcome of one verification route.

    conic_combination: the objective equals the stated nonnegative
    combination of the cone's inequalities plus an arbitrary combination
    of its equalities (multipliers omitted on the ray-oracle route, which
    instead records the minimum objective over all extreme rays).
    violating_ray: a point of the cone with negative objective.
    """

    kind: str
    inequality_multipliers: tuple[Fraction, ...] | None = None
    equality_multipliers: tuple[Fraction, ...] | None = None
    ray: tuple[int, ...] | None = None
    objective_value: Fraction | None = None
    min_ray_objective: Fraction | None = None
    ray_count: int | None = None


def validate_certificate(cone: ConeSpec, cert: Certificate) -> bool:
    """Re-check a certificate against its cone, from scratch."""
    if cert.kind == "violating_ray":
        if cert.ray is None:
            return False
        value = dot(cone.objective, vec(cert.ray))
        return satisfies(cone, cert.ray) and value < 0 and value == cert.objective_value
    if cert.kind != "conic_combination":
        return False
    if cert.inequality_multipliers is None:
        # Ray-oracle confirmation: the evidence is the ray minimum.
        return cert.min_ray_objective is None or cert.min_ray_objective >= 0
    if len(cert.inequality_multipliers) != len(cone.inequalities):
        return False
    if any(m < 0 for m in cert.inequality_multipliers):
        return False
    eq_multipliers = cert.equality_multipliers or ()
    if len(eq_multipliers) != len(cone.equalities):
        return False
    acc = [Fraction(0)] * cone.ambient_dim
    for mult, functional in zip(cert.inequality_multipliers, cone.inequalities):
        for j, x in enumerate(functional):
            acc[j] += mult * x
    for mult, functional in zip(eq_multipliers, cone.equalities):
        for j, x in enumerate(functional):
            acc[j] += mult * x
    return tuple(acc) == tuple(cone.objective)


def theorem_cone(
    rs: RootSystem,
    wt: WeightTable,
    alpha: int,
    subset: Iterable[int],
    drop: str | None = None,
) -> ConeSpec:
    """Hypothesis cone of the inequality for (alpha, I).

    Equalities pin the point to the common kernel of I; inequalities say
    the weighted dual weight of alpha dominates every one outside I and
    is nonnegative. `drop` removes constraints for control runs:
    "ordering-family", "positivity", or "ordering:<k>" with k 1-based.
    """
    rs.check_root(alpha)
    subset = tuple(sorted(set(subset)))
    if alpha in subset:
        raise PreconditionViolated("alpha must lie outside I")
    rest = tuple(i for i in range(rs.rank) if i not in subset)
    inequalities: list[Vector] = []
    labels: list[str] = []
    for gamma in rest:
        label = f"ordering:{gamma + 1}"
        if drop in ("ordering-family", label):
            continue
        inequalities.append(vec_sub(wt.weighted[alpha], wt.weighted[gamma]))
        labels.append(label)
    if drop != "positivity":
        inequalities.append(wt.weighted[alpha])
        labels.append("positivity")
    return ConeSpec(
        ambient_dim=rs.rank,
        equalities=tuple(unit_vec(rs.rank, beta) for beta in subset),
        inequalities=tuple(inequalities),
        objective=vec_sub(unit_vec(rs.rank, alpha), wt.weighted[alpha]),
        inequality_labels=tuple(labels),
    )


def verify_theorem61_constructive(
    rs: RootSystem, wt: WeightTable, alpha: int, subset: Iterable[int]
) -> Certificate:
    """Assemble and re-check the conic-combination certificate.

    The multipliers come from the coefficient expansion: the ordering
    functional against gamma gets -c_gamma d_gamma, the positivity
    functional gets the excess mass, and the equalities absorb the
    coefficients on I. Everything is re-expanded symbolically before the
    certificate is returned.
    """
    subset = tuple(sorted(set(subset)))
    if alpha in subset:
        raise PreconditionViolated("alpha must lie outside I")
    exp = expand_coefficients(rs, wt, alpha, subset)
    cone = theorem_cone(rs, wt, alpha, subset)
    weight_coeff = dict(exp.on_weights)
    mass = sum(
        (coeff * wt.d[gamma] for gamma, coeff in exp.on_weights), Fraction(0)
    )
    ineq_multipliers = []
    for label in cone.inequality_labels:
        if label == "positivity":
            ineq_multipliers.append(mass - 1)
        else:
            gamma = int(label.split(":")[1]) - 1
            if gamma == alpha:
                ineq_multipliers.append(Fraction(0))
            else:
                ineq_multipliers.append(-weight_coeff[gamma] * wt.d[gamma])
    eq_multipliers = tuple(coeff for _, coeff in exp.on_roots)
    if any(m < 0 for m in ineq_multipliers):
        raise CertificateFailure(
            f"negative multiplier for {rs.spec}, {rs.root_label(alpha)}, I={subset}"
        )
    cert = Certificate(
        kind="conic_combination",
        inequality_multipliers=tuple(ineq_multipliers),
        equality_multipliers=eq_multipliers,
    )
    if not validate_certificate(cone, cert):
        raise CertificateFailure(
            f"re-expansion mismatch for {rs.spec}, {rs.root_label(alpha)}, I={subset}"
        )
    return cert


def verify_theorem61_rays(cone: ConeSpec) -> Certificate:
    """Extreme-ray oracle: evaluate the objective on every ray.

    Nonnegativity on all extreme rays and vanishing on the lineality
    space is equivalent to nonnegativity on the cone, so a negative
    evaluation yields a concrete violating ray.
    """
    enum = extreme_rays(cone)
    values = [dot(cone.objective, vec(r)) for r in enum.rays]
    for ray, value in zip(enum.rays, values):
        if value < 0:
            return Certificate(
                kind="violating_ray",
                ray=ray,
                objective_value=value,
                ray_count=len(enum.rays),
            )
    for line in enum.lineality:
        value = dot(cone.objective, vec(line))
        if value != 0:
            ray = line if value < 0 else tuple(-x for x in line)
            return Certificate(
                kind="violating_ray",
                ray=ray,
                objective_value=value if value < 0 else -value,
                ray_count=len(enum.rays),
            )
    return Certificate(
        kind="conic_combination",
        min_ray_objective=min(values) if values else None,
        ray_count=len(enum.rays),
    )


def verify_corollary62(
    rs: RootSystem,
    wt: WeightTable,
    alpha: int,
    subset: Iterable[int],
    trace: Sequence[Sequence[Fraction]],
) -> bool:
    """Check the quantitative growth bound along a dual-space trace.

    Preconditions: alpha is connected to the complement of I outside
    alpha, every trace point kills I, and the domination hypotheses hold
    pointwise. Then the mass gap is strict and the bound
    (1 - (w,w)/d) alpha(a) >= (1/d) sum (w, w_beta) beta(a) must hold at
    every index.
    """
    rs.check_root(alpha)
    subset = tuple(sorted(set(subset)))
    if alpha in subset:
        raise PreconditionViolated("alpha must lie outside I")
    remainder = [
        t for t in range(rs.rank) if t != alpha and t not in subset
    ]
    if not connected_to(rs, alpha, remainder):
        raise PreconditionViolated(
            f"{rs.root_label(alpha)} is not connected to the complement of I"
        )
    rest = [g for g in range(rs.rank) if g not in subset]
    for a in trace:
        a = vec(a)
        if len(a) != rs.rank:
            raise PreconditionViolated("trace point of wrong dimension")
        if any(a[i] != 0 for i in subset):
            raise PreconditionViolated("trace point does not kill I")
        walpha = dot(wt.weighted[alpha], a)
        if walpha < 0:
            raise PreconditionViolated("nonnegativity hypothesis fails")
        for gamma in rest:
            if walpha < dot(wt.weighted[gamma], a):
                raise PreconditionViolated("domination hypothesis fails")
    self_mass = wt.dual[alpha][alpha]  # (w_alpha, w_alpha)
    if not self_mass < wt.d[alpha]:
        return False
    for a in trace:
        a = vec(a)
        lhs = (1 - self_mass / wt.d[alpha]) * a[alpha]
        rhs = sum(
            (wt.dual[alpha][beta] * a[beta] for beta in remainder),
            Fraction(0),
        ) / wt.d[alpha]
        if lhs < rhs:
            return False
    return True


def strict_mass_gap(rs: RootSystem, wt: WeightTable, alpha: int) -> bool:
    """Whether (w_alpha, w_alpha) < d_alpha."""
    rs.check_root(alpha)
    return wt.dual[alpha][alpha] < wt.d[alpha]


def verify_lemma66(rs: RootSystem) -> bool:
    """Whether the inverse Gramm matrix has strictly positive entries."""
    if not rs.is_irreducible():
        raise NotIrreducible(f"{rs.spec} is reducible")
    return all(x > 0 for x in invert(rs.gramm).entries)


def connected_induced_subsets(rs: RootSystem):
    """All nonempty subsets of the simple roots with connected diagram."""
    n = rs.rank
    for mask in range(1, 2**n):
        subset = tuple(i for i in range(n) if mask >> i & 1)
        if is_connected_subset(rs.gramm, subset):
            yield subset


def verify_lemma65(rs: RootSystem) -> bool:
    """Every connected induced subdiagram is again a catalogue diagram.

    For each connected subset the restricted Gramm matrix must be
    positive definite and must match a catalogue type up to reindexing
    and rescaling (checked on the Cartan matrix).
    """
    if not rs.is_irreducible():
        raise NotIrreducible(f"{rs.spec} is reducible")
    for subset in connected_induced_subsets(rs):
        sub = rs.gramm.submatrix(subset, subset)
        k = len(subset)
        for size in range(1, k + 1):
            idx = list(range(size))
            if determinant(sub.submatrix(idx, idx)) <= 0:
                return False
        if classify_irreducible(sub) is None:
            return False
    return True


def certificate_to_dict(cone: ConeSpec, cert: Certificate) -> dict:
    out: dict = {"kind": cert.kind}
    if cert.kind == "violating_ray":
        out["ray"] = list(cert.ray)
        out["objective_value"] = str(cert.objective_value)
    else:
        if cert.inequality_multipliers is not None:
            out["inequality_multipliers"] = {
                cone.label(k): str(m)
                for k, m in enumerate(cert.inequality_multipliers)
            }
            out["equality_multipliers"] = [
                str(m) for m in (cert.equality_multipliers or ())
            ]
        if cert.min_ray_objective is not None:
            out["min_ray_objective"] = str(cert.min_ray_objective)
    if cert.ray_count is not None:
        out["ray_count"] = cert.ray_count
    return out
