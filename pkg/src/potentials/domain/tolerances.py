from dataclasses import dataclass, fields


@dataclass(frozen=True, slots=True, kw_only=True)
class Tolerances:
    """Contract tolerances; relative unless the name says otherwise"""

    generator_row: float = 1e-12
    stationary_residual: float = 1e-11
    kirchhoff_agreement: float = 1e-9
    enumeration_agreement: float = 1e-9
    two_tree_identity: float = 1e-10
    x_independence: float = 1e-10
    group_axiom: float = 1e-9
    group_row_sum: float = 1e-10
    group_graphical: float = 1e-9
    resolvent_row_sum: float = 1e-10
    resolvent_negativity: float = 1e-10
    resolvent_graphical: float = 1e-9
    poisson_residual: float = 1e-10
    quasipotential_residual: float = 1e-9
    quasipotential_centering: float = 1e-11
    quasipotential_agreement: float = 1e-7
    integral_cutoff: float = 1e-12
    mfpt_residual: float = 1e-9
    mfpt_agreement: float = 1e-8
    green_agreement: float = 1e-8
    sum_rule: float = 1e-10
    kemeny_spread: float = 1e-9
    kemeny_identity: float = 1e-9
    antisymmetry: float = 1e-10
    bound_slack: float = 1e-12
    decomposition: float = 1e-12
    semigroup: float = 1e-10
    mc_sigmas: float = 4.0
    tail_rate: float = 0.2

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


DEFAULT_TOLERANCES = Tolerances()
