"""Rigid body with a generalized rolling constraint of rank 0..3.

Reduced phase space: states are 6-vectors (gamma, K) where gamma is the
advected vertical direction in the body frame and K the constrained
momentum.  Full phase space: 15-vectors (g row-major, x, K) with g the
attitude rotation (gamma is the third row of g) and x the contact-plane
position.

For each rank there are two reduced almost-Poisson structures ("plain" and
"primed", the latter obtained by a gauge transformation); both have the
block form

    pi = [[0,      hat(gamma)],
          [hat(gamma),  hat(V)]],      V = K + m r^2 (a Omega + b (Omega.gamma) gamma)

with rank/variant-dependent coefficients (a, b).  Rank 2 with an SO(2)
angle of -pi/2 is the Chaplygin sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .brackets import BivectorPatch, ScalarField, ham_vf
from .errors import DegenerateDenominator, UnsupportedRank
from .geometry import (
    EPSILON,
    FormPatch,
    fd_exterior_derivative,
    hat,
    random_rotation,
    vec3,
)

__all__ = [
    "FULL_DIM",
    "REDUCED_DIM",
    "BodyParams",
    "K_from_omega",
    "X_nh_full",
    "annihilator_one_form",
    "casimir_gamma_norm",
    "casimir_kgamma",
    "conformal_factor",
    "full_hamiltonian_field",
    "gauge_form_on_M",
    "hamiltonian",
    "horizontal_lift",
    "hamiltonian_field",
    "hamiltonizable_variant",
    "invariant_density",
    "leafwise_two_form",
    "lift_reduced_state",
    "matrix_A",
    "nh_bracket_full",
    "omega_from_K",
    "omega_jacobians",
    "pack_full",
    "poisson_variant",
    "project_rho",
    "reduced_bracket",
    "reduced_vf",
    "reduction_consistency",
    "sample_full_state",
    "split_full",
    "split_reduced",
    "twist_three_form",
    "twist_two_form",
]

REDUCED_DIM = 6
FULL_DIM = 15

# (a, b) coefficients of V = K + m r^2 (a Omega + b (Omega.gamma) gamma),
# keyed by (rank, variant).  Uniformly V_primed = V_plain - m r^2 Omega.
_V_COEFFS = {
    (0, "plain"): (0.0, 0.0),
    (0, "primed"): (-1.0, 0.0),
    (1, "plain"): (0.0, 1.0),
    (1, "primed"): (-1.0, 1.0),
    (2, "plain"): (1.0, -1.0),
    (2, "primed"): (0.0, -1.0),
    (3, "plain"): (1.0, 0.0),
    (3, "primed"): (0.0, 0.0),
}

# which variant is Poisson after (at most) a conformal rescaling
_HAMILTONIZABLE = {0: "plain", 1: "plain", 2: "primed", 3: "primed"}


def hamiltonizable_variant(rank: int) -> str:
    return _HAMILTONIZABLE[rank]


def poisson_variant(rank: int):
    """The variant that is Poisson as-is, or None (ranks 1 and 2 need a conformal factor)."""
    return {0: "plain", 3: "primed"}.get(rank)


def _check_variant(variant: str):
    if variant not in ("plain", "primed"):
        raise ValueError(f"variant must be 'plain' or 'primed', got {variant!r}")


@dataclass(frozen=True)
class BodyParams:
    """Body and constraint data: principal inertia, mass, ball radius, rank
    of the generalized rolling constraint, and the SO(2) angle entering the
    constraint matrix for ranks 2 and 3 (-pi/2 is the rubber/Chaplygin pairing).
    """

    inertia: tuple[float, float, float]
    mass: float
    radius: float
    rank: int
    so2_angle: float = -0.5 * math.pi

    def __post_init__(self):
        if len(self.inertia) != 3 or any(not i > 0.0 for i in self.inertia):
            raise ValueError(f"inertia must be three positive moments, got {self.inertia}")
        if not self.mass > 0.0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not self.radius > 0.0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.rank not in (0, 1, 2, 3):
            raise UnsupportedRank(f"constraint rank must be 0..3, got {self.rank}")

    @property
    def mr2(self) -> float:
        return self.mass * self.radius**2

    @property
    def inertia_vec(self) -> np.ndarray:
        return np.asarray(self.inertia, dtype=float)


def split_reduced(state) -> tuple[np.ndarray, np.ndarray]:
    state = np.asarray(state, dtype=float)
    if state.shape != (REDUCED_DIM,):
        raise ValueError(f"expected a 6-dim reduced state, got shape {state.shape}")
    return state[:3], state[3:]


def matrix_A(params: BodyParams) -> np.ndarray:
    """Constraint matrix A of rank ``params.rank``.

    Ranks 2 and 3 carry a planar rotation by ``so2_angle`` in the upper-left
    block; rank 1 projects on e3; rank 0 is zero.
    """
    c, s = math.cos(params.so2_angle), math.sin(params.so2_angle)
    if params.rank == 0:
        return np.zeros((3, 3))
    if params.rank == 1:
        a = np.zeros((3, 3))
        a[2, 2] = 1.0
        return a
    a = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 0.0]])
    if params.rank == 3:
        a[2, 2] = 1.0
    return a


def _s_matrix(params: BodyParams, gamma: np.ndarray) -> np.ndarray:
    """A^T A expressed on the reduced space: the projector S(gamma) with
    K = I Omega + m r^2 S Omega."""
    if params.rank == 0:
        return np.zeros((3, 3))
    if params.rank == 1:
        return np.outer(gamma, gamma)
    if params.rank == 2:
        return np.eye(3) - np.outer(gamma, gamma)
    return np.eye(3)


def K_from_omega(params: BodyParams, gamma, omega) -> np.ndarray:
    gamma = np.asarray(gamma, dtype=float)
    omega = np.asarray(omega, dtype=float)
    return params.inertia_vec * omega + params.mr2 * (_s_matrix(params, gamma) @ omega)


def omega_from_K(params: BodyParams, gamma, K) -> np.ndarray:
    """Angular velocity from constrained momentum, in closed form.

    Inverts K = (I + m r^2 S(gamma)) Omega.  The rank-1 and rank-2
    expressions carry |gamma|^2 in their denominators; they invert
    K_from_omega exactly on the unit sphere and extend smoothly off it,
    which is what the finite-difference probes rely on.
    """
    gamma = np.asarray(gamma, dtype=float)
    K = np.asarray(K, dtype=float)
    iv = params.inertia_vec
    mr2 = params.mr2
    if params.rank == 0:
        return K / iv
    if params.rank == 3:
        return K / (iv + mr2)
    g2 = float(gamma @ gamma)
    if params.rank == 2:
        n = iv + mr2
        u = gamma / n
        den = g2 - mr2 * float(gamma @ u)
        if den <= 1e-12 * max(g2, 1e-300):
            raise DegenerateDenominator(f"rank-2 denominator {den:.3e} at |gamma|^2 = {g2:.3e}")
        c = float(K @ u) / den
        return K / n + mr2 * c * u
    # rank 1
    u = gamma / iv
    den = g2 + mr2 * float(gamma @ u)
    if den <= 1e-12 * max(g2, 1e-300):
        raise DegenerateDenominator(f"rank-1 denominator {den:.3e} at |gamma|^2 = {g2:.3e}")
    c = float(K @ u) / den
    return K / iv - mr2 * c * u


def omega_jacobians(params: BodyParams, gamma, K) -> tuple[np.ndarray, np.ndarray]:
    """(d Omega / d gamma, d Omega / d K), both 3x3 with [i, j] = d Omega_i / d coord_j."""
    gamma = np.asarray(gamma, dtype=float)
    K = np.asarray(K, dtype=float)
    iv = params.inertia_vec
    mr2 = params.mr2
    if params.rank == 0:
        return np.zeros((3, 3)), np.diag(1.0 / iv)
    if params.rank == 3:
        return np.zeros((3, 3)), np.diag(1.0 / (iv + mr2))
    g2 = float(gamma @ gamma)
    if params.rank == 2:
        n = iv + mr2
        u = gamma / n
        den = g2 - mr2 * float(gamma @ u)
        c = float(K @ u) / den
        dden = 2.0 * gamma - 2.0 * mr2 * u
        dc = (K / n) / den - (c / den) * dden
        d_gamma = mr2 * (np.outer(u, dc) + c * np.diag(1.0 / n))
        d_k = np.diag(1.0 / n) + (mr2 / den) * np.outer(u, u)
        return d_gamma, d_k
    # rank 1
    u = gamma / iv
    den = g2 + mr2 * float(gamma @ u)
    c = float(K @ u) / den
    dden = 2.0 * gamma + 2.0 * mr2 * u
    dc = (K / iv) / den - (c / den) * dden
    d_gamma = -mr2 * (np.outer(u, dc) + c * np.diag(1.0 / iv))
    d_k = np.diag(1.0 / iv) - (mr2 / den) * np.outer(u, u)
    return d_gamma, d_k


def hamiltonian(params: BodyParams, state) -> float:
    gamma, K = split_reduced(state)
    return 0.5 * float(K @ omega_from_K(params, gamma, K))


def hamiltonian_field(params: BodyParams) -> ScalarField:
    """Reduced Hamiltonian H = K . Omega / 2 with its analytic gradient."""

    def gradient(s):
        gamma, K = split_reduced(s)
        omega = omega_from_K(params, gamma, K)
        d_gamma, _ = omega_jacobians(params, gamma, K)
        return np.concatenate([0.5 * (d_gamma.T @ K), omega])

    return ScalarField(value=lambda s: hamiltonian(params, s), gradient=gradient, name="H")


def reduced_vf(params: BodyParams, state) -> np.ndarray:
    """Equations of motion on the reduced space: (gamma, K)' = (gamma x Omega, K x Omega)."""
    gamma, K = split_reduced(state)
    omega = omega_from_K(params, gamma, K)
    return np.concatenate([np.cross(gamma, omega), np.cross(K, omega)])


def _v_vector(params: BodyParams, gamma, K, variant: str) -> np.ndarray:
    a, b = _V_COEFFS[(params.rank, variant)]
    omega = omega_from_K(params, gamma, K)
    return K + params.mr2 * (a * omega + b * float(omega @ gamma) * gamma)


def _v_jacobians(params: BodyParams, gamma, K, variant: str) -> tuple[np.ndarray, np.ndarray]:
    """(dV/dgamma, dV/dK), columns indexed by the differentiation coordinate."""
    a, b = _V_COEFFS[(params.rank, variant)]
    mr2 = params.mr2
    omega = omega_from_K(params, gamma, K)
    d_gamma, d_k = omega_jacobians(params, gamma, K)
    og = float(omega @ gamma)
    # d(Omega.gamma)/dgamma_j and /dK_j
    dog_dgamma = d_gamma.T @ gamma + omega
    dog_dk = d_k.T @ gamma
    dv_gamma = mr2 * (a * d_gamma + b * (np.outer(gamma, dog_dgamma) + og * np.eye(3)))
    dv_k = np.eye(3) + mr2 * (a * d_k + b * np.outer(gamma, dog_dk))
    return dv_gamma, dv_k


def reduced_bracket(params: BodyParams, variant: str = "plain") -> BivectorPatch:
    """Almost-Poisson structure on (gamma, K) in block form [[0, hat g], [hat g, hat V]]."""
    _check_variant(variant)

    def structure(s):
        gamma, K = split_reduced(s)
        p = np.zeros((6, 6))
        hg = hat(gamma)
        p[:3, 3:] = hg
        p[3:, :3] = hg
        p[3:, 3:] = hat(_v_vector(params, gamma, K, variant))
        return p

    def partials(s):
        gamma, K = split_reduced(s)
        dv_gamma, dv_k = _v_jacobians(params, gamma, K, variant)
        out = np.zeros((6, 6, 6))
        for l in range(3):
            e = np.zeros(3)
            e[l] = 1.0
            he = hat(e)
            out[l, :3, 3:] = he
            out[l, 3:, :3] = he
            out[l, 3:, 3:] = hat(dv_gamma[:, l])
        for l in range(3):
            out[3 + l, 3:, 3:] = hat(dv_k[:, l])
        return out

    return BivectorPatch(
        dim=REDUCED_DIM,
        structure=structure,
        partials=partials,
        name=f"rank{params.rank}-{variant}",
    )


def conformal_factor(params: BodyParams) -> ScalarField:
    """The positive function that rescales the Hamiltonizable bracket into a
    Poisson one: sqrt(|gamma|^2 + m r^2 gamma . I^-1 gamma) for rank 1,
    sqrt(|gamma|^2 - m r^2 gamma . (I + m r^2)^-1 gamma) for rank 2, and the
    constant 1 for ranks 0 and 3.
    """
    if params.rank in (0, 3):
        return ScalarField(
            value=lambda s: 1.0, gradient=lambda s: np.zeros(6), name="phi=1"
        )
    mr2 = params.mr2
    if params.rank == 1:
        weight = 1.0 + mr2 / params.inertia_vec
    else:
        weight = 1.0 - mr2 / (params.inertia_vec + mr2)

    def value(s):
        gamma = np.asarray(s, dtype=float)[:3]
        return math.sqrt(float(gamma @ (weight * gamma)))

    def gradient(s):
        gamma = np.asarray(s, dtype=float)[:3]
        phi = math.sqrt(float(gamma @ (weight * gamma)))
        out = np.zeros(6)
        out[:3] = weight * gamma / phi
        return out

    return ScalarField(value=value, gradient=gradient, name=f"phi_rank{params.rank}")


def invariant_density(params: BodyParams) -> ScalarField:
    """Density of the smooth invariant measure on (gamma, K): 1/conformal_factor."""
    if params.rank in (0, 3):
        return ScalarField(value=lambda s: 1.0, gradient=lambda s: np.zeros(6), name="mu=1")
    phi = conformal_factor(params)

    def value(s):
        return 1.0 / phi(s)

    def gradient(s):
        p = phi(s)
        return -phi.grad(s) / (p * p)

    return ScalarField(value=value, gradient=gradient, name=f"mu_rank{params.rank}")


def casimir_kgamma() -> ScalarField:
    """C1 = K . gamma on the reduced space."""

    def gradient(s):
        gamma, K = split_reduced(s)
        return np.concatenate([K, gamma])

    return ScalarField(value=lambda s: float(s[:3] @ s[3:]), gradient=gradient, name="C1")


def casimir_gamma_norm() -> ScalarField:
    """C2 = |gamma|^2 on the reduced space."""

    def gradient(s):
        out = np.zeros(6)
        out[:3] = 2.0 * np.asarray(s, dtype=float)[:3]
        return out

    return ScalarField(value=lambda s: float(s[:3] @ s[:3]), gradient=gradient, name="C2")


def annihilator_one_form(params: BodyParams, variant: str = "plain") -> FormPatch:
    """The 1-form V . dgamma + gamma . dK, which annihilates the characteristic
    distribution of the corresponding reduced bracket."""
    _check_variant(variant)

    def entries(s):
        gamma, K = split_reduced(s)
        return np.concatenate([_v_vector(params, gamma, K, variant), gamma])

    def partials(s):
        gamma, K = split_reduced(s)
        dv_gamma, dv_k = _v_jacobians(params, gamma, K, variant)
        out = np.zeros((6, 6))
        for l in range(3):
            out[l, :3] = dv_gamma[:, l]
            out[l, 3 + l] = 1.0
            out[3 + l, :3] = dv_k[:, l]
        return out

    return FormPatch(degree=1, dim=6, entries=entries, partials=partials, name="chi")


def _omega_dot_gamma_grads(params: BodyParams, gamma, K) -> tuple[float, np.ndarray, np.ndarray]:
    omega = omega_from_K(params, gamma, K)
    d_gamma, d_k = omega_jacobians(params, gamma, K)
    og = float(omega @ gamma)
    return og, d_gamma.T @ gamma + omega, d_k.T @ gamma


def twist_two_form(params: BodyParams) -> FormPatch:
    """The gauge 2-form on the reduced space, supported on the gamma-gamma
    block: B_ab = m r^2 (Omega . gamma) eps_abl gamma_l.  Only ranks 1 and 2
    carry a nonzero twist.
    """
    if params.rank in (0, 3):
        raise UnsupportedRank(f"no reduced gauge 2-form for rank {params.rank}")
    mr2 = params.mr2

    def entries(s):
        gamma, K = split_reduced(s)
        og = float(omega_from_K(params, gamma, K) @ gamma)
        out = np.zeros((6, 6))
        # eps_abl gamma_l = -hat(gamma)_ab
        out[:3, :3] = -mr2 * og * hat(gamma)
        return out

    def partials(s):
        gamma, K = split_reduced(s)
        og, dog_dgamma, dog_dk = _omega_dot_gamma_grads(params, gamma, K)
        out = np.zeros((6, 6, 6))
        hg = hat(gamma)
        for l in range(3):
            e = np.zeros(3)
            e[l] = 1.0
            out[l, :3, :3] = -mr2 * (dog_dgamma[l] * hg + og * hat(e))
        for l in range(3):
            out[3 + l, :3, :3] = -mr2 * dog_dk[l] * hg
        return out

    return FormPatch(degree=2, dim=6, entries=entries, partials=partials, name="B_red")


def twist_three_form(params: BodyParams) -> FormPatch:
    """Background 3-form making the Hamiltonizable bracket twisted-Poisson:
    -dB for rank 2, +dB for rank 1 (B = twist_two_form)."""
    if params.rank in (0, 3):
        raise UnsupportedRank(f"no twist 3-form for rank {params.rank}")
    b = twist_two_form(params)
    sign = -1.0 if params.rank == 2 else 1.0

    def entries(s):
        return sign * fd_exterior_derivative(b, s)

    return FormPatch(degree=3, dim=6, entries=entries, name="phi_twist")


def leafwise_two_form(params: BodyParams) -> FormPatch:
    """Rank-2 leafwise 2-form of the twisted structure, used to compare the
    twist 3-form with the conformal exact form (1/phi) dphi on the leaves:
    gamma-gamma block eps_abl W_l with W = K - m r^2 (Omega . gamma) gamma,
    K-gamma block hat(gamma).
    """
    if params.rank != 2:
        raise UnsupportedRank("the leafwise 2-form is only assembled for rank 2")
    mr2 = params.mr2

    def entries(s):
        gamma, K = split_reduced(s)
        og = float(omega_from_K(params, gamma, K) @ gamma)
        w = K - mr2 * og * gamma
        out = np.zeros((6, 6))
        out[:3, :3] = -hat(w)
        hg = hat(gamma)
        out[3:, :3] = hg
        out[:3, 3:] = -hg.T
        return out

    return FormPatch(degree=2, dim=6, entries=entries, name="Omega_leaf")


# ---------------------------------------------------------------------------
# full (unreduced) phase space


def pack_full(g, x, K) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    return np.concatenate([g.reshape(9), np.asarray(x, dtype=float), np.asarray(K, dtype=float)])


def split_full(state) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    state = np.asarray(state, dtype=float)
    if state.shape != (FULL_DIM,):
        raise ValueError(f"expected a 15-dim full state, got shape {state.shape}")
    return state[:9].reshape(3, 3), state[9:12], state[12:15]


def project_rho(state) -> np.ndarray:
    """Reduction map rho(g, x, K) = (gamma, K) with gamma the third row of g."""
    state = np.asarray(state, dtype=float)
    if state.shape != (FULL_DIM,):
        raise ValueError(f"expected a 15-dim full state, got shape {state.shape}")
    return np.concatenate([state[6:9], state[12:15]])


def lift_reduced_state(state) -> np.ndarray:
    """Deterministic section of rho: a rotation with third row gamma, x = 0."""
    gamma, K = split_reduced(state)
    norm = float(np.linalg.norm(gamma))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"cannot lift: |gamma| = {norm!r} is not 1")
    gamma = gamma / norm
    # complete gamma to an orthonormal, positively oriented row triple
    trial = np.zeros(3)
    trial[int(np.argmin(np.abs(gamma)))] = 1.0
    row1 = trial - float(trial @ gamma) * gamma
    row1 /= np.linalg.norm(row1)
    row2 = np.cross(gamma, row1)
    g = np.vstack([row1, row2, gamma])
    return pack_full(g, np.zeros(3), K)


def sample_full_state(seed=None) -> np.ndarray:
    """Random full state: Haar-ish rotation, x and K uniform in [-1,1]^3."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = random_rotation(rng)
    x = rng.uniform(-1.0, 1.0, size=3)
    k = rng.uniform(-1.0, 1.0, size=3)
    return pack_full(g, x, k)


def full_hamiltonian_field(params: BodyParams) -> ScalarField:
    """H on the full space; depends on g only through its third row."""

    def value(s):
        g, _, K = split_full(s)
        return 0.5 * float(K @ omega_from_K(params, g[2], K))

    def gradient(s):
        g, _, K = split_full(s)
        gamma = g[2]
        omega = omega_from_K(params, gamma, K)
        d_gamma, _ = omega_jacobians(params, gamma, K)
        out = np.zeros(FULL_DIM)
        out[6:9] = 0.5 * (d_gamma.T @ K)
        out[12:15] = omega
        return out

    return ScalarField(value=value, gradient=gradient, name="H_full")


def _t_matrix(params: BodyParams, g: np.ndarray) -> np.ndarray:
    a = matrix_A(params)
    q = a.T @ a
    return g.T @ q @ g


def nh_bracket_full(params: BodyParams, form: str = "plain") -> BivectorPatch:
    """Almost-Poisson structure on the full space (g, x, K).

    Nonzero entries: {g_ij, K_l} = -eps_jlk g_ik, {x_i, K_l} = r (A g)_il,
    and {K_i, K_j} = hat(W)_ij with W = K + m r^2 T Omega for the plain form
    and W = K + m r^2 (T - E) Omega for the gauged one, T = g^T A^T A g.
    """
    if form not in ("plain", "gauged"):
        raise ValueError(f"form must be 'plain' or 'gauged', got {form!r}")
    a_mat = matrix_A(params)
    q = a_mat.T @ a_mat
    mr2 = params.mr2
    shift = 0.0 if form == "plain" else 1.0

    def _w_vector(g, K):
        gamma = g[2]
        omega = omega_from_K(params, gamma, K)
        t = g.T @ q @ g
        if shift:
            t = t - np.eye(3)
        return K + mr2 * (t @ omega)

    def structure(s):
        g, _, K = split_full(s)
        p = np.zeros((FULL_DIM, FULL_DIM))
        # {g_ij, K_l} = -eps_jlk g_ik, rows 3i+j, columns 12+l
        p[:9, 12:] = -np.einsum("jlk,ik->ijl", EPSILON, g).reshape(9, 3)
        p[9:12, 12:] = params.radius * (a_mat @ g)
        p = p - p.T
        p[12:, 12:] = hat(_w_vector(g, K))
        return p

    def partials(s):
        g, _, K = split_full(s)
        gamma = g[2]
        omega = omega_from_K(params, gamma, K)
        d_omega_gamma, d_omega_k = omega_jacobians(params, gamma, K)
        t = g.T @ q @ g
        t_eff = t - np.eye(3) if shift else t
        qg = q @ g
        out = np.zeros((FULL_DIM, FULL_DIM, FULL_DIM))
        for a in range(3):
            for b in range(3):
                l = 3 * a + b
                upper = np.zeros((FULL_DIM, FULL_DIM))
                # d{g_ij, K_m}/dg_ab = -eps_jmb delta_ia
                upper[3 * a : 3 * a + 3, 12:] = -EPSILON[:, :, b]
                # d{x_i, K_m}/dg_ab = r A_ia delta_mb
                upper[9:12, 12 + b] = params.radius * a_mat[:, a]
                out[l] = upper - upper.T
                # dW/dg_ab = mr2 [ (dT/dg_ab) Omega + T_eff dOmega/dg_ab ];
                # Omega sees g only through gamma = row 2
                dw = (qg[a] @ omega) * _unit(b) + omega[b] * qg[a]
                if a == 2:
                    dw = dw + t_eff @ d_omega_gamma[:, b]
                out[l, 12:, 12:] = hat(mr2 * dw)
        for c in range(3):
            dw = _unit(c) + mr2 * (t_eff @ d_omega_k[:, c])
            out[12 + c, 12:, 12:] = hat(dw)
        return out

    return BivectorPatch(
        dim=FULL_DIM,
        structure=structure,
        partials=partials,
        name=f"nh-rank{params.rank}-{form}",
    )


def _unit(i: int) -> np.ndarray:
    e = np.zeros(3)
    e[i] = 1.0
    return e


def X_nh_full(params: BodyParams, state) -> np.ndarray:
    """Constrained equations of motion on the full space: the bracket flow of H."""
    pi = nh_bracket_full(params, "plain")
    h = full_hamiltonian_field(params)
    return -ham_vf(pi, h, state)


def gauge_form_on_M(params: BodyParams) -> FormPatch:
    """The semi-basic gauge 2-form on the full space relating the plain and
    gauged brackets: B(U, V) = m r^2 Omega . (u x v) where u, v are the
    body-frame rotation components of U, V.  Supported on the g-g block.
    """
    mr2 = params.mr2

    def entries(s):
        g, _, K = split_full(s)
        omega = omega_from_K(params, g[2], K)
        # L maps the 9 g-coordinates of a tangent vector to its body-frame
        # rotation vector: u_d = 1/2 eps_dbc (g^T U)_cb
        l_map = 0.5 * np.einsum("dbc,mc->dmb", EPSILON, g).reshape(3, 9)
        out = np.zeros((FULL_DIM, FULL_DIM))
        out[:9, :9] = -mr2 * l_map.T @ hat(omega) @ l_map
        return out

    return FormPatch(degree=2, dim=FULL_DIM, entries=entries, name="B_full")


def horizontal_lift(params: BodyParams, full_state, reduced_tangent) -> np.ndarray:
    """Lift a reduced tangent (w_gamma, w_K) at rho(state) to the full space.

    The rotational part solves gamma x a = w_gamma with a . gamma = 0 (no
    spin about gamma) and moves g along g hat(a); x does not move.  Requires
    w_gamma . gamma = 0, i.e. a genuine tangent to the gamma-sphere.
    """
    g, _, _ = split_full(full_state)
    gamma = g[2]
    w = np.asarray(reduced_tangent, dtype=float)
    w_gamma, w_k = w[:3], w[3:]
    if abs(float(w_gamma @ gamma)) > 1e-8:
        raise ValueError("reduced tangent leaves the gamma-sphere")
    a = np.cross(w_gamma, gamma) / float(gamma @ gamma)
    return np.concatenate([(g @ hat(a)).reshape(9), np.zeros(3), w_k])


def reduction_consistency(
    params: BodyParams, variant: str, full_state, i: int, j: int
) -> float:
    """|{y_i, y_j}_full - pi_reduced[i, j] at rho(state)| for the reduced
    coordinates y = (gamma, K) seen as functions on the full space.

    variant 'plain' pairs the plain full bracket with the plain reduced one;
    'primed' pairs the gauged full bracket with the primed reduced one.
    """
    _check_variant(variant)
    if not (0 <= i < REDUCED_DIM and 0 <= j < REDUCED_DIM):
        raise IndexError("reduced coordinate index out of range")
    full_form = "plain" if variant == "plain" else "gauged"
    p_full = nh_bracket_full(params, full_form).matrix(full_state)
    p_red = reduced_bracket(params, variant).matrix(project_rho(full_state))
    idx = [6 + a for a in range(3)] + [12 + a for a in range(3)]
    return abs(float(p_full[idx[i], idx[j]] - p_red[i, j]))
