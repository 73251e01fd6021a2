"""Almost-Poisson brackets on a chart: structure matrices, Jacobiators,
gauge transformations by 2-forms, conformal rescaling and twisted defects.

The structure matrix convention is pi[i, j] = {x_i, x_j}.  Hamiltonian
vector fields follow (X_f)_i = -sum_j pi[i, j] d_j f, so the bracket flow
of a Hamiltonian h is -ham_vf(pi, h, state); see ``rolling.reduced_vf``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import AnnihilationViolated, NonPositiveFactor, SingularGauge, SymmetricInput
from .geometry import FormPatch, fd_exterior_derivative, fd_gradient, fd_partials

__all__ = [
    "BivectorPatch",
    "ScalarField",
    "casimir_defect",
    "conformal_jacobiator",
    "constant_field",
    "coordinate_field",
    "distribution_probe",
    "dynamical_gauge_check",
    "gauge_transform",
    "ham_vf",
    "jacobiator",
    "scale_bivector",
    "twisted_defect",
]

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class BivectorPatch:
    """An almost-Poisson bivector on a chart of R^dim.

    ``structure(state)`` is the matrix pi[i, j] = {x_i, x_j}; it must be
    antisymmetric to 1e-12 (checked on every evaluation).  ``partials``,
    when given, returns the derivative tensor with the derivative index
    first: partials(state)[l, i, j] = d_l pi[i, j].
    """

    dim: int
    structure: Callable[[np.ndarray], np.ndarray]
    partials: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    def matrix(self, state: np.ndarray) -> np.ndarray:
        p = np.asarray(self.structure(np.asarray(state, dtype=float)), dtype=float)
        if p.shape != (self.dim, self.dim):
            raise ValueError(
                f"bivector '{self.name}' returned shape {p.shape}, expected {(self.dim, self.dim)}"
            )
        residue = float(np.max(np.abs(p + p.T)))
        if residue > 1e-12:
            raise SymmetricInput(
                f"bivector '{self.name}' is not antisymmetric: residue {residue:.3e}"
            )
        return p

    def partial_tensor(self, state: np.ndarray) -> np.ndarray:
        if self.partials is not None:
            t = np.asarray(self.partials(np.asarray(state, dtype=float)), dtype=float)
            expect = (self.dim,) * 3
            if t.shape != expect:
                raise ValueError(f"partials of '{self.name}' have shape {t.shape}, expected {expect}")
            return t
        return fd_partials(self.matrix, state)

    def bracket(self, f: "ScalarField", g: "ScalarField", state: np.ndarray) -> float:
        """{f, g} at state."""
        p = self.matrix(state)
        return float(f.grad(state) @ p @ g.grad(state))


@dataclass(frozen=True)
class ScalarField:
    """Scalar function on the chart with an optional analytic gradient."""

    value: Callable[[np.ndarray], float]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    def __call__(self, state: np.ndarray) -> float:
        return float(self.value(np.asarray(state, dtype=float)))

    def grad(self, state: np.ndarray) -> np.ndarray:
        if self.gradient is not None:
            return np.asarray(self.gradient(np.asarray(state, dtype=float)), dtype=float)
        return fd_gradient(self.value, state)


def coordinate_field(dim: int, i: int) -> ScalarField:
    e = np.zeros(dim)
    e[i] = 1.0
    e.setflags(write=False)
    return ScalarField(value=lambda s: float(s[i]), gradient=lambda s: e.copy(), name=f"x{i}")


def constant_field(c: float, dim: int) -> ScalarField:
    z = np.zeros(dim)
    return ScalarField(value=lambda s: float(c), gradient=lambda s: z.copy(), name=f"const({c})")


def ham_vf(pi: BivectorPatch, f: ScalarField, state: np.ndarray) -> np.ndarray:
    """Hamiltonian vector field of f: (X_f)_i = -pi[i, j] d_j f."""
    return -pi.matrix(state) @ f.grad(state)


def jacobiator(pi: BivectorPatch, i: int, j: int, k: int, state: np.ndarray) -> float:
    """Cyclic Jacobi defect {x_i,{x_j,x_k}} + {x_j,{x_k,x_i}} + {x_k,{x_i,x_j}}.

    In coordinates this is sum_l [pi_il d_l pi_jk + pi_jl d_l pi_ki + pi_kl d_l pi_ij].
    The value alternates exactly under index swaps: indices are sorted first,
    the defect is computed once, and the permutation sign is applied, so a
    repeated index gives exactly 0.0 and odd permutations flip the sign
    bit-for-bit.
    """
    for idx in (i, j, k):
        if not 0 <= idx < pi.dim:
            raise IndexError(f"index {idx} out of range for dim {pi.dim}")
    if i == j or j == k or i == k:
        return 0.0
    order = (i, j, k)
    a, b, c = sorted(order)
    # sign of the permutation taking (a,b,c) to (i,j,k)
    sign = 1.0
    lst = [i, j, k]
    if lst[0] > lst[1]:
        lst[0], lst[1] = lst[1], lst[0]
        sign = -sign
    if lst[1] > lst[2]:
        lst[1], lst[2] = lst[2], lst[1]
        sign = -sign
    if lst[0] > lst[1]:
        lst[0], lst[1] = lst[1], lst[0]
        sign = -sign
    p = pi.matrix(state)
    dp = pi.partial_tensor(state)
    val = float(p[a] @ dp[:, b, c] + p[b] @ dp[:, c, a] + p[c] @ dp[:, a, b])
    return sign * val


def scale_bivector(pi: BivectorPatch, factor: ScalarField, name: str = "") -> BivectorPatch:
    """The bivector factor * pi, with product-rule partials when available."""

    def structure(s):
        return factor(s) * pi.matrix(s)

    def partials(s):
        phi = factor(s)
        dphi = factor.grad(s)
        p = pi.matrix(s)
        dp = pi.partial_tensor(s)
        return np.einsum("l,ij->lij", dphi, p) + phi * dp

    return BivectorPatch(
        dim=pi.dim,
        structure=structure,
        partials=partials,
        name=name or f"{factor.name or 'f'}*{pi.name or 'pi'}",
    )


def gauge_transform(pi: BivectorPatch, b_form: FormPatch, name: str = "") -> BivectorPatch:
    """Gauge transformation of pi by the 2-form B: pi^B = pi (E + B pi)^{-1},
    where B is the component matrix B[i, j] = B(e_i, e_j).

    Raises SingularGauge when E + B pi has condition number above 1e12
    (smallest singular value test).  The result is re-antisymmetrized; a
    symmetric residue above 1e-10 before that step is an error.
    """
    if b_form.degree != 2 or b_form.dim != pi.dim:
        raise ValueError("gauge form must be a 2-form on the same chart")

    def structure(s):
        p = pi.matrix(s)
        bm = b_form(s)
        if not bm.any():
            return p
        m = np.eye(pi.dim) + bm @ p
        svals = np.linalg.svd(m, compute_uv=False)
        smallest = float(svals[-1])
        if smallest <= 0.0 or svals[0] / smallest > _COND_LIMIT:
            raise SingularGauge(
                f"E + B pi has condition {np.inf if smallest <= 0 else svals[0] / smallest:.3e}"
            )
        # p @ inv(m), computed by a solve on the transposed system
        g = np.linalg.solve(m.T, p.T).T
        residue = float(np.max(np.abs(g + g.T)))
        if residue > 1e-10:
            raise SymmetricInput(f"gauged matrix has symmetric residue {residue:.3e}")
        return 0.5 * (g - g.T)

    return BivectorPatch(
        dim=pi.dim,
        structure=structure,
        partials=None,
        name=name or f"gauge({pi.name or 'pi'})",
    )


def dynamical_gauge_check(
    pi: BivectorPatch,
    b_form: FormPatch,
    h_field: ScalarField,
    states: Sequence[np.ndarray],
    contraction_tol: float = 1e-9,
) -> list[dict]:
    """Check that B is compatible with the dynamics of h on each state.

    Reports (never raises) per state: (i) the contraction i_{X_h} B, which
    must vanish for the gauged bracket to reproduce the same trajectories,
    and (ii) invertibility of E + B pi.
    """
    out = []
    for s in states:
        x = ham_vf(pi, h_field, s)
        bm = b_form(s)
        contraction = float(np.linalg.norm(x @ bm))
        m = np.eye(pi.dim) + bm @ pi.matrix(s)
        svals = np.linalg.svd(m, compute_uv=False)
        smallest = float(svals[-1])
        condition = float(svals[0] / smallest) if smallest > 0.0 else float("inf")
        invertible = bool(np.isfinite(condition) and condition <= _COND_LIMIT)
        out.append(
            {
                "contraction": contraction,
                "smallest_singular_value": smallest,
                "condition": condition,
                "invertible": invertible,
                "passed": bool(invertible and contraction <= contraction_tol),
            }
        )
    return out


def twisted_defect(
    pi: BivectorPatch, phi: Optional[FormPatch], i: int, j: int, k: int, state: np.ndarray
) -> float:
    """Jacobiator plus phi(X_i, X_j, X_k) on coordinate Hamiltonian fields.

    Vanishes exactly when the bracket is twisted-Poisson with background
    3-form phi.  With phi = None (or an identically zero form) this reduces
    to the plain Jacobiator, bit for bit.
    """
    base = jacobiator(pi, i, j, k, state)
    if phi is None:
        return base
    if phi.degree != 3 or phi.dim != pi.dim:
        raise ValueError("twist form must be a 3-form on the same chart")
    p = pi.matrix(state)
    t = phi(state)
    # ham_vf of the coordinate functions: X_a = -pi e_a
    xi, xj, xk = -p[:, i], -p[:, j], -p[:, k]
    return base + float(np.einsum("abc,a,b,c->", t, xi, xj, xk))


def conformal_jacobiator(
    pi: BivectorPatch, factor: ScalarField, i: int, j: int, k: int, state: np.ndarray
) -> float:
    """Jacobiator of the rescaled bivector factor * pi.

    The factor must be strictly positive at the state (NonPositiveFactor
    otherwise): a conformal rescaling by a vanishing or negative function
    would change the characteristic distribution.
    """
    phi = factor(state)
    if not phi > 0.0:
        raise NonPositiveFactor(f"conformal factor {phi!r} at state is not positive")
    return jacobiator(scale_bivector(pi, factor), i, j, k, state)


def casimir_defect(pi: BivectorPatch, c_field: ScalarField, state: np.ndarray) -> float:
    """|| pi^sharp dC ||_2; zero iff C is a Casimir of pi at the state."""
    return float(np.linalg.norm(pi.matrix(state).T @ c_field.grad(state)))


def distribution_probe(
    pi: BivectorPatch,
    chi: FormPatch,
    f: ScalarField,
    g: ScalarField,
    state: np.ndarray,
    annihilation_tol: float = 1e-8,
) -> float:
    """-d(chi)(X_f, X_g) for a 1-form chi annihilating the characteristic
    distribution of pi.

    A nonzero value witnesses non-integrability of the distribution
    (Frobenius): the annihilator has a differential with a component along
    the distribution.  Raises AnnihilationViolated if chi fails to
    annihilate either Hamiltonian field at the state, since then the probe
    would be meaningless.
    """
    if chi.degree != 1 or chi.dim != pi.dim:
        raise ValueError("probe form must be a 1-form on the same chart")
    xf = ham_vf(pi, f, state)
    xg = ham_vf(pi, g, state)
    c = chi(state)
    for x, field in ((xf, f), (xg, g)):
        pairing = abs(float(c @ x))
        if pairing > annihilation_tol:
            raise AnnihilationViolated(
                f"chi(X_{field.name or 'f'}) = {pairing:.3e} exceeds {annihilation_tol:.1e}"
            )
    d = fd_exterior_derivative(chi, state)
    return -float(xf @ d @ xg)
