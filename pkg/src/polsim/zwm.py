"""Two-crystal induced-coherence interferometer.

Two pair sources share one idler path: the first source's idler is sent
through an attenuator (amplitude transmission T) into the second source's
idler mode, so the two signal beams stay mutually coherent only to the
degree the idler path survives.  A polarization rotation by gamma in the
first signal arm makes the path information erasable; the superposed signal
beams are analyzed through a balanced splitter and their 2x2 coherence
matrix gives the degree of polarization.

The splitter's reflection phase is folded into the second arm's phase
reference, so the interferometric phase of every cross term is exactly
``beta(cfg)`` and an all-zero-phase configuration sits at beta = 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .elements import attenuator, beam_splitter, polarization_rotation
from .errors import ParameterError, ZeroTraceError
from .fock import (
    FockState,
    ModeExpr,
    ModeId,
    ModeRegistry,
    apply_creation,
    pair_expectation,
    unit_expr,
    vacuum,
)

_COS_TOL = 1e-12

S1X = ModeId("S1", "x")
S1Y = ModeId("S1", "y")
S2X = ModeId("S2", "x")
S2Y = ModeId("S2", "y")
I1XP = ModeId("I1", "xp")
VAC0XP = ModeId("VAC0", "xp")

_ZWM_MODES = (S1X, S1Y, S2X, S2Y, I1XP, VAC0XP)


def zwm_registry() -> ModeRegistry:
    """The six-mode registry of the interferometer."""
    return ModeRegistry(_ZWM_MODES)


def _check_unit_interval(value: float, name: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} = {value} outside [0, 1]")


@dataclass(frozen=True)
class ImperfectionConfig:
    """Device imperfections, all 1.0 for the ideal instrument.

    eta_idler: lumped idler-path amplitude transmission, multiplies T
    bs_tx, bs_ty: per-polarization splitter coupling of the second arm into
        the detector port, relative to the balanced 1/sqrt(2)
    mu_overlap: spectral/spatial overlap of the two signal beams, scales
        every cross-source coherence term
    """

    eta_idler: float = 1.0
    bs_tx: float = 1.0
    bs_ty: float = 1.0
    mu_overlap: float = 1.0

    def __post_init__(self):
        for name in ("eta_idler", "bs_tx", "bs_ty", "mu_overlap"):
            _check_unit_interval(getattr(self, name), name)


IDEAL = ImperfectionConfig()


@dataclass(frozen=True)
class ZwmConfig:
    """One operating point of the interferometer.

    g1, g2: complex pair-source gains, 0 < |g| <= 0.1 (perturbative regime)
    t: complex attenuator amplitude transmission, |t| <= 1
    gamma: polarization rotation in the first signal arm (rad), cos >= 0
    phi_s1, phi_s2, phi_i: signal-arm and idler propagation phases (rad)
    """

    g1: complex = 0.01
    g2: complex = 0.01
    t: complex = 1.0
    gamma: float = 0.0
    phi_s1: float = 0.0
    phi_s2: float = 0.0
    phi_i: float = 0.0
    imperfections: ImperfectionConfig = field(default_factory=ImperfectionConfig)

    def __post_init__(self):
        for name in ("g1", "g2"):
            mag = abs(complex(getattr(self, name)))
            if not 0.0 < mag <= 0.1:
                raise ParameterError(f"|{name}| = {mag} outside (0, 0.1]")
        if abs(complex(self.t)) > 1.0 + _COS_TOL:
            raise ParameterError(f"|t| = {abs(complex(self.t))} exceeds 1")
        if math.cos(self.gamma) < -_COS_TOL:
            raise ParameterError(f"gamma = {self.gamma} rad has cos < 0")

    @property
    def t_eff(self) -> complex:
        """Attenuator transmission with the idler-path loss folded in."""
        return complex(self.t) * self.imperfections.eta_idler


def build_state(cfg: ZwmConfig) -> FockState:
    """Post-selected two-photon state to first order in the gains.

    |vac> + g1 |S1x, I1> + g2 e^{-i phi_i} conj(T_eff) |S2x, I1>
          + g2 e^{-i phi_i} R_eff |S2x, VAC0>,   R_eff = sqrt(1 - |T_eff|^2).

    The second source's idler operator is the attenuator output, so the
    creation amplitudes are the conjugated attenuator coefficients.
    """
    reg = zwm_registry()
    vac = vacuum(reg, truncation_order=2)
    state = vac + cfg.g1 * apply_creation(apply_creation(vac, I1XP), S1X)
    idler_out = attenuator(cfg.t_eff, unit_expr(I1XP), VAC0XP, cfg.phi_i)
    for mode, coef in idler_out.terms.items():
        pair = apply_creation(apply_creation(vac, mode), S2X)
        state = state + (cfg.g2 * coef.conjugate()) * pair
    return state


def output_fields(cfg: ZwmConfig) -> tuple[ModeExpr, ModeExpr]:
    """Detector-port field operators (Ex, Ey).

    The first arm is rotated by gamma and enters through the splitter's
    transmission; the second arm enters through the reflection, whose i is
    absorbed into the arm phase so the cross-term phase equals beta(cfg).
    Per polarization p the second-arm coupling is bs_tp/sqrt(2) and the
    first-arm coupling the unitary completion sqrt(1 - bs_tp^2/2).
    """
    imp = cfg.imperfections
    rot_x, rot_y = polarization_rotation(cfg.gamma, unit_expr(S1X), unit_expr(S1Y))
    arm1 = cmath.exp(1j * cfg.phi_s1)
    arm2 = cmath.exp(1j * (cfg.phi_s2 - math.pi / 2.0))
    fields = []
    for rot, s2_mode, bs_t in ((rot_x, S2X, imp.bs_tx), (rot_y, S2Y, imp.bs_ty)):
        r = bs_t / math.sqrt(2.0)
        t = math.sqrt(1.0 - r * r)
        out, _ = beam_splitter(t, r, arm1 * rot, arm2 * unit_expr(s2_mode))
        fields.append(out)
    return fields[0], fields[1]


@dataclass(frozen=True)
class CoherenceMatrix:
    """2x2 signal-beam coherence matrix G_pq = <E_p^dagger E_q>."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ParameterError(f"coherence matrix must be 2x2, got {m.shape}")
        scale = float(np.abs(m).max())
        if scale > 0.0:
            tol = 1e-9 * scale
            if abs(m[1, 0] - m[0, 1].conjugate()) > tol:
                raise ParameterError("coherence matrix is not Hermitian")
            if abs(m[0, 0].imag) > tol or abs(m[1, 1].imag) > tol:
                raise ParameterError("coherence matrix diagonal must be real")
            if min(np.linalg.eigvalsh((m + m.conj().T) / 2.0)) < -1e-9 * max(
                m[0, 0].real + m[1, 1].real, scale
            ):
                raise ParameterError("coherence matrix is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def gxx(self) -> complex:
        return complex(self.matrix[0, 0])

    @property
    def gxy(self) -> complex:
        return complex(self.matrix[0, 1])

    @property
    def gyx(self) -> complex:
        return complex(self.matrix[1, 0])

    @property
    def gyy(self) -> complex:
        return complex(self.matrix[1, 1])

    @property
    def trace(self) -> float:
        return float(self.matrix[0, 0].real + self.matrix[1, 1].real)


def coherence_matrix(
    state: FockState, fields: tuple[ModeExpr, ModeExpr], mu_overlap: float = 1.0
) -> CoherenceMatrix:
    """Assemble G from mode-pair expectations of the field operators.

    Coherences between first-source and second-source modes are scaled by
    mu_overlap (partial beam overlap); mu_overlap = 1 reduces exactly to
    pair_expectation(state, E_p, E_q) by bilinearity.
    """
    _check_unit_interval(mu_overlap, "mu_overlap")
    ex, ey = fields
    modes: list[ModeId] = []
    for f in (ex, ey):
        for m in f.terms:
            if m not in modes:
                modes.append(m)
    moments: dict[tuple[ModeId, ModeId], complex] = {}
    for m in modes:
        for n in modes:
            val = pair_expectation(state, unit_expr(m), unit_expr(n))
            if {m.label, n.label} == {"S1", "S2"}:
                val *= mu_overlap
            moments[m, n] = val
    g = np.zeros((2, 2), dtype=complex)
    for p, fp in enumerate((ex, ey)):
        for q, fq in enumerate((ex, ey)):
            g[p, q] = sum(
                cp.conjugate() * fq.terms[n] * moments[m, n]
                for m, cp in fp.terms.items()
                for n in fq.terms
            )
    return CoherenceMatrix(g)


def degree_of_polarization(g: CoherenceMatrix) -> float:
    """P = sqrt(1 - 4 det G / (tr G)^2), i.e. (l1 - l2)/(l1 + l2).

    Evaluated in the cancellation-free eigenvalue-gap form
    sqrt((Gxx - Gyy)^2 + 4 |Gxy|^2) / tr G, which is the same quantity
    since tr^2 - 4 det = (Gxx - Gyy)^2 + 4 |Gxy|^2 exactly.
    """
    tr = g.trace
    if tr <= 0.0:
        raise ZeroTraceError("degree of polarization undefined at zero intensity")
    gap = math.hypot(g.gxx.real - g.gyy.real, 2.0 * abs(g.gxy))
    return min(gap / tr, 1.0)


def stokes_parameters(g: CoherenceMatrix) -> tuple[float, float, float, float]:
    """(S0, S1, S2, S3) of the coherence matrix.

    S0 = tr G, S1 = Gxx - Gyy, S2 = 2 Re Gxy, S3 = 2 Im Gyx.  The S3 sign
    pairs with the tomography quarter-wave-plate convention: the R setting
    measures (S0 - S3)/2.
    """
    return (
        g.trace,
        float(g.gxx.real - g.gyy.real),
        float(2.0 * g.gxy.real),
        float(2.0 * g.gyx.imag),
    )


def beta(cfg: ZwmConfig) -> float:
    """Interferometric phase phi_s2 - phi_s1 - phi_i - arg T + arg g2 - arg g1,
    reduced to (-pi, pi].  At T = 0 the transmission phase is taken as 0 by
    convention (it no longer affects anything physical)."""
    t = complex(cfg.t)
    arg_t = cmath.phase(t) if t != 0 else 0.0
    raw = (cfg.phi_s2 - cfg.phi_s1 - cfg.phi_i - arg_t
           + cmath.phase(complex(cfg.g2)) - cmath.phase(complex(cfg.g1)))
    reduced = math.remainder(raw, 2.0 * math.pi)
    if reduced <= -math.pi:
        reduced += 2.0 * math.pi
    return reduced


def analytic_p_general(cfg: ZwmConfig) -> float:
    """Closed-form degree of polarization at arbitrary beta.

    P = sqrt(c^2 + |T|^2 (s^2 + c^2 cb^2) + 2 |T| c cb) / (1 + |T| c cb)
    with c = cos gamma, s = sin gamma, cb = cos beta and |T| = |t_eff|.
    Valid for equal gain magnitudes and an otherwise ideal device (the
    idler loss eta_idler folds exactly into |T|).
    """
    if not math.isclose(abs(complex(cfg.g1)), abs(complex(cfg.g2)),
                        rel_tol=1e-12, abs_tol=0.0):
        raise ParameterError("closed form requires |g1| = |g2|")
    imp = cfg.imperfections
    if imp.bs_tx != 1.0 or imp.bs_ty != 1.0 or imp.mu_overlap != 1.0:
        raise ParameterError(
            "closed form only covers an ideal splitter and full beam overlap"
        )
    t_abs = abs(cfg.t_eff)
    c, s = math.cos(cfg.gamma), math.sin(cfg.gamma)
    cb = math.cos(beta(cfg))
    denom = 1.0 + t_abs * c * cb
    if denom <= 0.0:
        # total destructive cancellation between the two arms: no light,
        # hence no polarization to speak of (same condition the numeric
        # pipeline trips on via the coherence-matrix trace)
        raise ZeroTraceError("degree of polarization undefined at zero intensity")
    num = c * c + t_abs * t_abs * (s * s + c * c * cb * cb) + 2.0 * t_abs * c * cb
    return math.sqrt(max(num, 0.0)) / denom


def analytic_p_special(t_abs: float, gamma: float) -> float:
    """Equal-phase special case P = (|T| + cos g)/(1 + |T| cos g)."""
    _check_unit_interval(t_abs, "t_abs")
    if math.cos(gamma) < -_COS_TOL:
        raise ParameterError(f"gamma = {gamma} rad has cos < 0")
    c = math.cos(gamma)
    return (t_abs + c) / (1.0 + t_abs * c)


def numeric_degree_of_polarization(cfg: ZwmConfig) -> float:
    """Full Fock-space pipeline: state -> fields -> G -> P."""
    g = coherence_matrix(
        build_state(cfg), output_fields(cfg), cfg.imperfections.mu_overlap
    )
    return degree_of_polarization(g)


def config_with(cfg: ZwmConfig, **changes) -> ZwmConfig:
    """dataclasses.replace wrapper so callers need not import dataclasses."""
    return replace(cfg, **changes)
