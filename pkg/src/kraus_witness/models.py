"""Exactly solvable open-system models with Kraus and closed-form routes.

Four families, each exposing the same three faces: a Kraus channel at time t,
the evolved reference state, and (where one exists) a closed-form fidelity
between the states at two times.  The channel and closed-form routes are kept
fully independent so the test suite can play them against each other.

Models
------
ye-markov      two-qubit dephasing with exponential decay, semigroup.
ye-nonmarkov   same operator structure driven by a flattened decay p(t)
               whose short-time behaviour is quadratic rather than linear.
jcm-qubit      resonant atom-field interaction, atom sector, field initially
               coherent (vacuum as the special case alpha_c = 0).
jcm-photon     the same interaction viewed from the truncated field sector.
ck             qubit dephasing with a cosine coherence revival.

All times are nonnegative; rates are strictly positive.  Channel builders
return plain KrausChannel objects with no pruning of zero operators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .channels import KrausChannel, LindbladSet, apply
from .errors import (
    CutoffTooSmall,
    InvalidInitialState,
    NegativeTime,
    ParamOutOfRange,
)

# Fock truncation must leave less than this much coherent-state weight outside
_TAIL_CEILING = 1e-12


def _check_time(t: float) -> float:
    t = float(t)
    if t < 0.0:
        raise NegativeTime(f"evolution time must be nonnegative, got {t!r}")
    return t


def _check_rate(value: float, name: str) -> float:
    value = float(value)
    if not value > 0.0 or not math.isfinite(value):
        raise ParamOutOfRange(f"{name} must be positive and finite, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# model parameter records


@dataclass(frozen=True)
class YEMarkov:
    """Two-qubit dephasing semigroup; lam sets the initial coherence."""

    Gamma: float = 1.0
    lam: float = 0.5

    NAME = "ye-markov"
    dim = 4

    def __post_init__(self) -> None:
        _check_rate(self.Gamma, "Gamma")
        if not 0.0 <= self.lam <= 4.0:
            raise ParamOutOfRange(f"lam must lie in [0, 4], got {self.lam!r}")


@dataclass(frozen=True)
class YENonMarkov:
    """Dephasing with a reservoir memory time 1/gamma; alpha_x shapes the
    initial X state."""

    Gamma: float = 1.0
    gamma: float = 1e-4
    alpha_x: float = 0.5

    NAME = "ye-nonmarkov"
    dim = 4

    def __post_init__(self) -> None:
        _check_rate(self.Gamma, "Gamma")
        _check_rate(self.gamma, "gamma")
        if not 0.0 <= self.alpha_x <= 1.0:
            raise ParamOutOfRange(f"alpha_x must lie in [0, 1], got {self.alpha_x!r}")


@dataclass(frozen=True)
class JCMQubit:
    """Atom sector of the resonant interaction; field starts coherent."""

    g: float = 1.0
    alpha_c: complex = 0j
    n_max: int | None = None

    NAME = "jcm-qubit"
    dim = 2

    def __post_init__(self) -> None:
        _check_rate(self.g, "g")
        if self.n_max is not None and self.n_max < 1:
            raise ParamOutOfRange(f"n_max must be at least 1, got {self.n_max!r}")

    @property
    def cutoff(self) -> int:
        if self.n_max is not None:
            return self.n_max
        return default_fock_cutoff(self.alpha_c)


@dataclass(frozen=True)
class JCMPhoton:
    """Field sector of the resonant interaction, truncated at n_max photons."""

    g: float = 1.0
    alpha_c: complex = 0j
    n_max: int | None = None

    NAME = "jcm-photon"

    def __post_init__(self) -> None:
        _check_rate(self.g, "g")
        if self.n_max is not None and self.n_max < 1:
            raise ParamOutOfRange(f"n_max must be at least 1, got {self.n_max!r}")

    @property
    def cutoff(self) -> int:
        if self.n_max is not None:
            return self.n_max
        return default_fock_cutoff(self.alpha_c)

    @property
    def dim(self) -> int:
        # one slot above the cutoff so a decaying atom can deposit its photon
        return self.cutoff + 2


@dataclass(frozen=True)
class CKDephase:
    """Qubit dephasing with cosine coherence revival, started at t0."""

    rho11: float = 0.5
    rho22: float = 0.5
    rho12: complex = 0.5 + 0j
    t0: float = 0.0

    NAME = "ck"
    dim = 2

    def __post_init__(self) -> None:
        _validate_ck_entries(self.rho11, self.rho22, self.rho12)
        if self.t0 < 0.0:
            raise ParamOutOfRange(f"t0 must be nonnegative, got {self.t0!r}")


ModelSpec = Union[YEMarkov, YENonMarkov, JCMQubit, JCMPhoton, CKDephase]

MODEL_CLASSES: dict[str, type] = {
    cls.NAME: cls for cls in (YEMarkov, YENonMarkov, JCMQubit, JCMPhoton, CKDephase)
}


def _validate_ck_entries(rho11: float, rho22: float, rho12: complex) -> None:
    if rho11 < 0.0 or rho22 < 0.0:
        raise InvalidInitialState(
            f"populations must be nonnegative, got ({rho11!r}, {rho22!r})"
        )
    if abs(rho11 + rho22 - 1.0) > 1e-12:
        raise InvalidInitialState(
            f"populations must sum to 1, got {rho11 + rho22!r}"
        )
    det = rho11 * rho22 - abs(rho12) ** 2
    if det < -1e-12:
        raise InvalidInitialState(
            f"coherence too large: rho11*rho22 - |rho12|^2 = {det:.3e}"
        )


# ---------------------------------------------------------------------------
# decay functions


@dataclass(frozen=True)
class DecayFunctions:
    """Scalar decay profile of the dephasing families at one instant.

    gamma_t/omega_t drive the semigroup branch, p_t/q_t the memory branch;
    f_t is the integrated decay exponent behind p_t.
    """

    gamma_t: float
    omega_t: float
    p_t: float
    q_t: float
    f_t: float


def ye_nonmarkov_decay(t: float, Gamma: float, gamma: float) -> DecayFunctions:
    """Evaluate all decay functions at time t.

    f(t) = (Gamma/2) (t + (exp(-gamma t) - 1)/gamma) grows from ~Gamma gamma
    t^2/4 at small times to ~Gamma t/2 once t >> 1/gamma.  expm1 keeps both
    regimes accurate.
    """
    t = _check_time(t)
    Gamma = _check_rate(Gamma, "Gamma")
    gamma = _check_rate(gamma, "gamma")
    f = 0.5 * Gamma * (t + math.expm1(-gamma * t) / gamma)
    f = max(f, 0.0)
    gamma_t = math.exp(-0.5 * Gamma * t)
    omega_t = math.sqrt(-math.expm1(-Gamma * t))
    p_t = math.exp(-f)
    q_t = math.sqrt(-math.expm1(-2.0 * f))
    return DecayFunctions(gamma_t=gamma_t, omega_t=omega_t, p_t=p_t, q_t=q_t, f_t=f)


# ---------------------------------------------------------------------------
# dephasing family, exponential branch


def _dephase_kraus(c: float, s: float) -> tuple[np.ndarray, ...]:
    # shared operator skeleton of both dephasing models, c^2 + s^2 = 1
    k0 = np.diag([c * c, c, c, 1.0]).astype(np.complex128)
    k1 = np.diag([c * s, 0.0, s, 0.0]).astype(np.complex128)
    k2 = np.diag([c * s, s, 0.0, 0.0]).astype(np.complex128)
    k3 = np.diag([s * s, 0.0, 0.0, 0.0]).astype(np.complex128)
    return (k0, k1, k2, k3)


def _dephase_state(diag: tuple[float, float, float, float], coherence: float) -> np.ndarray:
    rho = np.diag(diag).astype(np.complex128)
    rho[1, 2] = coherence
    rho[2, 1] = coherence
    return rho


def ye_markov_channel(t: float, Gamma: float = 1.0) -> KrausChannel:
    """Dephasing channel at time t with decay e^(-Gamma t) of the central
    coherence."""
    t = _check_time(t)
    Gamma = _check_rate(Gamma, "Gamma")
    c = math.exp(-0.5 * Gamma * t)
    s = math.sqrt(-math.expm1(-Gamma * t))
    return KrausChannel(_dephase_kraus(c, s), label="ye-markov")


def ye_markov_state(t: float, Gamma: float = 1.0, lam: float = 0.5) -> np.ndarray:
    """Evolved reference state: populations (1,4,4,0)/9, central coherence
    lam e^(-Gamma t)/9."""
    t = _check_time(t)
    Gamma = _check_rate(Gamma, "Gamma")
    if not 0.0 <= lam <= 4.0:
        raise ParamOutOfRange(f"lam must lie in [0, 4], got {lam!r}")
    coherence = lam * math.exp(-Gamma * t) / 9.0
    return _dephase_state((1 / 9, 4 / 9, 4 / 9, 0.0), coherence)


def ye_markov_fidelity(t: float, tau: float, Gamma: float = 1.0, lam: float = 0.5) -> float:
    """Closed-form fidelity between the reference states at t and t + tau.

    The two states commute for all times, so the fidelity reduces to the
    classical overlap of the eigenvalue lists.
    """
    t = _check_time(t)
    tau = _check_time(tau)
    x = lam * math.exp(-Gamma * t)
    y = lam * math.exp(-Gamma * (t + tau))
    value = (1.0 + math.sqrt((4.0 + x) * (4.0 + y)) + math.sqrt((4.0 - x) * (4.0 - y))) ** 2 / 81.0
    return min(value, 1.0)


def ye_markov_lindblad(Gamma: float = 1.0) -> LindbladSet:
    """Jump operators generating the exponential dephasing branch."""
    _check_rate(Gamma, "Gamma")
    l1 = np.diag([1.0, 0.0, 1.0, 0.0]).astype(np.complex128)
    l2 = np.diag([1.0, 1.0, 0.0, 0.0]).astype(np.complex128)
    return LindbladSet((l1, l2), rate=Gamma)


# ---------------------------------------------------------------------------
# dephasing family, memory branch


def ye_nonmarkov_channel(t: float, Gamma: float = 1.0, gamma: float = 1e-4) -> KrausChannel:
    """Same operator skeleton as the exponential branch with p, q in place of
    the exponential pair."""
    d = ye_nonmarkov_decay(t, Gamma, gamma)
    return KrausChannel(_dephase_kraus(d.p_t, d.q_t), label="ye-nonmarkov")


def ye_nonmarkov_state(t: float, spec: YENonMarkov) -> np.ndarray:
    """Evolved X state: populations (alpha_x, 1, 1, 1 - alpha_x)/3, central
    coherence p(t)^2/3."""
    d = ye_nonmarkov_decay(t, spec.Gamma, spec.gamma)
    a = spec.alpha_x
    return _dephase_state((a / 3, 1 / 3, 1 / 3, (1.0 - a) / 3), d.p_t ** 2 / 3.0)


def ye_nonmarkov_fidelity(t: float, tau: float, spec: YENonMarkov) -> float:
    """Closed-form fidelity between the X states at t and t + tau."""
    t = _check_time(t)
    tau = _check_time(tau)
    d1 = ye_nonmarkov_decay(t, spec.Gamma, spec.gamma)
    d2 = ye_nonmarkov_decay(t + tau, spec.Gamma, spec.gamma)
    # 1 - p^2 = q^2 exactly through expm1, so the small-f branch keeps digits
    value = (
        1.0
        + math.sqrt((1.0 + d1.p_t ** 2) * (1.0 + d2.p_t ** 2))
        + d1.q_t * d2.q_t
    ) ** 2 / 9.0
    return min(value, 1.0)


# ---------------------------------------------------------------------------
# resonant atom-field interaction


def default_fock_cutoff(alpha_c: complex) -> int:
    """Truncation level guaranteeing a coherent tail below the certificate."""
    a = abs(alpha_c)
    return int(math.ceil(a * a + 10.0 * a + 20.0))


def coherent_amplitudes(alpha_c: complex, n_max: int) -> np.ndarray:
    """Amplitudes <N|alpha> for N = 0..n_max, with the tail certificate.

    Raises CutoffTooSmall when the discarded weight beyond n_max exceeds
    1e-12, so every downstream sum is exact to well below state tolerances.
    """
    if n_max < 1:
        raise ParamOutOfRange(f"n_max must be at least 1, got {n_max!r}")
    alpha = complex(alpha_c)
    amps = np.zeros(n_max + 1, dtype=np.complex128)
    amps[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, n_max + 1):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    tail = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    if tail > _TAIL_CEILING:
        raise CutoffTooSmall(
            f"coherent weight {tail:.3e} beyond N = {n_max} exceeds {_TAIL_CEILING:.1e}"
        )
    return amps


def jcm_qubit_channel(t: float, spec: JCMQubit) -> KrausChannel:
    """Atom-sector channel, one Kraus operator per final field occupation.

    Basis order is (excited, ground).  The operator list keeps every index
    up to the cutoff, including ones that are identically zero at
    alpha_c = 0; nothing is pruned.
    """
    t = _check_time(t)
    amps = coherent_amplitudes(spec.alpha_c, spec.cutoff)
    g = spec.g
    ops = []
    for n in range(spec.cutoff + 1):
        c_n = amps[n]
        c_prev = amps[n - 1] if n >= 1 else 0.0
        c_next = amps[n + 1] if n + 1 <= spec.cutoff else 0.0
        theta_up = g * t * math.sqrt(n + 1)
        theta_dn = g * t * math.sqrt(n)
        k = np.array(
            [
                [c_n * math.cos(theta_up), -1j * c_next * math.sin(theta_up)],
                [-1j * c_prev * math.sin(theta_dn), c_n * math.cos(theta_dn)],
            ],
            dtype=np.complex128,
        )
        ops.append(k)
    return KrausChannel(tuple(ops), label="jcm-qubit")


def jcm_qubit_state(t: float, spec: JCMQubit) -> np.ndarray:
    """Reduced atom state at time t for an initially excited atom."""
    t = _check_time(t)
    amps = coherent_amplitudes(spec.alpha_c, spec.cutoff)
    g = spec.g
    weights = np.abs(amps) ** 2
    n_grid = np.arange(spec.cutoff + 1)
    theta_up = g * t * np.sqrt(n_grid + 1.0)
    pop_up = float(np.sum(weights * np.cos(theta_up) ** 2))
    theta_dn = g * t * np.sqrt(n_grid[1:].astype(float))
    pop_dn = float(np.sum(weights[: spec.cutoff] * np.sin(theta_dn) ** 2))
    coherence = 1j * np.sum(
        np.cos(theta_up[1:]) * np.sin(theta_dn) * amps[1:] * np.conj(amps[:-1])
    )
    return np.array(
        [[pop_up, coherence], [np.conj(coherence), pop_dn]], dtype=np.complex128
    )


def jcm_vacuum_fidelity(t: float, tau: float, g: float = 1.0) -> float:
    """Closed-form fidelity between the vacuum-field atom states at t and
    t + tau; pi/g periodic in t."""
    t = _check_time(t)
    tau = _check_time(tau)
    g = _check_rate(g, "g")
    c1, s1 = math.cos(g * t), math.sin(g * t)
    c2, s2 = math.cos(g * (t + tau)), math.sin(g * (t + tau))
    value = (abs(c1 * c2) + abs(s1 * s2)) ** 2
    return min(value, 1.0)


def jcm_photon_channel(t: float, g: float = 1.0, n_cut: int = 20) -> KrausChannel:
    """Field-sector channel on Fock levels 0..n_cut + 1.

    Complete on the leading (n_cut + 1)-dimensional block: the atom can push
    one photon above the cutoff, so inputs must live at or below n_cut.
    """
    t = _check_time(t)
    g = _check_rate(g, "g")
    if n_cut < 1:
        raise ParamOutOfRange(f"n_cut must be at least 1, got {n_cut!r}")
    dim = n_cut + 2
    levels = np.arange(dim, dtype=float)
    stay = np.diag(np.cos(g * t * np.sqrt(levels + 1.0))).astype(np.complex128)
    emit = np.zeros((dim, dim), dtype=np.complex128)
    for n in range(dim - 1):
        emit[n + 1, n] = -1j * math.sin(g * t * math.sqrt(n + 1.0))
    return KrausChannel((stay, emit), label="jcm-photon", valid_dim=n_cut + 1)


def jcm_photon_state(t: float, spec: JCMPhoton) -> np.ndarray:
    """Field state at time t, starting from the truncated coherent state."""
    rho0 = jcm_photon_initial(spec)
    if t == 0.0:
        return rho0
    return apply(jcm_photon_channel(t, spec.g, spec.cutoff), rho0)


def jcm_photon_initial(spec: JCMPhoton) -> np.ndarray:
    """Truncated coherent projector embedded in the padded field space."""
    amps = coherent_amplitudes(spec.alpha_c, spec.cutoff)
    vec = np.zeros(spec.dim, dtype=np.complex128)
    vec[: spec.cutoff + 1] = amps
    return np.outer(vec, vec.conj())


# ---------------------------------------------------------------------------
# cosine-revival dephasing


def ck_channel(t: float, t0: float = 0.0) -> KrausChannel:
    """Dephasing channel whose coherence factor is cos(t - t0)."""
    t = _check_time(t)
    if t < t0:
        raise NegativeTime(f"t = {t!r} precedes the initial time t0 = {t0!r}")
    half = 0.5 * (t - t0)
    k0 = math.cos(half) * np.eye(2, dtype=np.complex128)
    k1 = math.sin(half) * np.diag([1.0, -1.0]).astype(np.complex128)
    return KrausChannel((k0, k1), label="ck")


def ck_map_state(t: float, spec: CKDephase) -> np.ndarray:
    """Evolved state: populations frozen, coherence scaled by cos(t - t0)."""
    t = _check_time(t)
    _validate_ck_entries(spec.rho11, spec.rho22, spec.rho12)
    factor = math.cos(t - spec.t0)
    off = spec.rho12 * factor
    return np.array(
        [[spec.rho11, off], [np.conj(off), spec.rho22]], dtype=np.complex128
    )


def ck_fidelity(t: float, tau: float) -> float:
    """Closed-form fidelity between the maximally coherent states at t and
    t + tau (populations 1/2, initial coherence 1/2)."""
    t = _check_time(t)
    tau = _check_time(tau)
    c1, c2 = math.cos(t), math.cos(t + tau)
    value = 0.5 * (1.0 + c1 * c2 + abs(math.sin(t) * math.sin(t + tau)))
    return min(value, 1.0)


def ck_lindblad() -> LindbladSet:
    """Memory-kernel operator set for the cosine-revival model."""
    sz = np.diag([1.0, -1.0]).astype(np.complex128)
    return LindbladSet((sz,), rate=0.5)


# ---------------------------------------------------------------------------
# model dispatch


def model_channel(spec: ModelSpec, t: float) -> KrausChannel:
    """Kraus channel of any model at time t."""
    if isinstance(spec, YEMarkov):
        return ye_markov_channel(t, spec.Gamma)
    if isinstance(spec, YENonMarkov):
        return ye_nonmarkov_channel(t, spec.Gamma, spec.gamma)
    if isinstance(spec, JCMQubit):
        return jcm_qubit_channel(t, spec)
    if isinstance(spec, JCMPhoton):
        return jcm_photon_channel(t, spec.g, spec.cutoff)
    if isinstance(spec, CKDephase):
        return ck_channel(t, spec.t0)
    raise TypeError(f"unknown model spec {spec!r}")


def model_state(spec: ModelSpec, t: float) -> np.ndarray:
    """Evolved reference state of any model at time t."""
    if isinstance(spec, YEMarkov):
        return ye_markov_state(t, spec.Gamma, spec.lam)
    if isinstance(spec, YENonMarkov):
        return ye_nonmarkov_state(t, spec)
    if isinstance(spec, JCMQubit):
        return jcm_qubit_state(t, spec)
    if isinstance(spec, JCMPhoton):
        return jcm_photon_state(t, spec)
    if isinstance(spec, CKDephase):
        return ck_map_state(t, spec)
    raise TypeError(f"unknown model spec {spec!r}")


def model_closed_fidelity(spec: ModelSpec, t: float, tau: float) -> float | None:
    """Closed-form fidelity F[rho(t), rho(t + tau)] where one is known.

    Returns None for configurations without a closed form (coherent-field
    atom sector, the field sector, or non-default revival initial states);
    callers then fall back to the generic eigenvalue route.
    """
    if isinstance(spec, YEMarkov):
        return ye_markov_fidelity(t, tau, spec.Gamma, spec.lam)
    if isinstance(spec, YENonMarkov):
        return ye_nonmarkov_fidelity(t, tau, spec)
    if isinstance(spec, JCMQubit):
        if spec.alpha_c == 0:
            return jcm_vacuum_fidelity(t, tau, spec.g)
        return None
    if isinstance(spec, JCMPhoton):
        return None
    if isinstance(spec, CKDephase):
        if (
            spec.rho11 == 0.5
            and spec.rho22 == 0.5
            and spec.rho12 == 0.5 + 0j
            and spec.t0 == 0.0
        ):
            return ck_fidelity(t, tau)
        return None
    raise TypeError(f"unknown model spec {spec!r}")


def model_lindblad(spec: ModelSpec) -> LindbladSet | None:
    """Constant-rate generator set where the model has one."""
    if isinstance(spec, YEMarkov):
        return ye_markov_lindblad(spec.Gamma)
    if isinstance(spec, CKDephase):
        return ck_lindblad()
    return None


def model_rate(spec: ModelSpec) -> float:
    """Rate that converts the model's dimensionless abscissa into raw time."""
    if isinstance(spec, (YEMarkov, YENonMarkov)):
        return spec.Gamma
    if isinstance(spec, (JCMQubit, JCMPhoton)):
        return spec.g
    if isinstance(spec, CKDephase):
        return 1.0
    raise TypeError(f"unknown model spec {spec!r}")


def default_grid(spec: ModelSpec) -> tuple[float, float, float]:
    """Dimensionless (start, stop, step) covering the model's interesting
    window."""
    if isinstance(spec, YEMarkov):
        return (0.0, 10.0, 0.02)
    if isinstance(spec, YENonMarkov):
        return (0.0, 20.0, 0.02)
    if isinstance(spec, JCMQubit):
        return (0.0, 10.0, 0.01)
    if isinstance(spec, JCMPhoton):
        return (0.0, 10.0, 0.05)
    if isinstance(spec, CKDephase):
        return (0.0, 2.0 * math.pi, 0.005)
    raise TypeError(f"unknown model spec {spec!r}")


def default_tau(spec: ModelSpec) -> float:
    """Dimensionless comparison lag used when the caller does not pick one."""
    if isinstance(spec, (YEMarkov, YENonMarkov)):
        return 1.0
    if isinstance(spec, (JCMQubit, JCMPhoton)):
        return 10.0
    if isinstance(spec, CKDephase):
        return math.pi / 6.0
    raise TypeError(f"unknown model spec {spec!r}")


def build_model(name: str, **params: object) -> ModelSpec:
    """Instantiate a model spec from its registry name."""
    try:
        cls = MODEL_CLASSES[name]
    except KeyError:
        known = ", ".join(sorted(MODEL_CLASSES))
        raise ParamOutOfRange(f"unknown model {name!r}; choose one of {known}") from None
    return cls(**params)


EvolutionFamily = Callable[[float], KrausChannel]
