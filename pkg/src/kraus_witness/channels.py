"""Kraus channels, composition, and the LGKS right-hand side.

A channel is a finite list of Kraus operators K_i acting as
rho -> sum_i K_i rho K_i^dagger.  Completeness sum_i K_i^dagger K_i = I is
checked lazily and cached on the channel object; channels whose operator set
is only complete on a leading subspace (truncated field sectors, conditioned
dynamics) declare that subspace through ``valid_dim``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidChannel
from .linalg import validate_density

# apply() refuses to run a channel whose completeness defect exceeds this
_APPLY_DEFECT_CEILING = 1e-8


def _as_operator_tuple(operators: Sequence[np.ndarray]) -> tuple[np.ndarray, ...]:
    ops = tuple(np.asarray(k, dtype=np.complex128) for k in operators)
    if not ops:
        raise InvalidChannel("a channel needs at least one Kraus operator")
    dim = ops[0].shape
    if len(dim) != 2 or dim[0] != dim[1]:
        raise DimensionMismatch(f"Kraus operators must be square, got shape {dim}")
    for k in ops[1:]:
        if k.shape != dim:
            raise DimensionMismatch(f"mixed Kraus shapes {dim} and {k.shape}")
    return ops


@dataclass
class KrausChannel:
    """Kraus operator list with a cached completeness defect.

    valid_dim restricts the completeness requirement to the leading
    valid_dim x valid_dim block; inputs must then be supported on that block.
    """

    operators: tuple[np.ndarray, ...]
    label: str = ""
    valid_dim: int | None = None
    _defect: float | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.operators = _as_operator_tuple(self.operators)
        if self.valid_dim is not None and not (1 <= self.valid_dim <= self.dim):
            raise DimensionMismatch(
                f"valid_dim {self.valid_dim} outside 1..{self.dim}"
            )

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]


@dataclass(frozen=True)
class LindbladSet:
    """Jump operators L_i and a common nonnegative rate.

    The rate multiplies the whole dissipator; rhs evaluation itself is
    rate-free so the same set can serve families with time-dependent rates.
    """

    operators: tuple[np.ndarray, ...]
    rate: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "operators", _as_operator_tuple(self.operators))
        if self.rate < 0.0:
            raise InvalidChannel(f"rate must be nonnegative, got {self.rate!r}")

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]


def channel_defect(channel: KrausChannel) -> float:
    """Max-norm defect of sum_i K_i^dagger K_i against the identity.

    For channels with valid_dim set, only the leading block is compared.
    The result is cached on the channel.
    """
    total = np.zeros((channel.dim, channel.dim), dtype=np.complex128)
    for k in channel.operators:
        total += k.conj().T @ k
    block = channel.valid_dim if channel.valid_dim is not None else channel.dim
    defect_mat = total[:block, :block] - np.eye(block)
    defect = float(np.max(np.abs(defect_mat)))
    channel._defect = defect
    return defect


def validate_cptp(channel: KrausChannel, tol: float = 1e-10) -> float:
    """Completeness defect, raising InvalidChannel when it exceeds ``tol``."""
    defect = channel_defect(channel)
    if defect > tol:
        raise InvalidChannel(
            f"completeness defect {defect:.3e} exceeds {tol:.1e}"
            + (f" for channel {channel.label!r}" if channel.label else "")
        )
    return defect


def apply(channel: KrausChannel, rho: np.ndarray) -> np.ndarray:
    """Evolve a density matrix through the channel.

    The input must be a valid density matrix and the channel complete within
    1e-8; the output is again a density matrix (checked by the test suite,
    not re-validated here, since the map is exactly trace preserving when the
    completeness defect vanishes).
    """
    state = np.asarray(rho, dtype=np.complex128)
    if state.shape != (channel.dim, channel.dim):
        raise DimensionMismatch(
            f"state shape {state.shape} does not match channel dimension {channel.dim}"
        )
    if channel._defect is None:
        channel_defect(channel)
    if channel._defect > _APPLY_DEFECT_CEILING:
        raise InvalidChannel(
            f"refusing to apply channel with completeness defect {channel._defect:.3e}"
        )
    out = np.zeros_like(state)
    for k in channel.operators:
        out += k @ state @ k.conj().T
    return out


def compose(late: KrausChannel, early: KrausChannel) -> KrausChannel:
    """Channel performing ``early`` then ``late``; operator set is the full
    product list, unpruned."""
    if late.dim != early.dim:
        raise DimensionMismatch(
            f"cannot compose dimensions {late.dim} and {early.dim}"
        )
    ops = tuple(kl @ ke for kl in late.operators for ke in early.operators)
    valid = None
    if late.valid_dim is not None or early.valid_dim is not None:
        valid = min(
            late.valid_dim if late.valid_dim is not None else late.dim,
            early.valid_dim if early.valid_dim is not None else early.dim,
        )
    label = f"{late.label}*{early.label}" if (late.label or early.label) else ""
    return KrausChannel(operators=ops, label=label, valid_dim=valid)


def lgks_rhs(lset: LindbladSet, rho: np.ndarray) -> np.ndarray:
    """Rate-free dissipator sum_i (L_i rho L_i^dagger - (1/2){L_i^dagger L_i, rho}).

    The caller multiplies by the physical rate; this keeps the same operator
    set usable when the rate varies in time.
    """
    state = np.asarray(rho, dtype=np.complex128)
    if state.shape != (lset.dim, lset.dim):
        raise DimensionMismatch(
            f"state shape {state.shape} does not match Lindblad dimension {lset.dim}"
        )
    out = np.zeros_like(state)
    anticomm = np.zeros_like(state)
    for op in lset.operators:
        out += op @ state @ op.conj().T
        anticomm += op.conj().T @ op
    out -= 0.5 * (anticomm @ state + state @ anticomm)
    return out


def semigroup_defect(
    family: Callable[[float], KrausChannel],
    rho0: np.ndarray,
    t1: float,
    t2: float,
) -> float:
    """Max-norm gap between running t1 then t2 and running t1 + t2 directly.

    Zero (to rounding) exactly when the family composes as a one-parameter
    semigroup on this state.
    """
    state = validate_density(rho0, tol=1e-8)
    sequential = apply(family(t2), apply(family(t1), state))
    direct = apply(family(t1 + t2), state)
    return float(np.max(np.abs(sequential - direct)))
