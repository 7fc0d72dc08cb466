"""The two-transmitter, two-receiver X-network pipeline.

Frame layout over 3T channel uses (T = half the code block length):
Tx-i sends its receiver-1 codeword left-aligned and its receiver-2
codeword right-aligned,

    X_i1 = [Xbar_i1  0_{M x T}],     X_i2 = [0_{M x T}  Xbar_i2],

so the two overlap on columns T+1..2T. Each transmitter applies
channel-inverting precoders, which turns the unwanted codewords at each
receiver into scaled-identity effective channels. The receiver then adds
a unitarily mapped copy of one time slot to another; the cancellation
spec of the code guarantees the interference sums to zero, at the price
of doubling the noise variance in the processed slots.

Everything downstream of the channel is phrased over the real effective
system, h_eff @ tilde(x) = tilde(vec(Y')), with per-row noise sigmas
recorded so the decoder can whiten.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .codes import CancellationSpec, StbcCode, cc_normalized, encode
from .errors import DimensionMismatch, MissingCcSpec, RngPathology, SingularMatrix
from .linalg import fro_norm, invert, rand_complex_gaussian, realify, tilde_vec, vec

__all__ = [
    "ChannelRealization",
    "PrecoderSet",
    "Snr",
    "RealEffectiveSystem",
    "draw_channel",
    "alignment_precoders",
    "transmit_scale",
    "assemble_transmit",
    "receive",
    "cancel_interference",
    "noise_sigmas",
    "build_effective_real_system",
    "stacking_det_witness",
    "stacking_det_closed_form",
]

REDRAW_LIMIT = 100


@dataclass(frozen=True)
class ChannelRealization:
    """Four i.i.d. CN(0,1)-entry M x M blocks, one per Tx/Rx pair."""

    h11: np.ndarray
    h12: np.ndarray
    h21: np.ndarray
    h22: np.ndarray

    @property
    def m(self) -> int:
        return self.h11.shape[0]


@dataclass(frozen=True)
class PrecoderSet:
    """Unit-Frobenius-norm inverting precoders, v_ij applied to X_ij."""

    v11: np.ndarray
    v12: np.ndarray
    v21: np.ndarray
    v22: np.ndarray


@dataclass(frozen=True)
class Snr:
    rho: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")

    @property
    def db(self) -> float:
        return 10.0 * np.log10(self.rho)

    @classmethod
    def from_db(cls, db: float) -> "Snr":
        return cls(10.0 ** (db / 10.0))


@dataclass(frozen=True)
class RealEffectiveSystem:
    """Square real system the joint decoder works on.

    h_eff has shape (4MT, 4MT); columns 0..2k-1 belong to the first
    desired codeword's symbols, 2k..4k-1 to the second (see
    symbol_slices). noise_sigma_per_row holds 1 for rows that came from
    untouched receive slots and sqrt(2) for rows from cancellation-
    processed slots; rows are divided by it before decoding.
    """

    h_eff: np.ndarray
    y_eff: np.ndarray
    noise_sigma_per_row: np.ndarray
    symbol_slices: dict
    k: int

    def whitened(self) -> tuple[np.ndarray, np.ndarray]:
        s = self.noise_sigma_per_row
        return self.h_eff / s[:, None], self.y_eff / s


def draw_channel(rng: np.random.Generator, m: int) -> ChannelRealization:
    """Draw four fresh M x M channel blocks, redrawing the (measure-zero)
    singular realizations; gives up after REDRAW_LIMIT attempts."""
    for _ in range(REDRAW_LIMIT):
        blocks = rand_complex_gaussian(rng, (4, m, m))
        try:
            for b in blocks:
                invert(b)
        except SingularMatrix:
            continue
        return ChannelRealization(h11=blocks[0], h12=blocks[1], h21=blocks[2], h22=blocks[3])
    raise RngPathology(f"no invertible channel draw in {REDRAW_LIMIT} attempts")


def alignment_precoders(ch: ChannelRealization) -> PrecoderSet:
    """Precoders that align each unwanted codeword onto a scaled identity
    at its unintended receiver: v11 inverts h12, v21 inverts h22, v12
    inverts h11, v22 inverts h21; each normalized to unit Frobenius norm.
    """

    def inv_normed(h):
        a = invert(h)
        return a / fro_norm(a)

    return PrecoderSet(
        v11=inv_normed(ch.h12),
        v21=inv_normed(ch.h22),
        v12=inv_normed(ch.h11),
        v22=inv_normed(ch.h21),
    )


def transmit_scale(code: StbcCode) -> float:
    """Scale c making E||c * Xbar||^2 = t_block for unit-energy symbols.

    Exact for every shipped code because their per-symbol generator
    blocks are orthogonal with equal column norms, which makes the
    codeword energy independent of the constellation's I/Q energy split.
    """
    return float(np.sqrt(2.0 * code.t_block / np.trace(code.g_real.T @ code.g_real)))


def assemble_transmit(
    code: StbcCode,
    x11: np.ndarray,
    x12: np.ndarray,
    x21: np.ndarray,
    x22: np.ndarray,
    pre: PrecoderSet,
    snr: Snr,
) -> tuple[np.ndarray, np.ndarray]:
    """Build the two M x 3T transmit matrices for one frame."""
    if code.cc is None:
        raise MissingCcSpec("transmission needs a code with a cancellation spec")
    ccode = cc_normalized(code)
    t = ccode.cc.t_half
    m = ccode.m
    amp = np.sqrt(3.0 * snr.rho / 4.0) * transmit_scale(ccode)
    z = np.zeros((m, t), dtype=np.complex128)

    def padded(xj, left: bool):
        cwm = encode(ccode, np.asarray(xj, dtype=np.complex128))
        return np.hstack([cwm, z]) if left else np.hstack([z, cwm])

    x1 = amp * (pre.v11 @ padded(x11, True) + pre.v12 @ padded(x12, False))
    x2 = amp * (pre.v21 @ padded(x21, True) + pre.v22 @ padded(x22, False))
    return x1, x2


def receive(
    ch: ChannelRealization,
    x1: np.ndarray,
    x2: np.ndarray,
    rng: Optional[np.random.Generator],
    noise_on: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """Pure linear channel plus (optionally) unit-variance complex noise."""
    y1 = ch.h11 @ x1 + ch.h21 @ x2
    y2 = ch.h12 @ x1 + ch.h22 @ x2
    if noise_on:
        y1 = y1 + rand_complex_gaussian(rng, y1.shape)
        y2 = y2 + rand_complex_gaussian(rng, y2.shape)
    return y1, y2


def cancel_interference(y: np.ndarray, cc: CancellationSpec, receiver: int) -> np.ndarray:
    """Collapse an M x 3T received frame to the M x 2T interference-free
    matrix. Accepts leading batch axes (..., M, 3T).

    Receiver 1's unwanted codewords sit right-aligned, so slots T+1..2T
    are cleaned against slots 2T+1..3T using the f maps. Receiver 2's sit
    left-aligned: slots T+1..2T are cleaned against slots 1..T using the
    g maps, and the clean tail 2T+1..3T passes through. Column t of the
    output always carries column t of the desired codewords.
    """
    t = cc.t_half
    if y.shape[-1] != 3 * t:
        raise DimensionMismatch(f"expected {3 * t} columns, got {y.shape[-1]}")
    out = np.empty(y.shape[:-1] + (2 * t,), dtype=np.complex128)
    if receiver == 1:
        out[..., :t] = y[..., :t]
        for i in range(t):
            out[..., t + i] = y[..., t + i] + cc.f_list[i](y[..., 2 * t + i])
    elif receiver == 2:
        for i in range(t):
            out[..., i] = y[..., t + i] + cc.g_list[i](y[..., i])
        out[..., t:] = y[..., 2 * t :]
    else:
        raise ValueError("receiver must be 1 or 2")
    return out


def noise_sigmas(t_half: int, receiver: int) -> np.ndarray:
    """Per-output-column complex noise sigma after cancellation."""
    ones, twos = np.ones(t_half), np.full(t_half, np.sqrt(2.0))
    if receiver == 1:
        return np.concatenate([ones, twos])
    if receiver == 2:
        return np.concatenate([twos, ones])
    raise ValueError("receiver must be 1 or 2")


def effective_generator_blocks(code: StbcCode) -> np.ndarray:
    """Generator of the cancellation-normalized view, reshaped to
    (2T, 2M, 2k) so per-slot channel blocks can be applied directly."""
    ccode = cc_normalized(code)
    two_m = 2 * ccode.m
    return ccode.g_real.reshape(2 * ccode.cc.t_half, two_m, 2 * ccode.k)


def build_effective_real_system(
    code: StbcCode,
    hbar_a: np.ndarray,
    hbar_b: np.ndarray,
    y_prime: np.ndarray,
    snr: Snr,
    receiver: int = 1,
) -> RealEffectiveSystem:
    """Stack the cancelled frame into the square real system

        tilde(vec(Y' - N')) = h_eff @ [tilde(x_a); tilde(x_b)],

    where hbar_a, hbar_b are the two effective desired channels (channel
    times precoder) at this receiver and x_a, x_b the corresponding
    symbol vectors. The transmit amplitude is folded into h_eff.
    """
    if code.cc is None:
        raise MissingCcSpec("effective system needs a cancellation spec")
    m = code.m
    t = code.cc.t_half
    if y_prime.shape != (m, 2 * t):
        raise DimensionMismatch(f"y_prime must be {m}x{2 * t}, got {y_prime.shape}")
    if hbar_a.shape != (m, m) or hbar_b.shape != (m, m):
        raise DimensionMismatch("effective channels must be M x M")
    gb = effective_generator_blocks(code)  # (2T, 2M, 2k)
    amp = np.sqrt(3.0 * snr.rho / 4.0) * transmit_scale(code)
    ha, hb = realify(hbar_a), realify(hbar_b)
    # block-diagonal application of the per-slot channel, both codewords
    left = np.einsum("ij,tjk->tik", ha, gb).reshape(4 * m * t, 2 * code.k)
    right = np.einsum("ij,tjk->tik", hb, gb).reshape(4 * m * t, 2 * code.k)
    h_eff = amp * np.hstack([left, right])
    sig = np.repeat(noise_sigmas(t, receiver), 2 * m)
    return RealEffectiveSystem(
        h_eff=h_eff,
        y_eff=tilde_vec(vec(y_prime)),
        noise_sigma_per_row=sig,
        symbol_slices={"x_a": slice(0, 2 * code.k), "x_b": slice(2 * code.k, 4 * code.k)},
        k=code.k,
    )


# ---------------------------------------------------------------------------
# determinant witness for the conjugate-stacked receiver system
# ---------------------------------------------------------------------------

def _stacking_matrices(theta: float):
    e1, e2 = np.exp(1j * theta), np.exp(2j * theta)
    p1 = np.array([[0, -1, 0], [1, 0, 0], [0, 0, -e2]], dtype=np.complex128)
    p2 = np.array([[0, 0, -e1], [e2, 0, 0], [0, -e1, 0]], dtype=np.complex128)
    probe = np.array([[0, 0, -np.conj(e2)], [0, 2, 0], [1, 0, 0]], dtype=np.complex128)
    return p1, p2, probe


def stacking_det_witness(theta: float) -> complex:
    """The determinant that certifies the conjugate-stacked system of the
    minimum-delay three-antenna scheme is generically full rank.

    Columns 3 and 4 of that code are unitary images of conjugated
    columns 1 and 2 (maps p1, p2 below); stacking [Y(1); Y(2); Y(3)*;
    Y(4)*] therefore yields a block system whose determinant, for the
    fixed probe channel below, reduces to det((H p2)* - p1* H). A
    nonzero value for every theta proves the rank claim.
    """
    p1, p2, h = _stacking_matrices(theta)
    return complex(np.linalg.det(np.conj(h @ p2) - np.conj(p1) @ h))


def stacking_det_closed_form(theta: float) -> complex:
    """Closed form of the same determinant, computed independently."""
    e = np.exp(1j * theta)
    return complex(np.exp(-3j * theta) * (2.0 + np.conj(e)) * (2.0 + e))
