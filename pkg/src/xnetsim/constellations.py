"""Finite complex input alphabets with bit labeling and rotation.

Every constructor returns a unit-average-energy alphabet: the network
power constraint is enforced once at the transmit stage, so alphabets
are normalized here and nowhere else.

Point index equals bit label: ``points[i]`` is the symbol whose
bits_per_symbol-wide label is the binary expansion of ``i``. QAM and PSK
use Gray labels (neighbors differ in one bit); the hexagonal family uses
row-major labels over its two generating PAM axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import UnsupportedSize

__all__ = ["Constellation", "make_qam", "make_psk", "make_hex", "rotate", "cpd", "by_name"]

OMEGA = np.exp(2j * np.pi / 3)  # hex lattice generator

#: rotation angle from the simulation setup, atan(2)/2, giving QPSK a
#: strictly positive coordinate product distance
QPSK_ROT_PHI = np.arctan(2.0) / 2.0


@dataclass(frozen=True)
class Constellation:
    points: np.ndarray  # complex128, index == bit label
    bits_per_symbol: int
    label: str
    rotation_applied: float = 0.0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128)
        object.__setattr__(self, "points", pts)
        n = pts.size
        if n != 2**self.bits_per_symbol:
            raise ValueError("size must be 2**bits_per_symbol")
        if abs(float(np.mean(np.abs(pts) ** 2)) - 1.0) > 1e-12:
            raise ValueError("average energy must be 1 within 1e-12")
        d = np.abs(pts[:, None] - pts[None, :]) + np.eye(n)
        if d.min() <= 1e-12:
            raise ValueError("points must be pairwise distinct")

    def __len__(self) -> int:
        return int(self.points.size)

    def bits_of(self, index: int) -> np.ndarray:
        """Bit label of a point, MSB first."""
        return np.array(
            [(index >> s) & 1 for s in range(self.bits_per_symbol - 1, -1, -1)], dtype=np.int64
        )


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def _pam_levels(n: int) -> np.ndarray:
    # n levels at odd integers, ascending: -(n-1), ..., n-1
    return np.arange(-(n - 1), n, 2, dtype=np.float64)


def _normalized(points: np.ndarray) -> np.ndarray:
    return points / np.sqrt(np.mean(np.abs(points) ** 2))


def make_qam(m: int) -> Constellation:
    """Square Gray-labeled QAM of size 4, 16 or 64."""
    if m not in (4, 16, 64):
        raise UnsupportedSize(f"qam size {m} not supported (4, 16, 64)")
    side = int(round(np.sqrt(m)))
    half = side.bit_length() - 1  # bits per axis
    levels = _pam_levels(side)
    pts = np.empty(m, dtype=np.complex128)
    # position g on an axis carries the Gray label of g; build the inverse
    # map so that points[label] is the labeled point
    axis_of_label = np.empty(side, dtype=np.int64)
    for pos in range(side):
        axis_of_label[_gray(pos)] = pos
    for lab in range(m):
        li, lq = lab >> half, lab & (side - 1)
        pts[lab] = levels[axis_of_label[li]] + 1j * levels[axis_of_label[lq]]
    return Constellation(_normalized(pts), 2 * half, f"qam{m}")


def make_psk(m: int) -> Constellation:
    """Gray-labeled PSK of size 2, 4 or 8; size 4 uses the diagonal layout."""
    if m not in (2, 4, 8):
        raise UnsupportedSize(f"psk size {m} not supported (2, 4, 8)")
    offset = np.pi / 4 if m == 4 else 0.0
    bits = m.bit_length() - 1
    pts = np.empty(m, dtype=np.complex128)
    for pos in range(m):
        pts[_gray(pos)] = np.exp(1j * (offset + 2 * np.pi * pos / m))
    return Constellation(pts, bits, "bpsk" if m == 2 else f"psk{m}")


def make_hex(m: int) -> Constellation:
    """Hexagonal-lattice alphabet {a + omega*b | a, b in sqrt(m)-PAM}.

    Labels are row-major over the (a, b) PAM indices; no Gray structure
    exists on this lattice so none is pretended.
    """
    if m not in (4, 16, 64):
        raise UnsupportedSize(f"hex size {m} not supported (4, 16, 64)")
    side = int(round(np.sqrt(m)))
    levels = _pam_levels(side)
    pts = np.array([a + OMEGA * b for a in levels for b in levels], dtype=np.complex128)
    return Constellation(_normalized(pts), 2 * (side.bit_length() - 1), f"hex{m}")


def rotate(c: Constellation, phi: float) -> Constellation:
    """Rotate every point by e^{i phi}; energy and labels are untouched."""
    pts = c.points * np.exp(1j * phi)
    return replace(c, points=pts, rotation_applied=c.rotation_applied + phi)


def cpd(c: Constellation) -> float:
    """Coordinate product distance: min |du_I| * |du_Q| over distinct pairs."""
    pts = c.points
    if pts.size < 2:
        raise ValueError("need at least two points")
    diff = pts[:, None] - pts[None, :]
    prod = np.abs(diff.real) * np.abs(diff.imag)
    mask = ~np.eye(pts.size, dtype=bool)
    return float(prod[mask].min())


def by_name(name: str) -> Constellation:
    """Resolve a CLI/config constellation name."""
    table = {
        "bpsk": lambda: make_psk(2),
        "qpsk": lambda: make_psk(4),
        "qpsk-rot": lambda: rotate(make_psk(4), QPSK_ROT_PHI),
        "psk8": lambda: make_psk(8),
        "qam4": lambda: make_qam(4),
        "qam16": lambda: make_qam(16),
        "qam64": lambda: make_qam(64),
        "hex4": lambda: make_hex(4),
        "hex16": lambda: make_hex(16),
        "hex64": lambda: make_hex(64),
    }
    try:
        return table[name]()
    except KeyError:
        raise UnsupportedSize(f"unknown constellation name {name!r}") from None
