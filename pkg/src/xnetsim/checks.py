"""Algebraic verification routines and empirical statistics.

Each check_* function returns a small report dataclass with a `passed`
flag and a `to_dict()` for JSON serialization, so the CLI can print one
PASS/FAIL line and dump the full report. Checks never raise on a failed
property, only on malformed inputs.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from . import network
from .codes import DEFAULT_CODEBOOK_CAP, StbcCode, cc_normalized, encode, encode_batch
from .constellations import Constellation
from .errors import (
    CodebookTooLarge,
    DimensionMismatch,
    Infeasible,
    InsufficientData,
    MissingCcSpec,
    RngPathology,
)
from .linalg import numeric_rank, rand_complex_gaussian, require_unitary

__all__ = [
    "CancellationReport",
    "FullRankReport",
    "DetIdentityReport",
    "CommutatorReport",
    "RankStats",
    "SlopeFit",
    "check_cancellation",
    "check_full_rank",
    "check_det_identity",
    "check_commutator",
    "eig_multiplicity_ok",
    "commutator_rank",
    "commutator_max_rank",
    "construct_commutator_witness",
    "effective_rank_stats",
    "estimate_diversity_slope",
]

EIG_CLUSTER_TOL = 1e-6


def _plain(d: dict) -> dict:
    """JSON-safe copy: numpy scalars to python, arrays/complex to strings."""
    out = {}
    for key, val in d.items():
        if isinstance(val, np.generic):
            val = val.item()
        if isinstance(val, complex):
            val = repr(val)
        elif isinstance(val, np.ndarray):
            val = val.tolist()
        elif isinstance(val, tuple):
            val = [repr(v) if isinstance(v, complex) else v for v in val]
        out[key] = val
    return out


# ---------------------------------------------------------------------------
# column cancellation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CancellationReport:
    passed: bool
    max_residual: float
    n_vectors: int
    tol: float
    code: str

    def to_dict(self) -> dict:
        return _plain(asdict(self))


def check_cancellation(
    code: StbcCode, n_random: int = 100, seed: int = 0, tol: float = 1e-10
) -> CancellationReport:
    """Verify both cancellation identities on every real basis direction
    of the symbol space plus n_random complex Gaussian symbol vectors.

    Linearity of the identities over the reals means the basis sweep is
    already exhaustive; the random vectors guard the harness itself.
    """
    if code.cc is None:
        raise MissingCcSpec(f"code {code.name!r} carries no cancellation spec")
    cn = cc_normalized(code)
    t = cn.cc.t_half
    rng = np.random.default_rng(seed)

    vectors = []
    for j in range(code.k):
        e = np.zeros(code.k, dtype=np.complex128)
        e[j] = 1.0
        vectors.append(e.copy())
        e[j] = 1.0j
        vectors.append(e.copy())
    for _ in range(n_random):
        vectors.append(rand_complex_gaussian(rng, (code.k,)))

    worst = 0.0
    for x in vectors:
        xmat = encode(cn, x)
        for i in range(t):
            r_f = xmat[:, i] + cn.cc.f_list[i](xmat[:, t + i])
            r_g = cn.cc.g_list[i](xmat[:, i]) + xmat[:, t + i]
            worst = max(worst, float(np.abs(r_f).max()), float(np.abs(r_g).max()))
    return CancellationReport(
        passed=worst <= tol,
        max_residual=worst,
        n_vectors=len(vectors),
        tol=tol,
        code=code.name,
    )


# ---------------------------------------------------------------------------
# codeword-difference rank (full diversity certificate)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FullRankReport:
    passed: bool
    n_tuples: int
    full_rank_dim: int
    min_rank: int
    min_rel_sv: float
    witness: Optional[tuple]
    code: str
    constellation: str

    def to_dict(self) -> dict:
        return _plain(asdict(self))


def check_full_rank(
    code: StbcCode,
    constellation: Constellation,
    cap: int = DEFAULT_CODEBOOK_CAP,
    rank_tol: float = 1e-9,
    batch: int = 1 << 16,
) -> FullRankReport:
    """Exhaustively verify that every nonzero codeword difference has
    full rank min(m, t_block).

    The difference of two codewords is the codeword of the symbol
    difference, so it suffices to enumerate tuples over the deduplicated
    per-symbol difference alphabet; that cuts |c|^2k pair checks down to
    |D|^k matrix ranks. Enumeration order is lexicographic over the
    difference alphabet sorted by (real, imag), so the reported witness
    is deterministic.
    """
    pts = constellation.points
    raw = (pts[:, None] - pts[None, :]).ravel()
    # values within 1e-12 are numerically the same difference; snap to a
    # 12-decimal grid so symmetric pairs that differ by one ulp collapse
    diffs = {(round(z.real, 12), round(z.imag, 12)) for z in map(complex, raw)}
    diffs = np.array([complex(re, im) for re, im in sorted(diffs)])
    d = len(diffs)
    total = d**code.k
    if total > cap:
        raise CodebookTooLarge(f"{total} difference tuples exceed the cap of {cap}")

    full = min(code.m, code.t_block)
    weights = d ** np.arange(code.k - 1, -1, -1, dtype=np.int64)
    min_rank = full
    min_rel = np.inf
    witness = None
    n_checked = 0
    for start in range(0, total, batch):
        idx = np.arange(start, min(start + batch, total), dtype=np.int64)
        digits = (idx[:, None] // weights) % d
        xs = diffs[digits]
        nonzero = np.abs(xs).max(axis=1) > 1e-15
        if not nonzero.any():
            continue
        xs, idx = xs[nonzero], idx[nonzero]
        n_checked += len(xs)
        sv = np.linalg.svd(encode_batch(code, xs), compute_uv=False)
        rel = sv[:, full - 1] / sv[:, 0]
        ranks = (sv > rank_tol * sv[:, :1]).sum(axis=1)
        bmin = rel.min()
        if bmin < min_rel:
            min_rel = float(bmin)
        if ranks.min() < min_rank:
            pos = int(np.argmin(ranks))
            min_rank = int(ranks[pos])
            witness = tuple(map(complex, xs[pos]))
    return FullRankReport(
        passed=min_rank == full,
        n_tuples=n_checked,
        full_rank_dim=full,
        min_rank=min_rank,
        min_rel_sv=min_rel,
        witness=witness,
        code=code.name,
        constellation=constellation.label,
    )


# ---------------------------------------------------------------------------
# determinant identity for the conjugate-stacked system
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DetIdentityReport:
    passed: bool
    max_error: float
    n_theta: int
    tol: float

    def to_dict(self) -> dict:
        return _plain(asdict(self))


def check_det_identity(n_theta: int = 100, seed: int = 0, tol: float = 1e-9) -> DetIdentityReport:
    """Compare the stacked-system determinant against its closed form on
    a random sample of rotation angles (plus the endpoints 0 and pi)."""
    rng = np.random.default_rng(seed)
    thetas = np.concatenate([[0.0, np.pi], rng.uniform(0.0, 2.0 * np.pi, size=max(0, n_theta - 2))])
    worst = 0.0
    for th in thetas:
        err = abs(network.stacking_det_witness(th) - network.stacking_det_closed_form(th))
        worst = max(worst, float(err))
    return DetIdentityReport(passed=worst <= tol, max_error=worst, n_theta=len(thetas), tol=tol)


# ---------------------------------------------------------------------------
# eigenvalue multiplicity and the commutator criterion
# ---------------------------------------------------------------------------


def _eig_clusters(p: np.ndarray, tol: float = EIG_CLUSTER_TOL):
    """Orthonormal eigendecomposition of a unitary matrix with eigenvalues
    grouped into clusters of pairwise distance below tol.

    Uses the complex Schur form: for a normal matrix it is diagonal to
    machine precision and its basis is exactly unitary, which plain eig
    does not guarantee inside degenerate eigenspaces. Returns
    (eigenvalues, basis, clusters) with clusters as index lists into the
    reordered spectrum, contiguous and sorted by descending size.
    """
    t, z = scipy.linalg.schur(p, output="complex")
    vals = np.diag(t).copy()
    groups: list[list[int]] = []
    for i, lam in enumerate(vals):
        for g in groups:
            if abs(vals[g[0]] - lam) < tol:
                g.append(i)
                break
        else:
            groups.append([i])
    groups.sort(key=len, reverse=True)
    perm = [i for g in groups for i in g]
    clusters = []
    pos = 0
    for g in groups:
        clusters.append(list(range(pos, pos + len(g))))
        pos += len(g)
    return vals[perm], z[:, perm], clusters


def eig_multiplicity_ok(p: np.ndarray, m: Optional[int] = None, tol: float = EIG_CLUSTER_TOL) -> bool:
    """True when no eigenvalue of the unitary matrix p has multiplicity
    (cluster size at tolerance tol) exceeding floor(m/2)."""
    p = require_unitary(p, "p")
    if m is None:
        m = p.shape[0]
    elif p.shape != (m, m):
        raise DimensionMismatch(f"p must be {m}x{m}")
    _, _, clusters = _eig_clusters(p, tol)
    return max(len(c) for c in clusters) <= m // 2


def commutator_rank(a: np.ndarray, p: np.ndarray, rtol: float = 1e-9) -> int:
    """Rank of (a p - p a) with singular values measured against the
    probe's scale, not the commutator's own largest singular value.

    The distinction matters when p is (close to) a scalar matrix: the
    commutator is then rounding noise around zero, and a self-relative
    threshold would read that noise as full rank.
    """
    sv = np.linalg.svd(a @ p - p @ a, compute_uv=False)
    anchor = float(np.linalg.norm(a, 2)) * float(np.linalg.norm(p, 2))
    if anchor == 0.0:
        return 0
    return int((sv > rtol * anchor).sum())


def commutator_max_rank(p: np.ndarray, trials: int = 8, seed: int = 0) -> int:
    """Largest rank of (A p - p A) over random complex Gaussian probes A.

    A generic probe attains the maximum achievable commutator rank, which
    equals the matrix size exactly when no eigenvalue cluster of p
    exceeds half the dimension. Several trials guard against an unlucky
    draw.
    """
    p = np.asarray(p, dtype=np.complex128)
    m = p.shape[0]
    rng = np.random.default_rng(seed)
    best = 0
    for _ in range(trials):
        a = rand_complex_gaussian(rng, (m, m))
        best = max(best, commutator_rank(a, p))
        if best == m:
            break
    return best


def construct_commutator_witness(
    p: np.ndarray, seed: int = 0, max_tries: int = 20, tol: float = EIG_CLUSTER_TOL
) -> np.ndarray:
    """Explicitly build A with rank(A p - p A) equal to the matrix size.

    Work in the eigenbasis of p, with eigenvalue clusters ordered largest
    first. A commutator's entry (i, j) in that basis is b_ij (lam_j -
    lam_i), so entries inside a cluster are dead and every cross-cluster
    entry is free. Target the anti-diagonal block pattern
    [[0, C2], [C1, 0]] with C1 of size ceil(m/2) and C2 of size
    floor(m/2); when every cluster fits in half the dimension the forced
    zeros inside those blocks are small enough that random filling makes
    both blocks invertible, giving a full-rank commutator.

    Raises Infeasible when the multiplicity condition fails (no such A
    exists) and RngPathology if random filling keeps missing, which has
    probability zero in exact arithmetic.
    """
    p = require_unitary(p, "p")
    m = p.shape[0]
    vals, basis, clusters = _eig_clusters(p, tol)
    if max(len(c) for c in clusters) > m // 2:
        raise Infeasible("an eigenvalue cluster exceeds floor(m/2); no witness exists")
    member = np.empty(m, dtype=np.int64)
    for ci, c in enumerate(clusters):
        member[c] = ci
    lo, hi = m // 2, m - m // 2
    cross = member[:, None] != member[None, :]
    block = np.zeros((m, m), dtype=bool)
    block[lo:m, 0:hi] = True
    block[0:lo, hi:m] = True
    free = cross & block

    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        c = np.zeros((m, m), dtype=np.complex128)
        c[free] = rand_complex_gaussian(rng, (int(free.sum()),))
        b = np.zeros((m, m), dtype=np.complex128)
        b[free] = c[free] / (vals[None, :] - vals[:, None])[free]
        a = basis @ b @ basis.conj().T
        if commutator_rank(a, p) == m:
            return a
    raise RngPathology(f"no full-rank commutator witness in {max_tries} random fillings")


@dataclass(frozen=True)
class CommutatorReport:
    passed: bool
    m: int
    witness_rank: int
    probe_rank: int
    multiplicity_ok: bool

    def to_dict(self) -> dict:
        return _plain(asdict(self))


def check_commutator(p: np.ndarray, seed: int = 0) -> CommutatorReport:
    """Cross-validate the two full-rank-commutator routes for one unitary
    matrix: the eigenvalue multiplicity test, random probes, and (when
    feasible) the explicit witness construction."""
    p = require_unitary(p, "p")
    m = p.shape[0]
    ok = eig_multiplicity_ok(p, m)
    probe = commutator_max_rank(p, seed=seed)
    if ok:
        a = construct_commutator_witness(p, seed=seed)
        wrank = commutator_rank(a, p)
        passed = wrank == m and probe == m
    else:
        wrank = 0
        passed = probe < m
    return CommutatorReport(
        passed=passed, m=m, witness_rank=wrank, probe_rank=probe, multiplicity_ok=ok
    )


# ---------------------------------------------------------------------------
# effective-system rank statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RankStats:
    code: str
    draws: int
    dim: int
    frac_full_rx1: float
    frac_full_rx2: float
    min_rank_seen: int

    def to_dict(self) -> dict:
        return _plain(asdict(self))


def effective_rank_stats(code: StbcCode, draws: int = 1000, seed: int = 0) -> RankStats:
    """Fraction of random channel draws for which the square real
    effective system at each receiver is numerically full rank."""
    if code.cc is None:
        raise MissingCcSpec(f"code {code.name!r} carries no cancellation spec")
    rng = np.random.default_rng(seed)
    snr = network.Snr(1.0)
    t = code.cc.t_half
    dim = 4 * code.m * t
    y_dummy = np.zeros((code.m, 2 * t), dtype=np.complex128)
    full = [0, 0]
    min_rank = dim
    for _ in range(draws):
        ch = network.draw_channel(rng, code.m)
        pre = network.alignment_precoders(ch)
        pairs = (
            (1, ch.h11 @ pre.v11, ch.h21 @ pre.v21),
            (2, ch.h12 @ pre.v12, ch.h22 @ pre.v22),
        )
        for rx, ha, hb in pairs:
            sys_ = network.build_effective_real_system(code, ha, hb, y_dummy, snr, rx)
            r = numeric_rank(sys_.h_eff)
            min_rank = min(min_rank, r)
            if r == dim:
                full[rx - 1] += 1
    return RankStats(
        code=code.name,
        draws=draws,
        dim=dim,
        frac_full_rx1=full[0] / draws,
        frac_full_rx2=full[1] / draws,
        min_rank_seen=min_rank,
    )


# ---------------------------------------------------------------------------
# diversity slope
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    n_points: int
    snr_db_min: float
    snr_db_max: float

    def to_dict(self) -> dict:
        return _plain(asdict(self))


def estimate_diversity_slope(
    snr_db: np.ndarray, ber: np.ndarray, window: Optional[int] = None
) -> SlopeFit:
    """Least-squares slope of -log10(BER) against SNR/10 dB.

    The fitted slope is the empirical diversity order: a BER proportional
    to rho^-d shows up as slope d. Uses the last `window` points of the
    curve sorted by SNR (all points when window is None). Raises
    InsufficientData when fewer than two points remain or any BER in the
    window is zero, since a zero estimate has no defined logarithm.
    """
    snr_db = np.asarray(snr_db, dtype=np.float64)
    ber = np.asarray(ber, dtype=np.float64)
    if snr_db.shape != ber.shape or snr_db.ndim != 1:
        raise DimensionMismatch("snr_db and ber must be 1-d arrays of equal length")
    order = np.argsort(snr_db)
    snr_db, ber = snr_db[order], ber[order]
    if window is not None:
        if window < 2:
            raise InsufficientData("window must cover at least two points")
        snr_db, ber = snr_db[-window:], ber[-window:]
    if len(snr_db) < 2:
        raise InsufficientData("need at least two points to fit a slope")
    if np.any(ber <= 0.0):
        raise InsufficientData("zero BER in the fit window; no errors were observed")
    slope, intercept = np.polyfit(snr_db / 10.0, -np.log10(ber), 1)
    return SlopeFit(
        slope=float(slope),
        intercept=float(intercept),
        n_points=len(snr_db),
        snr_db_min=float(snr_db[0]),
        snr_db_max=float(snr_db[-1]),
    )
