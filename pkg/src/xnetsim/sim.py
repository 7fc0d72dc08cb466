"""Monte Carlo bit error rate sweeps over the X-network link.

Reproducibility contract: trial i of SNR point s draws from
Generator(PCG64(SeedSequence(seed, spawn_key=(s, i)))) and nothing else,
so any partition of trials into batches sees identical streams. Batches
are fixed windows of batch_size trials; a sweep stops after the first
batch whose cumulative codeword-error count reaches the target, so the
set of counted trials is a pure function of the config. Workers only
change which process computes a batch, never what the batch contains,
which keeps multi-worker output byte-identical to single-worker output.

Each trial sends four fresh messages (two per transmitter), decodes both
receivers jointly by sphere search, and counts bit errors over all four;
codeword_errors counts wrongly decoded messages, up to 4 per trial.
"""

from __future__ import annotations

from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, fields
from typing import Callable, Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import decoder, network
from .codes import StbcCode, cc_normalized, code_by_name, encode_batch
from .constellations import Constellation, by_name as constellation_by_name
from .errors import ConfigError, EmptyData, IoError, ParseError, UnsupportedSize
from .linalg import realify, tilde_vec, vec
from .network import noise_sigmas, transmit_scale

__all__ = [
    "SimConfig",
    "PointResult",
    "SweepResult",
    "run_sweep",
    "write_csv",
    "read_csv",
]

CSV_COLUMNS = ("snr_db", "trials", "bits_sent", "bit_errors", "codeword_errors", "ber", "cwer")


@dataclass(frozen=True)
class SimConfig:
    """One sweep definition; field names double as the TOML keys."""

    scheme: str
    constellation: str
    snr_db: tuple[float, ...]
    theta: float = np.pi / 4
    seed: int = 0
    min_codeword_errors: int = 100
    max_trials: int = 1_000_000
    batch_size: int = 1000
    workers: int = 1
    noise: bool = True

    def __post_init__(self):
        # canonicalize numerics so CSV formatting (repr) and round trips
        # never see numpy scalar wrappers
        try:
            object.__setattr__(self, "snr_db", tuple(float(x) for x in self.snr_db))
        except TypeError:
            raise ConfigError("snr_db must be a sequence of numbers") from None
        object.__setattr__(self, "theta", float(self.theta))
        if not self.snr_db:
            raise ConfigError("snr_db must list at least one point")
        if self.min_codeword_errors < 1:
            raise ConfigError("min_codeword_errors must be positive")
        if not (0 < self.batch_size <= self.max_trials):
            raise ConfigError("need 0 < batch_size <= max_trials")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    @classmethod
    def from_toml(cls, path: str) -> "SimConfig":
        try:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        except OSError as exc:
            raise IoError(f"cannot read config {path!r}: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML in {path!r}: {exc}") from exc
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"scheme", "constellation", "snr_db"} - set(raw)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        if not isinstance(raw["snr_db"], list):
            raise ConfigError("snr_db must be a list of numbers")
        raw["snr_db"] = tuple(float(v) for v in raw["snr_db"])
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


@dataclass(frozen=True)
class PointResult:
    snr_db: float
    trials: int
    bits_sent: int
    bit_errors: int
    codeword_errors: int
    capped: bool  # max_trials reached before min_codeword_errors

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_sent if self.bits_sent else 0.0

    @property
    def cwer(self) -> float:
        return self.codeword_errors / (4 * self.trials) if self.trials else 0.0


@dataclass(frozen=True)
class SweepResult:
    config: SimConfig
    points: tuple[PointResult, ...]
    m: int
    phi: float

    @property
    def any_capped(self) -> bool:
        return any(p.capped for p in self.points)


# ---------------------------------------------------------------------------
# batch engine
# ---------------------------------------------------------------------------


class _Scheme:
    """Precomputed per-scheme state shared by every batch."""

    def __init__(self, code: StbcCode, constellation: Constellation):
        self.code = cc_normalized(code)
        self.constellation = constellation
        m, t = self.code.m, self.code.cc.t_half
        self.m, self.t = m, t
        self.k = self.code.k
        self.n = 4 * m * t
        if 4 * self.k != self.n:
            raise UnsupportedSize(
                "joint sphere decoding needs a square effective system (k = m * t_half)"
            )
        self.scale = transmit_scale(self.code)
        self.gen_blocks = self.code.g_real.reshape(2 * t, 2 * m, 2 * self.code.k)
        self.sig = (
            np.repeat(noise_sigmas(t, 1), 2 * m),
            np.repeat(noise_sigmas(t, 2), 2 * m),
        )
        self.pts_re = np.ascontiguousarray(constellation.points.real)
        self.pts_im = np.ascontiguousarray(constellation.points.imag)


_SCHEME_CACHE: dict = {}


def _scheme(spec: tuple) -> _Scheme:
    s = _SCHEME_CACHE.get(spec)
    if s is None:
        name, cname, theta = spec
        s = _Scheme(code_by_name(name, theta), constellation_by_name(cname))
        _SCHEME_CACHE[spec] = s
    return s


def _run_batch(spec: tuple, snr_index: int, snr_db: float, lo: int, hi: int,
               seed: int, noise: bool) -> tuple[int, int]:
    """Simulate trials lo..hi-1 of one SNR point; returns integer counts
    (bit_errors, codeword_errors)."""
    s = _scheme(spec)
    m, t, k = s.m, s.t, s.k
    n_trials = hi - lo
    n_pts = len(s.constellation)
    rho = 10.0 ** (snr_db / 10.0)
    amp = np.sqrt(3.0 * rho / 4.0) * s.scale

    chans = np.empty((n_trials, 4, m, m), dtype=np.complex128)
    sym = np.empty((n_trials, 4, k), dtype=np.int64)
    noise_frames = np.zeros((n_trials, 2, m, 3 * t), dtype=np.complex128)
    for i, trial in enumerate(range(lo, hi)):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(snr_index, trial)))
        )
        z = rng.standard_normal((4, m, m)) + 1j * rng.standard_normal((4, m, m))
        chans[i] = z / np.sqrt(2.0)
        sym[i] = rng.integers(0, n_pts, size=(4, k))
        if noise:
            z = rng.standard_normal((2, m, 3 * t)) + 1j * rng.standard_normal((2, m, 3 * t))
            noise_frames[i] = z / np.sqrt(2.0)

    inv = np.linalg.inv(chans.reshape(-1, m, m)).reshape(n_trials, 4, m, m)
    norms = np.sqrt((inv.real**2 + inv.imag**2).sum(axis=(2, 3)))
    v = inv / norms[:, :, None, None]
    h11, h12, h21, h22 = (chans[:, i] for i in range(4))
    v12, v11, v22, v21 = (v[:, i] for i in range(4))  # v11 inverts h12, etc.

    cw = s.code  # encode all four messages of every trial in one pass
    xmat = encode_batch(cw, s.constellation.points[sym].reshape(-1, k))
    xmat = xmat.reshape(n_trials, 4, m, 2 * t)

    padded = np.zeros((n_trials, 4, m, 3 * t), dtype=np.complex128)
    padded[:, 0, :, : 2 * t] = xmat[:, 0]  # first tx, rx-1 message, left
    padded[:, 2, :, : 2 * t] = xmat[:, 2]  # second tx, rx-1 message, left
    padded[:, 1, :, t:] = xmat[:, 1]  # first tx, rx-2 message, right
    padded[:, 3, :, t:] = xmat[:, 3]  # second tx, rx-2 message, right

    x1 = amp * (np.einsum("bij,bjt->bit", v11, padded[:, 0]) + np.einsum("bij,bjt->bit", v12, padded[:, 1]))
    x2 = amp * (np.einsum("bij,bjt->bit", v21, padded[:, 2]) + np.einsum("bij,bjt->bit", v22, padded[:, 3]))
    y1 = np.einsum("bij,bjt->bit", h11, x1) + np.einsum("bij,bjt->bit", h21, x2) + noise_frames[:, 0]
    y2 = np.einsum("bij,bjt->bit", h12, x1) + np.einsum("bij,bjt->bit", h22, x2) + noise_frames[:, 1]

    yp1 = network.cancel_interference(y1, cw.cc, 1)
    yp2 = network.cancel_interference(y2, cw.cc, 2)

    def h_eff(ha, hb):
        ra, rb = realify(ha), realify(hb)
        left = np.einsum("bij,tjk->btik", ra, s.gen_blocks).reshape(n_trials, s.n, 2 * k)
        right = np.einsum("bij,tjk->btik", rb, s.gen_blocks).reshape(n_trials, s.n, 2 * k)
        return amp * np.concatenate([left, right], axis=2)

    heff = np.empty((2, n_trials, s.n, s.n), dtype=np.float64)
    heff[0] = h_eff(np.einsum("bij,bjk->bik", h11, v11), np.einsum("bij,bjk->bik", h21, v21))
    heff[1] = h_eff(np.einsum("bij,bjk->bik", h12, v12), np.einsum("bij,bjk->bik", h22, v22))
    yeff = np.stack([tilde_vec(vec(yp1)), tilde_vec(vec(yp2))])

    truth = np.stack([sym[:, (0, 2)], sym[:, (1, 3)]]).reshape(2, n_trials, 2 * k)
    bit_errors = 0
    codeword_errors = 0
    for rx in range(2):
        hw = heff[rx] / s.sig[rx][None, :, None]
        yw = yeff[rx] / s.sig[rx][None, :]
        q, r = np.linalg.qr(hw)
        dia = np.abs(np.diagonal(r, axis1=1, axis2=2))
        bad = dia.min(axis=1) <= decoder.RANK_DEFICIENT_RTOL * dia.max(axis=1)
        z = np.einsum("bij,bi->bj", q, yw)
        est = np.empty((n_trials, 2 * k), dtype=np.int64)
        for b in range(n_trials):
            if bad[b]:
                est[b] = decoder._ml_core(hw[b], yw[b], k, s.constellation).indices
            else:
                idx, _, _ = decoder.sphere_search(
                    np.ascontiguousarray(r[b]), np.ascontiguousarray(z[b]), s.pts_re, s.pts_im
                )
                est[b] = idx
        xor = np.bitwise_xor(truth[rx], est)
        bit_errors += int(np.bitwise_count(xor).sum())
        wrong = xor.reshape(n_trials, 2, k).any(axis=2)
        codeword_errors += int(wrong.sum())
    return bit_errors, codeword_errors


def _batch_bounds(max_trials: int, batch_size: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + batch_size, max_trials)) for lo in range(0, max_trials, batch_size)]


def _run_point(
    config: SimConfig,
    spec: tuple,
    snr_index: int,
    bits_per_trial: int,
    pool: Optional[ProcessPoolExecutor],
) -> PointResult:
    """Process batches in index order until the error target is met.

    With a pool, batches are submitted speculatively but results are
    still consumed strictly in index order, so the counted set of trials
    is identical to the sequential run.
    """
    snr_db = config.snr_db[snr_index]
    bounds = _batch_bounds(config.max_trials, config.batch_size)
    bit_errors = codeword_errors = trials = 0
    stopped = False

    if pool is None:
        for lo, hi in bounds:
            be, ce = _run_batch(spec, snr_index, snr_db, lo, hi, config.seed, config.noise)
            bit_errors += be
            codeword_errors += ce
            trials = hi
            if codeword_errors >= config.min_codeword_errors:
                stopped = True
                break
    else:
        window = 2 * config.workers
        futures = {}
        results = {}
        next_submit = 0
        consume = 0
        while consume < len(bounds):
            while next_submit < len(bounds) and len(futures) < window:
                lo, hi = bounds[next_submit]
                fut = pool.submit(
                    _run_batch, spec, snr_index, snr_db, lo, hi, config.seed, config.noise
                )
                futures[fut] = next_submit
                next_submit += 1
            done, _ = wait(list(futures), return_when=FIRST_COMPLETED)
            for fut in done:
                results[futures.pop(fut)] = fut.result()
            while consume in results:
                be, ce = results.pop(consume)
                bit_errors += be
                codeword_errors += ce
                trials = bounds[consume][1]
                consume += 1
                if codeword_errors >= config.min_codeword_errors:
                    stopped = True
                    break
            if stopped:
                for fut in futures:
                    fut.cancel()
                break

    return PointResult(
        snr_db=snr_db,
        trials=trials,
        bits_sent=bits_per_trial * trials,
        bit_errors=bit_errors,
        codeword_errors=codeword_errors,
        capped=not stopped,
    )


def run_sweep(
    config: SimConfig, on_point: Optional[Callable[[PointResult], None]] = None
) -> SweepResult:
    """Run every SNR point of the sweep and collect per-point counters."""
    spec = (config.scheme, config.constellation, config.theta)
    scheme = _scheme(spec)
    bits_per_trial = 4 * scheme.k * scheme.constellation.bits_per_symbol
    points = []
    pool = None
    try:
        if config.workers > 1:
            pool = ProcessPoolExecutor(max_workers=config.workers)
        for snr_index in range(len(config.snr_db)):
            point = _run_point(config, spec, snr_index, bits_per_trial, pool)
            points.append(point)
            if on_point is not None:
                on_point(point)
    finally:
        if pool is not None:
            pool.shutdown(wait=True, cancel_futures=True)
    return SweepResult(
        config=config,
        points=tuple(points),
        m=scheme.m,
        phi=float(scheme.constellation.rotation_applied),
    )


# ---------------------------------------------------------------------------
# CSV persistence
# ---------------------------------------------------------------------------


def write_csv(path: str, sweep: SweepResult) -> None:
    """Write the sweep with its identifying metadata as # key=value lines."""
    from . import __version__

    cfg = sweep.config
    meta = (
        ("scheme", cfg.scheme),
        ("m", sweep.m),
        ("constellation", cfg.constellation),
        ("theta", repr(cfg.theta)),
        ("phi", repr(sweep.phi)),
        ("seed", cfg.seed),
        ("version", __version__),
    )
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for key, val in meta:
                fh.write(f"# {key}={val}\n")
            fh.write(",".join(CSV_COLUMNS) + "\n")
            for p in sweep.points:
                fh.write(
                    f"{p.snr_db!r},{p.trials},{p.bits_sent},{p.bit_errors},"
                    f"{p.codeword_errors},{p.ber!r},{p.cwer!r}\n"
                )
    except OSError as exc:
        raise IoError(f"cannot write {path!r}: {exc}") from exc


def read_csv(path: str) -> tuple[dict, dict]:
    """Parse a sweep CSV back into (metadata dict, column arrays dict).

    Raises ParseError with a 1-based line number on any malformed line
    and EmptyData when no data rows are present.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read {path!r}: {exc}") from exc

    meta: dict = {}
    rows = []
    header_seen = False
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, val = body.partition("=")
                meta[key.strip()] = val.strip()
            continue
        if not header_seen:
            if tuple(c.strip() for c in line.split(",")) != CSV_COLUMNS:
                raise ParseError(f"line {lineno}: expected header {','.join(CSV_COLUMNS)}")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise ParseError(f"line {lineno}: expected {len(CSV_COLUMNS)} fields, got {len(parts)}")
        try:
            rows.append(
                (
                    float(parts[0]), int(parts[1]), int(parts[2]), int(parts[3]),
                    int(parts[4]), float(parts[5]), float(parts[6]),
                )
            )
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    if not header_seen:
        raise ParseError("line 1: missing header row")
    if not rows:
        raise EmptyData(f"{path!r} contains no data rows")
    arr = np.array(rows, dtype=np.float64)
    cols = {name: arr[:, i] for i, name in enumerate(CSV_COLUMNS)}
    for name in ("trials", "bits_sent", "bit_errors", "codeword_errors"):
        cols[name] = cols[name].astype(np.int64)
    return meta, cols
