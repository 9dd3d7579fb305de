"""Monte Carlo experiment driver.

Every SNR point is split into fixed-size batches.  Batch j of point i draws
from its own generator seeded by SeedSequence(seed, spawn_key=(i, j)), and
batch statistics are merged in index order, so results do not depend on how
batches are spread over worker processes.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import analytic
from .channel import mac_batch, ofdma_batch, sigma_from_snr
from .codec import SumCompCode, decode_array, encode_array, gray_pam4_baseline, preset_code
from .errors import ConfigError, OutOfAsymptoticRegime, SumCompError
from .nomographic import NomographicSpec, preset as nomographic_preset

EXPERIMENTS = ("mse-sweep", "mae-sweep", "nmse-compare", "overlap-demo", "analytic-table")
BATCH = 5000
DEFAULT_SEED = 20240917


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    preset: str | None = None
    function: str | None = None
    K: int | None = None
    q: int | None = None
    snr_grid: tuple = tuple(float(s) for s in range(-15, 25))
    trials: int = 50000
    seed: int = DEFAULT_SEED
    input_distribution: str = "zq"  # "zq" or "range:lo:hi" (integers, inclusive)
    output_path: str | None = None
    centered: bool = True
    workers: int = 1
    k_list: tuple = ()
    bops_a: float = 0.5
    bops_b: float = 0.5
    bops_E: float = 1.0
    bops_D: float = 1.0

    def resolved(self) -> ExperimentConfig:
        """Fill experiment-specific defaults and validate."""
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        fn, pre, K = self.function, self.preset, self.K
        if self.experiment in ("mse-sweep", "analytic-table"):
            fn = fn or "arithmetic_sum"
            pre = pre or "qam16"
            K = K or 100
        elif self.experiment == "mae-sweep":
            fn = fn or "arithmetic_mean"
            pre = pre or "qam64"
            K = K or 100
            if fn not in ("arithmetic_mean", "euclidean_norm"):
                raise ConfigError("mae-sweep supports arithmetic_mean and euclidean_norm")
        elif self.experiment == "nmse-compare":
            fn = fn or "arithmetic_mean"
            if fn == "geometric_mean":
                pre, K = pre or "pam8", K or 4
            elif fn == "arithmetic_mean":
                pre, K = pre or "qam64", K or 10
            else:
                raise ConfigError("nmse-compare supports arithmetic_mean and geometric_mean")
        if self.experiment == "mse-sweep" and fn != "arithmetic_sum":
            raise ConfigError("mse-sweep computes the arithmetic sum")
        if K is not None and K < 1:
            raise ConfigError("K must be positive")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.snr_grid:
            raise ConfigError("SNR grid is empty")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        cfg = replace(self, function=fn, preset=pre, K=K, snr_grid=tuple(sorted(self.snr_grid)))
        if cfg.preset is not None and cfg.experiment != "overlap-demo":
            try:
                code = cfg.code()
            except SumCompError as e:
                raise ConfigError(str(e)) from e
            if cfg.q is not None and cfg.q != code.order:
                raise ConfigError(f"q={cfg.q} does not match preset {cfg.preset} of order {code.order}")
        return cfg

    def code(self) -> SumCompCode:
        return preset_code(self.preset, self.centered)


# ---------------------------------------------------------------- statistics

@dataclass
class TrialStats:
    n: int = 0
    sum_sq_err: float = 0
    sum_sq_err2: float = 0  # sum of e**4, for the MSE standard error
    sum_abs_err: float = 0
    sum_nmse: float = 0
    sum_nmse2: float = 0

    @classmethod
    def from_errors(cls, err: np.ndarray, truth: np.ndarray | None = None) -> TrialStats:
        if err.dtype.kind in "iu":
            # integer errors accumulate exactly
            e = err.astype(np.int64)
            sq = [int(v) for v in e * e]
            st = cls(len(e), sum(sq), sum(v * v for v in sq), int(np.sum(np.abs(e))))
        else:
            sq = err * err
            st = cls(len(err), float(np.sum(sq)), float(np.sum(sq * sq)), float(np.sum(np.abs(err))))
        if truth is not None:
            ratio = (np.abs(err) ** 2 / np.abs(truth)).astype(float)
            st.sum_nmse = float(np.sum(ratio))
            st.sum_nmse2 = float(np.sum(ratio * ratio))
        return st

    def merge(self, other: TrialStats) -> TrialStats:
        return TrialStats(self.n + other.n, self.sum_sq_err + other.sum_sq_err,
                          self.sum_sq_err2 + other.sum_sq_err2, self.sum_abs_err + other.sum_abs_err,
                          self.sum_nmse + other.sum_nmse, self.sum_nmse2 + other.sum_nmse2)

    @property
    def mse(self) -> float:
        return float(self.sum_sq_err) / self.n

    @property
    def mae(self) -> float:
        return float(self.sum_abs_err) / self.n

    @property
    def nmse(self) -> float:
        return self.sum_nmse / self.n

    @staticmethod
    def _stderr(n, s1, s2) -> float:
        if n < 2:
            return math.nan
        var = (float(s2) - float(s1) ** 2 / n) / (n - 1)
        return math.sqrt(max(var, 0.0) / n)

    @property
    def mse_stderr(self) -> float:
        return self._stderr(self.n, self.sum_sq_err, self.sum_sq_err2)

    @property
    def mae_stderr(self) -> float:
        return self._stderr(self.n, self.sum_abs_err, self.sum_sq_err)

    @property
    def nmse_stderr(self) -> float:
        return self._stderr(self.n, self.sum_nmse, self.sum_nmse2)


def merge_all(stats) -> TrialStats:
    out = TrialStats()
    for s in stats:
        out = out.merge(s)
    return out


# ---------------------------------------------------------------- helpers

def batch_sizes(trials: int) -> list[int]:
    full, rest = divmod(trials, BATCH)
    return [BATCH] * full + ([rest] if rest else [])


def batch_rng(seed: int, point: int, batch: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(point, batch)))


def lattice_sigma(code: SumCompCode, snr_db: float) -> float:
    """Noise std per component after de-normalization (lattice units)."""
    return sigma_from_snr(code.symbol_array, snr_db) / abs(code.gamma2)


def error_model(code: SumCompCode, K: int, sigma: float, aggregate: bool = False) -> analytic.ErrorModelInputs:
    """Analytic inputs for a K-fold sum.  Axes the code does not use get M=1.

    With aggregate=False the used axes are treated as unbounded (M=None);
    otherwise M is the per-axis extent of the reachable received grid.
    """
    M1, M2 = code.aggregate_extents(K)
    if not aggregate:
        M1 = None if M1 > 1 else 1
        M2 = None if M2 > 1 else 1
    return analytic.ErrorModelInputs(code.q1, code.q2, abs(code.params.rho), M1, M2, sigma)


def function_setup(cfg: ExperimentConfig) -> tuple[SumCompCode, NomographicSpec, tuple[int, int]]:
    """Code, nomographic spec and integer input range for function experiments."""
    code = cfg.code()
    q = code.order
    if not np.array_equal(code.value_array, np.arange(q)):
        raise ConfigError(f"preset {cfg.preset} does not carry the contiguous values 0..{q - 1}")
    if cfg.input_distribution.startswith("range:"):
        try:
            _, lo, hi = cfg.input_distribution.split(":")
            lo, hi = int(lo), int(hi)
        except ValueError:
            raise ConfigError(f"bad input distribution {cfg.input_distribution!r}") from None
    elif cfg.input_distribution == "zq":
        if cfg.function == "euclidean_norm":
            # squares of 1..sqrt(q) fill the q quantizer levels on [1, q] exactly
            lo, hi = 1, math.isqrt(q)
        elif cfg.function == "geometric_mean":
            lo, hi = 1, q
        else:
            lo, hi = 0, q - 1
    else:
        raise ConfigError(f"unknown input distribution {cfg.input_distribution!r}")
    if lo >= hi:
        raise ConfigError("input range needs lo < hi")
    try:
        spec = nomographic_preset(cfg.function, cfg.K, input_domain=(float(lo), float(hi)))
    except ValueError as e:
        raise ConfigError(str(e)) from e
    return code, spec, (lo, hi)


# ---------------------------------------------------------------- per-point workers

def _mse_point(cfg: ExperimentConfig, point: int, snr_db: float) -> TrialStats:
    code = cfg.code()
    sigma = sigma_from_snr(code.symbol_array, snr_db)
    stats = []
    for j, n in enumerate(batch_sizes(cfg.trials)):
        rng = batch_rng(cfg.seed, point, j)
        if cfg.input_distribution == "zq":
            idx = rng.integers(0, code.order, size=(n, cfg.K))
        else:
            _, lo, hi = cfg.input_distribution.split(":")
            vals = rng.integers(int(lo), int(hi) + 1, size=(n, cfg.K))
            idx = np.searchsorted(code.value_array, vals)
            encode_array(vals, code)  # raises if a value is not representable
        truth = code.value_array[idx].sum(axis=1)
        r = mac_batch(code.symbol_array[idx], sigma, rng)
        stats.append(TrialStats.from_errors(decode_array(r, cfg.K, code) - truth))
    return merge_all(stats)


def _sumcomp_function(code, spec, quant, K, r):
    """f_hat from received superpositions: decode the level sum, rescale, apply psi."""
    level_sum = decode_array(r, K, code)
    return spec.psi(K * quant.lo + quant.step * level_sum)


def _mae_point(cfg: ExperimentConfig, point: int, snr_db: float) -> TrialStats:
    code, spec, (lo, hi) = function_setup(cfg)
    quant = spec.quantizer(code.order)
    sigma = sigma_from_snr(code.symbol_array, snr_db)
    stats = []
    for j, n in enumerate(batch_sizes(cfg.trials)):
        rng = batch_rng(cfg.seed, point, j)
        s = rng.integers(lo, hi + 1, size=(n, cfg.K)).astype(float)
        levels, _ = quant.quantize_many(spec.phi(s))
        r = mac_batch(code.symbol_array[levels], sigma, rng)
        err = _sumcomp_function(code, spec, quant, cfg.K, r) - spec.exact(s)
        stats.append(TrialStats.from_errors(err))
    return merge_all(stats)


def aircomp_amplitude(code: SumCompCode) -> float:
    """Spacing of a centered real PAM over q levels with the code's mean energy."""
    q = code.order
    energy = float(np.mean(np.abs(code.symbol_array) ** 2))
    return math.sqrt(energy / ((q * q - 1) / 12))


def _nmse_point(cfg: ExperimentConfig, point: int, snr_db: float) -> tuple[TrialStats, TrialStats, TrialStats]:
    code, spec, (lo, hi) = function_setup(cfg)
    q, K = code.order, cfg.K
    quant = spec.quantizer(q)
    sigma = sigma_from_snr(code.symbol_array, snr_db)
    A = aircomp_amplitude(code)
    sc, ac, of = [], [], []
    for j, n in enumerate(batch_sizes(cfg.trials)):
        rng = batch_rng(cfg.seed, point, j)
        s = rng.integers(lo, hi + 1, size=(n, K)).astype(float)
        f = spec.exact(s)
        levels, _ = quant.quantize_many(spec.phi(s))

        # SumComp
        r = mac_batch(code.symbol_array[levels], sigma, rng)
        sc.append(TrialStats.from_errors(_sumcomp_function(code, spec, quant, K, r) - f, f))

        # AirComp: analog amplitudes of the same levels, equal mean energy
        x = A * (levels - (q - 1) / 2)
        r = mac_batch(x.astype(complex), sigma, rng)
        level_sum = np.clip(r.real / A + K * (q - 1) / 2, 0, K * (q - 1))
        ac.append(TrialStats.from_errors(spec.psi(K * quant.lo + quant.step * level_sum) - f, f))

        # OFDMA: per-node detection, then the exact function of the recovered inputs
        r = ofdma_batch(code.symbol_array[levels], sigma, rng)
        phi_hat = quant.lo + quant.step * decode_array(r, 1, code)
        of.append(TrialStats.from_errors(spec.exact(spec.phi_inverse(phi_hat)) - f, f))
    return merge_all(sc), merge_all(ac), merge_all(of)


_WORKERS = {"mse-sweep": _mse_point, "mae-sweep": _mae_point, "nmse-compare": _nmse_point}


def _run_point(args):
    cfg, point, snr = args
    return _WORKERS[cfg.experiment](cfg, point, snr)


def _run_points(cfg: ExperimentConfig) -> list:
    tasks = [(cfg, i, snr) for i, snr in enumerate(cfg.snr_grid)]
    if cfg.workers == 1 or len(tasks) == 1:
        return [_run_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
        return list(ex.map(_run_point, tasks))


# ---------------------------------------------------------------- experiments

@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.9g" % v
    return str(v)


def run_mse_sweep(cfg: ExperimentConfig) -> Table:
    cfg = cfg.resolved()
    code = cfg.code()
    table = Table(["snr_db", "mse_empirical", "mse_analytic", "stderr", "mse_analytic_grid"],
                  meta={"config": cfg})
    for snr, st in zip(cfg.snr_grid, _run_points(cfg)):
        sigma = lattice_sigma(code, snr)
        table.rows.append([snr, st.mse, analytic.mse_analytic(error_model(code, cfg.K, sigma)),
                           st.mse_stderr,
                           analytic.mse_analytic(error_model(code, cfg.K, sigma, aggregate=True))])
    return table


def run_mae_sweep(cfg: ExperimentConfig) -> Table:
    cfg = cfg.resolved()
    code, spec, _ = function_setup(cfg)
    step = spec.quantizer(code.order).step
    table = Table(["snr_db", "mae_empirical", "mae_bound", "stderr"], meta={"config": cfg})
    for snr, st in zip(cfg.snr_grid, _run_points(cfg)):
        inp = error_model(code, cfg.K, lattice_sigma(code, snr))
        table.rows.append([snr, st.mae, analytic.mae_bound(inp, spec.modulus, scale=step), st.mae_stderr])
    return table


def run_nmse_compare(cfg: ExperimentConfig) -> Table:
    cfg = cfg.resolved()
    function_setup(cfg)
    table = Table(["snr_db", "nmse_sumcomp", "nmse_aircomp", "nmse_ofdma", "nmse_channelcomp"],
                  meta={"config": cfg})
    for snr, (sc, ac, of) in zip(cfg.snr_grid, _run_points(cfg)):
        # ChannelComp needs an SDP-designed constellation; the column stays empty
        table.rows.append([snr, sc.nmse, ac.nmse, of.nmse, None])
    return table


def run_overlap_demo(cfg: ExperimentConfig | None = None) -> Table:
    """Group all input pairs of a 2-node PAM-4 link by received point."""
    schemes = {
        "gray_pam4": lambda s: gray_pam4_baseline(s, 2.0),
        "sumcomp_pam4": lambda s: preset_code("pam4").constellation.symbols[s].real,
    }
    table = Table(["scheme", "received", "pairs", "sums", "collision"])
    for name, mapper in schemes.items():
        groups: dict[float, list] = {}
        for s1 in range(4):
            for s2 in range(4):
                groups.setdefault(mapper(s1) + mapper(s2), []).append((s1, s2))
        collisions = 0
        for received in sorted(groups):
            pairs = groups[received]
            sums = sorted({a + b for a, b in pairs})
            collisions += len(sums) > 1
            table.rows.append([name, float(received), " ".join(f"({a},{b})" for a, b in pairs),
                               " ".join(map(str, sums)), len(sums) > 1])
        table.meta[f"{name}_collisions"] = collisions
    return table


def run_analytic_table(cfg: ExperimentConfig) -> Table:
    cfg = cfg.resolved()
    code = cfg.code()
    spec = nomographic_preset(cfg.function, cfg.K)
    table = Table(["K", "snr_db", "sigma", "mse_analytic", "mse_analytic_grid", "mae_bound",
                   "bops_encoder", "bops_decoder", "log10_channelcomp_encoder", "log10_channelcomp_decoder"],
                  meta={"config": cfg})
    for K in (cfg.k_list or (cfg.K,)):
        spec = nomographic_preset(cfg.function, K)
        cin = analytic.ComplexityInputs.uniform(K, code.order, cfg.bops_a, cfg.bops_b, cfg.bops_E, cfg.bops_D)
        try:
            enc = analytic.bops_encoder(cin)
            dec = analytic.bops_decoder(cin)
        except OutOfAsymptoticRegime:
            enc = dec = None
        for snr in cfg.snr_grid:
            sigma = lattice_sigma(code, snr)
            inp = error_model(code, K, sigma)
            table.rows.append([K, snr, sigma, analytic.mse_analytic(inp),
                               analytic.mse_analytic(error_model(code, K, sigma, aggregate=True)),
                               analytic.mae_bound(inp, spec.modulus), enc, dec,
                               analytic.log10_channelcomp_encoder(K, code.order),
                               analytic.log10_channelcomp_decoder(K, code.order)])
    return table


RUNNERS = {
    "mse-sweep": run_mse_sweep,
    "mae-sweep": run_mae_sweep,
    "nmse-compare": run_nmse_compare,
    "overlap-demo": run_overlap_demo,
    "analytic-table": run_analytic_table,
}


# ---------------------------------------------------------------- threshold checks

def _db(x: float) -> float:
    return 10 * math.log10(x) if x > 0 else -math.inf


def check_table(experiment: str, table: Table) -> list[str]:
    """Acceptance-threshold violations for a single table (empty list when clean)."""
    bad = []
    if experiment == "mse-sweep":
        for snr, emp, ana, se, _ in table.rows:
            if ana > 1e-3 and abs(emp - ana) > 3 * se:
                bad.append(f"snr {snr:g}: |{emp:.6g} - {ana:.6g}| > 3 x {se:.3g}")
    elif experiment == "mae-sweep":
        for snr, emp, bound, _ in table.rows:
            if emp > bound:
                bad.append(f"snr {snr:g}: mae {emp:.6g} exceeds bound {bound:.6g}")
    elif experiment == "nmse-compare":
        fn = table.meta["config"].function
        for snr, sc, ac, of, _ in table.rows:
            if snr >= -5 and fn == "arithmetic_mean" and (sc > ac or sc > of):
                bad.append(f"snr {snr:g}: sumcomp {sc:.4g} above aircomp {ac:.4g} or ofdma {of:.4g}")
            if snr == -5 and fn == "arithmetic_mean" and _db(max(ac, of)) - _db(sc) < 10:
                bad.append(f"snr -5: gap {_db(max(ac, of)) - _db(sc):.2f} dB < 10 dB")
            if snr == 19 and fn == "geometric_mean" and _db(ac) - _db(sc) < 5:
                bad.append(f"snr 19: gap to aircomp {_db(ac) - _db(sc):.2f} dB < 5 dB")
    elif experiment == "overlap-demo":
        if table.meta["gray_pam4_collisions"] != 3:
            bad.append(f"gray PAM-4 collisions {table.meta['gray_pam4_collisions']} != 3")
        if table.meta["sumcomp_pam4_collisions"] != 0:
            bad.append("SumComp PAM-4 has collisions")
        witness = [r for r in table.rows if r[0] == "gray_pam4" and "(1,1)" in r[2] and "(0,3)" in r[2]]
        if not witness:
            bad.append("overlap witness (1,1) vs (0,3) missing")
    elif experiment == "analytic-table":
        for row in table.rows:
            if row[2] == 0 and (row[3] != 0 or row[5] != 0):
                bad.append(f"noiseless row has nonzero error at K={row[0]}")
    return bad
