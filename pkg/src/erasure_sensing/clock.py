"""End-to-end Monte Carlo of a differential two-ensemble clock comparison.

Two atomic ensembles share one local oscillator. Each cycle draws a common
laser phase, interrogates both ensembles (ensemble b carries an extra
differential phase phi_d), applies the configured noise channel, and records
excitation fractions with projection noise. Ellipse fits over windows of
cycles give a phi_d time series, whose overlapping Allan deviation with
jackknife error bars measures the fractional instability. On top of the
simulator sit the quantum-projection-noise floor, instability-versus-q
scaling curves, and interrogation-time optimization under dead time.

Determinism contract: every cycle gets its own counter-based random stream
derived from (seed, cycle_index), so results are bit-identical for a given
config regardless of how many threads execute the cycles.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .estimation import phase_series_from_cycles
from .states import ChannelKind, NoiseChannel, TWO_PI


class SimulationDegeneracyError(RuntimeError):
    """The run lost too many cycles to total erasure to be analyzable."""


class LaserPhaseModel(enum.Enum):
    UNIFORM_RANDOM_PER_CYCLE = "UniformRandomPerCycle"
    FIXED_SWEEP = "FixedSweep"


_CONFIG_FIELDS = (
    "phi_d",
    "N0",
    "T_c",
    "T_d",
    "f0",
    "cycles",
    "noise",
    "c_a",
    "c_b",
    "laser_phase_model",
    "seed",
    "shot_noise",
)

_KIND_NAMES = {k.value: k for k in ChannelKind}
_PHASE_MODEL_NAMES = {m.value: m for m in LaserPhaseModel}


@dataclass(frozen=True)
class ComparisonConfig:
    """Full parameter set of one differential comparison run.

    phi_d is the injected differential phase (ensemble b lags a by phi_d);
    n0 atoms are loaded per ensemble each cycle; t_c and t_d are the
    interrogation and dead times; c_a and c_b are the base fringe contrasts
    before noise. With shot_noise False the excitation fractions are the
    exact Born probabilities (the infinite-atom limit used by deterministic
    tests). The JSON form keeps every field explicit; see from_dict.
    """

    phi_d: float
    n0: int
    t_c: float
    t_d: float
    f0: float
    cycles: int
    noise: NoiseChannel
    c_a: float
    c_b: float
    laser_phase_model: LaserPhaseModel
    seed: int
    shot_noise: bool = True

    def __post_init__(self):
        if not isinstance(self.noise, NoiseChannel):
            raise ValueError("noise must be a NoiseChannel")
        if not isinstance(self.laser_phase_model, LaserPhaseModel):
            raise ValueError("laser_phase_model must be a LaserPhaseModel")
        if not 0.0 <= self.phi_d <= math.pi:
            raise ValueError("phi_d must lie in [0, pi]")
        if int(self.n0) != self.n0 or self.n0 < 1:
            raise ValueError("N0 must be an integer >= 1")
        if int(self.cycles) != self.cycles or self.cycles < 1:
            raise ValueError("cycles must be an integer >= 1")
        if not self.t_c > 0.0:
            raise ValueError("T_c must be positive")
        if self.t_d < 0.0:
            raise ValueError("T_d must be non-negative")
        if not self.f0 > 0.0:
            raise ValueError("f0 must be positive")
        for name in ("c_a", "c_b"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not isinstance(self.shot_noise, bool):
            raise ValueError("shot_noise must be a boolean")

    @property
    def cycle_time(self) -> float:
        """Wall-clock duration of one cycle, T_c + T_d."""
        return self.t_c + self.t_d

    @classmethod
    def from_dict(cls, data: dict) -> "ComparisonConfig":
        """Build a config from its JSON object form.

        The schema is strict: all fields must be present and no unknown
        fields are allowed, so a config file is always a complete record of
        the run. Error messages name the offending field.
        """
        if not isinstance(data, dict):
            raise ValueError("config must be a JSON object")
        missing = [k for k in _CONFIG_FIELDS if k not in data]
        if missing:
            raise ValueError(f"config missing field(s): {', '.join(missing)}")
        unknown = [k for k in data if k not in _CONFIG_FIELDS]
        if unknown:
            raise ValueError(f"config has unknown field(s): {', '.join(sorted(unknown))}")

        noise_obj = data["noise"]
        if not isinstance(noise_obj, dict):
            raise ValueError("field 'noise' must be an object")
        if "kind" not in noise_obj:
            raise ValueError("field 'noise.kind' is missing")
        kind_name = noise_obj["kind"]
        if kind_name not in _KIND_NAMES:
            raise ValueError(
                f"field 'noise.kind' must be one of {sorted(_KIND_NAMES)}, "
                f"got {kind_name!r}"
            )
        strength_keys = sorted(set(noise_obj) - {"kind"})
        if strength_keys == ["q"]:
            noise = NoiseChannel(_KIND_NAMES[kind_name], q=float(noise_obj["q"]))
        elif strength_keys == ["gamma"]:
            noise = NoiseChannel(_KIND_NAMES[kind_name], gamma=float(noise_obj["gamma"]))
        else:
            raise ValueError(
                "field 'noise' must hold 'kind' plus exactly one of 'q' or "
                f"'gamma', got keys {sorted(noise_obj)}"
            )

        model_name = data["laser_phase_model"]
        if model_name not in _PHASE_MODEL_NAMES:
            raise ValueError(
                "field 'laser_phase_model' must be one of "
                f"{sorted(_PHASE_MODEL_NAMES)}, got {model_name!r}"
            )
        if not isinstance(data["shot_noise"], bool):
            raise ValueError("field 'shot_noise' must be a boolean")
        for name in ("N0", "cycles", "seed"):
            if isinstance(data[name], bool) or not isinstance(data[name], int):
                raise ValueError(f"field '{name}' must be an integer")
        for name in ("phi_d", "T_c", "T_d", "f0", "c_a", "c_b"):
            if isinstance(data[name], bool) or not isinstance(data[name], (int, float)):
                raise ValueError(f"field '{name}' must be a number")

        return cls(
            phi_d=float(data["phi_d"]),
            n0=data["N0"],
            t_c=float(data["T_c"]),
            t_d=float(data["T_d"]),
            f0=float(data["f0"]),
            cycles=data["cycles"],
            noise=noise,
            c_a=float(data["c_a"]),
            c_b=float(data["c_b"]),
            laser_phase_model=_PHASE_MODEL_NAMES[model_name],
            seed=data["seed"],
            shot_noise=data["shot_noise"],
        )

    def to_dict(self) -> dict:
        noise = {"kind": self.noise.kind.value}
        if self.noise.q is not None:
            noise["q"] = self.noise.q
        else:
            noise["gamma"] = self.noise.gamma
        return {
            "phi_d": self.phi_d,
            "N0": int(self.n0),
            "T_c": self.t_c,
            "T_d": self.t_d,
            "f0": self.f0,
            "cycles": int(self.cycles),
            "noise": noise,
            "c_a": self.c_a,
            "c_b": self.c_b,
            "laser_phase_model": self.laser_phase_model.value,
            "seed": int(self.seed),
            "shot_noise": self.shot_noise,
        }


@dataclass(frozen=True)
class CycleResult:
    """One comparison cycle: laser phase, excitation fractions, survivors."""

    index: int
    theta: float
    x_a: float
    x_b: float
    n_a: int
    n_b: int
    valid: bool


def cycle_rng(seed: int, cycle_index: int) -> np.random.Generator:
    """Counter-based random stream for one cycle.

    Philox keyed through SeedSequence(entropy=seed, spawn_key=(index,))
    makes the stream a pure function of (seed, cycle_index), independent of
    execution order and thread count.
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(cycle_index,))
    return np.random.Generator(np.random.Philox(ss))


def _simulate_cycle(cfg: ComparisonConfig, q: float, i: int) -> CycleResult:
    # Stream consumption order is fixed: theta, then ensemble a (survivors,
    # excitations), then ensemble b. Changing it would change every output.
    rng = cycle_rng(cfg.seed, i)
    if cfg.laser_phase_model is LaserPhaseModel.UNIFORM_RANDOM_PER_CYCLE:
        theta = rng.uniform(0.0, TWO_PI)
    else:
        theta = TWO_PI * i / cfg.cycles

    kind = cfg.noise.kind
    xs = [0.0, 0.0]
    ns = [cfg.n0, cfg.n0]
    valid = True
    for side, (phi_off, contrast) in enumerate(
        ((0.0, cfg.c_a), (cfg.phi_d, cfg.c_b))
    ):
        # At q = 0 every channel is the identity; taking one common path
        # keeps the random streams (and so the output) of all three kinds
        # exactly equal for noiseless runs.
        if q == 0.0:
            n = cfg.n0
        elif kind is ChannelKind.ERASURE:
            n = int(rng.binomial(cfg.n0, 1.0 - q))
        else:
            n = cfg.n0
            if kind is ChannelKind.DEPOLARIZING:
                contrast = contrast * (1.0 - q)
            else:
                contrast = contrast * (1.0 - 2.0 * q)
        p = 0.5 * (1.0 + contrast * math.cos(theta + phi_off))
        p = min(1.0, max(0.0, p))
        ns[side] = n
        if not cfg.shot_noise:
            xs[side] = p
            continue
        if n == 0:
            valid = False
            xs[side] = math.nan
            continue
        xs[side] = int(rng.binomial(n, p)) / n

    return CycleResult(
        index=i, theta=theta, x_a=xs[0], x_b=xs[1], n_a=ns[0], n_b=ns[1], valid=valid
    )


def run_comparison(config: ComparisonConfig, threads: int = 1) -> list[CycleResult]:
    """Simulate every cycle of the comparison.

    Returns one CycleResult per cycle in index order. Cycles in which an
    ensemble lost every atom are flagged invalid (their excitation fraction
    is undefined) and must be excluded downstream. Output is bit-identical
    for a given config across thread counts.
    """
    q = config.noise.strength(config.t_c)
    indices = range(config.cycles)
    if threads <= 1:
        return [_simulate_cycle(config, q, i) for i in indices]
    chunk = max(1, math.ceil(config.cycles / (threads * 8)))
    blocks = [
        range(start, min(start + chunk, config.cycles))
        for start in range(0, config.cycles, chunk)
    ]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        parts = list(
            ex.map(lambda blk: [_simulate_cycle(config, q, i) for i in blk], blocks)
        )
    return [res for part in parts for res in part]


def valid_pairs(results: list[CycleResult]) -> np.ndarray:
    """(n, 2) array of excitation pairs from the valid cycles."""
    return np.array([(r.x_a, r.x_b) for r in results if r.valid], dtype=float).reshape(
        -1, 2
    )


def invalid_fraction(results: list[CycleResult]) -> float:
    if not results:
        return 0.0
    return sum(1 for r in results if not r.valid) / len(results)


def comparison_stats(results: list[CycleResult], n0: int) -> dict:
    """Summary statistics of a run: survivors, measured loss, validity."""
    n_a = np.array([r.n_a for r in results], dtype=float)
    n_b = np.array([r.n_b for r in results], dtype=float)
    mean_n = float((n_a.mean() + n_b.mean()) / 2.0)
    return {
        "cycles": len(results),
        "invalid_fraction": invalid_fraction(results),
        "mean_n_a": float(n_a.mean()),
        "mean_n_b": float(n_b.mean()),
        "mean_survival_fraction": mean_n / n0,
        "measured_loss_q": 1.0 - mean_n / n0,
    }


@dataclass(frozen=True, eq=False)
class AllanResult:
    """Overlapping Allan deviation on octave-spaced averaging times, with a
    leave-one-block-out jackknife standard error per point."""

    taus: np.ndarray
    sigmas: np.ndarray
    errors: np.ndarray
    averaging_factors: np.ndarray

    def to_dict(self) -> dict:
        return {
            "taus": [float(v) for v in self.taus],
            "sigmas": [float(v) for v in self.sigmas],
            "errors": [float(v) for v in self.errors],
            "averaging_factors": [int(v) for v in self.averaging_factors],
        }


def _overlapping_adev(y: np.ndarray, m: int) -> float:
    cs = np.concatenate([[0.0], np.cumsum(y)])
    means = (cs[m:] - cs[:-m]) / m
    d = means[m:] - means[:-m]
    return math.sqrt(0.5 * float(np.mean(d * d)))


def allan_deviation(series, cycle_time: float) -> AllanResult:
    """Overlapping Allan deviation of a fractional-frequency series.

    Averaging factors run over octaves m = 1, 2, 4, ... as long as the
    series still supports the estimate after one jackknife block of length
    m is removed (n - m >= 2m + 1); longer averaging times are omitted.
    The error bar at each m is the leave-one-block-out jackknife standard
    error with block length m. NaN entries (gap markers from failed fit
    windows) are dropped before analysis.
    """
    if cycle_time <= 0.0:
        raise ValueError("cycle_time must be positive")
    y = np.asarray(series, dtype=float).ravel()
    y = y[np.isfinite(y)]
    n = y.size
    if n < 4:
        raise ValueError(f"series must hold at least 4 finite samples, got {n}")

    taus, sigmas, errors, factors = [], [], [], []
    m = 1
    while n - m >= 2 * m + 1:
        sigmas.append(_overlapping_adev(y, m))
        taus.append(m * cycle_time)
        factors.append(m)

        blocks = n // m
        deleted = np.empty(blocks)
        for b in range(blocks):
            sub = np.delete(y, slice(b * m, (b + 1) * m))
            deleted[b] = _overlapping_adev(sub, m)
        mean = deleted.mean()
        errors.append(
            math.sqrt((blocks - 1) / blocks * float(np.sum((deleted - mean) ** 2)))
        )
        m *= 2

    return AllanResult(
        taus=np.array(taus),
        sigmas=np.array(sigmas),
        errors=np.array(errors),
        averaging_factors=np.array(factors, dtype=int),
    )


def phase_series_to_fractional_frequency(series, t_c: float, f0: float) -> np.ndarray:
    """Convert phase estimates to fractional frequency, y = phi / (2 pi T_c f0)."""
    if t_c <= 0.0 or f0 <= 0.0:
        raise ValueError("T_c and f0 must be positive")
    return np.asarray(series, dtype=float) / (TWO_PI * t_c * f0)


@dataclass(frozen=True)
class ScalingPoint:
    """One point of an instability-versus-error-rate curve."""

    q: float
    sigma: float
    sigma_err: float


def instability_vs_error_rate(
    base: ComparisonConfig,
    q_grid,
    kind: ChannelKind,
    window: int = 100,
    threads: int = 1,
) -> list[ScalingPoint]:
    """Fractional instability at the one-window averaging time versus q.

    For each q the base config is rerun (same seed, so curves for different
    q and different channels share their random numbers), the differential
    phase is extracted per window of cycles, converted to fractional
    frequency, and the tau-one-window Allan point with its jackknife error
    is reported. The differential sqrt(2) penalty is implicit: both
    ensembles carry independent projection noise.

    Raises SimulationDegeneracyError if more than 10% of cycles are invalid.
    """
    points = []
    for q in q_grid:
        q = float(q)
        if not 0.0 <= q <= 0.95:
            raise ValueError(f"q_grid entries must lie in [0, 0.95], got {q}")
        cfg = replace(base, noise=NoiseChannel(kind, q=q))
        results = run_comparison(cfg, threads=threads)
        bad = invalid_fraction(results)
        if bad > 0.10:
            raise SimulationDegeneracyError(
                f"{bad:.1%} of cycles invalid at q = {q} ({kind.value})"
            )
        pairs = valid_pairs(results)
        series = phase_series_from_cycles(pairs, window)
        y = phase_series_to_fractional_frequency(series, cfg.t_c, cfg.f0)
        res = allan_deviation(y, cycle_time=window * cfg.cycle_time)
        points.append(ScalingPoint(q=q, sigma=res.sigmas[0], sigma_err=res.errors[0]))
    return points


def fit_loglog_exponent(qs, sigmas) -> tuple[float, float, float]:
    """Free log-log regression of sigma against (1 - q).

    Fits log(sigma) = log(sigma0) + b * log(1 - q) by ordinary least
    squares and returns (b, stderr_b, sigma0). The erasure channel should
    give b near -1/2 and depolarizing near -1.
    """
    qs = np.asarray(qs, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    if qs.size != sigmas.size or qs.size < 3:
        raise ValueError("need at least 3 (q, sigma) points")
    x = np.log1p(-qs)
    z = np.log(sigmas)
    slope, intercept = np.polyfit(x, z, 1)
    resid = z - (slope * x + intercept)
    dof = qs.size - 2
    var_slope = float(np.sum(resid**2) / dof / np.sum((x - x.mean()) ** 2))
    return float(slope), math.sqrt(var_slope), float(np.exp(intercept))


def fit_fixed_form_intercept(qs, sigmas, exponent: float) -> float:
    """Best sigma0 for the fixed-shape model sigma = sigma0 * (1-q)^exponent.

    The exponent is pinned (-1/2 for erasure, -1 for depolarizing) and the
    instability at q = 0 is the only free parameter, fitted by least squares
    in log space.
    """
    qs = np.asarray(qs, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    return float(np.exp(np.mean(np.log(sigmas) - exponent * np.log1p(-qs))))


def crb_floor(
    n_atoms: int, t_c: float, tau_total: float, f0: float, differential: bool = False
) -> float:
    """Quantum-projection-noise floor on the fractional instability.

    sigma = (1 / (2 pi f0)) sqrt(1 / (N T_c tau)), times sqrt(2) for a
    differential comparison in which both ensembles fluctuate.
    """
    if n_atoms < 1 or t_c <= 0.0 or tau_total <= 0.0 or f0 <= 0.0:
        raise ValueError("all floor arguments must be positive")
    value = math.sqrt(1.0 / (n_atoms * t_c * tau_total)) / (TWO_PI * f0)
    if differential:
        value *= math.sqrt(2.0)
    return value


@dataclass(frozen=True)
class OptimizationResult:
    """Optimal interrogation time and the instability there (units common to
    both channels, so ratios are meaningful); gain is filled when two
    channels are being compared."""

    t_c_star: float
    sigma_star: float
    gain: float | None = None


def _golden_section_min(fn, lo: float, hi: float, tol: float) -> float:
    """Golden-section minimum of a unimodal function, plus one parabolic
    polish step.

    The bracket is narrowed to `tol`, but near a smooth minimum the
    function is flat to within rounding over a width of order sqrt(eps),
    so the bracket alone cannot locate the argmin better than ~1e-8. A
    single parabola fitted through three points spaced well outside that
    plateau recovers the argmin to ~1e-11.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    x0 = 0.5 * (a + b)

    h = 1e-5 * max(1.0, abs(x0))
    f0, fp, fm = fn(x0), fn(x0 + h), fn(x0 - h)
    denom = fp - 2.0 * f0 + fm
    if denom > 0.0:
        shift = 0.5 * h * (fm - fp) / denom
        if abs(shift) <= 2.0 * h:
            x0 = min(max(x0 + shift, lo), hi)
    return x0


def _instability_model(t_c: float, t_d: float, gamma_d: float, kind: ChannelKind) -> float:
    # sigma(T_c) ~ sqrt(T_c + T_d) / (T_c sqrt(F)) with F = (1-q)^2 for the
    # contrast-decay channels and F = 1-q for erasure, q = 1 - exp(-gamma T).
    if kind is ChannelKind.ERASURE:
        penalty = math.exp(0.5 * gamma_d * t_c)
    else:
        penalty = math.exp(gamma_d * t_c)
    return penalty * math.sqrt(t_c + t_d) / t_c


def optimize_interrogation(
    gamma_d: float, t_d: float, kind: ChannelKind
) -> OptimizationResult:
    """Interrogation time minimizing the modeled instability.

    The model is sigma(T_c) proportional to sqrt(T_c + T_d) / (T_c sqrt(F))
    with q(T_c) = 1 - exp(-gamma_d T_c) and F = (1-q)^2 for the
    contrast-decay channels (depolarizing/dephasing) or F = 1-q for
    erasure. Minimized by golden-section search on log T_c over
    [1e-3 / gamma_d, 1e3 / gamma_d] to relative tolerance 1e-10. With no
    dead time the optima are 1/(2 gamma_d) and 1/gamma_d.
    """
    if gamma_d <= 0.0:
        raise ValueError("gamma_d must be positive")
    if t_d < 0.0:
        raise ValueError("t_d must be non-negative")
    lo = math.log(1e-3 / gamma_d)
    hi = math.log(1e3 / gamma_d)
    u_star = _golden_section_min(
        lambda u: _instability_model(math.exp(u), t_d, gamma_d, kind), lo, hi, 1e-10
    )
    t_star = math.exp(u_star)
    return OptimizationResult(
        t_c_star=t_star, sigma_star=_instability_model(t_star, t_d, gamma_d, kind)
    )


@dataclass(frozen=True)
class GainPoint:
    """Erasure-conversion gain at one dead time: ratio of the re-optimized
    depolarizing instability to the re-optimized erasure instability."""

    t_d: float
    t_c_star_depolarizing: float
    t_c_star_erasure: float
    gain: float


def erasure_conversion_gain(gamma_d: float, t_d: float) -> GainPoint:
    """Optimize both channels at one dead time and form the gain ratio."""
    depol = optimize_interrogation(gamma_d, t_d, ChannelKind.DEPOLARIZING)
    erasure = optimize_interrogation(gamma_d, t_d, ChannelKind.ERASURE)
    return GainPoint(
        t_d=t_d,
        t_c_star_depolarizing=depol.t_c_star,
        t_c_star_erasure=erasure.t_c_star,
        gain=depol.sigma_star / erasure.sigma_star,
    )


def erasure_conversion_gain_curve(gamma_d: float, t_d_grid) -> list[GainPoint]:
    """Gain as a function of dead time; sqrt(2) at T_d = 0, approaching 2
    for T_d much longer than 1/gamma_d, monotone non-decreasing between."""
    return [erasure_conversion_gain(gamma_d, float(t_d)) for t_d in t_d_grid]
