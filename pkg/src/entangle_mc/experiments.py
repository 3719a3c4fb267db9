"""Monte Carlo estimators for entanglement changes under two-qubit gates.

Work is cut into fixed-size blocks. Block ``i`` of an ensemble always draws
from ``RngStream(seed, stream_id=i, channel=<ensemble tag>)``, so the
samples do not depend on how blocks are spread over worker processes.
Every block returns a dict of accumulators; :func:`merge_parts` folds them
in block order, which makes integer counts *and* floating sums identical
for any number of shards.
"""

import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .accumulators import (
    Axis,
    ConditionalCurve,
    Histogram,
    Scalar,
    ScalarStat,
    Tally,
    delta_axis,
    entanglement_axis,
)
from .errors import ConfigError, InvariantViolation
from .gates import Gate, parse_gate
from .measures import eof_from_concurrence
from .sampling import (
    DEFAULT_MAX_ATTEMPTS,
    Band,
    RngStream,
    parse_band,
    sample_batch,
    sample_conditioned_batch,
)

BLOCK_SIZE = 8192
# Conditioned runs spend the rejection budget per block; smaller blocks keep
# narrow bands (acceptance below 0.1%) well inside the default budget.
CONDITIONED_BLOCK_SIZE = 2048
ENSEMBLES = ("all", "pure")
FIGURES = ("fig1a", "fig1b", "fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6")


def _channel(tag):
    return zlib.crc32(tag.encode())


def _as_gate(g):
    return g if isinstance(g, Gate) else parse_gate(g)


def _as_band(b):
    if b is None or isinstance(b, Band):
        return b
    return parse_band(b)


def _check_ensemble(ensemble):
    if ensemble not in ENSEMBLES:
        raise ConfigError("ensemble", f"unknown ensemble {ensemble!r} (expected pure or all)")


# -- block engine ------------------------------------------------------------


def plan_blocks(samples, block_size=BLOCK_SIZE):
    """``[(block_index, count), ...]`` covering ``samples`` draws."""
    if samples < 0:
        raise ConfigError("samples", "must be non-negative")
    return [(i, min(block_size, samples - lo)) for i, lo in enumerate(range(0, samples, block_size))]


def run_shard(task, samples, block_size=BLOCK_SIZE, shard=0, shards=1):
    """Run the blocks owned by ``shard`` (round robin); returns ``[(i, part)]``."""
    blocks = plan_blocks(samples, block_size)[shard::shards]
    return [(i, task(i, n)) for i, n in blocks]


def merge_parts(parts, empty=None):
    """Fold per-block accumulator dicts in block order."""
    result = dict(empty or {})
    for _, part in sorted(parts, key=lambda p: p[0]):
        for key, acc in part.items():
            result[key] = result[key].merge(acc) if key in result else acc
    return result


def map_reduce(task, samples, block_size=BLOCK_SIZE, workers=1):
    """Evaluate ``task`` over all blocks, optionally in worker processes."""
    blocks = plan_blocks(samples, block_size)
    workers = max(1, min(workers, len(blocks)))
    if workers == 1:
        parts = run_shard(task, samples, block_size)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(run_shard, task, samples, block_size, k, workers) for k in range(workers)
            ]
            parts = [p for f in futures for p in f.result()]
    return merge_parts(parts, task.empty())


def _check_unit(values, what):
    v = np.asarray(values)
    if v.size and (not np.all(np.isfinite(v)) or v.min() < 0.0 or v.max() > 1.0):
        raise InvariantViolation(f"{what} outside [0, 1]")


@dataclass
class SurveyTask:
    """One block of: draw states, apply each gate, accumulate E0 / EF / Delta E.

    Accumulator keys: ``hist_E0``, ``mean_E0``, ``attempts`` and, per gate
    slug ``g``: ``hist_EF/g``, ``mean_EF/g``, ``curve_EF_vs_E0/g``,
    ``hist_dE/g``, ``mean_dE/g``, ``curve_E0_vs_dE/g``.
    """

    ensemble: str
    gates: tuple
    seed: int
    band: Band = None
    e_axis: Axis = field(default_factory=entanglement_axis)
    d_axis: Axis = field(default_factory=delta_axis)
    max_attempts: int = DEFAULT_MAX_ATTEMPTS

    @property
    def tag(self):
        return self.ensemble if self.band is None else f"{self.ensemble}|{self.band}"

    def empty(self):
        out = {
            "hist_E0": Histogram.empty(self.e_axis),
            "mean_E0": ScalarStat(),
            "attempts": Tally(),
        }
        for g in self.gates:
            s = g.slug
            out[f"hist_EF/{s}"] = Histogram.empty(self.e_axis)
            out[f"mean_EF/{s}"] = ScalarStat()
            out[f"curve_EF_vs_E0/{s}"] = ConditionalCurve.empty(self.e_axis)
            out[f"hist_dE/{s}"] = Histogram.empty(self.d_axis)
            out[f"mean_dE/{s}"] = ScalarStat()
            out[f"curve_E0_vs_dE/{s}"] = ConditionalCurve.empty(self.d_axis)
        return out

    def draw(self, block, count):
        rng = RngStream(self.seed, block, _channel(self.tag)).generator()
        if self.band is None:
            return sample_batch(rng, self.ensemble, count), count
        return sample_conditioned_batch(rng, self.ensemble, self.band, count, self.max_attempts)

    def __call__(self, block, count):
        batch, attempts = self.draw(block, count)
        e0 = eof_from_concurrence(batch.concurrence())
        _check_unit(e0, "initial entanglement")
        out = {
            "hist_E0": Histogram.from_values(self.e_axis, e0),
            "mean_E0": ScalarStat.from_values(e0),
            "attempts": Tally(attempts),
        }
        for g in self.gates:
            s = g.slug
            ef = e0 if g.is_identity else eof_from_concurrence(batch.concurrence(g))
            _check_unit(ef, "final entanglement")
            de = ef - e0
            out[f"hist_EF/{s}"] = Histogram.from_values(self.e_axis, ef)
            out[f"mean_EF/{s}"] = ScalarStat.from_values(ef)
            out[f"curve_EF_vs_E0/{s}"] = ConditionalCurve.from_values(self.e_axis, e0, ef)
            out[f"hist_dE/{s}"] = Histogram.from_values(self.d_axis, de)
            out[f"mean_dE/{s}"] = ScalarStat.from_values(de)
            out[f"curve_E0_vs_dE/{s}"] = ConditionalCurve.from_values(self.d_axis, de, e0)
        return out


@dataclass
class PairTask:
    """Entanglement difference between two independently drawn states."""

    ensemble: str
    seed: int
    d_axis: Axis = field(default_factory=delta_axis)

    def empty(self):
        return {"hist_dE": Histogram.empty(self.d_axis), "mean_dE": ScalarStat()}

    def __call__(self, block, count):
        rng = RngStream(self.seed, block, _channel(f"pair|{self.ensemble}")).generator()
        first = eof_from_concurrence(sample_batch(rng, self.ensemble, count).concurrence())
        second = eof_from_concurrence(sample_batch(rng, self.ensemble, count).concurrence())
        de = first - second
        return {
            "hist_dE": Histogram.from_values(self.d_axis, de),
            "mean_dE": ScalarStat.from_values(de),
        }


def survey(ensemble, gates, samples, seed, band=None, e_axis=None, d_axis=None,
           block_size=BLOCK_SIZE, workers=1, max_attempts=DEFAULT_MAX_ATTEMPTS):
    """Run :class:`SurveyTask` over ``samples`` (accepted) states."""
    _check_ensemble(ensemble)
    task = SurveyTask(
        ensemble,
        tuple(_as_gate(g) for g in gates),
        seed,
        _as_band(band),
        e_axis or entanglement_axis(),
        d_axis or delta_axis(),
        max_attempts,
    )
    return map_reduce(task, samples, block_size, workers)


# -- estimators ----------------------------------------------------------------


def entanglement_histogram(ensemble, samples, seed, axis=None, block_size=BLOCK_SIZE, workers=1):
    """P(E) over the ensemble; returns ``(Histogram, ScalarStat of E)``."""
    acc = survey(ensemble, (), samples, seed, e_axis=axis, block_size=block_size, workers=workers)
    return acc["hist_E0"], acc["mean_E0"]


@dataclass
class SeparableResult:
    histogram: Histogram
    mean: ScalarStat
    accepted: int
    attempts: int

    @property
    def acceptance(self):
        return self.accepted / self.attempts if self.attempts else math.nan


def gate_from_separable(gate, samples, seed, axis=None, block_size=BLOCK_SIZE, workers=1,
                        max_attempts=DEFAULT_MAX_ATTEMPTS):
    """P(E_F) for states of the full ensemble with zero initial entanglement."""
    gate = _as_gate(gate)
    acc = survey("all", (gate,), samples, seed, band=Band.separable(), e_axis=axis,
                 block_size=block_size, workers=workers, max_attempts=max_attempts)
    s = gate.slug
    return SeparableResult(acc[f"hist_EF/{s}"], acc[f"mean_EF/{s}"], acc["hist_E0"].total,
                           acc["attempts"].value)


def mean_final_vs_initial(gates, ensemble, samples, seed, axis=None, block_size=BLOCK_SIZE,
                          workers=1):
    """``<E_F>`` binned by ``E0``, one curve per gate name."""
    gates = [_as_gate(g) for g in gates]
    acc = survey(ensemble, gates, samples, seed, e_axis=axis, block_size=block_size,
                 workers=workers)
    return {g.name: acc[f"curve_EF_vs_E0/{g.slug}"] for g in gates}


def delta_e_distribution(gates, ensemble, samples, seed, axis=None, block_size=BLOCK_SIZE,
                         workers=1, reference=True):
    """P(Delta E) per gate plus the random-pair reference under key ``"random_pair"``.

    Returns ``(histograms, stats)`` where ``stats`` holds ScalarStat of Delta E.
    """
    gates = [_as_gate(g) for g in gates]
    axis = axis or delta_axis()
    acc = survey(ensemble, gates, samples, seed, d_axis=axis, block_size=block_size,
                 workers=workers)
    hists = {g.name: acc[f"hist_dE/{g.slug}"] for g in gates}
    stats = {g.name: acc[f"mean_dE/{g.slug}"] for g in gates}
    if reference:
        ref = map_reduce(PairTask(ensemble, seed, axis), samples, block_size, workers)
        hists["random_pair"] = ref["hist_dE"]
        stats["random_pair"] = ref["mean_dE"]
    return hists, stats


def initial_stats_vs_delta(gates, ensemble, samples, seed, axis=None, block_size=BLOCK_SIZE,
                           workers=1):
    """Mean and variance of ``E0`` binned by Delta E, one curve per gate name."""
    gates = [_as_gate(g) for g in gates]
    acc = survey(ensemble, gates, samples, seed, d_axis=axis, block_size=block_size,
                 workers=workers)
    return {g.name: acc[f"curve_E0_vs_dE/{g.slug}"] for g in gates}


def final_dist_fixed_initial(gates, centers, samples, seed, half_width=0.005, ensemble="all",
                             axis=None, block_size=BLOCK_SIZE, workers=1,
                             max_attempts=DEFAULT_MAX_ATTEMPTS):
    """P(E_F) for initial states in ``E0 = center +- half_width``.

    Returns ``{(gate name, center): Histogram}``.
    """
    gates = [_as_gate(g) for g in gates]
    out = {}
    for c in centers:
        band = Band.around("E", c, half_width)
        acc = survey(ensemble, gates, samples, seed, band=band, e_axis=axis,
                     block_size=block_size, workers=workers, max_attempts=max_attempts)
        for g in gates:
            out[(g.name, c)] = acc[f"hist_EF/{g.slug}"]
    return out


def initial_stats_vs_delta_at_fixed_R(centers, samples, seed, half_width=0.01, gate="cnot",
                                      axis=None, block_size=BLOCK_SIZE, workers=1,
                                      max_attempts=DEFAULT_MAX_ATTEMPTS):
    """``E0`` mean/variance vs Delta E for states with participation ratio near each center."""
    gate = _as_gate(gate)
    axis = axis or delta_axis(41)
    out = {}
    for c in centers:
        band = Band.around("R", c, half_width)
        acc = survey("all", (gate,), samples, seed, band=band, d_axis=axis,
                     block_size=block_size, workers=workers, max_attempts=max_attempts)
        out[c] = acc[f"curve_E0_vs_dE/{gate.slug}"]
    return out


def crossing_point(first, second):
    """First ``x`` where ``first.mean - second.mean`` changes sign.

    Empty bins are skipped; the crossing is linearly interpolated between the
    two bin centres that bracket the sign change. ``None`` if no crossing.
    """
    d = first.mean - second.mean
    x = first.bin_centers
    idx = np.flatnonzero(~np.isnan(d))
    for i, j in zip(idx[:-1], idx[1:]):
        if d[i] == 0.0:
            return float(x[i])
        if np.sign(d[i]) != np.sign(d[j]):
            return float(x[i] + (x[j] - x[i]) * d[i] / (d[i] - d[j]))
    return None


def is_local_max(values, i):
    """``values[i]`` strictly exceeds its nearest non-NaN neighbours on both sides."""
    v = np.asarray(values)
    left = [k for k in range(i - 1, -1, -1) if not np.isnan(v[k])]
    right = [k for k in range(i + 1, len(v)) if not np.isnan(v[k])]
    if np.isnan(v[i]) or not left or not right:
        return False
    return bool(v[i] > v[left[0]] and v[i] > v[right[0]])


# -- figure configuration ------------------------------------------------------

_FIGURE_DEFAULTS = {
    "fig1a": dict(ensembles=("all", "pure"), samples=10**6),
    "fig1b": dict(gates=("cnot", "theta:pi/4"), samples=10**5, bands=("E=0",)),
    "fig2": dict(
        gates=("cnot", "theta:pi/3", "theta:pi/4", "theta:pi/6", "theta:0"),
        ensembles=("all", "pure"),
        samples=10**6,
    ),
    "fig3a": dict(gates=("cnot", "theta:pi/4"), ensembles=("pure",), samples=10**6),
    "fig3b": dict(gates=("cnot", "theta:pi/4"), ensembles=("all",), samples=10**6),
    "fig4": dict(gates=("cnot", "theta:pi/4"), ensembles=("pure", "all"), samples=10**6),
    "fig5": dict(
        gates=("cnot", "theta:pi/4"),
        ensembles=("all",),
        samples=2 * 10**4,
        bands=tuple(f"E in [{c - 0.005:.3f},{c + 0.005:.3f}]" for c in (0.1, 0.2, 0.3, 0.4)),
    ),
    "fig6": dict(
        gates=("cnot",),
        samples=10**5,
        bands=("R in [1.39,1.41]", "R in [2.19,2.21]"),
        bins=41,
    ),
}

# figures whose primary axis is Delta E
_DELTA_FIGURES = ("fig3a", "fig3b", "fig4", "fig6")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines a figure run. ``None`` means figure default."""

    figure: str
    gates: tuple = None
    ensembles: tuple = None
    samples: int = None
    seed: int = 0
    bins: int = None
    bands: tuple = None
    block_size: int = None
    workers: int = 1
    max_attempts: int = DEFAULT_MAX_ATTEMPTS

    def resolved(self):
        """Fill figure defaults and validate; raises :class:`ConfigError`."""
        if self.figure not in FIGURES:
            raise ConfigError("figure", f"unknown figure {self.figure!r}; choose from {', '.join(FIGURES)}")
        d = _FIGURE_DEFAULTS[self.figure]
        cfg = replace(
            self,
            gates=tuple(self.gates) if self.gates is not None else d.get("gates", ()),
            ensembles=tuple(self.ensembles) if self.ensembles is not None else d.get("ensembles", ("all",)),
            samples=self.samples if self.samples is not None else d["samples"],
            bins=self.bins if self.bins is not None else d.get("bins", 101 if self.figure in _DELTA_FIGURES else 100),
            bands=tuple(self.bands) if self.bands is not None else d.get("bands", ()),
        )
        if cfg.block_size is None:
            cfg = replace(cfg, block_size=CONDITIONED_BLOCK_SIZE if cfg.bands else BLOCK_SIZE)
        if not isinstance(cfg.samples, int) or cfg.samples < 1:
            raise ConfigError("samples", f"sample count must be >= 1, got {cfg.samples!r}")
        if not isinstance(cfg.bins, int) or cfg.bins < (3 if cfg.figure in _DELTA_FIGURES else 1):
            raise ConfigError("bins", f"invalid bin count {cfg.bins!r}")
        if not isinstance(cfg.block_size, int) or cfg.block_size < 1:
            raise ConfigError("block_size", "must be >= 1")
        if cfg.workers < 1:
            raise ConfigError("streams", "must be >= 1")
        if cfg.max_attempts < 1:
            raise ConfigError("max_attempts", "must be >= 1")
        if cfg.seed < 0:
            raise ConfigError("seed", "must be non-negative")
        for e in cfg.ensembles:
            _check_ensemble(e)
        for g in cfg.gates:
            _as_gate(g)
        bands = [_as_band(b) for b in cfg.bands]
        if cfg.figure == "fig1b" and any(not b.exact_zero for b in bands):
            raise ConfigError("band", "fig1b conditions on E=0 only")
        if cfg.figure == "fig5" and any(b.quantity != "E" or b.exact_zero for b in bands):
            raise ConfigError("band", "fig5 needs bands of the form 'E in [a,b]'")
        if cfg.figure == "fig6" and any(b.quantity != "R" for b in bands):
            raise ConfigError("band", "fig6 needs bands of the form 'R in [a,b]'")
        if cfg.figure in ("fig1b", "fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6") and not cfg.gates:
            raise ConfigError("gate", f"{cfg.figure} needs at least one gate")
        return cfg

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Series:
    """How one histogram or curve appears in the figure analogue.

    ``panels`` lists ``(column, title, xlabel, ylabel)`` for each panel the
    series is drawn in; ``column`` names the CSV column used as y.
    """

    label: str
    panels: tuple


@dataclass
class FigureResult:
    figure: str
    config: ExperimentConfig
    histograms: dict = field(default_factory=dict)
    curves: dict = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)


def _fmt(x):
    return f"{x:g}"


def ensemble_label(ensemble):
    return {"all": "all states", "pure": "pure states"}[ensemble]


def gate_label(gate):
    if gate == "random_pair":
        return "random reference"
    gate = _as_gate(gate)
    if gate.kind == "cnot":
        return "CNOT"
    if gate.kind == "theta":
        return "U_theta, theta = " + gate.name.split(":", 1)[1].replace("pi", "\u03c0")
    return gate.name


def _run_fig1a(cfg, res, kw):
    axis = entanglement_axis(cfg.bins)
    for ens in cfg.ensembles:
        hist, stat = entanglement_histogram(ens, cfg.samples, cfg.seed, axis, **kw)
        res.histograms[f"hist_E_{ens}"] = hist
        res.series[f"hist_E_{ens}"] = Series(ensemble_label(ens), (("density", "P(E)", "E", "P(E)"),))
        res.scalars[f"mean_E_{ens}"] = Scalar.of(stat)


def _run_fig1b(cfg, res, kw):
    axis = entanglement_axis(cfg.bins)
    gates = [_as_gate(g) for g in cfg.gates]
    acc = survey("all", gates, cfg.samples, cfg.seed, band=Band.separable(), e_axis=axis,
                 max_attempts=cfg.max_attempts, **kw)
    for g in gates:
        res.histograms[f"hist_EF_from_E0_zero_{g.slug}"] = acc[f"hist_EF/{g.slug}"]
        res.series[f"hist_EF_from_E0_zero_{g.slug}"] = Series(
            gate_label(g), (("density", "initial E = 0", "E_F", "P(E_F)"),)
        )
        res.scalars[f"mean_EF_from_E0_zero_{g.slug}"] = Scalar.of(acc[f"mean_EF/{g.slug}"])
    attempts = acc["attempts"].value
    res.scalars["separable_fraction"] = Scalar(acc["hist_E0"].total / attempts, math.nan, attempts)
    hist, stat = entanglement_histogram("all", cfg.samples, cfg.seed, axis, **kw)
    res.histograms["hist_E_all"] = hist
    res.series["hist_E_all"] = Series("all states", (("density", "unconditioned", "E", "P(E)"),))
    res.scalars["mean_E_all"] = Scalar.of(stat)


def _run_fig2(cfg, res, kw):
    axis = entanglement_axis(cfg.bins)
    gates = [_as_gate(g) for g in cfg.gates]
    for ens in cfg.ensembles:
        curves = mean_final_vs_initial(gates, ens, cfg.samples, cfg.seed, axis, **kw)
        for g in gates:
            c = curves[g.name]
            res.curves[f"curve_EF_vs_E0_{ens}_{g.slug}"] = c
            res.series[f"curve_EF_vs_E0_{ens}_{g.slug}"] = Series(
                gate_label(g), (("mean", ensemble_label(ens), "E_0", "<E_F>"),)
            )
            res.scalars[f"top_bin_EF_{ens}_{g.slug}"] = Scalar(c.mean[-1], math.nan, int(c.count[-1]))
        cn = next((g for g in gates if g.kind == "cnot"), None)
        p4 = next((g for g in gates if g.kind == "theta" and math.isclose(g.theta, math.pi / 4)), None)
        if cn is not None and p4 is not None:
            x = crossing_point(curves[cn.name], curves[p4.name])
            res.scalars[f"crossing_E0_{ens}_cnot_vs_theta_pi_4"] = Scalar(
                math.nan if x is None else x, math.nan, cfg.samples
            )


def _run_fig3(cfg, res, kw):
    axis = delta_axis(cfg.bins)
    for ens in cfg.ensembles:
        hists, stats = delta_e_distribution(cfg.gates, ens, cfg.samples, cfg.seed, axis, **kw)
        for name, h in hists.items():
            slug = name if name == "random_pair" else _as_gate(name).slug
            res.histograms[f"hist_dE_{ens}_{slug}"] = h
            res.series[f"hist_dE_{ens}_{slug}"] = Series(
                gate_label(name), (("density", ensemble_label(ens), "Delta E", "P(Delta E)"),)
            )
            res.scalars[f"zero_bin_mass_{ens}_{slug}"] = Scalar(h.mass_at(0.0), math.nan, h.total)
            res.scalars[f"mean_dE_{ens}_{slug}"] = Scalar.of(stats[name])
        ref = stats.get("random_pair")
        if ref is not None:
            res.scalars[f"skewness_dE_{ens}_random_pair"] = Scalar(ref.skewness, math.nan, ref.n)


def _run_fig4(cfg, res, kw):
    axis = delta_axis(cfg.bins)
    for ens in cfg.ensembles:
        curves = initial_stats_vs_delta(cfg.gates, ens, cfg.samples, cfg.seed, axis, **kw)
        for name, c in curves.items():
            key = f"curve_E0_vs_dE_{ens}_{_as_gate(name).slug}"
            res.curves[key] = c
            title = ensemble_label(ens)
            res.series[key] = Series(gate_label(name), (
                ("mean", title, "Delta E", "<E_0>"),
                ("variance", title, "Delta E", "<E_0^2> - <E_0>^2"),
            ))


def _run_fig5(cfg, res, kw):
    axis = entanglement_axis(cfg.bins)
    gates = [_as_gate(g) for g in cfg.gates]
    for ens in cfg.ensembles:
        for band in (_as_band(b) for b in cfg.bands):
            acc = survey(ens, gates, cfg.samples, cfg.seed, band=band, e_axis=axis,
                         max_attempts=cfg.max_attempts, **kw)
            label = f"E0_{_fmt(band.center)}"
            for g in gates:
                res.histograms[f"hist_EF_{ens}_{g.slug}_{label}"] = acc[f"hist_EF/{g.slug}"]
                res.series[f"hist_EF_{ens}_{g.slug}_{label}"] = Series(
                    f"E_0 = {_fmt(band.center)}",
                    (("density", f"{gate_label(g)}, {ensemble_label(ens)}", "E_F", "P(E_F)"),),
                )
                res.scalars[f"mean_EF_{ens}_{g.slug}_{label}"] = Scalar.of(acc[f"mean_EF/{g.slug}"])
            attempts = acc["attempts"].value
            res.scalars[f"acceptance_{ens}_{label}"] = Scalar(cfg.samples / attempts, math.nan, attempts)


def _run_fig6(cfg, res, kw):
    axis = delta_axis(cfg.bins)
    gates = [_as_gate(g) for g in cfg.gates]
    zero = axis.bin_of(0.0)
    for band in (_as_band(b) for b in cfg.bands):
        acc = survey("all", gates, cfg.samples, cfg.seed, band=band, d_axis=axis,
                     max_attempts=cfg.max_attempts, **kw)
        label = f"R_{_fmt(band.center)}"
        for g in gates:
            c = acc[f"curve_E0_vs_dE/{g.slug}"]
            res.curves[f"curve_E0_vs_dE_{label}_{g.slug}"] = c
            res.series[f"curve_E0_vs_dE_{label}_{g.slug}"] = Series(f"R = {_fmt(band.center)}", (
                ("mean", gate_label(g), "Delta E", "<E_0>"),
                ("variance", gate_label(g), "Delta E", "<E_0^2> - <E_0>^2"),
            ))
            res.scalars[f"max_mean_E0_{label}_{g.slug}"] = Scalar(float(np.nanmax(c.mean)), math.nan, int(c.count.sum()))
            res.scalars[f"origin_variance_is_local_max_{label}_{g.slug}"] = Scalar(
                float(is_local_max(c.variance, zero)), math.nan, int(c.count[zero])
            )
        attempts = acc["attempts"].value
        res.scalars[f"acceptance_{label}"] = Scalar(cfg.samples / attempts, math.nan, attempts)


_RUNNERS = {
    "fig1a": _run_fig1a,
    "fig1b": _run_fig1b,
    "fig2": _run_fig2,
    "fig3a": _run_fig3,
    "fig3b": _run_fig3,
    "fig4": _run_fig4,
    "fig5": _run_fig5,
    "fig6": _run_fig6,
}


def run_figure(config):
    """Compute every histogram, curve and summary scalar for one figure."""
    cfg = config.resolved()
    res = FigureResult(cfg.figure, cfg)
    kw = dict(block_size=cfg.block_size, workers=cfg.workers)
    _RUNNERS[cfg.figure](cfg, res, kw)
    return res
