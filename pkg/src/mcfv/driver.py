"""Monte Carlo orchestration: per-sample runs, streaming moments, reduction.

Reproducibility contract: the output is a pure function of the configuration
and master seed, independent of the worker count. Per-sample generators are
counter-based (Philox keyed by (master_seed, sample_index)), samples are
accumulated in fixed chunks and the chunk accumulators are merged in a fixed
pairwise tree, so no floating-point operation order depends on scheduling.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .field import FieldParams, FieldSample, mu_from_zeta, sample_field
from .grid import GridFunction, GridSpec, State
from .ou import STEP_TOL, OUParams, choose_micro_step, simulate_path
from .profiles import get_profile
from .solver import LIMITERS, SchemeConfig

#: samples per reduction leaf; fixed so the merge tree ignores the worker count
CHUNK_SIZE = 64

#: per-sample cap on transport steps
MAX_STEPS = 1_000_000_000


class SampleFailure(RuntimeError):
    """A single realisation failed; carries the sample index."""

    def __init__(self, sample_index: int, message: str):
        super().__init__(f"sample {sample_index}: {message}")
        self.sample_index = sample_index


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved description of one Monte Carlo study."""

    problem: str  # "time" | "space"
    samples: int
    seed: int
    cells: int
    t_final: float
    order: int = 2
    limiter: str = "minmod"
    courant: float = 0.45
    profile: str = "sine-jump"
    # time problem
    ou: OUParams | None = None
    micro_step: float | None = None  # override for the path resolution
    # space problem
    field_sigma: float = 10.0
    field_q: int = 5
    field_cutoff: float = 50.0
    zeta: float = 0.0
    # 1/(M-1) instead of 1/M in the variance estimate
    unbiased_variance: bool = False

    def __post_init__(self):
        if self.problem not in ("time", "space"):
            raise ValueError(f"problem must be 'time' or 'space', got {self.problem!r}")
        if self.samples < 1:
            raise ValueError(f"need at least one sample, got {self.samples}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")
        if not self.t_final > 0.0:
            raise ValueError(f"t_final must be positive, got {self.t_final}")
        if self.problem == "time" and self.ou is None:
            raise ValueError("time problem needs OU coefficient parameters")
        # delegate range checks
        SchemeConfig(self.order, self.limiter, self.courant)
        get_profile(self.profile)

    @property
    def scheme(self) -> SchemeConfig:
        return SchemeConfig(self.order, self.limiter, self.courant)

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.cells)

    def field_params(self) -> FieldParams:
        base = FieldParams(0.0, self.field_sigma, self.field_q,
                           self.field_cutoff, self.cells)
        return replace(base, mu=mu_from_zeta(self.zeta, base))


@dataclass
class MomentAccumulator:
    """Streaming per-cell mean and sum of squared deviations (Welford)."""

    count: int
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def empty(cls, ncells: int) -> "MomentAccumulator":
        return cls(0, np.zeros(ncells), np.zeros(ncells))

    def add(self, values: np.ndarray) -> None:
        if values.shape != self.mean.shape:
            raise ValueError(
                f"dimension mismatch: accumulator {self.mean.shape}, "
                f"sample {values.shape}"
            )
        self.count += 1
        delta = values - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (values - self.mean)

    def variance(self, unbiased: bool = False) -> np.ndarray:
        if self.count == 0:
            raise ValueError("no samples accumulated")
        div = self.count - 1 if unbiased else self.count
        if div == 0:
            return np.zeros_like(self.m2)
        return self.m2 / div


def accumulate(acc: MomentAccumulator, s: State) -> MomentAccumulator:
    """Fold one realisation into the accumulator (mutates and returns it)."""
    acc.add(s.u)
    return acc


def merge(a: MomentAccumulator, b: MomentAccumulator) -> MomentAccumulator:
    """Combine two accumulators as if their samples were concatenated."""
    if a.mean.shape != b.mean.shape:
        raise ValueError(
            f"dimension mismatch: {a.mean.shape} vs {b.mean.shape}"
        )
    if a.count == 0:
        return MomentAccumulator(b.count, b.mean.copy(), b.m2.copy())
    if b.count == 0:
        return MomentAccumulator(a.count, a.mean.copy(), a.m2.copy())
    n = a.count + b.count
    delta = b.mean - a.mean
    mean = a.mean + delta * (b.count / n)
    m2 = a.m2 + b.m2 + delta**2 * (a.count * b.count / n)
    return MomentAccumulator(n, mean, m2)


@dataclass(frozen=True)
class MomentStats:
    """Estimated moment fields plus run telemetry."""

    mean: GridFunction
    variance: GridFunction
    samples: int
    steps: int
    wall_time: float


def sample_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for one sample, derived by counter-based keying."""
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class _Workspace:
    """Reusable per-worker scratch arrays for the compiled advance loops."""

    def __init__(self, ncells: int):
        self.slopes = np.empty(ncells)
        self.tmp = np.empty(ncells)
        self.nxt = np.empty(ncells)


def _advance_status(code: int, index: int) -> int:
    if code == _kernels.STEP_CAP:
        raise SampleFailure(index, f"exceeded {MAX_STEPS} transport steps")
    if code == _kernels.STALLED:
        raise SampleFailure(index, "time step underflowed before the horizon")
    return code


def _sample_u_time(cfg: RunConfig, index: int, work: _Workspace) -> tuple[np.ndarray, int]:
    rng = sample_stream(cfg.seed, index)
    dx = cfg.grid.dx
    ds = cfg.micro_step
    if ds is None:
        ds = choose_micro_step(cfg.ou, cfg.t_final, dx)
    path = simulate_path(cfg.ou, ds, cfg.t_final, rng)
    u = get_profile(cfg.profile).cell_averages(cfg.cells)
    ps, pc = path.prefix
    steps = _kernels.advance_time_core(
        u, ps, pc, path.values, path.ds, cfg.t_final, dx, cfg.courant,
        STEP_TOL, cfg.order, LIMITERS[cfg.limiter], MAX_STEPS,
        work.slopes, work.tmp, work.nxt,
    )
    return u, _advance_status(steps, index)


def _sample_u_space(cfg: RunConfig, index: int, work: _Workspace) -> tuple[np.ndarray, int]:
    rng = sample_stream(cfg.seed, index)
    f = sample_field(cfg.field_params(), rng)
    u = get_profile(cfg.profile).cell_averages(cfg.cells)
    if f.max_abs == 0.0:
        return u, 0  # stationary realisation
    dx = cfg.grid.dx
    dt = cfg.courant * dx / f.max_abs
    steps = _kernels.advance_space_core(
        u, f.a, dt, cfg.t_final, dx, cfg.order, LIMITERS[cfg.limiter],
        MAX_STEPS, work.slopes, work.tmp, work.nxt,
    )
    return u, _advance_status(steps, index)


def _sample_u(cfg: RunConfig, index: int, work: _Workspace) -> tuple[np.ndarray, int]:
    if cfg.problem == "time":
        u, steps = _sample_u_time(cfg, index, work)
    else:
        u, steps = _sample_u_space(cfg, index, work)
    if not np.all(np.isfinite(u)):
        raise SampleFailure(index, "non-finite cell value in the final state")
    return u, steps


def run_sample_time(cfg: RunConfig, index: int) -> State:
    """Final state of one realisation of the time-dependent problem."""
    u, _ = _sample_u(replace(cfg, problem="time"), index, _Workspace(cfg.cells))
    return State(u, cfg.t_final)


def run_sample_space(cfg: RunConfig, index: int) -> State:
    """Final state of one realisation of the space-dependent problem."""
    u, _ = _sample_u(replace(cfg, problem="space"), index, _Workspace(cfg.cells))
    return State(u, cfg.t_final)


def sample_field_for(cfg: RunConfig, index: int) -> FieldSample:
    """The velocity field realisation that sample ``index`` would see."""
    return sample_field(cfg.field_params(), sample_stream(cfg.seed, index))


def _run_chunk(cfg: RunConfig, lo: int, hi: int) -> tuple[MomentAccumulator, int]:
    work = _Workspace(cfg.cells)
    acc = MomentAccumulator.empty(cfg.cells)
    steps = 0
    for index in range(lo, hi):
        u, n = _sample_u(cfg, index, work)
        acc.add(u)
        steps += n
    return acc, steps


def _run_chunk_args(args) -> tuple[MomentAccumulator, int]:
    return _run_chunk(*args)


def _reduce_pairwise(accs: list[MomentAccumulator]) -> MomentAccumulator:
    while len(accs) > 1:
        nxt = [merge(accs[i], accs[i + 1]) for i in range(0, len(accs) - 1, 2)]
        if len(accs) % 2:
            nxt.append(accs[-1])
        accs = nxt
    return accs[0]


def run(cfg: RunConfig, workers: int = 1) -> MomentStats:
    """Estimate mean and variance fields from cfg.samples realisations.

    ``workers`` only sets the process count; chunking and reduction order
    are fixed by the sample indices, so results are bitwise identical for
    any value.
    """
    t0 = time.perf_counter()
    chunks = [
        (cfg, lo, min(lo + CHUNK_SIZE, cfg.samples))
        for lo in range(0, cfg.samples, CHUNK_SIZE)
    ]
    if workers <= 1 or len(chunks) == 1:
        results = [_run_chunk(*c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk_args, chunks))
    acc = _reduce_pairwise([r[0] for r in results])
    steps = sum(r[1] for r in results)
    variance = acc.variance(unbiased=cfg.unbiased_variance)
    return MomentStats(
        mean=GridFunction(acc.mean, kind="average"),
        variance=GridFunction(variance, kind="average"),
        samples=acc.count,
        steps=steps,
        wall_time=time.perf_counter() - t0,
    )
