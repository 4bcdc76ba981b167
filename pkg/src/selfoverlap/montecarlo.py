"""Seeded sampling of i.i.d. words and the one-step coupling experiment.

Samples are generated in fixed blocks of ``BLOCK`` words.  Block ``b`` draws
from its own Philox stream keyed by ``(seed, b)``, so results depend only on
``(seed, samples, n, theta)`` and never on how blocks are spread over
worker threads.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .alphabet import Theta
from .exact_dist import overlap_of, word_mass

BLOCK = 1 << 16


@dataclass(frozen=True)
class McConfig:
    n: int
    samples: int
    seed: int
    theta: Theta
    threads: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("need at least one sample")
        if self.n < 1:
            raise ValueError("word length must be >= 1")

    def echo(self) -> dict:
        return {"n": self.n, "samples": self.samples, "seed": self.seed, "block": BLOCK, "theta": self.theta.to_json()}


@dataclass
class McResult:
    n: int
    counts: list
    samples: int
    runtime: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def pmf(self) -> list:
        return [c / self.samples for c in self.counts]

    @property
    def stderr(self) -> list:
        N = self.samples
        return [math.sqrt(p * (1 - p) / N) for p in self.pmf]

    def to_json(self) -> dict:
        return {"n": self.n, "samples": self.samples, "counts": self.counts, "pmf": self.pmf, "stderr": self.stderr, **self.extra}


def _generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def sample_letters(rng: np.random.Generator, theta: Theta, shape) -> np.ndarray:
    """Letters by inverse CDF; geometric thetas sample the untruncated law."""
    u = rng.random(shape)
    if theta.source == "geometric" and theta.tail_mass != 0:
        # P(X >= a) = r^a
        return np.floor(np.log1p(-u) / math.log(float(theta.ratio))).astype(np.int64)
    cdf = np.cumsum([float(p) for p in theta.probs])
    cdf[-1] = 1.0
    return np.searchsorted(cdf, u, side="right").astype(np.int64)


def prefix_function_rows(x: np.ndarray) -> np.ndarray:
    """Row-wise prefix function of an (N, n) letter matrix."""
    N, n = x.shape
    pi = np.zeros((N, n), dtype=np.int64)
    rows = np.arange(N)
    for t in range(1, n):
        k = pi[:, t - 1].copy()
        cur = x[:, t]
        bad = (k > 0) & (x[rows, k] != cur)
        while bad.any():
            k[bad] = pi[bad, k[bad] - 1]
            bad = (k > 0) & (x[rows, k] != cur)
        k += x[rows, k] == cur
        pi[:, t] = k
    return pi


def _block(cfg: McConfig, b: int, length: int):
    size = min(BLOCK, cfg.samples - b * BLOCK)
    x = sample_letters(_generator(cfg.seed, b), cfg.theta, (size, length))
    return prefix_function_rows(x)


def _run_blocks(cfg: McConfig, length: int, reduce):
    nblocks = -(-cfg.samples // BLOCK)
    if cfg.threads > 1 and nblocks > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            parts = list(ex.map(lambda b: reduce(_block(cfg, b, length)), range(nblocks)))
    else:
        parts = [reduce(_block(cfg, b, length)) for b in range(nblocks)]
    return parts  # in block order


def sample_distribution(cfg: McConfig) -> McResult:
    """Empirical law of S_n from ``cfg.samples`` independent words."""
    t0 = time.perf_counter()
    n = cfg.n
    parts = _run_blocks(cfg, n, lambda pi: np.bincount(pi[:, -1], minlength=n))
    counts = np.zeros(n, dtype=np.int64)
    for p in parts:
        counts += p
    return McResult(n=n, counts=[int(c) for c in counts], samples=cfg.samples, runtime=time.perf_counter() - t0)


def step_coupling_exact(n: int, theta: Theta, budget: int | None = None):
    """P(S_{n+1} = S_n + 1) with both evaluated on one word of length n+1."""
    s = theta.finite().size

    def hit(w):
        return overlap_of(n + 1, s, w) == overlap_of(n, s, w // s) + 1

    return word_mass(n + 1, theta, hit, budget=budget)


def step_coupling_sampled(cfg: McConfig) -> tuple[float, float]:
    """(frequency, standard error) of S_{n+1} = S_n + 1 over sampled words."""
    parts = _run_blocks(cfg, cfg.n + 1, lambda pi: int(np.count_nonzero(pi[:, -1] == pi[:, -2] + 1)))
    p = sum(parts) / cfg.samples
    return p, math.sqrt(p * (1 - p) / cfg.samples)


def step_coupling(n: int, theta: Theta, mode: str = "exact", cfg: McConfig | None = None, budget: int | None = None):
    if n < 1:
        raise ValueError("n must be >= 1")
    if mode == "exact":
        return step_coupling_exact(n, theta, budget)
    if mode == "sampled":
        if cfg is None:
            raise ValueError("sampled mode needs an McConfig")
        return step_coupling_sampled(McConfig(n=n, samples=cfg.samples, seed=cfg.seed, theta=theta, threads=cfg.threads))
    raise ValueError(f"unknown mode {mode!r}")
