"""Importance-sampling route for the forms, sharded and reproducible.

Samples come from a defensive Gaussian-mixture envelope: one inflated
component per term of the expanded integrand, weighted by the term's mass,
plus a broad component that keeps the importance weights bounded. Each shard
draws antithetic pairs from its own ``SeedSequence`` child; shard results are
reduced in shard order, so the answer depends only on ``(seed, shards)``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy.special import logsumexp

from ..cube import FunctionAssignment
from ..gaussian import DefinitenessError, GaussianMixture, TermCountError, product_of_pullbacks
from .forms import FormResult, _IA, corner_selector, delta_pullback_matrix, tuple_dims

ENV_WORKERS = "SBLCUBE_WORKERS"
INFLATE = 2.0
DEFENSIVE = 0.1       # mass of the broad component
MAX_COMPONENTS = 64


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(ENV_WORKERS, "1")))
    except ValueError:
        return 1


class _Integrand:
    """``prod_i F_i(L_i x)`` (picklable, so shards can run in worker processes)."""

    def __init__(self, factors):
        self.factors = [(np.asarray(L, dtype=float), F) for L, F in factors]

    def __call__(self, x):
        out = np.ones(x.shape[0])
        for L, F in self.factors:
            out *= np.atleast_1d(F(x @ L.T))
        return out


class Envelope:
    """Mixture of Gaussians ``sum_k w_k N(mu_k, C_k)`` with sampling and log-density."""

    def __init__(self, weights, means, covs):
        w = np.asarray(weights, dtype=float)
        self.weights = w / w.sum()
        self.means = np.asarray(means, dtype=float)
        self.chols = np.array([np.linalg.cholesky(C) for C in covs])
        dim = self.means.shape[1]
        self.log_norms = np.array([0.5 * dim * math.log(2 * math.pi) + float(np.log(np.diag(L)).sum())
                                   for L in self.chols])

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def log_density(self, x) -> np.ndarray:
        parts = np.empty((x.shape[0], len(self.weights)))
        for k, (mu, L) in enumerate(zip(self.means, self.chols)):
            y = np.linalg.solve(L, (x - mu).T).T
            parts[:, k] = math.log(self.weights[k]) - 0.5 * np.sum(y * y, axis=1) - self.log_norms[k]
        return logsumexp(parts, axis=1)


def _component_stats(q):
    mean, cov = q.mean_cov()
    return abs(q.integrate()), mean, cov


def envelope(factors, dim: int) -> Envelope:
    """Defensive mixture envelope for ``prod_i F_i(L_i x)`` with Gaussian-mixture ``F_i``."""
    stats = []
    try:
        terms = product_of_pullbacks([F.pullback(L) for L, F in factors if F.terms])
    except TermCountError:
        terms = []
    for q in terms:
        try:
            stats.append(_component_stats(q))
        except DefinitenessError:
            continue
    stats = [s for s in stats if s[0] > 0 and np.all(np.isfinite(s[1]))]
    if not stats:
        return Envelope([1.0], [np.zeros(dim)], [INFLATE * np.eye(dim) / (2 * math.pi)])
    stats.sort(key=lambda s: -s[0])
    stats = stats[:MAX_COMPONENTS]
    w = np.array([s[0] for s in stats])
    w /= w.sum()
    mus = np.array([s[1] for s in stats])
    covs = [INFLATE * s[2] for s in stats]
    # broad component: overall mixture moments, widened
    mu_all = w @ mus
    spread = sum(wk * (C / INFLATE + np.outer(mk - mu_all, mk - mu_all)) for wk, mk, C in zip(w, mus, covs))
    spread = 0.5 * (spread + spread.T) + 1e-12 * np.trace(spread) * np.eye(dim)
    weights = list((1 - DEFENSIVE) * w) + [DEFENSIVE]
    return Envelope(weights, list(mus) + [mu_all], covs + [4.0 * INFLATE * spread])


def _shard(args):
    integrand, env, n_pairs, seed_seq = args
    rng = np.random.default_rng(seed_seq)
    comp = rng.choice(len(env.weights), size=n_pairs, p=env.weights)
    z = rng.standard_normal((n_pairs, env.dim))
    dz = np.einsum("nij,nj->ni", env.chols[comp], z)
    mu = env.means[comp]
    xp, xm = mu + dz, mu - dz
    # x- has the same law as x+, so each half is an unbiased estimate
    pair = 0.5 * (integrand(xp) * np.exp(-env.log_density(xp)) + integrand(xm) * np.exp(-env.log_density(xm)))
    return float(pair.sum()), float((pair * pair).sum()), n_pairs


def mc_integrate(integrand, env: Envelope, samples: int, seed: int, shards: int = 8,
                 workers: int | None = None):
    """``int integrand`` by antithetic importance sampling from ``env``.

    Returns ``(estimate, std_error, evaluations)``.
    """
    pairs = max(1, samples // 2)
    per = [pairs // shards + (1 if s < pairs % shards else 0) for s in range(shards)]
    children = np.random.SeedSequence(seed).spawn(shards)
    jobs = [(integrand, env, n, c) for n, c in zip(per, children) if n > 0]
    workers = default_workers() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as ex:
            parts = list(ex.map(_shard, jobs))
    else:
        parts = [_shard(j) for j in jobs]
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    n = sum(p[2] for p in parts)
    est = s1 / n
    var = max(s2 / n - est * est, 0.0) * n / max(n - 1, 1)
    return est, math.sqrt(var / n), 2 * n


def mc_delta_form(A, tup: FunctionAssignment, samples: int = 200_000, seed: int = 0,
                  shards: int = 8, workers: int | None = None) -> FormResult:
    """Monte Carlo ``int prod_j F_j(M_j x1) dx1``."""
    m, d = tuple_dims(A, tup)
    factors = [(delta_pullback_matrix(A, j, d), F) for j, F in tup.items()]
    return _run(factors, m * d, tup, samples, seed, shards, workers)


def mc_mixture_form(A, tup: FunctionAssignment, kernel: GaussianMixture, samples: int = 200_000,
                    seed: int = 0, shards: int = 8, workers: int | None = None) -> FormResult:
    """Monte Carlo ``int prod_j F_j(Pi_j x) K((I A)x) dx`` for a mixture kernel."""
    m, d = tuple_dims(A, tup)
    factors = [(corner_selector(m, d, j), F) for j, F in tup.items()]
    factors.append((_IA(A, d), kernel))
    return _run(factors, 2 * m * d, tup, samples, seed, shards, workers)


def _run(factors, dim, tup, samples, seed, shards, workers) -> FormResult:
    if tup.is_gaussian():
        env = envelope(factors, dim)
    else:
        # any callable F works; the envelope is then a unit-scale Gaussian
        env = Envelope([1.0], [np.zeros(dim)], [INFLATE * np.eye(dim) / (2 * math.pi)])
    est, se, n = mc_integrate(_Integrand(factors), env, samples, seed, shards, workers)
    return FormResult(est, "monte-carlo", se, n, seed=seed)
