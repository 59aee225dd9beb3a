"""Monte Carlo sampling of the matrix Gibbs measure.

Three samplers over m-tuples of N x N Hermitian matrices: exact i.i.d.
Gaussian draws for the free measure, a Metropolis chain with full-matrix
Gaussian increments for interacting potentials, and an unadjusted Langevin
scheme driven by the cyclic-gradient drift (biased at order step, kept as
a demonstration).  An optional spectral cutoff rejects any proposal whose
largest eigenvalue modulus reaches L, which realizes the cut-off measure.

The energy of a state is N * Tr(V(A) + sum_i A_i^2 / 2), always evaluated
exactly on the proposal (no expansion in the step size).  Traces of even
powers go through BLAS Hermitian rank-k updates, which halves the flops of
the hot loop; everything else falls back to plain matrix products.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import blas as _blas

from .ncpoly import Monomial, Polynomial, as_polynomial, cyclic_derivative

TRACE_MAGIC = b"MMWB0001"


class AcceptanceCollapse(RuntimeError):
    """Metropolis acceptance fell below 1% during burn-in."""


class SpectralEscapeWarning(UserWarning):
    """An emitted sample exceeded the spectral guard without a cutoff."""


@dataclass
class MatrixEnsembleConfig:
    N: int
    m: int = 1
    potential: object = None          # Potential with numeric couplings; None = free
    sampler: str = "exact-gue"        # exact-gue | metropolis | langevin
    step: float = 0.024
    burn_in: int = 2000               # sweeps per chain
    samples: int = 10000              # emitted samples (total across chains)
    thinning: int = 1
    seed: int = 0
    cutoff: float = None              # spectral-radius rejection level L
    n_chains: int = 1
    spectral_guard: float = 6.0
    dtype: str = "complex64"
    init_scale: float = 1.0           # chains start from init_scale * GUE draw

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be at least 2")
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.cutoff is not None and self.cutoff <= 0:
            raise ValueError("cutoff must be positive when set")
        if self.sampler not in ("exact-gue", "metropolis", "langevin"):
            raise ValueError(f"unknown sampler {self.sampler!r}")
        if self.sampler == "exact-gue" and self.potential is not None \
                and any(t.value for t in self.potential.terms):
            raise ValueError("exact-gue sampling requires a zero potential")


# ---------------------------------------------------------------------------
# Hermitian draws


def _herm_standard(rng, N, dtype=np.complex64):
    """Standard Hermitian draw: diagonal variance 1, off-diagonal complex
    variance 1, from a single real normal square (the symmetric and
    antisymmetric parts of one Gaussian matrix are independent)."""
    fdtype = np.float32 if dtype == np.complex64 else np.float64
    G = rng.standard_normal((N, N), dtype=fdtype)
    H = (G + G.T) * 0.5 + 1j * ((G - G.T) * 0.5)
    return H.astype(dtype, copy=False)


def gue_sample(rng, N, dtype=np.complex128):
    """One GUE matrix: Hermitian, diagonal variance 1/N, off-diagonal
    complex variance 1/N."""
    return _herm_standard(rng, N, dtype) * (1.0 / float(np.sqrt(N)))


def sample_gue(N, m=1, seed=0):
    """Infinite stream of exact i.i.d. GUE m-tuples (complex128 arrays)."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    while True:
        yield np.stack([gue_sample(rng, N) for _ in range(m)])


# ---------------------------------------------------------------------------
# traces


def _tr2(A):
    return float(np.vdot(A, A).real)


def _herk_triangle(A):
    """Upper triangle of a matrix with the entry moduli of A @ A.

    Works on the transposed view so C-contiguous arrays go to BLAS without
    a copy; for Hermitian A the transposed product is the conjugate of the
    square, which leaves every |entry| unchanged.
    """
    if A.dtype == np.complex64:
        return _blas.cherk(1.0, A.T)
    return _blas.zherk(1.0, A.T)


def _tr4_from_triangle(C):
    d = C.diagonal()
    return 2.0 * float(np.vdot(C, C).real) - float(np.vdot(d, d).real)


def _full_square(A):
    C = _herk_triangle(A)
    # C holds conj(A @ A) in its upper triangle; A @ A is Hermitian
    S = np.conj(C)
    S = S + S.conj().T
    idx = np.arange(A.shape[0])
    S[idx, idx] = S[idx, idx] * 0.5
    return S


def even_trace_powers(A, kmax=4):
    """Tr A^2, Tr A^4, ... up to Tr A^(2*kmax) for a Hermitian matrix."""
    out = {2: _tr2(A)}
    if kmax >= 2:
        out[4] = _tr4_from_triangle(_herk_triangle(A))
    if kmax >= 3:
        A2 = _full_square(A)
        A4 = A2 @ A2
        out[6] = float(np.vdot(A2, A4).real)
        if kmax >= 4:
            out[8] = float(np.vdot(A4, A4).real)
    return {2 * k: out[2 * k] for k in range(1, kmax + 1)}


def trace_word(mats, mono):
    """Tr q(A_1..A_m) for a word q, by a plain product chain."""
    mono = Monomial(mono)
    if mono.degree == 0:
        return float(mats[0].shape[0])
    acc = mats[mono[0] - 1]
    for letter in mono[1:]:
        acc = acc @ mats[letter - 1]
    return complex(np.trace(acc))


def trace_polynomial(mats, P):
    """Tr P(A); real part returned when the imaginary part is negligible."""
    total = 0j
    N = mats[0].shape[0]
    for mono, c in as_polynomial(P).terms.items():
        total += complex(c) * trace_word(mats, mono)
    if abs(total.imag) <= 1e-8 * (1.0 + abs(total.real)) * N:
        return total.real
    return total


def lambda_max(mats):
    """Largest spectral radius among the tuple's matrices."""
    worst = 0.0
    for A in mats:
        ev = np.linalg.eigvalsh(A)
        worst = max(worst, float(max(-ev[0], ev[-1])))
    return worst


# ---------------------------------------------------------------------------
# energies


class _Energy:
    """N * Tr(W(A)) with W = V + sum X_i^2 / 2, exact on every state."""

    def __init__(self, cfg):
        self.N = cfg.N
        self.m = cfg.m
        terms = [] if cfg.potential is None else list(cfg.potential.terms)
        self.terms = [(float(np.real(complex(t.value))), t.monomial) for t in terms]
        if any(abs(complex(t.value).imag) > 0 for t in terms):
            raise ValueError("sampling needs real coupling values")
        # fast path: m == 1 and the potential only uses x1^2 / x1^4
        self.fast = (self.m == 1
                     and all(mono == Monomial((1,) * mono.degree)
                             and mono.degree in (2, 4) for _, mono in self.terms))

    def value_fast(self, A):
        """Returns (energy, tr2, tr4) for the single-matrix fast path."""
        tr2 = _tr2(A)
        tr4 = _tr4_from_triangle(_herk_triangle(A)) if any(
            mono.degree == 4 for _, mono in self.terms) else 0.0
        e = 0.5 * tr2
        for c, mono in self.terms:
            e += c * (tr2 if mono.degree == 2 else tr4)
        return self.N * e, tr2, tr4

    def value(self, mats):
        e = 0.5 * sum(_tr2(A) for A in mats)
        for c, mono in self.terms:
            e += c * float(np.real(trace_word(mats, mono)))
        return self.N * e


def _drift(cfg, mats):
    """Langevin drift matrices -(step/2) (A_i + D_i V(A)), Hermitized."""
    out = []
    grads = []
    for i in range(1, cfg.m + 1):
        if cfg.potential is None:
            grads.append(None)
        else:
            dv = Polynomial.zero()
            for t in cfg.potential.terms:
                dv = dv + float(np.real(complex(t.value))) * cyclic_derivative(
                    i, Polynomial.from_monomial(t.monomial))
            grads.append(dv)
    for i, A in enumerate(mats):
        D = A.copy()
        g = grads[i]
        if g:
            M = np.zeros_like(A)
            for mono, c in g.terms.items():
                acc = mats[mono[0] - 1]
                for letter in mono[1:]:
                    acc = acc @ mats[letter - 1]
                M = M + complex(c) * acc
            D = D + (M + M.conj().T) * 0.5
        out.append(-(cfg.step / 2.0) * D)
    return out


# ---------------------------------------------------------------------------
# chains


def _chain_rngs(cfg):
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.n_chains)
    return [np.random.default_rng(s) for s in seqs]


def _below_cutoff(mats, L):
    """Spectral test with a cheap Schatten-8 certificate before eigvalsh."""
    for A in mats:
        tp = even_trace_powers(A, kmax=4)
        if tp[8] >= 0 and tp[8] ** 0.125 < L:
            continue
        ev = np.linalg.eigvalsh(A)
        if max(-ev[0], ev[-1]) >= L:
            return False
    return True


class _MetropolisChain:
    def __init__(self, cfg, rng):
        self.cfg = cfg
        self.rng = rng
        dtype = np.complex64 if cfg.dtype == "complex64" else np.complex128
        self.dtype = dtype
        self.energy = _Energy(cfg)
        self.sqrtN = float(np.sqrt(cfg.N))
        scale = dtype(cfg.init_scale).real if cfg.init_scale != 1.0 else None

        def draw():
            A = gue_sample(rng, cfg.N, dtype)
            return A if scale is None else A * np.asarray(scale, dtype=A.real.dtype)

        self.mats = [draw() for _ in range(cfg.m)]
        if cfg.cutoff is not None:
            for _ in range(1000):
                if _below_cutoff(self.mats, cfg.cutoff):
                    break
                self.mats = [draw() for _ in range(cfg.m)]
            else:
                raise RuntimeError("could not find a starting state under the cutoff")
        if self.energy.fast:
            self._init_fast_buffers()
            self.E, self.tr2, self.tr4 = self.energy.value_fast(self.mats[0])
        else:
            self.E = self.energy.value(self.mats)
            self.tr2 = sum(_tr2(A) for A in self.mats)
            self.tr4 = None
        self.accepted = 0
        self.proposed = 0

    def _init_fast_buffers(self):
        N = self.cfg.N
        fdtype = np.float32 if self.dtype == np.complex64 else np.float64
        self._G = np.empty((N, N), dtype=fdtype)
        self._S = np.empty((N, N), dtype=fdtype)
        self._D = np.empty((N, N), dtype=fdtype)
        A = np.ascontiguousarray(self.mats[0])
        self._A = A
        self._B = np.empty_like(A)
        self._Av = A.view(fdtype).reshape(N, N, 2)
        self._Bv = self._B.view(fdtype).reshape(N, N, 2)
        # herk fills one triangle only; keep the other identically zero
        self._C = np.zeros((N, N), dtype=self.dtype, order="F")
        self._herk = _blas.cherk if self.dtype == np.complex64 else _blas.zherk
        # the symmetric/antisymmetric halves carry a built-in factor 2
        self._scale = fdtype(self.cfg.step / (2.0 * self.sqrtN))
        self._quartic = any(mono.degree == 4 for _, mono in self.energy.terms)

    def _sweep_fast(self):
        cfg = self.cfg
        rng = self.rng
        G, S, D = self._G, self._S, self._D
        rng.standard_normal(dtype=G.dtype, out=G)
        np.add(G, G.T, out=S)
        np.subtract(G, G.T, out=D)
        np.multiply(S, self._scale, out=S)
        np.multiply(D, self._scale, out=D)
        Av, Bv = self._Av, self._Bv
        np.add(Av[:, :, 0], S, out=Bv[:, :, 0])
        np.add(Av[:, :, 1], D, out=Bv[:, :, 1])
        B = self._B
        tr2B = float(np.vdot(B, B).real)
        if self._quartic:
            C = self._herk(1.0, B.T, c=self._C, overwrite_c=1)
            tr4B = _tr4_from_triangle(C)
        else:
            tr4B = 0.0
        eB = 0.5 * tr2B
        for c, mono in self.energy.terms:
            eB += c * (tr2B if mono.degree == 2 else tr4B)
        eB *= cfg.N
        dE = eB - self.E
        if dE <= 0.0 or rng.random() < np.exp(-min(dE, 700.0)):
            if cfg.cutoff is None or _below_cutoff([B], cfg.cutoff):
                self._A, self._B = self._B, self._A
                self._Av, self._Bv = self._Bv, self._Av
                self.mats[0] = self._A
                self.E, self.tr2, self.tr4 = eB, tr2B, tr4B
                self.accepted += 1

    def sweep(self):
        cfg = self.cfg
        rng = self.rng
        self.proposed += 1
        if self.energy.fast:
            self._sweep_fast()
            return
        props = [A + (cfg.step / self.sqrtN) * _herm_standard(rng, cfg.N, self.dtype)
                 for A in self.mats]
        eB = self.energy.value(props)
        dE = eB - self.E
        if dE <= 0 or rng.random() < np.exp(-min(float(dE), 700.0)):
            if cfg.cutoff is None or _below_cutoff(props, cfg.cutoff):
                self.mats = props
                self.E = eB
                self.tr2 = sum(_tr2(A) for A in props)
                self.accepted += 1

    @property
    def acceptance_rate(self):
        return self.accepted / max(self.proposed, 1)


class _LangevinChain:
    def __init__(self, cfg, rng):
        self.cfg = cfg
        self.rng = rng
        dtype = np.complex64 if cfg.dtype == "complex64" else np.complex128
        self.dtype = dtype
        scale = np.asarray(cfg.init_scale, dtype=np.float64)
        self.mats = [gue_sample(rng, cfg.N, dtype) * scale.astype(
            np.float32 if dtype == np.complex64 else np.float64)
            for _ in range(cfg.m)]
        self.sqrt_step = float(np.sqrt(cfg.step))

    def sweep(self):
        cfg = self.cfg
        drift = _drift(cfg, self.mats)
        props = []
        for A, D in zip(self.mats, drift):
            noise = gue_sample(self.rng, cfg.N, self.dtype) * self.sqrt_step
            props.append((A + D + noise).astype(self.dtype, copy=False))
        if cfg.cutoff is not None and not _below_cutoff(props, cfg.cutoff):
            return
        self.mats = props


class _GueChain:
    def __init__(self, cfg, rng):
        self.cfg = cfg
        self.rng = rng
        dtype = np.complex64 if cfg.dtype == "complex64" else np.complex128
        self.dtype = dtype
        self.mats = None
        self.sweep()

    def sweep(self):
        cfg = self.cfg
        while True:
            mats = [gue_sample(self.rng, cfg.N, self.dtype) for _ in range(cfg.m)]
            if cfg.cutoff is None or _below_cutoff(mats, cfg.cutoff):
                self.mats = mats
                return


def _make_chain(cfg, rng):
    if cfg.sampler == "metropolis":
        return _MetropolisChain(cfg, rng)
    if cfg.sampler == "langevin":
        return _LangevinChain(cfg, rng)
    return _GueChain(cfg, rng)


def sample_gibbs(cfg):
    """Stream of m-tuples from the configured sampler.

    Burn-in sweeps are discarded per chain, then samples are emitted every
    ``thinning`` sweeps round-robin across chains until ``samples`` tuples
    have been produced.  Raises :class:`AcceptanceCollapse` when the
    Metropolis acceptance rate is below 1% after burn-in; warns with
    :class:`SpectralEscapeWarning` when an emitted sample exceeds the
    spectral guard and no cutoff is active.
    """
    chains = [_make_chain(cfg, rng) for rng in _chain_rngs(cfg)]
    for chain in chains:
        for _ in range(cfg.burn_in):
            chain.sweep()
        if cfg.sampler == "metropolis" and cfg.burn_in >= 200 \
                and chain.acceptance_rate < 0.01:
            raise AcceptanceCollapse(
                f"acceptance rate {chain.acceptance_rate:.4f} after burn-in; "
                "reduce the step size")
    emitted = 0
    while emitted < cfg.samples:
        for chain in chains:
            if emitted >= cfg.samples:
                break
            for _ in range(cfg.thinning):
                chain.sweep()
            mats = np.stack([A.astype(np.complex128, copy=False)
                             for A in chain.mats])
            if cfg.cutoff is None and lambda_max(mats) > cfg.spectral_guard:
                warnings.warn("sample exceeded the spectral guard",
                              SpectralEscapeWarning)
            emitted += 1
            yield mats


# ---------------------------------------------------------------------------
# statistics


def iact(x):
    """Integrated autocorrelation time, initial-positive-sequence estimate."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if n < 8:
        return 1.0
    x = x - x.mean()
    nf = 1 << int(2 * n - 1).bit_length()
    f = np.fft.rfft(x, nf)
    acf = np.fft.irfft(f * np.conj(f), nf)[:n].real
    if acf[0] <= 0:
        return 1.0
    acf = acf / acf[0]
    tau = 1.0
    k = 1
    while k + 1 < n:
        g = acf[k] + acf[k + 1]
        if g <= 0:
            break
        tau += 2.0 * g
        k += 2
    return float(min(max(tau, 1.0), n / 4.0))


@dataclass
class SampleStats:
    mean: float
    variance: float
    stderr: float
    ess: float
    n: int
    iact: float = 1.0

    @classmethod
    def from_series(cls, x):
        x = np.asarray(x, dtype=np.float64)
        n = x.size
        mean = float(x.mean())
        var = float(x.var(ddof=1)) if n > 1 else 0.0
        tau = iact(x)
        ess = n / tau
        stderr = float(np.sqrt(var / max(ess, 1.0)))
        return cls(mean, var, stderr, ess, n, tau)

    @classmethod
    def from_chains(cls, chains):
        """Pooled statistics; the effective sample size adds up per chain."""
        arrays = [np.asarray(c, dtype=np.float64) for c in chains if len(c)]
        full = np.concatenate(arrays)
        n = full.size
        mean = float(full.mean())
        var = float(full.var(ddof=1)) if n > 1 else 0.0
        ess = sum(len(a) / iact(a) for a in arrays)
        stderr = float(np.sqrt(var / max(ess, 1.0)))
        tau = n / max(ess, 1.0)
        return cls(mean, var, stderr, ess, n, tau)

    def as_dict(self):
        return {"mean": self.mean, "variance": self.variance,
                "stderr": self.stderr, "ess": self.ess, "n": self.n,
                "iact": self.iact}


# ---------------------------------------------------------------------------
# fast trace runs


@dataclass
class TraceRun:
    """Per-sweep trace series from a sampler, one array per chain."""

    config: MatrixEnsembleConfig
    traces: dict            # name -> list of per-chain float arrays
    acceptance_rates: list = field(default_factory=list)

    def stats(self, name):
        return SampleStats.from_chains(self.traces[name])

    def pooled(self, name):
        return np.concatenate([np.asarray(c) for c in self.traces[name]])


def metropolis_trace_run(cfg, powers=(2, 4), progress=None):
    """Run Metropolis chains recording Tr A^p per sweep (fast path).

    Requires m = 1 and a potential built from x1^2 / x1^4 only; the per
    sweep records reuse the traces already computed for the energy, so the
    observables are free.  ``samples`` counts kept sweeps per chain here.
    """
    if cfg.m != 1 or cfg.sampler != "metropolis":
        raise ValueError("fast trace run needs m=1 Metropolis")
    if not set(powers) <= {2, 4}:
        raise ValueError("fast trace run records Tr A^2 and Tr A^4 only")
    rngs = _chain_rngs(cfg)
    traces = {f"tr{p}": [] for p in powers}
    rates = []
    for ci, rng in enumerate(rngs):
        chain = _MetropolisChain(cfg, rng)
        if not chain.energy.fast:
            raise ValueError("potential is outside the x1^2/x1^4 fast path")
        for _ in range(cfg.burn_in):
            chain.sweep()
        if chain.acceptance_rate < 0.01 and cfg.burn_in >= 200:
            raise AcceptanceCollapse(
                f"acceptance rate {chain.acceptance_rate:.4f} after burn-in")
        per = {p: np.empty(cfg.samples, dtype=np.float64) for p in powers}
        for it in range(cfg.samples):
            chain.sweep()
            if 2 in per:
                per[2][it] = chain.tr2
            if 4 in per:
                per[4][it] = chain.tr4
        for p in powers:
            traces[f"tr{p}"].append(per[p])
        rates.append(chain.acceptance_rate)
        if progress:
            progress(ci)
    return TraceRun(cfg, traces, rates)


def gue_trace_run(N, samples, seed=0, powers=(2, 4), dtype="complex64"):
    """Exact GUE sampling recording Tr A^p; i.i.d., so one logical chain."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    dt = np.complex64 if dtype == "complex64" else np.complex128
    kmax = max(powers) // 2
    out = {p: np.empty(samples, dtype=np.float64) for p in powers}
    for it in range(samples):
        A = gue_sample(rng, N, dt)
        tp = even_trace_powers(A, kmax=kmax)
        for p in powers:
            out[p][it] = tp[p]
    cfg = MatrixEnsembleConfig(N=N, m=1, sampler="exact-gue", samples=samples,
                               seed=seed, dtype=dtype)
    return TraceRun(cfg, {f"tr{p}": [out[p]] for p in powers}, [])


def run_observable_stats(cfg, observables):
    """SampleStats of the normalized traces (1/N) Tr P(A) per observable.

    ``observables`` maps names to polynomials.  Uses the generic sampler
    stream; suited to moderate sample counts and arbitrary words.
    """
    names = list(observables)
    values = {name: [] for name in names}
    for mats in sample_gibbs(cfg):
        for name in names:
            v = trace_polynomial(list(mats), observables[name])
            values[name].append(float(np.real(v)) / cfg.N)
    return {name: SampleStats.from_series(values[name]) for name in names}


# ---------------------------------------------------------------------------
# statistical tests


@dataclass
class FluctuationReport:
    observable: str
    predicted_variance: float
    sample_variance: float
    variance_stderr: float
    ci99: tuple
    relative_error: float
    z_skew: float
    z_kurt: float
    ess: float
    mean_centered: float
    passed: bool

    def as_dict(self):
        d = dict(self.__dict__)
        d["ci99"] = list(self.ci99)
        return d


def fluctuation_series_report(name, centered, sigma2_pred, chains=None):
    """Assess CLT fluctuations of a centered trace series."""
    x = np.asarray(centered, dtype=np.float64)
    stats = SampleStats.from_chains(chains) if chains is not None \
        else SampleStats.from_series(x)
    n_eff = max(stats.ess, 2.0)
    var = stats.variance
    var_se = var * np.sqrt(2.0 / n_eff)
    ci = (var - 2.576 * var_se, var + 2.576 * var_se)
    mu = x.mean()
    sd = x.std(ddof=1)
    z = (x - mu) / sd
    skew = float(np.mean(z ** 3))
    kurt = float(np.mean(z ** 4) - 3.0)
    z_skew = skew / np.sqrt(6.0 / n_eff)
    z_kurt = kurt / np.sqrt(24.0 / n_eff)
    passed = ci[0] <= sigma2_pred <= ci[1]
    rel = abs(var - sigma2_pred) / sigma2_pred if sigma2_pred else float("inf")
    return FluctuationReport(name, float(sigma2_pred), float(var), float(var_se),
                             ci, float(rel), float(z_skew), float(z_kurt),
                             float(n_eff), float(mu), bool(passed))


def fluctuation_test(cfg, P, sigma2_pred, mu_pred):
    """Sample Tr P(A) - N * mu(P) and test its variance against a prediction.

    ``mu_pred`` is the limiting value of (1/N) Tr P(A); the report carries
    the 99% interval check, the relative error against the predicted
    variance and normality z-scores.
    """
    P = as_polynomial(P)
    centered = []
    for mats in sample_gibbs(cfg):
        v = trace_polynomial(list(mats), P)
        centered.append(float(np.real(v)) - cfg.N * mu_pred)
    return fluctuation_series_report(str(P), centered, sigma2_pred)


@dataclass
class TailReport:
    level: float
    sizes: tuple
    frequencies: tuple
    nonincreasing: bool

    @property
    def passed(self):
        return self.nonincreasing

    def as_dict(self):
        return {"level": self.level, "sizes": list(self.sizes),
                "frequencies": list(self.frequencies),
                "nonincreasing": self.nonincreasing}


def tail_test(cfg, level, sizes=(50, 100, 200), samples=200):
    """Empirical frequency of lambda_max above a level, across sizes.

    Qualitative check only: passes when the exceedance frequency does not
    increase with N.
    """
    freqs = []
    for N in sizes:
        sub = MatrixEnsembleConfig(
            N=N, m=cfg.m, potential=cfg.potential, sampler=cfg.sampler,
            step=cfg.step, burn_in=cfg.burn_in, samples=samples,
            thinning=cfg.thinning, seed=cfg.seed + N, cutoff=cfg.cutoff,
            n_chains=1, spectral_guard=float("inf"), dtype=cfg.dtype)
        hits = 0
        for mats in sample_gibbs(sub):
            if lambda_max(mats) > level:
                hits += 1
        freqs.append(hits / samples)
    noninc = all(a >= b - 1e-12 for a, b in zip(freqs, freqs[1:]))
    return TailReport(level, tuple(sizes), tuple(freqs), noninc)


def detailed_balance_audit(cfg, n_pairs=64):
    """Spot-check a(A->B) * exp(-E(A)) symmetry on logged proposal pairs."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    chain = _MetropolisChain(cfg, rng)
    energy = chain.energy
    worst = 0.0
    for _ in range(n_pairs):
        state = [A.copy() for A in chain.mats]
        eA = energy.value(state) if not energy.fast else energy.value_fast(state[0])[0]
        chain.sweep()
        prop = [A.copy() for A in chain.mats]
        eB = energy.value(prop) if not energy.fast else energy.value_fast(prop[0])[0]
        a_fwd = min(1.0, float(np.exp(-(eB - eA))))
        a_bwd = min(1.0, float(np.exp(-(eA - eB))))
        # detailed balance: a(A->B) e^{-E(A)} = a(B->A) e^{-E(B)}
        lhs = np.log(a_fwd) - eA
        rhs = np.log(a_bwd) - eB
        worst = max(worst, abs(lhs - rhs))
    return worst


def hessian_probe(cfg, n_states=4, n_dirs=16, eps=1e-4, warn_below=None):
    """Rayleigh-quotient probe of the Hessian of Tr W along random directions.

    Central finite differences of the exact energy; returns the smallest
    quotient found.  Diagnostic only.
    """
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed + 99))
    energy = _Energy(cfg)
    lowest = float("inf")
    sampler = sample_gibbs(MatrixEnsembleConfig(
        N=cfg.N, m=cfg.m, potential=cfg.potential, sampler=cfg.sampler,
        step=cfg.step, burn_in=max(cfg.burn_in, 50), samples=n_states,
        thinning=cfg.thinning, seed=cfg.seed, cutoff=cfg.cutoff,
        n_chains=1, dtype="complex128"))
    for mats in sampler:
        mats = [np.asarray(A) for A in mats]
        for _ in range(n_dirs):
            H = [gue_sample(rng, cfg.N, np.complex128) for _ in range(cfg.m)]
            norm2 = sum(_tr2(h) for h in H) * cfg.N  # isometric squared norm
            plus = [A + eps * h for A, h in zip(mats, H)]
            minus = [A - eps * h for A, h in zip(mats, H)]
            d2 = (energy.value(plus) - 2.0 * energy.value(mats)
                  + energy.value(minus)) / (eps * eps)
            q = d2 / norm2
            lowest = min(lowest, q)
    if warn_below is not None and lowest < warn_below:
        warnings.warn(f"Hessian quotient {lowest:.4f} below {warn_below}",
                      UserWarning)
    return lowest


# ---------------------------------------------------------------------------
# raw trace files


def write_trace_file(path, values):
    """Binary observable trace: magic, observable count, float64 rows."""
    arr = np.ascontiguousarray(np.asarray(values, dtype="<f8"))
    if arr.ndim == 1:
        arr = arr[:, None]
    with open(path, "wb") as fh:
        fh.write(TRACE_MAGIC)
        fh.write(struct.pack("<Q", arr.shape[1]))
        fh.write(arr.tobytes())


def read_trace_file(path):
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != TRACE_MAGIC:
            raise ValueError(f"bad magic {magic!r}")
        (k,) = struct.unpack("<Q", fh.read(8))
        data = np.frombuffer(fh.read(), dtype="<f8")
    if k == 0 or data.size % k:
        raise ValueError("truncated trace file")
    return data.reshape(-1, k)
