"""Ground-truth generation: clutter covariances, steering, snapshot draws.

The interference covariance under each hypothesis is built as::

    M = A R A^H + sigma_n^2 I

where R is a sum of exponentially correlated clutter sources,

    R(h, k) = sum_l CNR_l * rho_l^{|h-k|} * exp(j 2 pi (h-k) f_l),

CNR_l converted from dB to linear power against unit thermal noise
(sigma_n^2 = 1 by convention here). The channel-error factor A and the
Doppler pattern select the hypothesis:

    H1: A = I + sigma_d W, W complex standard normal; Dopplers as configured
    H2: A = I + sigma_d W, W real standard normal;    Dopplers forced to 0
    H3: A = I;                                        Dopplers as configured
    H4: A = I;                                        Dopplers forced to 0

Zero Doppler makes R real (symmetric Toeplitz), so H2 truths are real
symmetric and H4 truths real centrosymmetric; a Hermitian Toeplitz R makes
H3 truths centrohermitian. The built covariance is projected onto the exact
structure of its hypothesis so the structure checks pass bit-for-bit; for H2
the computation stays in real arithmetic throughout.

The cell under test carries amplitude ``alpha = sqrt(10^(SNR_dB/10)) e^{j phi}``
with a uniform random phase, on the symmetric phase-ramp steering vector
(odd N only).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .estimators import Dataset
from .linalg import cholesky_pd, hermitian_part
from .structures import Hypothesis, project

__all__ = [
    "SourceParams",
    "ScenarioConfig",
    "TruthInstance",
    "OddSizeRequiredError",
    "case1_sources",
    "case2_sources",
    "table_case",
    "db_to_linear",
    "clutter_covariance",
    "steering_vector",
    "truth_instance",
    "sample_dataset",
    "complex_normal",
]


class OddSizeRequiredError(ValueError):
    """The symmetric steering vector is defined for odd channel counts only."""


@dataclass(frozen=True)
class SourceParams:
    """One clutter source: power (dB over unit noise), one-lag correlation, Doppler."""

    cnr_db: float
    rho: float
    doppler: float

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"one-lag correlation must be in (0, 1), got {self.rho}")
        if not abs(self.doppler) < 0.5:
            raise ValueError(f"normalized Doppler must satisfy |f| < 0.5, got {self.doppler}")


def case1_sources() -> tuple[SourceParams, ...]:
    """Single clutter source: CNR 30 dB, rho 0.85, Doppler 0.285."""
    return (SourceParams(cnr_db=30.0, rho=0.85, doppler=0.285),)


def case2_sources() -> tuple[SourceParams, ...]:
    """Two clutter sources: (20 dB, 0.85, 0.285) and (30 dB, 0.93, 0.05)."""
    return (
        SourceParams(cnr_db=20.0, rho=0.85, doppler=0.285),
        SourceParams(cnr_db=30.0, rho=0.93, doppler=0.05),
    )


@dataclass(frozen=True)
class ScenarioConfig:
    """Physical scenario parameters. Defaults reproduce study case 1."""

    n: int = 13
    sources: tuple[SourceParams, ...] = field(default_factory=case1_sources)
    sigma_d: float = 0.15
    sigma_n2: float = 1.0
    snr_db: float = 10.0
    f_v: float = 0.01
    seed: int = 0
    freeze_channel_errors: bool = False
    case_id: int | None = 1

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 channels, got {self.n}")
        if not self.sources:
            raise ValueError("need at least one clutter source")
        if self.sigma_d < 0:
            raise ValueError(f"channel-error std must be >= 0, got {self.sigma_d}")
        if self.sigma_n2 <= 0:
            raise ValueError(f"thermal noise power must be > 0, got {self.sigma_n2}")
        object.__setattr__(self, "sources", tuple(self.sources))


def table_case(case_id: int, **overrides) -> ScenarioConfig:
    """Scenario for study case 1 or 2; keyword overrides pass through."""
    if case_id == 1:
        return ScenarioConfig(sources=case1_sources(), case_id=1, **overrides)
    if case_id == 2:
        return ScenarioConfig(sources=case2_sources(), case_id=2, **overrides)
    raise ValueError(f"case_id must be 1 or 2, got {case_id}")


@dataclass(frozen=True)
class TruthInstance:
    """One realized ground truth: covariance plus its factors."""

    hypothesis: Hypothesis
    m_true: np.ndarray
    a_factor: np.ndarray
    r_clutter: np.ndarray


def db_to_linear(value_db: float) -> float:
    """Power ratio from decibels: 10^(dB/10)."""
    return float(10.0 ** (value_db / 10.0))


def clutter_covariance(
    sources, n: int, zero_doppler: bool = False
) -> np.ndarray:
    """Sum of exponentially correlated source covariances, size n.

    Returns a real array when every (possibly overridden) Doppler is zero,
    complex Hermitian Toeplitz otherwise. ``zero_doppler`` forces f_l = 0 for
    the H2/H4 truth variants.
    """
    lags = np.subtract.outer(np.arange(n), np.arange(n))  # h - k
    r = np.zeros((n, n), dtype=complex)
    for src in sources:
        f = 0.0 if zero_doppler else src.doppler
        power = db_to_linear(src.cnr_db)
        r += power * src.rho ** np.abs(lags) * np.exp(2j * np.pi * f * lags)
    if zero_doppler or all(src.doppler == 0.0 for src in sources):
        assert np.all(r.imag == 0.0)
        return r.real.copy()
    return r


def steering_vector(n: int, f_v: float) -> np.ndarray:
    """Unit-norm symmetric phase ramp e^{j 2 pi f_v k}/sqrt(n), k centered at 0.

    Conjugate-flip symmetric (J conj(v) = v), which is what lets the
    amplitude estimators under H3/H4 split the CUT into even and odd parts.
    Odd n only.
    """
    if n % 2 == 0:
        raise OddSizeRequiredError(
            f"steering vector is defined for odd sizes only, got n={n}"
        )
    half = (n - 1) // 2
    taps = np.arange(-half, half + 1)
    return np.exp(2j * np.pi * f_v * taps) / np.sqrt(n)


def truth_instance(
    hypothesis: Hypothesis,
    config: ScenarioConfig,
    rng: np.random.Generator | None = None,
) -> TruthInstance:
    """Draw one ground-truth covariance for a hypothesis.

    H1/H2 consume the generator for the channel-error matrix W; H3/H4 are
    deterministic given the config. The result is projected onto the exact
    structure of the hypothesis, which never moves the matrix by more than
    floating-point noise but makes the structure checks exact.
    """
    h = Hypothesis(hypothesis)
    if rng is None:
        rng = np.random.default_rng(config.seed)
    n = config.n
    zero_doppler = h in (Hypothesis.H2, Hypothesis.H4)
    r = clutter_covariance(config.sources, n, zero_doppler=zero_doppler)

    if h is Hypothesis.H1:
        w = complex_normal(rng, (n, n))
        a = np.eye(n) + config.sigma_d * w
    elif h is Hypothesis.H2:
        w = rng.standard_normal((n, n))
        a = np.eye(n) + config.sigma_d * w
    else:
        a = np.eye(n)

    m_raw = a @ r @ a.conj().T + config.sigma_n2 * np.eye(n)
    m_true = project(h, hermitian_part(m_raw))
    if h.is_real:
        assert not np.iscomplexobj(m_true)
    return TruthInstance(hypothesis=h, m_true=m_true, a_factor=a, r_clutter=r)


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard circular complex normal: unit variance split across re/im."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def sample_dataset(
    truth: TruthInstance,
    config: ScenarioConfig,
    k: int,
    rng: np.random.Generator,
) -> Dataset:
    """Draw one classification dataset under a realized truth.

    Fixed draw order (phase, CUT noise, secondary block) so a given stream
    yields a bit-identical dataset. Snapshots are ``L g`` with L the lower
    Cholesky factor of the truth and g standard complex normal.
    """
    n = config.n
    low = cholesky_pd(truth.m_true)
    amplitude = np.sqrt(db_to_linear(config.snr_db))
    phase = rng.uniform(0.0, 2.0 * np.pi)
    alpha = amplitude * np.exp(1j * phase)
    v = steering_vector(n, config.f_v)
    cut = alpha * v + low @ complex_normal(rng, n)
    secondary = low @ complex_normal(rng, (n, k))
    return Dataset(secondary=secondary, cut=cut, steering=v)
