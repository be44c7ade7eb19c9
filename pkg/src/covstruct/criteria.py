"""Model-order-selection rules and the argmin classifier over the hypotheses.

Every rule scores hypothesis ``H_i`` as ``fit + penalty`` where the fit term
is ``-2 s(p_hat_i)``, the joint (approach A) or secondary-only (approach B)
log-likelihood at the plug-in estimates. The rules differ only in the
penalty::

    AIC             2 n_i
    GIC             (1 + rho) n_i           rho >= 1; rho = 1 reduces to AIC
    TIC             2 Tr[ J_hat Inv(I_hat) ]
    AICc            2 n_i D / (D - n_i - 1) with D the complex sample count
    BIC             log det I_hat
    AsymptoticBIC   m_i log K

``n_i`` counts all real parameters entering the likelihood (theta plus the
two amplitude components under approach A), ``m_i`` the covariance parameters
alone. The classifier picks the smallest total; a hypothesis whose numerics
break (singular information matrix, degenerate AICc denominator, failed
factorization) is excluded and the failure recorded, and the argmin runs over
the survivors.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .estimators import (
    Approach,
    Dataset,
    DegenerateSteeringError,
    EstimateSet,
    estimate_alpha,
    estimate_covariance,
)
from .likelihood import FimPair, fim_pair
from .linalg import (
    NotPositiveDefiniteError,
    cholesky_pd,
    hermitian_part,
    inverse_from_cholesky,
    logdet_pd,
)
from .structures import Hypothesis, param_count, structure_model

__all__ = [
    "CriterionKind",
    "Criterion",
    "FimSingularError",
    "AiccDegenerateError",
    "HypothesisScore",
    "Scorecard",
    "parse_criterion",
    "DEFAULT_CRITERIA",
    "penalty",
    "prepare_estimates",
    "classify",
    "classify_batch",
]

_LOG_PI = float(np.log(math.pi))

# Ridge scale for the one TIC retry on a singular observed information matrix.
_TIC_RIDGE = 1e-8


class FimSingularError(ValueError):
    """Observed information matrix unusable (singular or not PD where needed)."""


class AiccDegenerateError(ValueError):
    """AICc denominator is non-positive: parameters meet or exceed the data."""


class CriterionKind(enum.Enum):
    AIC = "aic"
    GIC = "gic"
    TIC = "tic"
    AICC = "aicc"
    BIC = "bic"
    ASYMPTOTIC_BIC = "asymptotic-bic"


@dataclass(frozen=True)
class Criterion:
    """A selection rule; GIC carries its weight rho (rho >= 1)."""

    kind: CriterionKind
    rho: float | None = None

    def __post_init__(self):
        if self.kind is CriterionKind.GIC:
            if self.rho is None:
                raise ValueError("gic needs a rho value, e.g. 'gic:2'")
            if not self.rho >= 1.0:
                raise ValueError(f"gic rho must be >= 1, got {self.rho}")
        elif self.rho is not None:
            raise ValueError(f"{self.kind.value} does not take a rho value")

    @property
    def key(self) -> str:
        """Stable identifier used in configs, CSV, and report cells."""
        if self.kind is CriterionKind.GIC:
            rho = self.rho
            text = f"{rho:g}" if rho != int(rho) else f"{int(rho)}"
            return f"gic:{text}"
        return self.kind.value

    @property
    def needs_fim(self) -> bool:
        return self.kind in (CriterionKind.TIC, CriterionKind.BIC)

    def __str__(self) -> str:
        return self.key


def parse_criterion(text: str) -> Criterion:
    """Parse 'aic', 'gic:2', 'tic', 'aicc', 'bic', 'asymptotic-bic'."""
    raw = text.strip().lower()
    if raw.startswith("gic"):
        rest = raw[3:].lstrip(":")
        if not rest:
            raise ValueError("gic needs a rho value, e.g. 'gic:2'")
        try:
            rho = float(rest)
        except ValueError:
            raise ValueError(f"bad gic rho {rest!r} in {text!r}") from None
        return Criterion(CriterionKind.GIC, rho)
    for kind in CriterionKind:
        if raw == kind.value:
            if kind is CriterionKind.GIC:
                break
            return Criterion(kind)
    raise ValueError(
        f"unknown criterion {text!r}; expected one of "
        "aic, gic:<rho>, tic, aicc, bic, asymptotic-bic"
    )


DEFAULT_CRITERIA: tuple[Criterion, ...] = (
    Criterion(CriterionKind.AIC),
    Criterion(CriterionKind.GIC, 2.0),
    Criterion(CriterionKind.GIC, 4.0),
    Criterion(CriterionKind.TIC),
    Criterion(CriterionKind.AICC),
    Criterion(CriterionKind.BIC),
    Criterion(CriterionKind.ASYMPTOTIC_BIC),
)


def penalty(
    criterion: Criterion,
    *,
    n_params: int,
    m_params: int,
    k: int,
    n: int,
    approach: Approach,
    fim: FimPair | None = None,
) -> float:
    """Penalty term of one rule for one hypothesis.

    ``n_params`` is the full likelihood parameter count (m_params + 2 under
    approach A), ``k``/``n`` the snapshot count and vector size. TIC and BIC
    require ``fim``; the others ignore it.
    """
    kind = criterion.kind
    if kind is CriterionKind.AIC:
        return 2.0 * n_params
    if kind is CriterionKind.GIC:
        return (1.0 + criterion.rho) * n_params
    if kind is CriterionKind.AICC:
        data_count = (k + 1) * n if approach is Approach.A else k * n
        denom = data_count - n_params - 1
        if denom <= 0:
            raise AiccDegenerateError(
                f"AICc denominator {denom} <= 0 at n_params={n_params}, "
                f"data count {data_count}"
            )
        return 2.0 * n_params * data_count / denom
    if kind is CriterionKind.ASYMPTOTIC_BIC:
        return m_params * math.log(k)
    if fim is None:
        raise ValueError(f"{criterion.key} needs the information-matrix pair")
    if kind is CriterionKind.TIC:
        return 2.0 * _tic_trace(fim)
    if kind is CriterionKind.BIC:
        return _bic_logdet(fim.observed)
    raise ValueError(f"unhandled criterion kind {kind!r}")


def _tic_trace(fim: FimPair) -> float:
    """Tr[J_hat inv(I_hat)], with one ridge retry on factorization failure."""
    observed, sample = fim.observed, fim.sample
    n = observed.shape[0]
    try:
        solved = np.linalg.solve(observed, sample)
        if not np.all(np.isfinite(solved)):
            raise np.linalg.LinAlgError("non-finite solve result")
    except np.linalg.LinAlgError:
        ridge = _TIC_RIDGE * float(np.trace(observed)) / n
        try:
            solved = np.linalg.solve(observed + ridge * np.eye(n), sample)
        except np.linalg.LinAlgError as exc:
            raise FimSingularError(f"observed FIM singular even after ridge: {exc}") from None
        if not np.all(np.isfinite(solved)):
            raise FimSingularError("observed FIM singular even after ridge")
    return float(np.trace(solved))


def _bic_logdet(observed: np.ndarray) -> float:
    """log det of the observed FIM; non-PD marks the hypothesis unusable."""
    try:
        return logdet_pd(hermitian_part(observed))
    except NotPositiveDefiniteError as exc:
        raise FimSingularError(f"observed FIM not positive definite: {exc}") from None


@dataclass(frozen=True)
class HypothesisScore:
    """Fit/penalty/total for one hypothesis, or the failure that excluded it."""

    fit: float | None
    penalty: float | None
    total: float | None
    failure: str | None = None

    @property
    def failed(self) -> bool:
        return self.failure is not None


@dataclass(frozen=True)
class Scorecard:
    """Outcome of one (dataset, approach, criterion) classification."""

    criterion: Criterion
    approach: Approach
    scores: dict[Hypothesis, HypothesisScore] = field(repr=False)
    chosen: Hypothesis | None = None

    @property
    def all_failed(self) -> bool:
        return self.chosen is None


# Exceptions that disqualify one hypothesis without aborting classification.
_HYPOTHESIS_FAILURES = (
    NotPositiveDefiniteError,
    FimSingularError,
    AiccDegenerateError,
    DegenerateSteeringError,
)


def _fit_term(estimate: EstimateSet, dataset: Dataset, approach: Approach) -> float:
    """-2 times the governing log-likelihood at the plug-in estimates."""
    n, k = dataset.n, dataset.k
    x = estimate.x_hat
    s = dataset.secondary @ dataset.secondary.conj().T
    trace_s = float(np.real(np.einsum("ij,ji->", x, s)))
    if approach is Approach.B:
        s_val = -k * (n * _LOG_PI + estimate.logdet) - trace_s
        return -2.0 * s_val
    cut, steering = dataset.require_cut()
    if estimate.alpha_hat is None:
        raise ValueError("approach A fit needs alpha_hat; prepare estimates under A")
    resid = cut - estimate.alpha_hat * steering
    quad = float(np.real(resid.conj() @ x @ resid))
    s_val = -(k + 1) * (n * _LOG_PI + estimate.logdet) - trace_s - quad
    return -2.0 * s_val


def _argmin_hypothesis(
    totals: dict[Hypothesis, float], n_dim: int
) -> Hypothesis | None:
    """Smallest total; ties go to the smaller parameter count, then index."""
    if not totals:
        return None
    return min(
        totals,
        key=lambda h: (totals[h], param_count(h, n_dim), int(h)),
    )


def prepare_estimates(
    dataset: Dataset, approach: Approach
) -> dict[Hypothesis, "EstimateSet | str"]:
    """Per-hypothesis estimate sets, with failures kept as message strings.

    The returned map can be fed to :func:`classify_batch` to reuse one set of
    factorizations across criteria and approaches. Estimates prepared under
    approach A (which carry alpha) also serve approach B; the reverse does
    not hold.
    """
    approach = Approach.parse(approach)
    out: dict[Hypothesis, EstimateSet | str] = {}
    for h in Hypothesis:
        try:
            out[h] = estimate_all_single(dataset, approach, h)
        except _HYPOTHESIS_FAILURES as exc:
            out[h] = f"{type(exc).__name__}: {exc}"
    return out


def classify(
    dataset: Dataset,
    approach: Approach,
    criterion: Criterion,
) -> Scorecard:
    """Classify one dataset with one rule. See :func:`classify_batch`."""
    approach = Approach.parse(approach)
    result = _evaluate(dataset, approach, (criterion,), None)
    return result[criterion]


def classify_batch(
    datasets,
    approach: Approach,
    criteria,
    prepared_seq=None,
) -> list[dict[Criterion, Scorecard]]:
    """Classify several datasets, sharing estimates and FIMs across criteria.

    Per dataset: the four plug-in estimate sets and fit terms are computed
    once; the information-matrix pair is computed once if any rule needs it.
    Results are identical to per-call :func:`classify`. ``prepared_seq``
    optionally supplies :func:`prepare_estimates` output per dataset.
    """
    approach = Approach.parse(approach)
    criteria = tuple(criteria)
    out = []
    for idx, dataset in enumerate(datasets):
        shared = prepared_seq[idx] if prepared_seq is not None else None
        out.append(_evaluate(dataset, approach, criteria, shared))
    return out


def _evaluate(
    dataset: Dataset,
    approach: Approach,
    criteria: tuple[Criterion, ...],
    prepared: dict[Hypothesis, "EstimateSet | str"] | None,
) -> dict[Criterion, Scorecard]:
    n, k = dataset.n, dataset.k
    need_fim = any(c.needs_fim for c in criteria)

    if prepared is None:
        prepared = prepare_estimates(dataset, approach)

    fits: dict[Hypothesis, float] = {}
    fims: dict[Hypothesis, FimPair] = {}
    broken: dict[Hypothesis, str] = {}
    fim_broken: dict[Hypothesis, str] = {}

    for h, est in prepared.items():
        if isinstance(est, str):
            broken[h] = est
            continue
        if approach is Approach.A and est.alpha_failure is not None:
            broken[h] = est.alpha_failure
            continue
        try:
            fits[h] = _fit_term(est, dataset, approach)
        except _HYPOTHESIS_FAILURES as exc:
            broken[h] = f"{type(exc).__name__}: {exc}"
            continue
        if need_fim:
            model = structure_model(h, n)
            try:
                fims[h] = fim_pair(model, est, dataset, approach)
            except _HYPOTHESIS_FAILURES as exc:
                fim_broken[h] = f"{type(exc).__name__}: {exc}"

    out: dict[Criterion, Scorecard] = {}
    for criterion in criteria:
        scores: dict[Hypothesis, HypothesisScore] = {}
        totals: dict[Hypothesis, float] = {}
        for h in Hypothesis:
            if h not in fits:
                scores[h] = HypothesisScore(
                    None, None, None, broken.get(h, "no estimate available")
                )
                continue
            if criterion.needs_fim and h in fim_broken:
                scores[h] = HypothesisScore(fits[h], None, None, fim_broken[h])
                continue
            m_params = param_count(h, n)
            n_params = m_params + 2 if approach is Approach.A else m_params
            try:
                pen = penalty(
                    criterion,
                    n_params=n_params,
                    m_params=m_params,
                    k=k,
                    n=n,
                    approach=approach,
                    fim=fims.get(h),
                )
            except _HYPOTHESIS_FAILURES as exc:
                scores[h] = HypothesisScore(
                    fits[h], None, None, f"{type(exc).__name__}: {exc}"
                )
                continue
            total = fits[h] + pen
            scores[h] = HypothesisScore(fits[h], pen, total)
            totals[h] = total
        out[criterion] = Scorecard(
            criterion=criterion,
            approach=approach,
            scores=scores,
            chosen=_argmin_hypothesis(totals, n),
        )
    return out


def estimate_all_single(
    dataset: Dataset, approach: Approach, hypothesis: Hypothesis
) -> EstimateSet:
    """One hypothesis worth of :func:`covstruct.estimators.estimate_all`."""
    m_hat = estimate_covariance(hypothesis, dataset.secondary)
    low = cholesky_pd(m_hat)
    x_hat = inverse_from_cholesky(low)
    logdet = 2.0 * float(np.sum(np.log(low.diagonal().real)))
    alpha = None
    alpha_failure = None
    if approach is Approach.A:
        cut, steering = dataset.require_cut()
        try:
            alpha = estimate_alpha(hypothesis, m_hat, cut, steering, x_hat=x_hat)
        except DegenerateSteeringError as exc:
            # The covariance estimates stay valid for the secondary-only
            # likelihood; only the joint-likelihood rules lose this hypothesis.
            alpha_failure = f"{type(exc).__name__}: {exc}"
    return EstimateSet(
        hypothesis=hypothesis,
        m_hat=m_hat,
        x_hat=x_hat,
        logdet=logdet,
        alpha_hat=alpha,
        alpha_failure=alpha_failure,
    )
