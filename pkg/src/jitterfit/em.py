"""Hard-assignment EM over a fixed candidate set.

Each iteration scores every sample under every candidate model, commits each
sample to the best-scoring model, then refits each model on the samples it
won.  Iteration stops as soon as the label vector repeats, or when the
iteration budget runs out.

Responsibilities are plain normalized densities: no mixing proportions are
estimated, so a sample's responsibility row depends only on how the candidate
densities compare at that one value.
"""

from dataclasses import dataclass

import numpy as np

from .distributions import (
    ModelKind,
    ModelParams,
    log_pdf_many,
    mle_exponential,
    mle_gamma,
)
from .errors import (
    DegenerateDataError,
    InsufficientDataError,
    NonConvergenceError,
    SetupError,
)
from .traceio import JitterTrace

__all__ = [
    "MIN_SUBSET_SIZE",
    "EMConfig",
    "Assignment",
    "e_step",
    "hard_assign",
    "m_step",
    "em_fit",
]

# Smallest subset each family can be refitted on: the exponential mean needs
# one sample, the gamma shape solve needs two distinct ones.
MIN_SUBSET_SIZE = {ModelKind.EXPONENTIAL: 1, ModelKind.GAMMA: 2}


@dataclass(frozen=True)
class EMConfig:
    """Iteration budget and candidate set for one EM run."""

    max_iters: int = 50
    kinds: tuple[ModelKind, ...] = (ModelKind.EXPONENTIAL, ModelKind.GAMMA)

    def __post_init__(self):
        if int(self.max_iters) < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters!r}")
        object.__setattr__(self, "max_iters", int(self.max_iters))
        kinds = tuple(ModelKind(k) for k in self.kinds)
        if len(kinds) < 2:
            raise ValueError("the candidate set needs at least two models")
        if len(set(kinds)) != len(kinds):
            raise ValueError("candidate kinds must be distinct")
        object.__setattr__(self, "kinds", kinds)


@dataclass(frozen=True)
class Assignment:
    """Result of one EM run.

    ``labels[j]`` is the index into ``final_params`` of the model that owns
    sample j.  ``classification_loglik`` is the log-likelihood of the samples
    under their assigned models and ``loglik_history`` holds that quantity as
    it stood after each assignment pass.  ``warnings`` collects non-fatal
    events (frozen refits, samples no model could score).
    """

    labels: np.ndarray
    iterations_used: int
    converged: bool
    final_params: tuple[ModelParams, ...]
    classification_loglik: float
    loglik_history: tuple[float, ...]
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64, copy=True)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "final_params", tuple(self.final_params))
        object.__setattr__(self, "loglik_history", tuple(self.loglik_history))
        object.__setattr__(self, "warnings", tuple(self.warnings))


def _log_density_matrix(trace: JitterTrace, params) -> np.ndarray:
    return np.column_stack([log_pdf_many(p, trace.samples) for p in params])


def _responsibilities(log_densities: np.ndarray) -> tuple[np.ndarray, int]:
    """Normalize densities across models, row by row, in log space.

    Rows where every model scores zero density cannot be normalized; those
    samples fall back to a one-hot row on model 0 and are counted in the
    second return value.
    """
    row_max = log_densities.max(axis=1, keepdims=True)
    dead = ~np.isfinite(row_max[:, 0])
    shifted = log_densities - np.where(np.isfinite(row_max), row_max, 0.0)
    weights = np.exp(shifted)
    with np.errstate(invalid="ignore"):
        resp = weights / weights.sum(axis=1, keepdims=True)
    if dead.any():
        resp[dead, :] = 0.0
        resp[dead, 0] = 1.0
    return resp, int(dead.sum())


def e_step(trace: JitterTrace, params) -> np.ndarray:
    """Responsibility matrix: each row is the candidates' density vector at
    that sample, normalized to sum to one."""
    resp, _ = _responsibilities(_log_density_matrix(trace, params))
    return resp


def hard_assign(responsibilities: np.ndarray) -> np.ndarray:
    """Commit each sample to its highest-responsibility model.

    Ties go to the lowest model index, which is what argmax does.
    """
    return np.argmax(np.asarray(responsibilities), axis=1)


def _fit_kind(kind: ModelKind, samples) -> ModelParams:
    if kind is ModelKind.EXPONENTIAL:
        return mle_exponential(samples)
    return mle_gamma(samples)


def m_step(trace: JitterTrace, labels, prev_params) -> tuple[list[ModelParams], list[str]]:
    """Refit every model on its assigned subset.

    A model whose subset is too small, or whose fit degenerates, keeps its
    previous parameters; each such freeze is reported in the notes list.
    """
    labels = np.asarray(labels)
    updated: list[ModelParams] = []
    notes: list[str] = []
    for index, prev in enumerate(prev_params):
        subset = trace.samples[labels == index]
        name = prev.kind.name.lower()
        if subset.size < MIN_SUBSET_SIZE[prev.kind]:
            updated.append(prev)
            notes.append(
                f"model {index} ({name}): subset of {subset.size} sample(s) too "
                "small to refit, parameters kept"
            )
            continue
        try:
            updated.append(_fit_kind(prev.kind, subset))
        except (DegenerateDataError, NonConvergenceError) as exc:
            updated.append(prev)
            notes.append(f"model {index} ({name}): refit failed ({exc}), parameters kept")
    return updated, notes


def em_fit(trace: JitterTrace, config: EMConfig = EMConfig()) -> Assignment:
    """Run hard-assignment EM on a trace.

    Every candidate model is first fitted on the whole trace; those fits are
    the starting parameters.  Iteration then alternates assignment and
    refitting until the labels repeat exactly or ``config.max_iters`` passes
    have run.  A run that stops on the budget is returned with
    ``converged=False`` rather than raised, so the caller still sees the
    last assignment.
    """
    params: list[ModelParams] = []
    for index, kind in enumerate(config.kinds):
        try:
            params.append(_fit_kind(kind, trace.samples))
        except (InsufficientDataError, DegenerateDataError, NonConvergenceError) as exc:
            raise SetupError(
                f"initial fit failed for model {index} ({kind.name.lower()}): {exc}"
            ) from exc
    warnings: list[str] = []
    history: list[float] = []
    prev_labels: np.ndarray | None = None
    converged = False
    iterations_used = config.max_iters
    labels = np.zeros(len(trace), dtype=np.int64)
    for iteration in range(1, config.max_iters + 1):
        log_densities = _log_density_matrix(trace, params)
        resp, dead = _responsibilities(log_densities)
        if dead:
            warnings.append(
                f"iteration {iteration}: {dead} sample(s) scored zero density "
                "under every model, assigned to model 0"
            )
        labels = hard_assign(resp)
        history.append(
            float(np.take_along_axis(log_densities, labels[:, None], axis=1).sum())
        )
        if prev_labels is not None and np.array_equal(labels, prev_labels):
            converged = True
            iterations_used = iteration
            break
        params, notes = m_step(trace, labels, params)
        warnings.extend(f"iteration {iteration}: {note}" for note in notes)
        prev_labels = labels
    if converged:
        # The last refit happened before the pass that repeated the labels,
        # so history[-1] was already scored under the final parameters.
        loglik = history[-1]
    else:
        final_densities = _log_density_matrix(trace, params)
        loglik = float(
            np.take_along_axis(final_densities, labels[:, None], axis=1).sum()
        )
    return Assignment(
        labels=labels,
        iterations_used=iterations_used,
        converged=converged,
        final_params=tuple(params),
        classification_loglik=loglik,
        loglik_history=tuple(history),
        warnings=tuple(warnings),
    )
