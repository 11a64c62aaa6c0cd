"""Label propagation solvers: clamped fixed-point iteration and the
closed-form linear solve, plus the end-to-end expansion entry point."""

from dataclasses import dataclass, field

import numpy as np

from .graph import NumericalDegeneracyError, build_transition
from .lexicon import LabelMatrix, init_label_matrix

# Closed form is auto-selected below this many unlabeled nodes; above it the
# u x u factorization becomes the expensive path.
CLOSED_FORM_MAX_UNLABELED = 2000


@dataclass
class SolveReport:
    method: str
    iterations: int
    final_delta: float
    residual: float
    converged: bool = True

    def to_dict(self):
        return {"method": self.method, "iterations": self.iterations,
                "final_delta": self.final_delta, "residual": self.residual,
                "converged": self.converged}


def _residual(a, b_mat, y_u, y_l):
    return float(np.max(np.abs(y_u - a @ y_u - b_mat @ y_l))) if y_u.size else 0.0


def _assemble(tm, y_l, y_u, labels):
    """Put solved rows back into vocabulary order."""
    n, m = tm.n, y_l.shape[1]
    rows = np.empty((n, m))
    graph_rows = np.vstack([y_l, y_u]) if y_u.size else y_l
    rows[tm.order] = graph_rows
    mask = np.zeros(n, dtype=bool)
    mask[tm.order[:tm.n_labeled]] = True
    return LabelMatrix(rows, mask)


def propagate_iterative(tm, label_matrix, tol=1e-6, max_iter=1000):
    """Repeat Y_U <- T_uu Y_U + T_ul Y_L with labeled rows clamped.

    Stops when the max-abs change of a sweep drops below tol. Rows are
    re-normalized each sweep to cap floating-point drift (a guard, not an
    algorithm change). Labeled rows are returned bit-equal to the input.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if tm.n_labeled < 1:
        raise ValueError("need at least one labeled row")
    y = label_matrix.rows[tm.order]
    y_l = y[:tm.n_labeled].copy()
    y_u = y[tm.n_labeled:].copy()
    a, b_mat = tm.t_uu, tm.t_ul

    iterations = 0
    delta = np.inf
    converged = False
    while iterations < max_iter:
        new = a @ y_u + b_mat @ y_l
        new /= new.sum(axis=1, keepdims=True)
        delta = float(np.max(np.abs(new - y_u))) if new.size else 0.0
        y_u = new
        iterations += 1
        if delta < tol:
            converged = True
            break

    report = SolveReport("iterative", iterations, delta,
                         _residual(a, b_mat, y_u, y_l), converged)
    return _assemble(tm, y_l, y_u, label_matrix), report


def propagate_closed_form(tm, label_matrix):
    """Solve Y_U = (I - T_uu)^{-1} T_ul Y_L by factorization.

    Fails with a diagnostic when (I - T_uu) is singular or the solve is
    numerically degenerate (possible only at epsilon = 0 with a component
    disconnected in probability from the labeled set).
    """
    if tm.n_labeled < 1:
        raise ValueError("need at least one labeled row")
    y = label_matrix.rows[tm.order]
    y_l = y[:tm.n_labeled].copy()
    a, b_mat = tm.t_uu, tm.t_ul
    u = tm.n_unlabeled
    if u == 0:
        report = SolveReport("closed-form", 0, 0.0, 0.0)
        return _assemble(tm, y_l, np.empty((0, y_l.shape[1])), label_matrix), report
    system = np.eye(u) - a
    try:
        y_u = np.linalg.solve(system, b_mat @ y_l)
    except np.linalg.LinAlgError as exc:
        raise NumericalDegeneracyError(
            "(I - T_uu) is singular; epsilon = 0 with a component disconnected "
            "in probability from the labeled set") from exc
    if not np.all(np.isfinite(y_u)) or np.linalg.cond(system) > 1e12:
        raise NumericalDegeneracyError(
            "(I - T_uu) is ill-conditioned; consider epsilon smoothing")
    report = SolveReport("closed-form", 1, 0.0, _residual(a, b_mat, y_u, y_l))
    return _assemble(tm, y_l, y_u, label_matrix), report


@dataclass
class ExpansionResult:
    """Per-word distributions for the whole vocabulary plus run provenance."""

    vocab: object
    emotions: object
    distributions: np.ndarray
    labeled_mask: np.ndarray
    params: object
    report: SolveReport
    seed_tokens_missing: int = 0
    extra: dict = field(default_factory=dict)

    def distribution(self, token):
        return self.distributions[self.vocab.index[token]]

    def argmax_label(self, token):
        return self.emotions.names[int(np.argmax(self.distribution(token)))]

    def sidecar(self):
        return {"params": self.params.to_dict(), "solve": self.report.to_dict(),
                "seed_tokens_missing": self.seed_tokens_missing, **self.extra}


def expand(store, seed, emotions=None, params=None, solver="auto",
           tol=1e-6, max_iter=1000, transition=None):
    """End-to-end expansion: init Y, build the transition matrix, solve,
    and return token -> distribution for every vocabulary word.

    Seed rows pass through unchanged. `solver` is "iterative", "closed", or
    "auto" (closed form when the unlabeled count is small). A prebuilt
    `transition` may be passed to share work across calls.
    """
    if emotions is None:
        emotions = seed.emotions
    if params is None:
        raise ValueError("propagation params are required")
    label_matrix, missing = init_label_matrix(store.vocab, seed, emotions)
    if label_matrix.n_labeled == 0:
        raise ValueError("no seed token is present in the vocabulary")

    if label_matrix.n_labeled == len(store.vocab):
        # Empty U: nothing to propagate, pass seed rows through.
        report = SolveReport("closed-form", 0, 0.0, 0.0)
        return ExpansionResult(store.vocab, emotions, label_matrix.rows,
                               label_matrix.labeled_mask, params, report, missing)

    tm = transition
    if tm is None:
        tm = build_transition(store, params, label_matrix.labeled_mask)
    if solver == "auto":
        solver = "closed" if tm.n_unlabeled <= CLOSED_FORM_MAX_UNLABELED else "iterative"
    if solver == "closed":
        solved, report = propagate_closed_form(tm, label_matrix)
    elif solver == "iterative":
        solved, report = propagate_iterative(tm, label_matrix, tol=tol,
                                             max_iter=max_iter)
    else:
        raise ValueError("unknown solver %r" % solver)
    return ExpansionResult(store.vocab, emotions, solved.rows,
                           solved.labeled_mask, params, report, missing)
