"""Entropy-minimizing hyperparameter search for the propagation graph.

The objective is the entropy of the unlabeled predictions after K unrolled
clamped propagation sweeps, with the transition matrix rebuilt from the
current (alpha, b, epsilon) at every evaluation. Gradients are accumulated
in reverse through the unrolled sweeps, the smoothing, and both
normalization passes. epsilon is trained through a logit reparameterization
so it stays in (0, 1).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import COSINE_LOGISTIC, PropagationParams, logistic
from .lexicon import init_label_matrix

# Full-graph fitting of a d-vector alpha is refused above this node count;
# batch mode is mandatory there (the memory cost grows with n^2 d).
VECTOR_ALPHA_FULL_GRAPH_LIMIT = 8192


class GradientError(RuntimeError):
    """A non-finite gradient, annotated with the parameter at fault."""


@dataclass
class OptimizerConfig:
    mode: str = "full"
    learning_rate: float = 0.1
    decay: float = 0.0
    epochs: int = 100
    unroll_steps: int = 10
    batch_size: int = 5000
    num_batches: int = 1000
    epochs_per_batch: int = 3
    rng_seed: int = 0

    def __post_init__(self):
        if self.mode not in ("full", "batch"):
            raise ValueError("mode must be 'full' or 'batch'")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.decay < 0:
            raise ValueError("decay must be non-negative")
        for name in ("epochs", "unroll_steps", "batch_size", "num_batches",
                     "epochs_per_batch"):
            if getattr(self, name) < 1:
                raise ValueError("%s must be >= 1" % name)

    def to_dict(self):
        return {k: getattr(self, k) for k in (
            "mode", "learning_rate", "decay", "epochs", "unroll_steps",
            "batch_size", "num_batches", "epochs_per_batch", "rng_seed")}


@dataclass
class OptTrace:
    entropies: list = field(default_factory=list)
    grad_norms: list = field(default_factory=list)
    alphas: list = field(default_factory=list)
    bs: list = field(default_factory=list)
    epsilons: list = field(default_factory=list)

    def record(self, entropy_value, grad_norm, alpha, b, epsilon):
        self.entropies.append(float(entropy_value))
        self.grad_norms.append(float(grad_norm))
        alpha = np.asarray(alpha, dtype=np.float64)
        self.alphas.append(float(alpha.mean()))
        self.bs.append(float(b))
        self.epsilons.append(float(epsilon))

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("epoch,entropy,grad_norm,alpha_mean,b,epsilon\n")
            for i in range(len(self.entropies)):
                fh.write("%d,%.17g,%.17g,%.17g,%.17g,%.17g\n" % (
                    i, self.entropies[i], self.grad_norms[i], self.alphas[i],
                    self.bs[i], self.epsilons[i]))


def entropy(y_u):
    """Natural-log entropy summed over rows and classes, with 0 log 0 := 0."""
    y_u = np.asarray(y_u, dtype=np.float64)
    if np.any(y_u < 0):
        raise ValueError("negative probability component")
    pos = y_u > 0
    return float(-np.sum(y_u[pos] * np.log(y_u[pos])))


def _logit(p):
    return math.log(p) - math.log1p(-p)


def _forward_backward(unit, n_labeled, y_l, alpha, b, epsilon, unroll_steps,
                      want_grad=True, per_row=False):
    """Entropy of the K-step unrolled propagation and its analytic gradient.

    `unit` holds unit vectors in labeled-first order. Returns
    (H, {"alpha", "b", "eps_logit"}) with gradients matching alpha's shape;
    the gradient dict is None when want_grad is false. With per_row the
    objective is the mean entropy per unlabeled row, which leaves the
    full-graph minimizer unchanged but makes batch-subgraph gradients
    scale-comparable to full-graph ones.
    """
    n = unit.shape[0]
    u_count = n - n_labeled
    m = y_l.shape[1]
    alpha = np.asarray(alpha, dtype=np.float64)
    vector_alpha = alpha.ndim == 1

    if vector_alpha:
        left = unit * alpha
    else:
        left = unit * float(alpha)
    z = left @ unit.T + b
    w = logistic(z)
    col = w.sum(axis=0)
    t1 = w / col[None, :]
    row = t1.sum(axis=1)
    t2 = t1 / row[:, None]
    tt = epsilon / n + (1.0 - epsilon) * t2

    a = tt[n_labeled:, n_labeled:]
    b_mat = tt[n_labeled:, :n_labeled]
    iterates = [np.full((u_count, m), 1.0 / m)]
    for _ in range(unroll_steps):
        iterates.append(a @ iterates[-1] + b_mat @ y_l)
    y_final = iterates[-1]
    scale = 1.0 / u_count if per_row else 1.0
    h = entropy(y_final) * scale

    if not want_grad:
        return h, None

    g = -scale * (np.log(np.maximum(y_final, 1e-300)) + 1.0)
    g_a = np.zeros_like(a)
    g_b_mat = np.zeros_like(b_mat)
    for t in range(unroll_steps, 0, -1):
        g_a += g @ iterates[t - 1].T
        g_b_mat += g @ y_l.T
        g = a.T @ g

    g_tt = np.zeros((n, n))
    g_tt[n_labeled:, n_labeled:] = g_a
    g_tt[n_labeled:, :n_labeled] = g_b_mat

    g_eps = float(np.sum(g_tt * (1.0 / n - t2)))
    g_t2 = (1.0 - epsilon) * g_tt
    g_t1 = (g_t2 - np.sum(g_t2 * t2, axis=1, keepdims=True)) / row[:, None]
    g_w = (g_t1 - np.sum(g_t1 * t1, axis=0, keepdims=True)) / col[None, :]
    g_z = g_w * w * (1.0 - w)

    if vector_alpha:
        g_alpha = np.sum((g_z @ unit) * unit, axis=0)
    else:
        g_alpha = float(np.sum(g_z * (unit @ unit.T)))
    g_b = float(np.sum(g_z))
    g_eps_logit = g_eps * epsilon * (1.0 - epsilon)

    grads = {"alpha": g_alpha, "b": g_b, "eps_logit": g_eps_logit}
    for name, value in grads.items():
        if not np.all(np.isfinite(value)):
            raise GradientError("non-finite gradient for %s" % name)
    return h, grads


def entropy_gradient(store, label_matrix, params, unroll_steps=10):
    """Analytic (entropy, gradient) of the unrolled objective at `params`.

    Gradients are reported for alpha (matching its scalar/vector shape), b,
    and the logit of epsilon.
    """
    if params.kernel != COSINE_LOGISTIC:
        raise ValueError("gradients are defined for the cosine-logistic kernel")
    order = np.concatenate([np.flatnonzero(label_matrix.labeled_mask),
                            np.flatnonzero(~label_matrix.labeled_mask)])
    unit = store.unit_vectors[order]
    y_l = label_matrix.labeled_rows
    return _forward_backward(unit, label_matrix.n_labeled, y_l, params.alpha,
                             params.b, params.epsilon, unroll_steps)


def unrolled_entropy(store, label_matrix, params, unroll_steps=10):
    """Objective value only (used by tests for finite differencing)."""
    order = np.concatenate([np.flatnonzero(label_matrix.labeled_mask),
                            np.flatnonzero(~label_matrix.labeled_mask)])
    unit = store.unit_vectors[order]
    h, _ = _forward_backward(unit, label_matrix.n_labeled,
                             label_matrix.labeled_rows, params.alpha,
                             params.b, params.epsilon, unroll_steps,
                             want_grad=False)
    return h


class _State:
    """Mutable (alpha, b, eps_logit) triple shared across descent steps."""

    def __init__(self, alpha, b, epsilon):
        self.alpha = np.asarray(alpha, dtype=np.float64).copy()
        self.b = float(b)
        self.eps_logit = _logit(epsilon)

    @property
    def epsilon(self):
        return float(logistic(np.asarray(self.eps_logit)))

    def step(self, grads, lr):
        self.alpha = self.alpha - lr * grads["alpha"]
        self.b -= lr * grads["b"]
        self.eps_logit -= lr * grads["eps_logit"]

    def params(self):
        return PropagationParams(COSINE_LOGISTIC, alpha=self.alpha.copy(),
                                 b=self.b, epsilon=self.epsilon)

    def snapshot(self):
        return (self.alpha.copy(), self.b, self.eps_logit)

    def restore(self, snap):
        self.alpha, self.b, self.eps_logit = snap[0].copy(), snap[1], snap[2]


def _grad_norm(grads):
    parts = [np.ravel(np.asarray(grads["alpha"], dtype=np.float64)),
             np.array([grads["b"], grads["eps_logit"]])]
    return float(np.linalg.norm(np.concatenate(parts)))


_DEFAULT_INIT = {"alpha": 0.0, "b": 0.0, "epsilon": 0.1}


def fit_full(store, seed, config, init=None):
    """Plain gradient descent on the full-graph unrolled entropy.

    Runs config.epochs steps with multiplicative learning-rate decay,
    tracking the best-entropy parameters. If the objective diverges the rate
    is halved and the fit restarted, up to three times.
    """
    init = dict(_DEFAULT_INIT, **(init or {}))
    label_matrix, _ = init_label_matrix(store.vocab, seed)
    alpha0 = np.asarray(init["alpha"], dtype=np.float64)
    if alpha0.ndim == 1 and len(store) > VECTOR_ALPHA_FULL_GRAPH_LIMIT:
        raise ValueError(
            "vector-alpha full-graph fitting is refused above %d nodes; "
            "use batch mode" % VECTOR_ALPHA_FULL_GRAPH_LIMIT)
    order = np.concatenate([np.flatnonzero(label_matrix.labeled_mask),
                            np.flatnonzero(~label_matrix.labeled_mask)])
    unit = store.unit_vectors[order]
    y_l = label_matrix.labeled_rows

    lr0 = config.learning_rate
    last_error = None
    for attempt in range(4):
        state = _State(alpha0, init["b"], init["epsilon"])
        trace = OptTrace()
        best = (math.inf, state.snapshot())
        try:
            for epoch in range(config.epochs):
                h, grads = _forward_backward(unit, label_matrix.n_labeled, y_l,
                                             state.alpha, state.b,
                                             state.epsilon, config.unroll_steps,
                                             per_row=True)
                if not math.isfinite(h):
                    raise GradientError("entropy diverged")
                trace.record(h, _grad_norm(grads), state.alpha, state.b,
                             state.epsilon)
                if h < best[0]:
                    best = (h, state.snapshot())
                lr = lr0 / (1.0 + config.decay * epoch)
                state.step(grads, lr)
        except GradientError as exc:
            last_error = exc
            lr0 /= 2.0
            continue
        state.restore(best[1])
        return state.params(), trace
    raise GradientError("entropy diverged after 3 learning-rate halvings: %s"
                        % last_error)


def _sample_batch(rng, labeled_idx, unlabeled_idx, batch_size, total):
    """Labeled-first batch indices preserving the global labeled fraction."""
    n_lab = math.ceil(batch_size * len(labeled_idx) / total)
    n_unl = batch_size - n_lab
    if n_lab < 1 or n_unl < 1:
        raise ValueError("batch has no labeled or no unlabeled nodes")
    lab = rng.choice(labeled_idx, size=n_lab, replace=False)
    unl = rng.choice(unlabeled_idx, size=n_unl, replace=False)
    return np.concatenate([np.sort(lab), np.sort(unl)]), n_lab


def fit_batched(store, seed, config, init=None):
    """Shared-parameter descent over random vocabulary subsamples.

    Each batch fixes the labeled/unlabeled proportion of the full graph,
    builds only its own submatrix, and applies config.epochs_per_batch
    descent steps to the shared parameters.
    """
    init = dict(_DEFAULT_INIT, **(init or {}))
    if config.batch_size >= len(store):
        raise ValueError("batch_size must be smaller than the vocabulary")
    label_matrix, _ = init_label_matrix(store.vocab, seed)
    labeled_idx = np.flatnonzero(label_matrix.labeled_mask)
    unlabeled_idx = np.flatnonzero(~label_matrix.labeled_mask)
    if labeled_idx.size == 0 or unlabeled_idx.size == 0:
        raise ValueError("need at least one labeled and one unlabeled node")

    rng = np.random.default_rng(config.rng_seed)
    state = _State(init["alpha"], init["b"], init["epsilon"])
    trace = OptTrace()
    lr0 = config.learning_rate
    step = 0
    for _ in range(config.num_batches):
        for attempt in range(10):
            try:
                batch, n_lab = _sample_batch(rng, labeled_idx, unlabeled_idx,
                                             config.batch_size, len(store))
                break
            except ValueError:
                if attempt == 9:
                    raise
        unit = store.unit_vectors[batch]
        y_l = label_matrix.rows[batch[:n_lab]]
        for _ in range(config.epochs_per_batch):
            h, grads = _forward_backward(unit, n_lab, y_l, state.alpha,
                                         state.b, state.epsilon,
                                         config.unroll_steps, per_row=True)
            trace.record(h, _grad_norm(grads), state.alpha, state.b,
                         state.epsilon)
            lr = lr0 / (1.0 + config.decay * step)
            state.step(grads, lr)
            step += 1
    return state.params(), trace
