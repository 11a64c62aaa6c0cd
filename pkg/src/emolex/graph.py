"""Similarity graph construction: edge weights, the smoothed transition matrix,
and the MST bandwidth heuristic for the euclidean kernel."""

import hashlib
import json
import os

import numpy as np

COSINE_LOGISTIC = "cosine-logistic"
EUCLIDEAN_RBF = "euclidean-rbf"

# Above this node count the weight matrix is computed in row blocks to bound
# peak temporary memory; results are identical either way. The env var caps
# the dense working-set budget in megabytes.
DEFAULT_BLOCK_THRESHOLD = 8192
MEMORY_BUDGET_ENV = "EMOLEX_MEMORY_BUDGET_MB"


def _default_block_size(n):
    budget = os.environ.get(MEMORY_BUDGET_ENV)
    if budget is not None:
        rows = int(float(budget) * 1e6 / (8 * n))
        return max(1, min(n, rows))
    return n if n <= DEFAULT_BLOCK_THRESHOLD else DEFAULT_BLOCK_THRESHOLD


class NumericalDegeneracyError(RuntimeError):
    """A transition-matrix row or column underflowed to zero mass."""


class PropagationParams:
    """Kernel choice plus its trainable/settable parameters.

    cosine-logistic needs alpha (scalar or d-vector) and b; euclidean-rbf
    needs sigma. epsilon in [0, 1) interpolates the transition matrix with
    the uniform matrix.
    """

    def __init__(self, kernel=COSINE_LOGISTIC, alpha=None, b=None,
                 epsilon=0.0, sigma=None):
        if kernel not in (COSINE_LOGISTIC, EUCLIDEAN_RBF):
            raise ValueError("unknown kernel %r" % kernel)
        if not (0.0 <= epsilon < 1.0):
            raise ValueError("epsilon must be in [0, 1)")
        if kernel == COSINE_LOGISTIC:
            if alpha is None or b is None:
                raise ValueError("cosine-logistic kernel requires alpha and b")
            alpha = np.asarray(alpha, dtype=np.float64)
            if alpha.ndim > 1:
                raise ValueError("alpha must be a scalar or a 1-D vector")
        else:
            if sigma is None or sigma <= 0:
                raise ValueError("euclidean-rbf kernel requires positive sigma")
        self.kernel = kernel
        self.alpha = alpha
        self.b = None if b is None else float(b)
        self.epsilon = float(epsilon)
        self.sigma = None if sigma is None else float(sigma)

    @property
    def alpha_is_vector(self):
        return self.alpha is not None and self.alpha.ndim == 1

    def to_dict(self):
        alpha = self.alpha
        if alpha is not None:
            alpha = alpha.tolist() if alpha.ndim else float(alpha)
        return {"kernel": self.kernel, "alpha": alpha, "b": self.b,
                "epsilon": self.epsilon, "sigma": self.sigma}

    @classmethod
    def from_dict(cls, d):
        return cls(kernel=d.get("kernel", COSINE_LOGISTIC), alpha=d.get("alpha"),
                   b=d.get("b"), epsilon=d.get("epsilon", 0.0), sigma=d.get("sigma"))

    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def logistic(z):
    """Numerically safe logistic, exact in both saturation tails."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def edge_weight(x_i, x_j, params):
    """Pairwise edge weight under the configured kernel.

    cosine-logistic: logistic(alpha * cos(x_i, x_j) + b) for scalar alpha, or
    logistic(sum_k alpha_k (x_hat_i x_hat_j)_k + b) for a d-vector alpha.
    euclidean-rbf: exp(-||x_i - x_j||^2 / sigma^2).
    """
    x_i = np.asarray(x_i, dtype=np.float64)
    x_j = np.asarray(x_j, dtype=np.float64)
    if params.kernel == EUCLIDEAN_RBF:
        d2 = float(np.sum((x_i - x_j) ** 2))
        return float(np.exp(-d2 / params.sigma ** 2))
    ui = x_i / np.linalg.norm(x_i)
    uj = x_j / np.linalg.norm(x_j)
    if params.alpha_is_vector:
        z = float(params.alpha @ (ui * uj)) + params.b
    else:
        z = float(params.alpha) * float(ui @ uj) + params.b
    w = float(logistic(z))
    if not np.isfinite(w):
        raise NumericalDegeneracyError("non-finite edge weight")
    return w


class TransitionMatrix:
    """Column-then-row-normalized, epsilon-smoothed transition matrix.

    Rows/columns are in labeled-first order: `order[k]` is the vocabulary
    index of graph node k, the first `n_labeled` nodes are labeled. The four
    partition blocks are views into the dense matrix.
    """

    def __init__(self, matrix, n_labeled, order, params_digest=""):
        matrix = np.asarray(matrix, dtype=np.float64)
        n = matrix.shape[0]
        if matrix.shape != (n, n):
            raise ValueError("transition matrix must be square")
        if np.any(matrix < 0):
            raise ValueError("negative transition probability")
        if not np.allclose(matrix.sum(axis=1), 1.0, atol=1e-9):
            raise ValueError("rows must sum to 1")
        self.matrix = matrix
        self.n_labeled = int(n_labeled)
        self.order = np.asarray(order, dtype=np.intp)
        self.params_digest = params_digest

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def n_unlabeled(self):
        return self.n - self.n_labeled

    @property
    def t_ll(self):
        return self.matrix[:self.n_labeled, :self.n_labeled]

    @property
    def t_lu(self):
        return self.matrix[:self.n_labeled, self.n_labeled:]

    @property
    def t_ul(self):
        return self.matrix[self.n_labeled:, :self.n_labeled]

    @property
    def t_uu(self):
        return self.matrix[self.n_labeled:, self.n_labeled:]

    def save(self, path):
        """Binary cache so `optimize` and `expand` can share construction work."""
        np.savez(path, matrix=self.matrix, n_labeled=self.n_labeled,
                 order=self.order, params_digest=self.params_digest)

    @classmethod
    def load(cls, path):
        with np.load(path, allow_pickle=False) as data:
            return cls(data["matrix"], int(data["n_labeled"]), data["order"],
                       str(data["params_digest"]))


def raw_weights(store, params, order, block_size=None):
    """Dense symmetric weight matrix over the given node order.

    Row-blocked computation (never materializing per-pair Hadamard products
    for vector alpha) keeps peak temporaries bounded on large graphs.
    """
    n = len(order)
    if block_size is None:
        block_size = _default_block_size(n)
    w = np.empty((n, n))
    if params.kernel == EUCLIDEAN_RBF:
        x = store.vectors[order]
        sq = np.sum(x * x, axis=1)
        for start in range(0, n, block_size):
            stop = min(start + block_size, n)
            d2 = sq[start:stop, None] + sq[None, :] - 2.0 * (x[start:stop] @ x.T)
            np.maximum(d2, 0.0, out=d2)
            w[start:stop] = np.exp(-d2 / params.sigma ** 2)
        return w
    u = store.unit_vectors[order]
    if params.alpha_is_vector:
        if u.shape[1] != params.alpha.shape[0]:
            raise ValueError("alpha vector length %d != embedding dim %d"
                             % (params.alpha.shape[0], u.shape[1]))
        left = u * params.alpha
    else:
        left = u * float(params.alpha)
    for start in range(0, n, block_size):
        stop = min(start + block_size, n)
        w[start:stop] = logistic(left[start:stop] @ u.T + params.b)
    return w


def normalize_transition(w):
    """Column-normalize raw weights, then row-normalize the result."""
    col = w.sum(axis=0)
    if np.any(col <= 0) or not np.all(np.isfinite(col)):
        raise NumericalDegeneracyError(
            "zero or non-finite column mass; consider epsilon smoothing")
    t = w / col[None, :]
    row = t.sum(axis=1)
    if np.any(row <= 0) or not np.all(np.isfinite(row)):
        raise NumericalDegeneracyError(
            "zero or non-finite row mass; consider epsilon smoothing")
    return t / row[:, None]


def smooth_matrix(t, epsilon):
    """Interpolate a row-stochastic matrix with the uniform matrix."""
    if not (0.0 <= epsilon < 1.0):
        raise ValueError("epsilon must be in [0, 1)")
    n = t.shape[0]
    return epsilon / n + (1.0 - epsilon) * t


def smooth_transition(tm, epsilon):
    """smooth_matrix applied to a TransitionMatrix, preserving the partition."""
    return TransitionMatrix(smooth_matrix(tm.matrix, epsilon), tm.n_labeled,
                            tm.order, tm.params_digest)


def build_transition(store, params, labeled_mask, block_size=None):
    """Assemble the smoothed transition matrix over the full graph.

    Nodes are ordered labeled-first, then unlabeled, each in vocabulary
    order, so the four-block partition is contiguous.
    """
    labeled_mask = np.asarray(labeled_mask, dtype=bool)
    if labeled_mask.shape != (len(store),):
        raise ValueError("labeled mask length mismatch")
    n_labeled = int(labeled_mask.sum())
    if n_labeled == 0 or n_labeled == len(store):
        raise ValueError("need at least one labeled and one unlabeled node")
    order = np.concatenate([np.flatnonzero(labeled_mask),
                            np.flatnonzero(~labeled_mask)])
    w = raw_weights(store, params, order, block_size)
    t = smooth_matrix(normalize_transition(w), params.epsilon)
    return TransitionMatrix(t, n_labeled, order, params.digest())


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i, j):
        self.parent[self.find(i)] = self.find(j)


def mst_sigma(store, labeled_indices, labels):
    """RBF bandwidth from the minimum-spanning-tree heuristic.

    Kruskal's algorithm runs over the complete euclidean graph on all nodes;
    d0 is the length of the first accepted edge that joins components
    containing differently-labeled points, and sigma = d0 / 3.
    """
    labeled_indices = list(labeled_indices)
    node_label = {i: lab for i, lab in zip(labeled_indices, labels)}
    if len(set(node_label.values())) < 2:
        raise ValueError("need at least two distinct labels among labeled nodes")

    x = store.vectors
    n = x.shape[0]
    sq = np.sum(x * x, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    iu, ju = np.triu_indices(n, k=1)
    edge_order = np.argsort(d2[iu, ju], kind="stable")

    uf = _UnionFind(n)
    comp_labels = {uf.find(i): {lab} for i, lab in node_label.items()}
    for e in edge_order:
        i, j = int(iu[e]), int(ju[e])
        ri, rj = uf.find(i), uf.find(j)
        if ri == rj:
            continue
        li = comp_labels.get(ri, set())
        lj = comp_labels.get(rj, set())
        if li and lj and len(li | lj) > 1:
            return float(np.sqrt(d2[i, j])) / 3.0
        uf.union(ri, rj)
        merged = li | lj
        if merged:
            comp_labels.pop(ri, None)
            comp_labels.pop(rj, None)
            comp_labels[uf.find(rj)] = merged
    raise ValueError("no MST edge joins differently-labeled components")
