"""Exact KNN kernels: array-backed ball tree with two query backends.

The tree is stored as flat arrays over an implicit complete binary tree
(children of node i are 2i+1 and 2i+2), so it can be persisted and reloaded
without rebuilding. Building is plain numpy and shared by both backends;
querying has a numba-compiled path and a vectorized numpy fallback, chosen
by the EGSMOOTH_BACKEND environment variable ("numba" | "numpy").

Exactness contract shared by every code path (tree leaf scans, the numpy
fallback, and the brute-force oracle):

* squared L2 distance is accumulated in float64, sequentially over
  dimensions, from float32 inputs upcast exactly to float64;
* the K results are the smallest (distance, index) pairs in lexicographic
  order, i.e. distance ties break toward the smaller vocabulary index.

Ball bounds are only used for pruning and are deflated by a relative
epsilon before comparison, so last-ulp rounding in the bound arithmetic can
never prune a node containing a tying candidate.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dep, but stay importable
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


BACKEND_ENV = "EGSMOOTH_BACKEND"
DEFAULT_LEAF_SIZE = 40

# Relative deflation applied to squared lower bounds before prune checks.
# Far larger than accumulated rounding error (a few ulps), far smaller than
# any distance gap the caller could observe.
_BOUND_SLACK = 1e-10


def resolve_backend(explicit: str | None = None) -> str:
    """Pick the query backend: explicit argument, else env var, else numba."""
    choice = explicit if explicit is not None else os.environ.get(BACKEND_ENV, "")
    choice = choice.strip().lower()
    if choice == "":
        return "numba" if HAVE_NUMBA else "numpy"
    if choice not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {choice!r}, expected 'numba' or 'numpy'")
    if choice == "numba" and not HAVE_NUMBA:
        warnings.warn("numba not importable, falling back to numpy backend")
        return "numpy"
    return choice


def sqdist_rows(rows: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Squared L2 distances from x to each row, float64, accumulated
    sequentially over dimensions to match the scalar kernels bit-for-bit."""
    rows64 = rows.astype(np.float64, copy=False)
    x64 = x.astype(np.float64, copy=False)
    acc = np.zeros(rows.shape[0], dtype=np.float64)
    for j in range(rows.shape[1]):
        diff = rows64[:, j] - x64[j]
        acc += diff * diff
    return acc


# ---------------------------------------------------------------------------
# Build (numpy, shared by both backends)
# ---------------------------------------------------------------------------


def build_tree(data: np.ndarray, leaf_size: int = DEFAULT_LEAF_SIZE):
    """Build ball-tree arrays over data (n, dim) float32.

    Returns (idx_array, node_start, node_end, node_is_leaf, node_centroid,
    node_radius). Splits are at the median of the largest-spread dimension,
    so leaves hold between leaf_size and 2*leaf_size points (single-node
    trees excepted).
    """
    if data.ndim != 2:
        raise ValueError("data must be 2-D")
    n, dim = data.shape
    if n == 0:
        raise ValueError("cannot build a tree over zero points")
    if leaf_size < 1:
        raise ValueError("leaf_size must be >= 1")

    if n <= leaf_size:
        n_levels = 1
    else:
        # leaves end up holding between leaf_size and 2*leaf_size points
        n_levels = 1 + max(0, int(np.log2((n - 1) / leaf_size)))
        while (1 << (n_levels - 1)) > n:  # paranoia: never allow empty leaves
            n_levels -= 1
    n_nodes = (1 << n_levels) - 1
    first_leaf = n_nodes // 2

    idx_array = np.arange(n, dtype=np.int64)
    node_start = np.zeros(n_nodes, dtype=np.int64)
    node_end = np.zeros(n_nodes, dtype=np.int64)
    node_is_leaf = np.zeros(n_nodes, dtype=np.uint8)
    node_centroid = np.zeros((n_nodes, dim), dtype=np.float64)
    node_radius = np.zeros(n_nodes, dtype=np.float64)

    node_start[0] = 0
    node_end[0] = n
    for i in range(n_nodes):
        if i > 0:
            parent = (i - 1) // 2
            s, e = node_start[parent], node_end[parent]
            mid = (s + e) // 2
            if i % 2 == 1:
                node_start[i], node_end[i] = s, mid
            else:
                node_start[i], node_end[i] = mid, e
        s, e = node_start[i], node_end[i]
        members = data[idx_array[s:e]]
        centroid = members.astype(np.float64).mean(axis=0)
        node_centroid[i] = centroid
        node_radius[i] = float(np.sqrt(np.max(sqdist_rows(members, centroid))))
        if i >= first_leaf:
            node_is_leaf[i] = 1
        else:
            # median split along the dimension with the largest spread
            spread = members.max(axis=0) - members.min(axis=0)
            split_dim = int(np.argmax(spread))
            mid = (s + e) // 2
            vals = data[idx_array[s:e], split_dim]
            order = np.argpartition(vals, mid - s)
            idx_array[s:e] = idx_array[s:e][order]

    return idx_array, node_start, node_end, node_is_leaf, node_centroid, node_radius


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------


@njit(cache=True)
def _sqdist_f32(row, x):
    acc = 0.0
    for j in range(x.shape[0]):
        diff = np.float64(row[j]) - x[j]
        acc += diff * diff
    return acc


@njit(cache=True)
def _sqdist_f64(row, x):
    acc = 0.0
    for j in range(x.shape[0]):
        diff = row[j] - x[j]
        acc += diff * diff
    return acc


@njit(cache=True)
def _heap_worse(heap_d, heap_i, a, b):
    # True when entry a is lexicographically greater than entry b.
    if heap_d[a] > heap_d[b]:
        return True
    return heap_d[a] == heap_d[b] and heap_i[a] > heap_i[b]


@njit(cache=True)
def _heap_push(heap_d, heap_i, size, d, i):
    heap_d[size] = d
    heap_i[size] = i
    pos = size
    while pos > 0:
        parent = (pos - 1) // 2
        if _heap_worse(heap_d, heap_i, pos, parent):
            heap_d[pos], heap_d[parent] = heap_d[parent], heap_d[pos]
            heap_i[pos], heap_i[parent] = heap_i[parent], heap_i[pos]
            pos = parent
        else:
            break


@njit(cache=True)
def _heap_sift_down(heap_d, heap_i, size, pos):
    while True:
        left = 2 * pos + 1
        right = left + 1
        largest = pos
        if left < size and _heap_worse(heap_d, heap_i, left, largest):
            largest = left
        if right < size and _heap_worse(heap_d, heap_i, right, largest):
            largest = right
        if largest == pos:
            return
        heap_d[pos], heap_d[largest] = heap_d[largest], heap_d[pos]
        heap_i[pos], heap_i[largest] = heap_i[largest], heap_i[pos]
        pos = largest


@njit(cache=True)
def _query_numba(
    data,
    idx_array,
    node_start,
    node_end,
    node_is_leaf,
    node_centroid,
    node_radius,
    x,
    k,
    out_idx,
    out_dist,
):
    n_nodes = node_start.shape[0]
    depth = 1
    while (1 << depth) - 1 < n_nodes:
        depth += 1
    stack_node = np.empty(2 * depth + 2, dtype=np.int64)
    stack_bound = np.empty(2 * depth + 2, dtype=np.float64)

    heap_d = np.empty(k, dtype=np.float64)
    heap_i = np.empty(k, dtype=np.int64)
    size = 0

    dc = np.sqrt(_sqdist_f64(node_centroid[0], x))
    m = dc - node_radius[0]
    root_bound = 0.0 if m <= 0.0 else m * m * (1.0 - _BOUND_SLACK)
    stack_node[0] = 0
    stack_bound[0] = root_bound
    top = 1

    while top > 0:
        top -= 1
        node = stack_node[top]
        bound = stack_bound[top]
        if size == k and bound > heap_d[0]:
            continue
        if node_is_leaf[node] == 1:
            for pos in range(node_start[node], node_end[node]):
                i = idx_array[pos]
                d = _sqdist_f32(data[i], x)
                if size < k:
                    _heap_push(heap_d, heap_i, size, d, i)
                    size += 1
                elif d < heap_d[0] or (d == heap_d[0] and i < heap_i[0]):
                    heap_d[0] = d
                    heap_i[0] = i
                    _heap_sift_down(heap_d, heap_i, size, 0)
        else:
            child1 = 2 * node + 1
            child2 = child1 + 1
            dc1 = np.sqrt(_sqdist_f64(node_centroid[child1], x))
            m1 = dc1 - node_radius[child1]
            b1 = 0.0 if m1 <= 0.0 else m1 * m1 * (1.0 - _BOUND_SLACK)
            dc2 = np.sqrt(_sqdist_f64(node_centroid[child2], x))
            m2 = dc2 - node_radius[child2]
            b2 = 0.0 if m2 <= 0.0 else m2 * m2 * (1.0 - _BOUND_SLACK)
            # push the farther child first so the nearer is expanded first
            if b1 <= b2:
                stack_node[top] = child2
                stack_bound[top] = b2
                top += 1
                stack_node[top] = child1
                stack_bound[top] = b1
                top += 1
            else:
                stack_node[top] = child1
                stack_bound[top] = b1
                top += 1
                stack_node[top] = child2
                stack_bound[top] = b2
                top += 1

    # drain the max-heap back to front for ascending (distance, index) order
    result = size
    while size > 0:
        size -= 1
        out_idx[size] = heap_i[0]
        out_dist[size] = heap_d[0]
        heap_d[0] = heap_d[size]
        heap_i[0] = heap_i[size]
        _heap_sift_down(heap_d, heap_i, size, 0)
    return result


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------


def _query_numpy(
    data,
    idx_array,
    node_start,
    node_end,
    node_is_leaf,
    node_centroid,
    node_radius,
    x,
    k,
):
    # Traverse with a scalar running bound (the k-th smallest distance seen
    # so far, values only); gather surviving leaf members, then do a single
    # exact selection pass at the end. Candidate distances always come from
    # sqdist_rows, so the selection is bit-identical to brute force.
    def bound2(node: int) -> float:
        diff = node_centroid[node] - x
        m = float(np.sqrt(diff @ diff)) - float(node_radius[node])
        return 0.0 if m <= 0.0 else m * m * (1.0 - _BOUND_SLACK)

    gathered_i: list[np.ndarray] = []
    gathered_d: list[np.ndarray] = []
    topk = np.full(k, np.inf)  # k smallest distance values so far
    worst = np.inf
    stack = [(0, bound2(0))]
    while stack:
        node, bound = stack.pop()
        if bound > worst:
            continue
        if node_is_leaf[node]:
            members = idx_array[node_start[node] : node_end[node]]
            d2 = sqdist_rows(data[members], x)
            gathered_i.append(members)
            gathered_d.append(d2)
            pool = np.concatenate([topk, d2])
            if pool.size > k:
                pool = np.partition(pool, k - 1)[:k]
            topk = pool
            worst = float(topk[-1]) if topk.size == k else np.inf
        else:
            child1, child2 = 2 * node + 1, 2 * node + 2
            b1, b2 = bound2(child1), bound2(child2)
            if b1 <= b2:
                stack.append((child2, b2))
                stack.append((child1, b1))
            else:
                stack.append((child1, b1))
                stack.append((child2, b2))
    all_i = np.concatenate(gathered_i)
    all_d = np.concatenate(gathered_d)
    order = np.lexsort((all_i, all_d))[:k]
    return all_i[order], all_d[order]


def query_tree(tree_arrays, x: np.ndarray, k: int, backend: str | None = None):
    """Exact KNN over built tree arrays. Returns (indices, distances) of the
    min(k, n) nearest points, ascending by (distance, index)."""
    idx_array, node_start, node_end, node_is_leaf, node_centroid, node_radius, data = tree_arrays
    x64 = np.ascontiguousarray(x, dtype=np.float64)
    k_eff = min(int(k), data.shape[0])
    if k_eff < 1:
        raise ValueError("k must be >= 1")
    chosen = resolve_backend(backend)
    if chosen == "numba":
        out_idx = np.empty(k_eff, dtype=np.int64)
        out_dist = np.empty(k_eff, dtype=np.float64)
        found = _query_numba(
            data,
            idx_array,
            node_start,
            node_end,
            node_is_leaf,
            node_centroid,
            node_radius,
            x64,
            k_eff,
            out_idx,
            out_dist,
        )
        return out_idx[:found], np.sqrt(out_dist[:found])
    best_i, best_d = _query_numpy(
        data,
        idx_array,
        node_start,
        node_end,
        node_is_leaf,
        node_centroid,
        node_radius,
        x64,
        k_eff,
    )
    return best_i, np.sqrt(best_d)


def brute_force(data: np.ndarray, x: np.ndarray, k: int):
    """Exhaustive-scan KNN with the same output contract as query_tree."""
    x64 = np.ascontiguousarray(x, dtype=np.float64)
    n = data.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
    d2 = sqdist_rows(data, x64)
    order = np.lexsort((np.arange(n, dtype=np.int64), d2))[: min(int(k), n)]
    return order.astype(np.int64), np.sqrt(d2[order])
