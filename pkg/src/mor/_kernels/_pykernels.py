"""Pure-Python search kernels.

These are the reference implementations of the combinatorial hot loops:
subset-shattering scans and memoized game-tree recursions over version
spaces encoded as bitmasks. The compiled backend in ``_ckernels`` mirrors
every signature and must produce identical results; parity is enforced by
tests and measured by ``benchmarks/bench_kernels.py``.

Version spaces are bitmasks over function rows (bit f set = function f
survives), as arbitrary-size Python ints here. Margin comparisons carry a
1e-12 slack so grid-derived witnesses are not lost to rounding.
"""

from __future__ import annotations

from itertools import combinations, product

import numpy as np

MARGIN_TOL = 1e-12

BACKEND = "python"


def _unique_rows(arr: np.ndarray) -> np.ndarray:
    seen = set()
    keep = []
    for i in range(arr.shape[0]):
        key = arr[i].tobytes()
        if key not in seen:
            seen.add(key)
            keep.append(i)
    return arr[keep]


def vc_search(labels: np.ndarray) -> tuple[int, tuple[int, ...]]:
    """Largest shattered instance subset of a binary class.

    ``labels``: (functions, instances) array of 0/1 codes. Returns the
    dimension and one witness subset (column indices).
    """
    labels = _unique_rows(np.ascontiguousarray(labels, dtype=np.int64))
    n_funcs, n_points = labels.shape
    dim, best = 0, ()
    while dim < n_points:
        size = dim + 1
        if (1 << size) > n_funcs:
            break
        found = None
        for subset in combinations(range(n_points), size):
            codes = set()
            for f in range(n_funcs):
                code = 0
                for bit, col in enumerate(subset):
                    code |= int(labels[f, col]) << bit
                codes.add(code)
                if len(codes) == (1 << size):
                    found = subset
                    break
            if found:
                break
        if found is None:
            break
        dim, best = size, found
    return dim, best


def natarajan_search(
    labels: np.ndarray,
) -> tuple[int, tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Largest Natarajan-shattered subset of a multiclass (coded) class.

    Returns (dim, subset, first-witness codes, second-witness codes) with
    witnesses disagreeing at every subset point.
    """
    labels = _unique_rows(np.ascontiguousarray(labels, dtype=np.int64))
    n_funcs, n_points = labels.shape
    dim, best = 0, ((), (), ())
    while dim < n_points:
        size = dim + 1
        if (1 << size) > n_funcs:
            break
        found = None
        for subset in combinations(range(n_points), size):
            witness = _natarajan_witness(labels, subset)
            if witness is not None:
                found = (subset, witness[0], witness[1])
                break
        if found is None:
            break
        dim, best = size, found
    return (dim, *best)


def _natarajan_witness(labels, subset):
    size = len(subset)
    options = []
    for col in subset:
        vals = sorted(set(int(v) for v in labels[:, col]))
        pairs = list(combinations(vals, 2))
        if not pairs:
            return None
        options.append(pairs)
    full = (1 << size) - 1
    for assignment in product(*options):
        realized = 0
        for f in range(labels.shape[0]):
            sigma = 0
            ok = True
            for i, col in enumerate(subset):
                v = int(labels[f, col])
                if v == assignment[i][0]:
                    sigma |= 1 << i
                elif v != assignment[i][1]:
                    ok = False
                    break
            if ok:
                realized |= 1 << sigma
                if realized == (1 << (1 << size)) - 1:
                    break
        if bin(realized).count("1") == (1 << size):
            f_vals = tuple(a for a, _ in assignment)
            g_vals = tuple(b for _, b in assignment)
            return f_vals, g_vals
    return None


class VersionSpaceOracle:
    """Memoized depth of the label-splitting game over a coded class.

    The recursion: the depth of a version space V is the maximum over
    instances x and distinct-label pairs both realized at x within V of
    1 + min(depth of the two restricted spaces); 0 when no instance splits.
    """

    def __init__(self, labels: np.ndarray):
        labels = np.ascontiguousarray(labels, dtype=np.int64)
        self.n_functions, self.n_points = labels.shape
        self.full_mask = (1 << self.n_functions) - 1
        self._masks: list[list[int]] = []
        for col in range(self.n_points):
            by_code: dict[int, int] = {}
            for f in range(self.n_functions):
                code = int(labels[f, col])
                by_code[code] = by_code.get(code, 0) | (1 << f)
            self._masks.append([by_code[c] for c in sorted(by_code)])
        self._cache: dict[int, int] = {}

    def dim(self, mask: int | None = None) -> int:
        if mask is None:
            mask = self.full_mask
        return self._dim(mask)

    def _dim(self, mask: int) -> int:
        cached = self._cache.get(mask)
        if cached is not None:
            return cached
        best = 0
        for col_masks in self._masks:
            subs = [m & mask for m in col_masks]
            subs = [s for s in subs if s]
            if len(subs) < 2:
                continue
            dims = sorted(self._dim(s) for s in subs)
            cand = 1 + dims[-2]
            if cand > best:
                best = cand
        self._cache[mask] = best
        return best

    def restrict_mask(self, mask: int, col: int, code: int) -> int:
        by_code = self._masks[col]
        # _masks stores masks sorted by code; rebuild lookup lazily
        raise NotImplementedError


class LabelMaskIndex:
    """Per-(instance, label code) survivor masks for version-space play."""

    def __init__(self, labels: np.ndarray):
        labels = np.ascontiguousarray(labels, dtype=np.int64)
        self.n_functions, self.n_points = labels.shape
        self.full_mask = (1 << self.n_functions) - 1
        self.by_col: list[dict[int, int]] = []
        for col in range(self.n_points):
            d: dict[int, int] = {}
            for f in range(self.n_functions):
                code = int(labels[f, col])
                d[code] = d.get(code, 0) | (1 << f)
            self.by_col.append(d)

    def mask(self, col: int, code: int) -> int:
        return self.by_col[col].get(code, 0)


def _witness_candidates(values_at_x: np.ndarray, gamma: float):
    """Deduplicated witness candidates at one instance.

    Candidates are realized values and midpoints of realized value pairs;
    each is kept only if both margin sides are non-empty, and deduplicated
    by the (above, below) survivor-mask pair.
    """
    n_funcs = values_at_x.shape[0]
    vals = sorted(set(float(v) for v in values_at_x))
    raw = list(vals)
    for a, b in combinations(vals, 2):
        raw.append((a + b) / 2.0)
    out = []
    seen = set()
    for r in raw:
        above = 0
        below = 0
        for f in range(n_funcs):
            v = float(values_at_x[f])
            if v - r >= gamma - MARGIN_TOL:
                above |= 1 << f
            if r - v >= gamma - MARGIN_TOL:
                below |= 1 << f
        if above and below and (above, below) not in seen:
            seen.add((above, below))
            out.append((r, above, below))
    return out


def fat_search(
    values: np.ndarray, gamma: float
) -> tuple[int, tuple[int, ...], tuple[float, ...]]:
    """Largest gamma-shattered subset of a real scalar class.

    ``values``: (functions, instances) float array. Returns the dimension,
    a witness subset, and witness values r_i for that subset.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    n_funcs, n_points = values.shape
    cands = [_witness_candidates(values[:, col], gamma) for col in range(n_points)]
    usable = [col for col in range(n_points) if cands[col]]
    dim, best_subset, best_witness = 0, (), ()
    while dim < len(usable):
        size = dim + 1
        if (1 << size) > n_funcs:
            break
        found = None
        for subset in combinations(usable, size):
            witness = _fat_subset_witness([cands[c] for c in subset],
                                          (1 << n_funcs) - 1)
            if witness is not None:
                found = (subset, witness)
                break
        if found is None:
            break
        dim, best_subset, best_witness = size, found[0], found[1]
    return dim, best_subset, best_witness


def _fat_subset_witness(cand_lists, full_mask):
    for assignment in product(*cand_lists):
        if _covers_all_patterns(assignment, 0, full_mask):
            return tuple(r for r, _, _ in assignment)
    return None


def _covers_all_patterns(assignment, level, mask):
    if mask == 0:
        return False
    if level == len(assignment):
        return True
    _, above, below = assignment[level]
    return _covers_all_patterns(assignment, level + 1, mask & above) and \
        _covers_all_patterns(assignment, level + 1, mask & below)


class SeqFatOracle:
    """Memoized depth of the margin-splitting game (instance/witness trees).

    At a node with version space V, a move is an instance x and a witness
    value r; the two children keep the survivors at margin gamma above and
    below r. The depth search is capped, and memoized on (mask, cap).
    """

    def __init__(self, values: np.ndarray, gamma: float):
        values = np.ascontiguousarray(values, dtype=np.float64)
        self.n_functions, self.n_points = values.shape
        self.full_mask = (1 << self.n_functions) - 1
        self.moves = [
            _witness_candidates(values[:, col], gamma) for col in range(self.n_points)
        ]
        self._cache: dict[tuple[int, int], int] = {}

    def dim(self, cap: int, mask: int | None = None) -> int:
        if mask is None:
            mask = self.full_mask
        return self._dim(mask, cap)

    def _dim(self, mask: int, cap: int) -> int:
        if cap == 0:
            return 0
        key = (mask, cap)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        best = 0
        for col_moves in self.moves:
            for _, above, below in col_moves:
                a = above & mask
                b = below & mask
                if a and b:
                    d = 1 + min(self._dim(a, cap - 1), self._dim(b, cap - 1))
                    if d > best:
                        best = d
                        if best == cap:
                            self._cache[key] = best
                            return best
        self._cache[key] = best
        return best
