"""Finite domains, vector-valued function classes, distributions, and risk.

Everything here is an explicit table over a finite domain, so every
expectation, infimum, and image is exactly computable. Instances are opaque
integer ids; labels are tuples of scalars (``-1.0``/``+1.0`` for binary
coordinates, values in ``[0, 1]`` for real coordinates). Coordinates are
1-based in every public signature.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from itertools import product
from typing import Callable

import numpy as np

from .errors import (
    ArityError,
    ConfigError,
    CoordinateError,
    DomainError,
    KindError,
    ParameterError,
)

Label = tuple[float, ...]

BINARY = "binary"
REAL = "real"

#: Tolerance used when snapping real values onto a discretization grid.
GRID_NUDGE = 1e-12

WEIGHT_TOL = 1e-12


def as_label(values) -> Label:
    """Canonicalize a scalar or sequence of scalars into a label tuple."""
    if isinstance(values, (int, float, np.integer, np.floating)):
        return (float(values),)
    return tuple(float(v) for v in values)


def validate_label(kind: str, k_out: int, label: Label) -> None:
    """Raise if ``label`` is not a valid point of the declared label space."""
    if len(label) != k_out:
        raise ArityError(f"label has {len(label)} components, expected {k_out}")
    for v in label:
        if kind == BINARY:
            if v not in (-1.0, 1.0):
                raise KindError(f"binary component must be ±1, got {v}")
        elif not 0.0 <= v <= 1.0:
            raise KindError(f"real component must lie in [0, 1], got {v}")


def binary_labels(k_out: int) -> list[Label]:
    """The full binary label cube {-1, +1}^K in lexicographic order."""
    return [tuple(float(v) for v in combo) for combo in product((-1, 1), repeat=k_out)]


def grid_labels(values: Sequence[float], k_out: int) -> list[Label]:
    """All K-tuples over a finite per-coordinate value grid."""
    vals = [float(v) for v in values]
    return [tuple(combo) for combo in product(vals, repeat=k_out)]


def snap_to_grid(value: float, alpha: float) -> float:
    """Floor ``value`` onto the grid {0, alpha, 2*alpha, ...}.

    A ``GRID_NUDGE`` offset is added before flooring so values a hair below a
    grid point (0.999999... artifacts) snap up instead of down.
    """
    return math.floor(value / alpha + GRID_NUDGE) * alpha


@dataclass(frozen=True)
class FunctionClass:
    """An explicit table of vector-valued functions over a finite domain.

    ``table`` has shape ``(n_functions, n_instances, k_out)``; row ``f``,
    column ``j`` holds the label the ``f``-th function assigns to the ``j``-th
    domain instance.
    """

    domain: tuple[int, ...]
    kind: str
    table: np.ndarray
    names: tuple[str, ...]
    name: str = ""

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.float64)
        if table.ndim != 3:
            raise ParameterError("table must have shape (functions, instances, K)")
        if table.shape[0] == 0:
            raise ParameterError("a function class must be non-empty")
        if table.shape[1] != len(self.domain):
            raise ParameterError("table width must match the domain")
        if table.shape[2] < 1:
            raise ParameterError("output dimension K must be positive")
        if len(set(self.domain)) != len(self.domain):
            raise ParameterError("domain instances must be distinct")
        if self.kind not in (BINARY, REAL):
            raise KindError(f"unknown kind {self.kind!r}")
        if self.kind == BINARY:
            if not np.all(np.isin(table, (-1.0, 1.0))):
                raise KindError("binary classes must take values in {-1, +1}")
        elif np.any(table < 0.0) or np.any(table > 1.0):
            raise KindError("real classes must take values in [0, 1]")
        if len(self.names) != table.shape[0]:
            raise ParameterError("one name per function required")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "domain", tuple(int(x) for x in self.domain))
        object.__setattr__(self, "names", tuple(str(n) for n in self.names))
        object.__setattr__(
            self, "_index", {x: j for j, x in enumerate(self.domain)}
        )

    # -- basic geometry -------------------------------------------------

    @property
    def n_functions(self) -> int:
        return self.table.shape[0]

    @property
    def n_instances(self) -> int:
        return self.table.shape[1]

    @property
    def k_out(self) -> int:
        return self.table.shape[2]

    def column(self, x: int) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise DomainError(f"instance {x} not in domain") from None

    def value(self, f: int, x: int) -> Label:
        return tuple(self.table[f, self.column(x)])

    def predictor(self, f: int) -> "ClassPredictor":
        if not 0 <= f < self.n_functions:
            raise ParameterError(f"function index {f} out of range")
        return ClassPredictor(self, f)

    def digest(self) -> str:
        """Stable content hash, used as a memoization key by searches."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.table).tobytes())
        h.update(repr(self.domain).encode())
        return h.hexdigest()

    # -- transformations ------------------------------------------------

    def restrict(self, k: int) -> "FunctionClass":
        """The scalar class of k-th coordinate outputs, behaviors deduplicated."""
        self._check_coordinate(k)
        sub = self.table[:, :, k - 1 : k]
        keep = _first_occurrence_rows(sub)
        return FunctionClass(
            domain=self.domain,
            kind=self.kind,
            table=sub[keep],
            names=tuple(self.names[i] for i in keep),
            name=f"{self.name}|k={k}" if self.name else f"k={k}",
        )

    def drop_coordinate(self, k: int) -> "FunctionClass":
        """The class of remaining coordinates, function order preserved."""
        self._check_coordinate(k)
        if self.k_out == 1:
            raise CoordinateError("cannot drop the only coordinate")
        cols = [j for j in range(self.k_out) if j != k - 1]
        return FunctionClass(
            domain=self.domain,
            kind=self.kind,
            table=self.table[:, :, cols],
            names=self.names,
            name=f"{self.name}|drop={k}" if self.name else f"drop={k}",
        )

    def discretize(self, alpha: float) -> "FunctionClass":
        """Snap every real value onto the alpha grid (floor, coordinate-wise)."""
        if self.kind != REAL:
            raise KindError("discretize requires a real-valued class")
        if not 0.0 < alpha < 1.0:
            raise ParameterError("alpha must lie in (0, 1)")
        snapped = np.floor(self.table / alpha + GRID_NUDGE) * alpha
        return FunctionClass(
            domain=self.domain,
            kind=REAL,
            table=snapped,
            names=self.names,
            name=f"{self.name}^a" if self.name else "discretized",
        )

    def dedupe(self) -> "FunctionClass":
        """Drop duplicate behaviors, keeping first occurrences."""
        keep = _first_occurrence_rows(self.table)
        if len(keep) == self.n_functions:
            return self
        return FunctionClass(
            domain=self.domain,
            kind=self.kind,
            table=self.table[keep],
            names=tuple(self.names[i] for i in keep),
            name=self.name,
        )

    # -- set views --------------------------------------------------------

    def image(self) -> tuple[Label, ...]:
        """The exact union of realized outputs, in sorted order."""
        flat = self.table.reshape(-1, self.k_out)
        return tuple(sorted({tuple(row) for row in flat}))

    def behaviors_on(self, instances: Sequence[int]) -> list[tuple[int, tuple[Label, ...]]]:
        """Distinct labelings of ``instances`` realized by the class.

        Returns ``(function index of first realizer, labeling)`` pairs in
        first-occurrence order, which fixes tie-breaking everywhere downstream.
        """
        cols = [self.column(x) for x in instances]
        seen: dict[tuple, int] = {}
        for f in range(self.n_functions):
            key = tuple(tuple(self.table[f, j]) for j in cols)
            if key not in seen:
                seen[key] = f
        return [(f, key) for key, f in seen.items()]

    def _check_coordinate(self, k: int) -> None:
        if not 1 <= k <= self.k_out:
            raise CoordinateError(f"coordinate {k} out of range 1..{self.k_out}")

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        functions = {
            name: [list(self.table[f, j]) for j in range(self.n_instances)]
            for f, name in enumerate(self.names)
        }
        return {
            "domain": list(self.domain),
            "K": self.k_out,
            "kind": self.kind,
            "functions": functions,
            "name": self.name,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "FunctionClass":
        try:
            domain = tuple(int(x) for x in obj["domain"])
            k_out = int(obj["K"])
            kind = str(obj["kind"])
            functions = obj["functions"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad class descriptor: {exc}") from exc
        names = tuple(functions.keys())
        rows = []
        for name in names:
            labels = [as_label(v) for v in functions[name]]
            if len(labels) != len(domain):
                raise ConfigError(f"function {name!r} is not total on the domain")
            if any(len(lab) != k_out for lab in labels):
                raise ConfigError(f"function {name!r} has labels of wrong arity")
            rows.append(labels)
        table = np.array(rows, dtype=np.float64)
        return cls(domain=domain, kind=kind, table=table, names=names,
                   name=str(obj.get("name", "")))


class ClassPredictor:
    """A total predictor given by one row of a class table."""

    def __init__(self, cls: FunctionClass, index: int):
        self.cls = cls
        self.index = index
        self.name = cls.names[index]

    def __call__(self, x: int) -> Label:
        return self.cls.value(self.index, x)

    def __repr__(self):
        return f"ClassPredictor({self.name})"


def function_class(
    domain: Sequence[int],
    functions: Mapping[str, Sequence] | Sequence[Sequence],
    kind: str = BINARY,
    name: str = "",
) -> FunctionClass:
    """Convenience constructor from per-function label sequences."""
    if isinstance(functions, Mapping):
        names = tuple(functions.keys())
        rows = [functions[n] for n in names]
    else:
        rows = list(functions)
        names = tuple(f"f{i}" for i in range(len(rows)))
    table = np.array([[as_label(v) for v in row] for row in rows], dtype=np.float64)
    return FunctionClass(domain=tuple(domain), kind=kind, table=table,
                         names=names, name=name)


def full_binary_class(domain: Sequence[int], k_out: int = 1, name: str = "full") -> FunctionClass:
    """Every function from ``domain`` into {-1, +1}^K."""
    labels = binary_labels(k_out)
    rows = list(product(labels, repeat=len(domain)))
    table = np.array(rows, dtype=np.float64)
    names = tuple(f"g{i}" for i in range(len(rows)))
    return FunctionClass(domain=tuple(domain), kind=BINARY, table=table,
                         names=names, name=name)


def _first_occurrence_rows(table: np.ndarray) -> list[int]:
    seen = set()
    keep = []
    for i in range(table.shape[0]):
        key = table[i].tobytes()
        if key not in seen:
            seen.add(key)
            keep.append(i)
    return keep


# ---------------------------------------------------------------------------
# Distributions and streams
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteDistribution:
    """A finitely supported distribution over (instance, label) pairs."""

    support: tuple[tuple[int, Label], ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        support = tuple((int(x), as_label(y)) for x, y in self.support)
        weights = tuple(float(w) for w in self.weights)
        if len(support) != len(weights):
            raise ParameterError("one weight per support entry required")
        if not support:
            raise ParameterError("support must be non-empty")
        if len(set(support)) != len(support):
            raise ParameterError("support entries must be distinct")
        if any(w < 0 for w in weights):
            raise ParameterError("weights must be non-negative")
        if abs(sum(weights) - 1.0) > WEIGHT_TOL:
            raise ParameterError("weights must sum to 1 within 1e-12")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)

    @property
    def k_out(self) -> int:
        return len(self.support[0][1])

    def instances(self) -> tuple[int, ...]:
        return tuple(x for x, _ in self.support)

    def marginal(self, k: int) -> "FiniteDistribution":
        """Project labels onto coordinate ``k``, merging collided pairs."""
        if not 1 <= k <= self.k_out:
            raise CoordinateError(f"coordinate {k} out of range 1..{self.k_out}")
        merged: dict[tuple[int, Label], float] = {}
        order: list[tuple[int, Label]] = []
        for (x, y), w in zip(self.support, self.weights):
            key = (x, (y[k - 1],))
            if key not in merged:
                merged[key] = 0.0
                order.append(key)
            merged[key] += w
        return FiniteDistribution(tuple(order), tuple(merged[key] for key in order))

    def sample(self, rng: np.random.Generator, n: int) -> list[tuple[int, Label]]:
        idx = rng.choice(len(self.support), size=n, p=np.array(self.weights))
        return [self.support[i] for i in idx]

    def to_json(self) -> dict:
        return {
            "support": [[x, list(y)] for x, y in self.support],
            "weights": list(self.weights),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "FiniteDistribution":
        try:
            support = tuple((int(x), as_label(y)) for x, y in obj["support"])
            weights = tuple(float(w) for w in obj["weights"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad distribution descriptor: {exc}") from exc
        return cls(support, weights)


def point_mass(x: int, y) -> FiniteDistribution:
    return FiniteDistribution(((x, as_label(y)),), (1.0,))


def uniform_over(pairs: Sequence[tuple[int, object]]) -> FiniteDistribution:
    n = len(pairs)
    return FiniteDistribution(
        tuple((x, as_label(y)) for x, y in pairs), tuple(1.0 / n for _ in range(n))
    )


def realizable_distribution(
    cls: FunctionClass, f: int, instance_weights: Sequence[float] | None = None
) -> FiniteDistribution:
    """The labeled distribution induced by function ``f`` and weights on X."""
    n = cls.n_instances
    if instance_weights is None:
        instance_weights = [1.0 / n] * n
    pairs = tuple((x, tuple(cls.table[f, j])) for j, x in enumerate(cls.domain))
    return FiniteDistribution(pairs, tuple(float(w) for w in instance_weights))


@dataclass(frozen=True)
class Stream:
    """An oblivious sequence of labeled rounds, fixed before play."""

    rounds: tuple[tuple[int, Label], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "rounds", tuple((int(x), as_label(y)) for x, y in self.rounds)
        )

    @property
    def horizon(self) -> int:
        return len(self.rounds)

    def prefix(self, t: int) -> "Stream":
        return Stream(self.rounds[:t])


def stream_from_function(cls: FunctionClass, f: int, xs: Sequence[int]) -> Stream:
    return Stream(tuple((x, cls.value(f, x)) for x in xs))


# ---------------------------------------------------------------------------
# Risk
# ---------------------------------------------------------------------------


def _apply(predictor, x: int) -> Label:
    if isinstance(predictor, Mapping):
        try:
            return as_label(predictor[x])
        except KeyError:
            raise DomainError(f"predictor undefined at instance {x}") from None
    try:
        return as_label(predictor(x))
    except DomainError:
        raise
    except KeyError:
        raise DomainError(f"predictor undefined at instance {x}") from None


def exact_risk(predictor, dist: FiniteDistribution, loss) -> float:
    """The exact expected loss of a total predictor under ``dist``."""
    return sum(
        w * loss(_apply(predictor, x), y) for (x, y), w in zip(dist.support, dist.weights)
    )


def best_function(cls: FunctionClass, dist: FiniteDistribution, loss) -> tuple[int, float]:
    """Index and risk of the exact risk minimizer in the class."""
    best_i, best_r = 0, math.inf
    for f in range(cls.n_functions):
        r = exact_risk(cls.predictor(f), dist, loss)
        if r < best_r - 0.0:
            best_i, best_r = f, r
    return best_i, best_r


def best_risk(cls: FunctionClass, dist: FiniteDistribution, loss) -> float:
    """min over the class of the exact risk (the infimum is attained)."""
    return best_function(cls, dist, loss)[1]


# ---------------------------------------------------------------------------
# Seeding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeedSpec:
    """A splittable, counter-based randomness source.

    The generator is Philox4x64-10 keyed by the first 128 bits of
    ``SHA-256(master || "/" || path[0] || "/" || ...)``. Both pieces are
    platform-independent, so identical ``(master, path)`` pairs reproduce
    identical draws everywhere.
    """

    master: int
    path: tuple[str, ...] = ()

    def derive(self, *labels) -> "SeedSpec":
        return SeedSpec(self.master, self.path + tuple(str(l) for l in labels))

    def key(self) -> int:
        text = str(self.master) + "".join("/" + p for p in self.path)
        digest = hashlib.sha256(text.encode("utf-8")).digest()
        return int.from_bytes(digest[:16], "little")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=self.key()))


def seed_spec(seed: "int | SeedSpec", *labels) -> SeedSpec:
    """Coerce an int or SeedSpec into a SeedSpec, optionally deriving."""
    spec = seed if isinstance(seed, SeedSpec) else SeedSpec(int(seed))
    return spec.derive(*labels) if labels else spec
