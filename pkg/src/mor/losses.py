"""Losses on label vectors and exhaustively verified algebraic properties.

A :class:`LossSpec` is an immutable description (kind + parameters) that is
callable on pairs of label tuples. Property checks (identity of
indiscernibles, minimal subadditivity constant, Hamming-equivalence
constants) take an explicit finite label grid, because for real labels those
notions are only exact on a grid.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .core import Label, as_label
from .errors import (
    ArityError,
    ConfigError,
    DegenerateLossError,
    ParameterError,
)

#: Kinds whose triangle inequality makes them 1-subadditive by construction.
METRIC_KINDS = frozenset({"zero_one", "hamming", "d1", "lp"})


@dataclass(frozen=True)
class Psi:
    """A scalar link applied to |y1 - y2|: L-Lipschitz on [0, 1], psi(0) = 0."""

    kind: str = "identity"
    p: float = 1.0
    delta: float = 0.5

    def __post_init__(self):
        if self.kind not in ("identity", "power", "huber"):
            raise ParameterError(f"unknown psi kind {self.kind!r}")
        if self.kind == "power" and self.p < 1:
            raise ParameterError("power psi requires p >= 1")
        if self.kind == "huber" and not 0 < self.delta < 1:
            raise ParameterError("huber psi requires 0 < delta < 1")

    def __call__(self, z: float) -> float:
        z = abs(z)
        if self.kind == "identity":
            return z
        if self.kind == "power":
            return z**self.p
        if z <= self.delta:
            return z * z / 2.0
        return self.delta * (z - self.delta / 2.0)

    @property
    def lipschitz(self) -> float:
        """An exact Lipschitz constant on [0, 1]."""
        if self.kind == "identity":
            return 1.0
        if self.kind == "power":
            return self.p
        return self.delta

    @property
    def monotone(self) -> bool:
        return True

    def to_json(self) -> dict:
        if self.kind == "identity":
            return {"psi": "identity"}
        if self.kind == "power":
            return {"psi": "power", "p": self.p}
        return {"psi": "huber", "delta": self.delta}


@dataclass(frozen=True)
class LossSpec:
    """A bounded, non-negative loss on label tuples.

    ``bound`` is the supremum of the loss on its declared label space
    (binary cubes, or [0, 1]^K for real labels).
    """

    kind: str
    bound: float
    p: float | None = None
    psis: tuple[Psi, ...] | None = None
    table: Mapping[tuple[Label, Label], float] | None = field(
        default=None, compare=False
    )
    lipschitz: float | None = None

    def __call__(self, y1, y2) -> float:
        y1 = as_label(y1)
        y2 = as_label(y2)
        if len(y1) != len(y2):
            raise ArityError(f"label arity mismatch: {len(y1)} vs {len(y2)}")
        k = self.kind
        if k == "zero_one":
            return 0.0 if y1 == y2 else 1.0
        if k == "hamming":
            return float(sum(a != b for a, b in zip(y1, y2)))
        if k == "d1":
            if len(y1) != 1:
                raise ArityError("d1 is a scalar loss (K=1)")
            return abs(y1[0] - y2[0])
        if k == "d_p":
            if len(y1) != 1:
                raise ArityError("d_p is a scalar loss (K=1)")
            return abs(y1[0] - y2[0]) ** self.p
        if k == "psi_d1":
            if len(y1) != 1:
                raise ArityError("psi_d1 is a scalar loss (K=1)")
            return self.psis[0](abs(y1[0] - y2[0]))
        if k == "decomposable_sum":
            if len(y1) != len(self.psis):
                raise ArityError(
                    f"decomposable loss expects K={len(self.psis)}, got {len(y1)}"
                )
            return sum(psi(abs(a - b)) for psi, a, b in zip(self.psis, y1, y2))
        if k == "lp":
            if self.p == math.inf:
                return max(abs(a - b) for a, b in zip(y1, y2))
            return sum(abs(a - b) ** self.p for a, b in zip(y1, y2)) ** (1.0 / self.p)
        if k == "custom":
            try:
                return float(self.table[(y1, y2)])
            except KeyError:
                raise ParameterError(f"pair ({y1}, {y2}) not in custom table") from None
        raise ParameterError(f"unknown loss kind {self.kind!r}")

    @property
    def is_metric(self) -> bool:
        return self.kind in METRIC_KINDS

    def to_json(self) -> dict:
        if self.kind in ("zero_one", "d1"):
            return {"kind": self.kind}
        if self.kind == "hamming":
            return {"kind": "hamming", "K": int(self.bound)}
        if self.kind == "d_p":
            return {"kind": "d_p", "p": self.p}
        if self.kind == "lp":
            return {"kind": "lp", "p": self.p, "K": round(self.bound ** self.p)
                    if self.p not in (math.inf,) else None}
        if self.kind == "psi_d1":
            return {"kind": "psi_d1", **self.psis[0].to_json()}
        if self.kind == "decomposable_sum":
            return {"kind": "decomposable_sum",
                    "psis": [psi.to_json() for psi in self.psis]}
        raise ConfigError(f"loss kind {self.kind!r} has no descriptor form")


# -- constructors ----------------------------------------------------------


def zero_one() -> LossSpec:
    """Exact-match indicator. The paper's 0-1 loss for scalar labels."""
    return LossSpec(kind="zero_one", bound=1.0)


def hamming(k_out: int) -> LossSpec:
    """Number of disagreeing coordinates between two binary vectors."""
    if k_out < 1:
        raise ParameterError("K must be positive")
    return LossSpec(kind="hamming", bound=float(k_out))


def d1() -> LossSpec:
    """Scalar absolute difference on [0, 1]."""
    return LossSpec(kind="d1", bound=1.0, lipschitz=1.0)


def d_p(p: float) -> LossSpec:
    """Scalar |y1 - y2|^p."""
    if p < 1:
        raise ParameterError("p must be >= 1")
    return LossSpec(kind="d_p", bound=1.0, p=float(p), lipschitz=float(p))


def psi_d1(psi: Psi) -> LossSpec:
    """Scalar psi(|y1 - y2|)."""
    return LossSpec(kind="psi_d1", bound=psi(1.0), psis=(psi,),
                    lipschitz=psi.lipschitz)


def decomposable(psis: Sequence[Psi]) -> LossSpec:
    """Sum over coordinates of psi_k(|y1_k - y2_k|)."""
    psis = tuple(psis)
    if not psis:
        raise ParameterError("at least one psi required")
    return LossSpec(
        kind="decomposable_sum",
        bound=sum(psi(1.0) for psi in psis),
        psis=psis,
        lipschitz=max(psi.lipschitz for psi in psis),
    )


def lp(p: float, k_out: int) -> LossSpec:
    """The p-norm of the coordinate-wise differences; p = inf is the max."""
    if p < 1:
        raise ParameterError("p must be >= 1")
    if k_out < 1:
        raise ParameterError("K must be positive")
    bound = float(k_out) ** (1.0 / p) if p != math.inf else 1.0
    return LossSpec(kind="lp", bound=bound, p=float(p), lipschitz=None)


def custom(table: Mapping, bound: float | None = None) -> LossSpec:
    """A loss given by an explicit table over label pairs."""
    canon = {(as_label(a), as_label(b)): float(v) for (a, b), v in table.items()}
    if any(v < 0 for v in canon.values()):
        raise ParameterError("losses must be non-negative")
    if bound is None:
        bound = max(canon.values(), default=0.0)
    return LossSpec(kind="custom", bound=float(bound), table=canon)


def scalar_loss_for(loss: LossSpec, k: int) -> LossSpec:
    """The per-coordinate scalar loss induced by a decomposable loss."""
    if loss.kind == "hamming":
        return zero_one()
    if loss.kind == "decomposable_sum":
        return psi_d1(loss.psis[k - 1])
    if loss.kind == "lp" and loss.p == 1.0:
        return d1()
    raise ParameterError(f"loss kind {loss.kind!r} does not decompose")


def loss_from_json(obj: Mapping) -> LossSpec:
    """Parse a loss descriptor like {"kind": "lp", "p": 2, "K": 3}."""
    try:
        kind = obj["kind"]
    except (KeyError, TypeError) as exc:
        raise ConfigError("loss descriptor needs a 'kind'") from exc
    if kind == "zero_one":
        return zero_one()
    if kind == "hamming":
        return hamming(int(obj["K"]))
    if kind == "d1":
        return d1()
    if kind == "d_p":
        return d_p(float(obj["p"]))
    if kind == "lp":
        p = math.inf if obj["p"] in ("inf", None) else float(obj["p"])
        return lp(p, int(obj["K"]))
    if kind == "psi_d1":
        return psi_d1(_psi_from_json(obj))
    if kind == "decomposable_sum":
        return decomposable([_psi_from_json(o) for o in obj["psis"]])
    if kind == "custom":
        table = {
            (as_label(entry["y1"]), as_label(entry["y2"])): float(entry["value"])
            for entry in obj["table"]
        }
        return custom(table, bound=obj.get("bound"))
    raise ConfigError(f"unknown loss kind {kind!r}")


def _psi_from_json(obj: Mapping) -> Psi:
    name = obj.get("psi", "identity")
    if name == "identity":
        return Psi("identity")
    if name == "power":
        return Psi("power", p=float(obj.get("p", 1.0)))
    if name == "huber":
        return Psi("huber", delta=float(obj.get("delta", 0.5)))
    raise ConfigError(f"unknown psi {name!r}")


# -- verified properties -----------------------------------------------------


def loss_matrix(loss: LossSpec, labels: Sequence[Label]) -> np.ndarray:
    labels = [as_label(y) for y in labels]
    n = len(labels)
    out = np.empty((n, n), dtype=np.float64)
    for i, a in enumerate(labels):
        for j, b in enumerate(labels):
            out[i, j] = loss(a, b)
    return out


def identity_of_indiscernibles(loss: LossSpec, labels: Sequence[Label]) -> bool:
    """True iff loss(y1, y2) = 0 exactly when y1 = y2, over all pairs."""
    mat = loss_matrix(loss, labels)
    diag_ok = bool(np.all(np.diag(mat) == 0.0))
    off = mat[~np.eye(len(labels), dtype=bool)]
    return diag_ok and bool(np.all(off > 0.0))


def subadditivity_constant(
    loss: LossSpec, labels: Sequence[Label]
) -> tuple[float, tuple[Label, Label, Label] | None]:
    """The minimal c with loss(y1,y2) <= c*loss(y1,y) + loss(y,y2) on the grid.

    Returns the constant together with a triple attaining it (None when the
    grid has a single label). Metric kinds short-circuit to c = 1 after a
    full verification pass over triples.
    """
    labels = [as_label(y) for y in labels]
    mat = loss_matrix(loss, labels)
    n = len(labels)
    if n >= 2:
        off = mat[~np.eye(n, dtype=bool)]
        if np.any(off <= 0.0):
            raise DegenerateLossError(
                "loss vanishes on distinct labels; subadditivity is undefined"
            )
    if loss.is_metric:
        worst = _max_triangle_violation(mat)
        if worst > 1e-9:
            raise DegenerateLossError(
                f"metric kind {loss.kind!r} violates the triangle inequality"
            )
        witness = (labels[0], labels[1], labels[1]) if n >= 2 else None
        return 1.0, witness
    best_c = 0.0
    witness = None
    for k in range(n):
        denom = mat[:, k]  # loss(y1, y)
        num = mat - mat[k, :][None, :]  # loss(y1, y2) - loss(y, y2)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(denom[:, None] > 0.0, num / denom[:, None], -np.inf)
        i, j = np.unravel_index(np.argmax(ratio), ratio.shape)
        if ratio[i, j] > best_c:
            best_c = float(ratio[i, j])
            witness = (labels[i], labels[j], labels[k])
    return best_c, witness


def _max_triangle_violation(mat: np.ndarray) -> float:
    n = mat.shape[0]
    worst = -np.inf
    for k in range(n):
        viol = mat - mat[:, k][:, None] - mat[k, :][None, :]
        worst = max(worst, float(viol.max()))
    return worst


def hamming_equivalence_constants(
    loss: LossSpec, labels: Sequence[Label]
) -> tuple[float, float]:
    """Constants (a, b) with a*hamming <= loss <= b*hamming over all pairs."""
    labels = [as_label(y) for y in labels]
    if not labels:
        raise ParameterError("label grid must be non-empty")
    k_out = len(labels[0])
    ham = hamming(k_out)
    mat = loss_matrix(loss, labels)
    n = len(labels)
    if n >= 2:
        off = mat[~np.eye(n, dtype=bool)]
        if np.any(off <= 0.0):
            raise DegenerateLossError(
                "loss vanishes on distinct labels; equivalence constants undefined"
            )
    hmat = loss_matrix(ham, labels)
    mask = ~np.eye(n, dtype=bool)
    ratios = mat[mask] / hmat[mask]
    return float(ratios.min()), float(ratios.max())
