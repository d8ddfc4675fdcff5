"""Bipolar hypervectors, flip budgets, and level-hypervector tables.

Hypervectors are D-dimensional sign vectors (entries in {-1, +1}). The
canonical storage is bit-packed (one bit per entry, bit set == +1); all
arithmetic is defined on the unpacked sign values.

Level hypervectors for one feature are derived from a single random base
vector plus a flip schedule: one fixed random permutation of the indices,
with each level negating a prefix of that permutation. A bit flipped for
level m therefore stays flipped for every level above m, which gives exact
Hamming control between any two levels of the same feature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConstraintError, DimensionError, ShapeError


def pack_signs(signs: np.ndarray) -> np.ndarray:
    """Pack sign values (+1/-1) into uint8 bits along the last axis."""
    bits = (np.asarray(signs) > 0).astype(np.uint8)
    return np.packbits(bits, axis=-1)


def unpack_signs(packed: np.ndarray, dim: int) -> np.ndarray:
    """Unpack uint8 bits back to int8 signs (+1/-1) along the last axis."""
    bits = np.unpackbits(packed, axis=-1, count=dim)
    return (bits.astype(np.int8) << 1) - 1


@dataclass(frozen=True)
class Hypervector:
    """A bipolar vector, bit-packed, immutable."""

    packed: np.ndarray
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError(f"hypervector dimension must be >= 1, got {self.dim}")
        self.packed.flags.writeable = False

    @classmethod
    def from_signs(cls, signs) -> "Hypervector":
        signs = np.asarray(signs)
        if signs.ndim != 1 or signs.size == 0:
            raise DimensionError("expected a non-empty 1-D sign array")
        if not np.all(np.abs(signs) == 1):
            raise ValueError("entries must be -1 or +1")
        return cls(packed=pack_signs(signs), dim=signs.size)

    @cached_property
    def signs(self) -> np.ndarray:
        out = unpack_signs(self.packed, self.dim)
        out.flags.writeable = False
        return out

    def dot(self, other: "Hypervector") -> int:
        if self.dim != other.dim:
            raise ShapeError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return int(np.dot(self.signs.astype(np.int64), other.signs))

    def hamming(self, other: "Hypervector") -> int:
        if self.dim != other.dim:
            raise ShapeError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return int(np.count_nonzero(self.signs != other.signs))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Hypervector)
            and self.dim == other.dim
            and np.array_equal(self.packed, other.packed)
        )

    __hash__ = None


def random_bipolar(seed, dim: int) -> Hypervector:
    """Draw a random bipolar hypervector; deterministic function of the seed."""
    if dim < 1:
        raise DimensionError(f"hypervector dimension must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    signs = (rng.integers(0, 2, size=dim).astype(np.int8) << 1) - 1
    return Hypervector.from_signs(signs)


@dataclass(frozen=True)
class FlipBudget:
    """Per-feature, per-transition bit-flip counts: the optimization variable.

    `budgets` has shape (N, M-1): one row per feature, one column per
    consecutive-level transition. A row is feasible when its sum does not
    exceed dim/2.
    """

    budgets: np.ndarray
    dim: int

    def __post_init__(self):
        b = np.asarray(self.budgets, dtype=np.int64)
        if b.ndim != 2 or b.shape[1] < 1:
            raise ShapeError(f"budget matrix must be (N, M-1), got shape {b.shape}")
        if np.any(b < 0):
            raise ValueError("flip budgets must be non-negative")
        if self.dim < 2 or self.dim % 2 != 0:
            raise DimensionError(f"dimension must be even and >= 2, got {self.dim}")
        b.flags.writeable = False
        object.__setattr__(self, "budgets", b)

    @property
    def features(self) -> int:
        return self.budgets.shape[0]

    @property
    def levels(self) -> int:
        return self.budgets.shape[1] + 1

    @property
    def row_sums(self) -> np.ndarray:
        return self.budgets.sum(axis=1)

    @property
    def feasible(self) -> bool:
        return bool(np.all(self.row_sums <= self.dim // 2))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FlipBudget)
            and self.dim == other.dim
            and np.array_equal(self.budgets, other.budgets)
        )

    __hash__ = None


def uniform_flip_budget(dim: int, levels: int, features: int = 1) -> FlipBudget:
    """The baseline budget: floor(D / (2(M-1))) flips at every transition.

    Leftover bits from the floor simply stay unflipped, so the result is
    feasible by construction.
    """
    if levels < 2:
        raise ValueError(f"need at least 2 quantization levels, got {levels}")
    if dim < 2 or dim % 2 != 0:
        raise DimensionError(f"dimension must be even and >= 2, got {dim}")
    per_transition = dim // (2 * (levels - 1))
    budgets = np.full((features, levels - 1), per_transition, dtype=np.int64)
    return FlipBudget(budgets=budgets, dim=dim)


def repair_budget(budget: FlipBudget) -> FlipBudget:
    """Scale down violating rows so every row sum fits in D/2. Idempotent."""
    if budget.feasible:
        return budget
    half = budget.dim // 2
    b = budget.budgets.copy()
    sums = b.sum(axis=1)
    bad = sums > half
    scaled = np.floor(b[bad] * (half / sums[bad, None])).astype(np.int64)
    b[bad] = scaled
    return FlipBudget(budgets=b, dim=budget.dim)


def _feature_rng(base_seed, feature: int) -> np.random.Generator:
    # Base vector and permutation depend only on (base_seed, feature),
    # never on the budget, so every candidate budget shares them.
    return np.random.default_rng([int(base_seed), int(feature)])


@dataclass(frozen=True)
class LevelTable:
    """All N x M level hypervectors, bit-packed.

    `permutations` and `prefix_flips` are present when the table was built
    from a flip budget (they realize the no-reflip schedule); a table
    reconstructed from serialized bits alone carries only the packed levels.
    """

    packed: np.ndarray  # (N, M, ceil(D/8)) uint8
    dim: int
    permutations: np.ndarray | None = None  # (N, D)
    prefix_flips: np.ndarray | None = None  # (N, M), first column all zero
    budgets: FlipBudget | None = None

    def __post_init__(self):
        self.packed.flags.writeable = False

    @property
    def features(self) -> int:
        return self.packed.shape[0]

    @property
    def levels(self) -> int:
        return self.packed.shape[1]

    @cached_property
    def signs(self) -> np.ndarray:
        """(N, M, D) int8 sign values of every level hypervector."""
        out = unpack_signs(self.packed, self.dim)
        out.flags.writeable = False
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LevelTable)
            and self.dim == other.dim
            and np.array_equal(self.packed, other.packed)
        )

    __hash__ = None


def build_level_table(base_seed, budget: FlipBudget) -> LevelTable:
    """Materialize every level hypervector implied by a flip budget."""
    if not budget.feasible:
        raise ConstraintError(
            f"budget row sums {budget.row_sums.tolist()} exceed D/2 = {budget.dim // 2}"
        )
    dim, n_feat, n_lvl = budget.dim, budget.features, budget.levels
    prefix = np.zeros((n_feat, n_lvl), dtype=np.int64)
    prefix[:, 1:] = np.cumsum(budget.budgets, axis=1)

    signs = np.empty((n_feat, n_lvl, dim), dtype=np.int8)
    perms = np.empty((n_feat, dim), dtype=np.int64)
    for n in range(n_feat):
        rng = _feature_rng(base_seed, n)
        base = (rng.integers(0, 2, size=dim).astype(np.int8) << 1) - 1
        perms[n] = rng.permutation(dim)
        signs[n, :] = base
        for m in range(1, n_lvl):
            signs[n, m, perms[n, : prefix[n, m]]] *= -1

    return LevelTable(
        packed=pack_signs(signs),
        dim=dim,
        permutations=perms,
        prefix_flips=prefix,
        budgets=budget,
    )


def level_vector(table: LevelTable, feature: int, level: int) -> Hypervector:
    """Fetch one level hypervector; `feature` is 0-based, `level` is 1..M."""
    if not 0 <= feature < table.features:
        raise IndexError(f"feature index {feature} out of range [0, {table.features})")
    if not 1 <= level <= table.levels:
        raise IndexError(f"level {level} out of range [1, {table.levels}]")
    return Hypervector(packed=table.packed[feature, level - 1].copy(), dim=table.dim)


def encode_sample(x, quantizer, table: LevelTable) -> np.ndarray:
    """Bundle one sample: sum of the level hypervectors its features fall in."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (table.features,):
        raise ShapeError(f"expected {table.features} features, got shape {x.shape}")
    if quantizer.levels != table.levels or quantizer.features != table.features:
        raise ShapeError("quantizer and level table disagree on N or M")
    levels = quantizer.quantize_sample(x)
    return encode_quantized(levels[None, :], table)[0]


def encode_quantized(levels: np.ndarray, table: LevelTable) -> np.ndarray:
    """Bundle pre-quantized samples; `levels` is (S, N) with values in 1..M."""
    n_feat = table.features
    picked = table.signs[np.arange(n_feat)[None, :], levels - 1]  # (S, N, D)
    return picked.sum(axis=1, dtype=np.int64)
