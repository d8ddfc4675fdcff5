"""NSGA-II-style search over flip-budget matrices.

The two objectives are (maximize wAcc, minimize avgSim), with
feasibility-first dominance: a feasible individual always dominates an
infeasible one. Variation is per-gene uniform crossover plus uniform-reset
mutation on the integer genes, followed by a floor-rescale repair that
keeps every row sum within D/2, so only feasible individuals are ever
evaluated as candidates for the front.

Randomness comes from explicitly indexed substreams of the master seed
(one for initialization, one per generation for variation), so results are
a pure function of (dataset, config).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, Quantizer
from .errors import ShapeError
from .hypervector import FlipBudget, repair_budget, uniform_flip_budget
from .objectives import CandidateEvaluator, ObjectiveScores

repair = repair_budget


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 200
    generations: int = 150
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    tournament_size: int = 2
    seed: int = 0
    dim: int = 64
    levels: int = 20

    def __post_init__(self):
        if self.population_size < 4 or self.population_size % 2 != 0:
            raise ValueError("population size must be even and >= 4")
        if self.generations < 1:
            raise ValueError("need at least 1 generation")
        if not (0.0 <= self.crossover_rate <= 1.0 and 0.0 <= self.mutation_rate <= 1.0):
            raise ValueError("crossover and mutation rates must be in [0, 1]")
        if self.tournament_size < 2:
            raise ValueError("tournament size must be >= 2")


@dataclass
class Individual:
    budget: FlipBudget
    id: int
    scores: ObjectiveScores | None = None


@dataclass(frozen=True)
class ParetoFront:
    """Feasible, mutually non-dominated (budget, scores) records."""

    members: list  # of (FlipBudget, ObjectiveScores)
    provenance: dict
    generation_hypervolumes: list

    def write_csv(self, path) -> None:
        """Columns: member index, objectives, per-feature row sums and the
        flattened budget matrix (both semicolon-joined, row-major)."""
        from .data import _atomic_open

        with _atomic_open(path) as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(
                ["memberIndex", "wAcc", "avgSim", "robustness", "rowSums", "budget"]
            )
            for i, (budget, scores) in enumerate(self.members):
                writer.writerow(
                    [
                        i,
                        repr(scores.wacc),
                        repr(scores.avg_sim),
                        repr(scores.robustness),
                        ";".join(str(int(v)) for v in budget.row_sums),
                        ";".join(str(int(v)) for v in budget.budgets.ravel()),
                    ]
                )


def dominates(a: ObjectiveScores, b: ObjectiveScores) -> bool:
    """Feasibility-first Pareto dominance on (max wAcc, min avgSim)."""
    if a.feasible != b.feasible:
        return a.feasible
    if a.wacc < b.wacc or a.avg_sim > b.avg_sim:
        return False
    return a.wacc > b.wacc or a.avg_sim < b.avg_sim


def rank_population(scored: list) -> tuple[np.ndarray, np.ndarray]:
    """Fast non-dominated sorting plus per-front crowding distance.

    Returns (ranks, crowding); rank 0 is the non-dominated front, boundary
    points of each front get infinite crowding.
    """
    n = len(scored)
    dominated_by = [[] for _ in range(n)]
    domination_count = np.zeros(n, dtype=np.int64)
    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            if dominates(scored[p], scored[q]):
                dominated_by[p].append(q)
            elif dominates(scored[q], scored[p]):
                domination_count[p] += 1

    ranks = np.full(n, -1, dtype=np.int64)
    current = [p for p in range(n) if domination_count[p] == 0]
    rank = 0
    while current:
        next_front = []
        for p in current:
            ranks[p] = rank
            for q in dominated_by[p]:
                domination_count[q] -= 1
                if domination_count[q] == 0:
                    next_front.append(q)
        current = next_front
        rank += 1

    crowding = np.zeros(n, dtype=np.float64)
    objectives = np.array([[s.wacc, s.avg_sim] for s in scored], dtype=np.float64)
    for r in range(rank):
        front = np.flatnonzero(ranks == r)
        if front.size <= 2:
            crowding[front] = np.inf
            continue
        for col in range(2):
            vals = objectives[front, col]
            order = np.argsort(vals, kind="stable")
            crowding[front[order[0]]] = np.inf
            crowding[front[order[-1]]] = np.inf
            span = vals[order[-1]] - vals[order[0]]
            if span == 0:
                continue
            inner = front[order[1:-1]]
            gaps = (vals[order[2:]] - vals[order[:-2]]) / span
            crowding[inner] += gaps
    return ranks, crowding


def initialize_population(config: GAConfig, n_features: int) -> list:
    """P random feasible budgets; index 0 is the uniform-budget anchor."""
    rng = np.random.default_rng([config.seed, 0])
    half = config.dim // 2
    population = []
    anchor = uniform_flip_budget(config.dim, config.levels, features=n_features)
    population.append(Individual(budget=anchor, id=0))
    for i in range(1, config.population_size):
        raw = rng.integers(0, half + 1, size=(n_features, config.levels - 1))
        budget = repair_budget(FlipBudget(budgets=raw, dim=config.dim))
        population.append(Individual(budget=budget, id=i))
    return population


def _selection_order(ranks: np.ndarray, crowding: np.ndarray) -> np.ndarray:
    """Indices sorted best-first by (rank asc, crowding desc), stable."""
    return np.lexsort((np.arange(len(ranks)), -crowding, ranks))


def _tournament(rng, ranks, crowding, size) -> int:
    picks = rng.integers(0, len(ranks), size=size)
    best = picks[0]
    for idx in picks[1:]:
        if ranks[idx] < ranks[best] or (
            ranks[idx] == ranks[best] and crowding[idx] > crowding[best]
        ):
            best = idx
    return int(best)


def evolve_generation(
    population: list,
    evaluator: CandidateEvaluator,
    config: GAConfig,
    generation: int,
    next_id: int,
) -> tuple[list, int]:
    """One (mu + lambda) NSGA-II step; returns the new population and the
    next unused individual id."""
    scored = [ind.scores for ind in population]
    ranks, crowding = rank_population(scored)
    rng = np.random.default_rng([config.seed, 1, generation])
    half = config.dim // 2
    shape = population[0].budget.budgets.shape

    children = []
    for _ in range(config.population_size // 2):
        i = _tournament(rng, ranks, crowding, config.tournament_size)
        j = _tournament(rng, ranks, crowding, config.tournament_size)
        p1 = population[i].budget.budgets.copy()
        p2 = population[j].budget.budgets.copy()
        swap = rng.random(shape) < config.crossover_rate
        c1 = np.where(swap, p2, p1)
        c2 = np.where(swap, p1, p2)
        for genes in (c1, c2):
            mutate = rng.random(shape) < config.mutation_rate
            fresh = rng.integers(0, half + 1, size=shape)
            genes[mutate] = fresh[mutate]
            budget = repair_budget(FlipBudget(budgets=genes, dim=config.dim))
            child = Individual(budget=budget, id=next_id)
            child.scores = evaluator.evaluate(budget)
            children.append(child)
            next_id += 1

    combined = population + children
    ranks, crowding = rank_population([ind.scores for ind in combined])
    order = _selection_order(ranks, crowding)
    survivors = [combined[i] for i in order[: config.population_size]]
    return survivors, next_id


def _nondominated(members: list) -> list:
    """Filter (budget, scores) pairs down to the mutually non-dominated set."""
    out = []
    for i, (_, si) in enumerate(members):
        if not any(dominates(sj, si) for j, (_, sj) in enumerate(members) if j != i):
            out.append(members[i])
    return out


def hypervolume(members: list, ref=(0.0, 1.0)) -> float:
    """Area dominated by the (wAcc, avgSim) points relative to the
    reference corner (wAcc=ref[0], avgSim=ref[1])."""
    points = _nondominated([(None, s) for _, s in members])
    coords = sorted(
        ((s.wacc, s.avg_sim) for _, s in points), key=lambda p: -p[1]
    )
    area = 0.0
    prev_sim = ref[1]
    for wacc, sim in coords:
        area += max(0.0, wacc - ref[0]) * max(0.0, prev_sim - sim)
        prev_sim = min(prev_sim, sim)
    return area


def _front_of(population: list) -> list:
    feasible = [
        (ind.budget, ind.scores) for ind in population if ind.scores.feasible
    ]
    return _nondominated(feasible)


def run_optimization(
    train: Dataset, quantizer: Quantizer, config: GAConfig
) -> ParetoFront:
    """Run the full search and return the deduplicated feasible front."""
    if quantizer.levels != config.levels:
        raise ShapeError("config levels do not match the calibrated quantizer")
    evaluator = CandidateEvaluator(train, quantizer, config.seed)
    population = initialize_population(config, train.n_features)
    for ind in population:
        ind.scores = evaluator.evaluate(ind.budget)

    next_id = config.population_size
    hypervolumes = [hypervolume(_front_of(population))]
    for gen in range(config.generations):
        population, next_id = evolve_generation(
            population, evaluator, config, gen, next_id
        )
        hypervolumes.append(hypervolume(_front_of(population)))

    front = _front_of(population)
    seen = set()
    unique = []
    for budget, scores in front:
        key = (budget.dim, budget.budgets.tobytes())
        if key not in seen:
            seen.add(key)
            unique.append((budget, scores))
    unique.sort(key=lambda m: (-m[1].wacc, m[1].avg_sim, m[0].budgets.tobytes()))

    provenance = {
        "population_size": config.population_size,
        "generations": config.generations,
        "crossover_rate": config.crossover_rate,
        "mutation_rate": config.mutation_rate,
        "tournament_size": config.tournament_size,
        "seed": config.seed,
        "dim": config.dim,
        "levels": config.levels,
        "n_samples": train.n_samples,
        "n_features": train.n_features,
        "n_classes": train.n_classes,
    }
    return ParetoFront(
        members=unique,
        provenance=provenance,
        generation_hypervolumes=hypervolumes,
    )
