'''
Genetic algorithm for pulse genomes: tournament selection, sequential
parent pairing, uniform crossover, random-replacement mutation, elitism and
memoized fitness evaluation.
'''
from dataclasses import dataclass, field, replace
import logging
from typing import List, NamedTuple, Optional

import numpy as np

from pulsevo.error import BackendError, UnevaluatedIndividual
from pulsevo.pulse_codec import (
    check_same_encoding, make_genome, random_genome)
from pulsevo.runlog import RunLog, RunLogRecord

log = logging.getLogger(__name__)

STREAMS = ('init', 'selection', 'crossover', 'mutation')


@dataclass
class Individual(object):
    genome: tuple
    fitness: Optional[float] = None

    @property
    def evaluated(self):
        return self.fitness is not None


@dataclass(frozen=True)
class GenerationRecord(object):
    generation: int
    best_fitness: float
    new_evaluations: int
    best_genome: tuple


class RunResult(NamedTuple):
    best: Individual
    records: List[GenerationRecord]
    log: RunLog


class RandomStreams(object):
    '''Independent generators for initialization, selection, crossover and
    mutation, all derived from one root seed.'''

    def __init__(self, seed):
        children = np.random.SeedSequence(seed).spawn(len(STREAMS))
        for name, child in zip(STREAMS, children):
            setattr(self, name, np.random.Generator(np.random.PCG64(child)))


@dataclass
class EvaluationCache(object):
    '''Fitness memo keyed by the exact genome value.'''
    table: dict = field(default_factory=dict)

    def __contains__(self, genome):
        return genome in self.table

    def __len__(self):
        return len(self.table)

    def get(self, genome):
        return self.table[genome]

    def store(self, genome, evaluation):
        # the first stored evaluation wins; traces are not kept
        self.table.setdefault(genome, replace(evaluation, trace=None))


def _fitness(individual):
    if not individual.evaluated:
        raise UnevaluatedIndividual(
            '%r has no fitness' % (individual.genome,))
    return individual.fitness


def tournament_select(population, k, n_parents, rng):
    '''
    Picks ``n_parents`` parents, each the fittest of ``k`` distinct
    individuals drawn uniformly. Fitness ties go to the lower population
    index.
    '''
    fitnesses = [_fitness(ind) for ind in population]
    parents = []
    for _ in range(n_parents):
        entrants = rng.choice(len(population), size=k, replace=False)
        winner = min(entrants, key=lambda i: (-fitnesses[i], i))
        parents.append(population[int(winner)])
    return parents


def uniform_crossover(parent_a, parent_b, rng):
    '''Copies each gene from ``parent_a`` or ``parent_b`` with probability
    1/2.'''
    check_same_encoding(parent_a, parent_b)
    from_a = rng.random(len(parent_a)) < 0.5
    return make_genome(parent_a.encoding, [
        a if pick else b for a, b, pick in zip(parent_a, parent_b, from_a)])


def random_mutation(genome, p, space, rng):
    '''Replaces each gene, with probability ``p``, by a fresh uniform draw
    from its domain.'''
    mutate = rng.random(len(genome)) < p
    return space.make([
        domain.draw(rng) if flip else value
        for value, domain, flip in zip(genome, space.domains, mutate)])


def parent_pairs(n_parents, n_children):
    '''The pairing schedule (0, 1), (1, 2), ..., (n-1, 0), (0, 1), ...'''
    return [(i % n_parents, (i + 1) % n_parents) for i in range(n_children)]


def elites(population, count):
    ranked = sorted(range(len(population)),
                    key=lambda i: (-_fitness(population[i]), i))
    return [Individual(population[i].genome, population[i].fitness)
            for i in ranked[:count]]


def next_generation(population, config, space, streams):
    '''
    Breeds the next population: the ``elitism_size`` fittest individuals
    survive unchanged, the rest are children of consecutive parent pairs.
    '''
    survivors = elites(population, config.elitism_size)
    n_children = config.population_size - config.elitism_size
    if n_children == 0:
        return survivors
    parents = tournament_select(
        population, config.tournament_size, config.parents_mating,
        streams.selection)
    children = []
    for i, j in parent_pairs(len(parents), n_children):
        child = uniform_crossover(
            parents[i].genome, parents[j].genome, streams.crossover)
        child = random_mutation(
            child, config.mutation_probability, space, streams.mutation)
        children.append(Individual(child))
    return survivors + children


class GeneticAlgorithm(object):
    '''
    Runs the evolution loop against a fitness backend.

    :param space: The gene space to search.
    :type space: :class:`pulsevo.pulse_codec.GeneSpace`
    :param backend: Scores genomes.
    :type backend: :class:`pulsevo.fitness_lab.FitnessBackend`
    :param config: The hyper-parameters.
    :type config: :class:`pulsevo.config.GAConfig`
    :param runlog: Where every evaluated individual is recorded. A fresh
        in-memory log is used if not given.
    '''

    def __init__(self, space, backend, config, runlog=None):
        self.space = space
        self.backend = backend
        self.config = config
        self.runlog = runlog if runlog is not None else RunLog()
        self.cache = EvaluationCache()
        self.streams = RandomStreams(config.rng_seed)
        self.backend_calls = 0

    def evaluate(self, population, generation):
        '''Fills in the fitness of every individual, submitting only genomes
        the cache has not seen. Returns the number of new evaluations.'''
        fresh = []
        for ind in population:
            if ind.genome not in self.cache and ind.genome not in fresh:
                fresh.append(ind.genome)

        if fresh:
            self.backend_calls += len(fresh)
            evaluations = self.backend.evaluate_batch(fresh)
            failed = [(g, e) for g, e in zip(fresh, evaluations) if not e.ok]
            for genome, evaluation in zip(fresh, evaluations):
                if evaluation.ok:
                    self.cache.store(genome, evaluation)
            if failed:
                self.runlog.flush()
                genome, evaluation = failed[0]
                raise BackendError(
                    'generation %d: %d genomes failed, first %r: %s' % (
                        generation, len(failed), genome, evaluation.error))

        seen = set()
        for ind in population:
            evaluation = self.cache.get(ind.genome)
            ind.fitness = evaluation.fitness
            new = ind.genome in fresh and ind.genome not in seen
            seen.add(ind.genome)
            self.runlog.append(RunLogRecord(
                generation=generation,
                encoding=self.space.encoding,
                genome=ind.genome,
                fitness=evaluation.fitness,
                eta=evaluation.eta,
                beta=evaluation.beta,
                area=evaluation.area,
                new=new))
        self.runlog.flush()
        return len(fresh)

    def run(self):
        config = self.config
        population = [
            Individual(random_genome(self.space, self.streams.init))
            for _ in range(config.population_size)]
        best = None
        records = []
        stale = 0
        for generation in range(config.generations):
            if generation > 0:
                population = next_generation(
                    population, config, self.space, self.streams)
            new = self.evaluate(population, generation)

            improved = False
            for ind in population:
                if best is None or ind.fitness > best.fitness:
                    best = Individual(ind.genome, ind.fitness)
                    improved = True
            records.append(GenerationRecord(
                generation, best.fitness, new, best.genome))
            log.info('Generation %d: best fitness %.6g, %d new evaluations',
                     generation, best.fitness, new)

            stale = 0 if improved else stale + 1
            if 0 < config.early_stop_generations <= stale:
                log.info('Stopping early after %d generations without '
                         'improvement', stale)
                break
        return RunResult(best, records, self.runlog)


def run(space, backend, config, runlog=None):
    '''
    Evolves a random initial population for ``config.generations``
    generations (the initial population counts as generation 0).

    :returns: :class:`RunResult` -- the best individual ever seen, one
        :class:`GenerationRecord` per generation and the run log.
    :raises BackendError: if the backend fails; the log keeps every
        generation completed so far.
    '''
    return GeneticAlgorithm(space, backend, config, runlog).run()
