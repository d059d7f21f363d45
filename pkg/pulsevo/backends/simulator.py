import logging

from pulsevo import config as conf
from pulsevo import memory_sim
from pulsevo.fitness_lab import Evaluation, FitnessBackend

log = logging.getLogger(__name__)


class SimulatorBackend(FitnessBackend):
    '''
    Scores genomes by simulating the storage experiment of every genome in
    a batch and taking the proxy fitness of the resulting trace.

    :type context: :class:`pulsevo.memory_sim.SimulationContext`
    '''
    name = 'sim'

    def __init__(self, context):
        super(SimulatorBackend, self).__init__(context.codec)
        self.context = context

    @classmethod
    def from_config(cls, config):
        return cls(conf.simulation_context(config))

    def evaluate_batch(self, genomes):
        results = memory_sim.evaluate_batch(list(genomes), self.context)
        return [self._evaluation(result) for result in results]

    def _evaluation(self, result):
        if not result.ok:
            return Evaluation(trace=result.trace, error=result.error)
        return Evaluation(
            fitness=result.fitness,
            eta=result.efficiency.eta_int,
            area=self.codec.area(result.genome),
            trace=result.trace)
