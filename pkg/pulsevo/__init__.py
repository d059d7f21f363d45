'''
pulsevo optimizes the write control pulses of a quantum memory with a
genetic algorithm, scoring candidate pulses with a pluggable fitness
backend.
'''
__version__ = '0.1.0'
