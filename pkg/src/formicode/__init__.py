"""Information-theoretic model of ant scout communication.

Mazes as message sources, scout messages as code words whose contact time
grows linearly with code length, and the statistics used to analyse
transmission experiments.
"""

__version__ = "0.1.0"
