"""qgamelab: quantum game circuits on a small state-vector engine.

Subpackages and modules
-----------------------
core
    State vectors, the tactic catalog, controlled application and measurement.
games
    Newcomb breaker and qutrojan, Elitzur-Vaidman breaker, Zeno, anti-Zeno and
    supply-demand testers, Wiesner banknote games.
ising
    Metropolis cellular automaton for the cyclic Ising chain.
cli
    Seeded experiment harness writing CSV.
"""

__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402

__all__ = ["BACKEND", "__version__"]
