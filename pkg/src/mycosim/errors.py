"""Exception types shared across the package.

Every error raised by a public entry point derives from MycosimError and
carries the name of the subsystem that raised it, so command-line handlers
can prefix messages uniformly.
"""

from __future__ import annotations


class MycosimError(Exception):
    """Base class for all package errors."""

    subsystem = "mycosim"

    def __str__(self) -> str:
        return super().__str__()


class GraphError(MycosimError):
    subsystem = "graph"


class NetlistError(MycosimError):
    subsystem = "circuit"


class SolverError(MycosimError):
    subsystem = "solver"


class MemristorError(MycosimError):
    subsystem = "memristor"


class GateMinerError(MycosimError):
    subsystem = "gate-miner"


class RecordingError(MycosimError):
    subsystem = "spike-analysis"
