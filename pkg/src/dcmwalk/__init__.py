"""DCM walking stabilizer with a reduced closed-loop test plant."""

__version__ = "0.1.0"
