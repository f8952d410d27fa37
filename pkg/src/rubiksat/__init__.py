"""SAT-based Rubik's Cube solving: cube model, CNF encoding, CDCL search."""
__version__ = "0.1.0"
