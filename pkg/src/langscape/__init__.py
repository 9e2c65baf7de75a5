"""Inversion landscapes of random expansive ReLU generators.

Subpackages: closed-form polar landscape (`landscape`), finite random
generators and concentration checks (`generator`), mixture priors and noise
schedules (`priors`), Langevin / gradient samplers (`samplers`), transport
distances and chain diagnostics (`diagnostics`), experiment harness and CLI
(`harness`).
"""

__version__ = "0.1.0"
