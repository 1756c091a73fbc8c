"""Numerical verification toolkit for calibrated conformal maps."""

try:
    from smithmap._smithmap import (  # type: ignore[import-not-found]
        comass,
        energy,
        hadamard,
        models,
        residual,
        sweep,
        tension,
        verify_lemmas,
        warped_g2,
    )
except ImportError:  # in-tree builds expose the extension at top level
    from _smithmap import (  # type: ignore[import-not-found]
        comass,
        energy,
        hadamard,
        models,
        residual,
        sweep,
        tension,
        verify_lemmas,
        warped_g2,
    )

__all__ = [
    "comass",
    "energy",
    "hadamard",
    "models",
    "residual",
    "sweep",
    "tension",
    "verify_lemmas",
    "warped_g2",
]
