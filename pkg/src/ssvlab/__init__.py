"""Self-similar-variable surrogate laboratory for heat-based PDEs."""

__version__ = "0.1.0"
