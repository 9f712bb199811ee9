"""Method-level co-change mining and learning-to-rank toolkit."""

__version__ = "0.1.0"
