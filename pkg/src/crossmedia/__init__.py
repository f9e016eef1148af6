"""Cross-platform gathering, normalization, enrichment and ranking of social media activities."""

__version__ = "0.1.0"
