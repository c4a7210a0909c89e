"""lasbench: late-acceptance local search strategies and their benchmark harness."""

__version__ = "1.0.0"
