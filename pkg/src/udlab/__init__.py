"""Unit-distance and diameter-graph realizability experiments on random graphs."""
