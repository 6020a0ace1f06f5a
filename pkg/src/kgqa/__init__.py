"""kgqa — explainable question answering over a domain knowledge graph.

Queries annotated with POS tags and dependency arcs are chunked, compiled
into multi-layer constraint query graphs, solved by spreading-activation
subgraph search plus feature-based decision making, and answered with
confidences and a reasoning subgraph explaining each answer.
"""

__version__ = "0.1.0"
