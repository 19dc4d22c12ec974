"""jigsaw: multi-modal code synthesis and repair for a small table-expression
language.

The package wraps a black-box code-generating model with pre-processing
(context selection from a growing example bank) and post-processing
(I/O-example validation, variable-name repair, enumerative argument repair,
and learned AST-to-AST rewrite rules), and learns from user feedback.
"""

__version__ = "0.1.0"
