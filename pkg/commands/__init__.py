# commands/__init__.py
"""click verbs, one module per concern; main.py registers them on the `cli` group."""
