# services/__init__.py

# This file makes the 'services' directory a Python package. Modules are imported by name
# (from services import codec); nothing is loaded eagerly so group_core stays importable alone.
