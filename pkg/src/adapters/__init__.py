"""
Adapters module for the blockfade toolkit.

Model-file parsing and result serialization.
"""
