"""
Services module for the blockfade toolkit.

Orchestration over the numerical modules, sweep parallelism and dependency
injection.
"""
