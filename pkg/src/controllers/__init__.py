"""
Controllers module for the blockfade toolkit.

Async wrappers that turn HTTP request bodies into service calls.
"""
