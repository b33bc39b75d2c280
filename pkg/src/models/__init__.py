"""
Models module for the blockfade toolkit.

Contains Pydantic models for channel-model descriptions, request bodies and
result records.
"""
