"""Shared domain types, configuration, RNG streams and record ingestion."""
