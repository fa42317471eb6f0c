"""Document ingestion: parse, validate, build."""
