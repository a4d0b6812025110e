"""HTTP service wrapping the synthesis toolkit."""
