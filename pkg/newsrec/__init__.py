"""News recommendation with LLM-generated category descriptions."""
