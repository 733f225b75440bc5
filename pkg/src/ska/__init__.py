"""Forward-only networks trained by layer-local entropy minimization."""
