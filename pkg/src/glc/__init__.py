"""Graphic lambda calculus rewriting engine."""
