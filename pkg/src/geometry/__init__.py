"""Hyperbolic trigonometry, pants and X-piece length formulas."""
