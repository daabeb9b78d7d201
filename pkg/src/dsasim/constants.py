"""Physical constants shared across the package (SI units)."""

C0 = 299_792_458.0
"""Speed of light in vacuum, m/s."""

ETA0 = 376.730313668
"""Free-space wave impedance, ohms."""

EULER_GAMMA = 0.5772156649015329
"""Euler-Mascheroni constant."""
