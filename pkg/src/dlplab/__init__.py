"""dlplab: a desk-scale index-calculus laboratory for discrete logarithms
in small-characteristic finite fields.

The pipeline: pick a field representation (field_rep), generate factor-base
relations (relations), solve for factor-base logarithms with sparse linear
algebra mod the subgroup order (linalg), then compute individual logarithms
by recursive descent (descent).  solver ties the stages together and carries
an independent Pohlig-Hellman oracle for validation.
"""

__version__ = "0.1.0"

from . import algebra  # noqa: F401
