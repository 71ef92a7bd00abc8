"""Field towers, polynomials, factorization and smoothness machinery."""

from .fields import FieldDesc, field_desc, gf, F2, TABLE_BITS
from .packed import packed_field, PackedField, PackedModulus
from .poly import (
    Poly,
    Factorization,
    factor,
    smooth_factor,
    is_smooth_exact,
    is_irreducible,
    splits_completely,
    splits_into_linears,
    distinct_roots,
    split_over_extension,
    quadratic_extension,
    irreducibles,
    random_irreducible,
    monic_polys,
    poly_to_text,
    poly_from_text,
    set_run_seed,
    squarefree_decomposition,
)
from .density import irreducible_count, smooth_probability, smooth_count
from .smoothness import smoothness_test, frobenius_powers, strategy_cost_model, OpCounter


def field_create(p, tower):
    """Build a validated tower field; rejects reducible defining polynomials."""
    f = field_desc(p)
    for level, (deg, coeffs) in enumerate(tower):
        if len(coeffs) != deg + 1 or coeffs[deg] != 1:
            raise ValueError(f"level {level}: defining polynomial must be monic of length degree+1")
        if deg > 1:
            defining = Poly.from_coeffs(f, coeffs)
            if not is_irreducible(defining):
                raise ValueError(f"level {level}: defining polynomial is reducible over the level below")
        f = f.extension(coeffs)
    return f
