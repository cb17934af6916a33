"""Unit conversions shared across the package."""

HARTREE_TO_KCAL = 627.509474
KCAL_TO_HARTREE = 1.0 / HARTREE_TO_KCAL

# 1 kcal/mol is about 1.594e-3 Ha; acceptance checks use the rounded 1.6e-3.
CHEMICAL_ACCURACY_HARTREE = 1.6e-3


def hartree_to_kcal(e: float) -> float:
    return e * HARTREE_TO_KCAL


def kcal_to_hartree(e: float) -> float:
    return e * KCAL_TO_HARTREE
