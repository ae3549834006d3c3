"""Type-3 bilinear group backend (BLS12-381) with operation counting."""

from .context import (
    G1,
    G2,
    GT,
    G1Elem,
    G2Elem,
    GTElem,
    GroupContext,
    OpCounter,
    centered_lift,
    centered_unlift,
    setup_group,
)

__all__ = [
    "G1",
    "G2",
    "GT",
    "G1Elem",
    "G2Elem",
    "GTElem",
    "GroupContext",
    "OpCounter",
    "centered_lift",
    "centered_unlift",
    "setup_group",
]
