"""Dempster's rule of combination, with conflict tracking and an alternative
binary-frame pooling mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import fsum, prod
from typing import Iterable

from .errors import EmptyInput, FrameMismatch, ModeUnsupported, TotalConflict
from .evidence import Frame, HypothesisSet, MassFunction

# Dividing by 1 - K is numerically meaningless once K is this close to one.
TOTAL_CONFLICT_LIMIT = 1.0 - 1e-12


class CombinationMode(Enum):
    """How non-conflicting intersection products are routed when fusing.

    STANDARD is Dempster's rule: every product of sets with a non-empty
    intersection reinforces that intersection, so a singleton meeting the
    full set reinforces the singleton.

    SIMPLIFIED (binary frames only) reinforces a singleton only where both
    sources name exactly that singleton; every other non-conflicting product,
    including singleton x full-set cross terms, is pooled back into the full
    set. It keeps more mass on the uncertainty set, giving wider intervals,
    and it is not associative: multi-source folds are order-dependent.
    """

    STANDARD = "standard"
    SIMPLIFIED = "simplified"


@dataclass(frozen=True)
class CombinationResult:
    """A fused mass plus the conflict that was discarded while fusing.

    ``conflict`` is the total discarded mass across the whole fold,
    1 - prod(1 - K_i); ``step_conflicts`` holds each pairwise K in fold order.
    """

    mass: MassFunction
    conflict: float
    step_conflicts: tuple[float, ...]


def conflict(m1: MassFunction, m2: MassFunction) -> float:
    """The degree of conflict K: total product mass on empty intersections."""
    _require_common_frame(m1, m2)
    return fsum(
        mb * mc
        for b, mb in m1.focal()
        for c, mc in m2.focal()
        if b.mask & c.mask == 0
    )


def combine_pair(
    m1: MassFunction,
    m2: MassFunction,
    mode: CombinationMode = CombinationMode.STANDARD,
) -> CombinationResult:
    """Fuse two sources, normalizing the surviving products by 1 - K.

    Iterates focal elements only, accumulating each target cell separately so
    results are reproducible to the last bit against a full-grid reference.
    """
    frame = _require_common_frame(m1, m2)
    _require_mode_fits(mode, frame)
    full = (1 << frame.size) - 1
    cells: dict[int, list[float]] = {}
    clashes: list[float] = []
    for b, mb in m1.focal():
        for c, mc in m2.focal():
            product = mb * mc
            inter = b.mask & c.mask
            if inter == 0:
                clashes.append(product)
            elif mode is CombinationMode.STANDARD:
                cells.setdefault(inter, []).append(product)
            elif b.mask == c.mask and b.is_singleton:
                cells.setdefault(b.mask, []).append(product)
            else:
                cells.setdefault(full, []).append(product)
    k = fsum(clashes)
    if k >= TOTAL_CONFLICT_LIMIT:
        raise TotalConflict(f"sources are in total conflict (K = {k!r})")
    normalizer = 1.0 - k
    combined = MassFunction(
        frame,
        [
            (HypothesisSet(frame, mask), fsum(products) / normalizer)
            for mask, products in sorted(cells.items())
        ],
    )
    return CombinationResult(combined, k, (k,))


def combine_all(
    masses: Iterable[MassFunction],
    mode: CombinationMode = CombinationMode.STANDARD,
) -> CombinationResult:
    """Left-fold :func:`combine_pair` over the sources in input order.

    Standard mode is associative and commutative, so the result does not
    depend on the order. Simplified mode does depend on it; the fold order is
    defined to be the input order, and ``step_conflicts`` records each step.
    """
    sources = list(masses)
    if not sources:
        raise EmptyInput("need at least one mass function to combine")
    _require_mode_fits(mode, sources[0].frame)
    combined = sources[0]
    steps: list[float] = []
    for m in sources[1:]:
        step = combine_pair(combined, m, mode)
        combined = step.mass
        steps.append(step.conflict)
    total = 1.0 - prod(1.0 - k for k in steps)
    return CombinationResult(combined, total, tuple(steps))


def _require_common_frame(m1: MassFunction, m2: MassFunction) -> Frame:
    if m1.frame != m2.frame:
        raise FrameMismatch(
            f"cannot combine masses over frames {m1.frame.labels} and {m2.frame.labels}"
        )
    return m1.frame


def _require_mode_fits(mode: CombinationMode, frame: Frame) -> None:
    if mode is CombinationMode.SIMPLIFIED and frame.size != 2:
        raise ModeUnsupported(
            f"simplified combination needs a binary frame, got {frame.size} hypotheses"
        )
