"""Static committee description: validator identities, stakes, thresholds.

Validators are identified by their index in the stake list. That index order
is the deterministic tie-break order used throughout the protocol, so it must
be stable across runs given the same input.
"""

from __future__ import annotations

from dataclasses import dataclass, field


ValidatorId = int


class EmptyCommittee(ValueError):
    pass


class ZeroStake(ValueError):
    pass


@dataclass(frozen=True)
class Committee:
    """Immutable committee of ``n`` validators tolerating ``f`` faults.

    ``f`` is always derived as ``floor((n - 1) / 3)`` so that ``3f + 1 <= n``
    holds by construction. Edge quorums count vertices (``n - f``), commits
    need ``f + 1`` votes; stake only enters slot allocation and the sizing of
    the swap sets at schedule changes.
    """

    stakes: tuple[int, ...]
    n: int = field(init=False)
    f: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n", len(self.stakes))
        object.__setattr__(self, "f", (self.n - 1) // 3)

    @property
    def members(self) -> tuple[ValidatorId, ...]:
        return tuple(range(self.n))

    @property
    def total_stake(self) -> int:
        return sum(self.stakes)

    @property
    def quorum_threshold(self) -> int:
        """Vertex count required for round advancement and parent edges."""
        return self.n - self.f

    @property
    def commit_threshold(self) -> int:
        """Votes required for a direct anchor commit."""
        return self.f + 1

    def stake(self, v: ValidatorId) -> int:
        return self.stakes[v]


def new_committee(stakes: list[int]) -> Committee:
    """Build a committee from per-validator stakes, ids assigned by position."""
    if not stakes:
        raise EmptyCommittee("committee needs at least one validator")
    for i, s in enumerate(stakes):
        if s <= 0:
            raise ZeroStake(f"validator {i} has non-positive stake {s}")
    return Committee(stakes=tuple(int(s) for s in stakes))
