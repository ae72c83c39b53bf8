"""Pedersen commitments over G1."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import groups as grp


@dataclass(frozen=True)
class PedersenParams:
    g: object
    bases: tuple

    def __post_init__(self):
        if not self.bases:
            raise ValueError("Pedersen params need at least one base")
        seen = {b.to_bytes() for b in self.bases}
        if len(seen) != len(self.bases) or self.g.to_bytes() in seen:
            raise ValueError("Pedersen bases must be pairwise distinct")
        if any(b.is_identity() for b in self.bases) or self.g.is_identity():
            raise ValueError("Pedersen bases must not be the identity")


def commit(params: PedersenParams, msgs: Sequence[int], opening: int):
    if len(msgs) != len(params.bases):
        raise ValueError(f"expected {len(params.bases)} messages, got {len(msgs)}")
    return grp.g1_product([params.g, *params.bases], [opening, *msgs])


def verify(params: PedersenParams, com, msgs: Sequence[int], opening: int) -> bool:
    return commit(params, msgs, opening) == com
