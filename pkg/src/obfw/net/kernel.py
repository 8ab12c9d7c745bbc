"""Protocol kernel: party programs are generators yielding Send/Recv.

A party program never touches a socket or a queue; it yields commands and
is resumed with decoded values.  The same generator runs unchanged under
the deterministic in-process simulator and the TCP runtime, which is what
makes transport-equivalence testable.
"""
from __future__ import annotations

from dataclasses import dataclass

from .groups import Group, Segment


class PartyTimeout(Exception):
    """A peer message this party is blocked on will never arrive."""


@dataclass
class Send:
    to: int
    step: int
    segments: list[Segment]


@dataclass
class Recv:
    frm: int
    step: int
    schema: list[tuple[Group, int]]


def send(to: int, step: int, segments: list[Segment]):
    """Helper usable as `yield from send(...)` inside party programs."""
    yield Send(to, step, segments)


def recv(frm: int, step: int, schema: list[tuple[Group, int]]):
    """Helper usable as `vals = yield from recv(...)`."""
    return (yield Recv(frm, step, schema))
