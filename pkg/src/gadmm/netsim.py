"""Round-based message bus with locality enforcement.

The bus makes every transmission observable (for communication-cost
accounting) and refuses deliveries that the declared topology would not
allow: under a chain policy a worker may only reach its current chain
neighbors, under a star policy traffic flows between the center and the
leaves.  One posted message equals one transmission regardless of the
receiver count -- a local broadcast reaches both neighbors at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Message",
    "TransmissionRecord",
    "LocalityViolation",
    "ChainPolicy",
    "StarPolicy",
    "MessageBus",
]

MODEL = "model"
DUAL = "dual"


@dataclass(frozen=True)
class Message:
    round: int
    sender: int
    receivers: tuple[int, ...]
    payload: np.ndarray
    kind: str = MODEL

    def __post_init__(self):
        if len(self.receivers) == 0:
            raise ValueError("a message needs at least one receiver")
        if self.kind not in (MODEL, DUAL):
            raise ValueError(f"unknown payload kind {self.kind!r}")


@dataclass(frozen=True)
class TransmissionRecord:
    """One sender transmitting in one round."""

    round: int
    sender: int
    receivers: tuple[int, ...]


class LocalityViolation(RuntimeError):
    pass


class ChainPolicy:
    """Receivers must be chain neighbors of the sender."""

    def __init__(self, order: list[int]):
        self.order = list(order)
        pos = {w: i for i, w in enumerate(self.order)}
        self._neighbors = {}
        for w, i in pos.items():
            nbrs = []
            if i > 0:
                nbrs.append(self.order[i - 1])
            if i < len(self.order) - 1:
                nbrs.append(self.order[i + 1])
            self._neighbors[w] = frozenset(nbrs)

    def check(self, msg: Message):
        allowed = self._neighbors.get(msg.sender)
        if allowed is None:
            raise LocalityViolation(f"unknown sender {msg.sender}")
        for r in msg.receivers:
            if r not in allowed:
                raise LocalityViolation(
                    f"worker {msg.sender} may not reach {r}: not a chain neighbor"
                )


class StarPolicy:
    """Traffic flows between the center worker and the leaves only."""

    def __init__(self, center: int, n_workers: int):
        self.center = center
        self.workers = frozenset(range(1, n_workers + 1))
        if center not in self.workers:
            raise ValueError("center must be one of the workers")

    def check(self, msg: Message):
        if msg.sender not in self.workers:
            raise LocalityViolation(f"unknown sender {msg.sender}")
        for r in msg.receivers:
            if r not in self.workers:
                raise LocalityViolation(f"unknown receiver {r}")
            if msg.sender != self.center and r != self.center:
                raise LocalityViolation(
                    f"worker {msg.sender} may only reach the center {self.center}"
                )


@dataclass
class MessageBus:
    """Queues messages for the current round; delivers atomically on flush."""

    policy: ChainPolicy | StarPolicy | None = None
    round: int = 0
    _queue: list[Message] = field(default_factory=list)
    _log: list[TransmissionRecord] = field(default_factory=list)

    def post(self, msg: Message):
        if msg.round != self.round:
            raise ValueError(
                f"message for round {msg.round} posted during round {self.round}"
            )
        if any(q.sender == msg.sender for q in self._queue):
            raise ValueError(
                f"worker {msg.sender} already transmitted in round {self.round}"
            )
        if self.policy is not None:
            self.policy.check(msg)
        self._queue.append(msg)

    def flush_round(self) -> tuple[list[Message], list[TransmissionRecord]]:
        """Deliver all queued messages, advance the round counter.

        Returns the delivered messages and the new per-sender log entries.
        """
        delivered = list(self._queue)
        entries = [
            TransmissionRecord(m.round, m.sender, m.receivers) for m in delivered
        ]
        self._log.extend(entries)
        self._queue.clear()
        self.round += 1
        return delivered, entries

    @property
    def log(self) -> list[TransmissionRecord]:
        return list(self._log)
