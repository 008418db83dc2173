"""
Policy rollouts: run the network over whole episodes, one batch row per instance.

Finished rows keep stepping on a placeholder observation whose only valid
state has probability 1, so they contribute nothing to the summed
log-probabilities.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Protocol, Sequence, Tuple, runtime_checkable

import numpy as np
import torch

from ..core.geometry import OrientedState
from ..core.instance import ProblemInstance, Solution
from ..exceptions import TapCapacityError, TapValueError
from ..packing.state import PackingState, initial_state
from .features import check_compatible, collate, observe, placeholder
from .network import PackingPolicy

ROLLOUT_MODES = ("sample", "argmax")


@runtime_checkable
class SlotAssignment(Protocol):
    """
    Which box each network slot shows at a decision step.

    ``slots`` returns ``capacity``-or-fewer box ids (``None`` for an empty
    slot) for the current state; ``after_pack`` is told which box was just
    packed so the assignment can change. Assignments that never change may
    ignore both arguments.
    """

    def slots(self, state: PackingState) -> Sequence[Optional[int]]: ...

    def after_pack(self, state: PackingState, box_id: int) -> None: ...


class FixedSlots(SlotAssignment):
    """Every box keeps the slot of its position in the instance."""

    def __init__(self, inst: ProblemInstance, capacity: int):
        if inst.n_boxes > capacity:
            raise TapCapacityError(inst.n_boxes, capacity)
        self._slots = tuple(inst.box_ids)

    def slots(self, state: PackingState) -> Sequence[Optional[int]]:
        return self._slots

    def after_pack(self, state: PackingState, box_id: int) -> None:
        pass


@dataclass(frozen=True)
class RolloutTrace:
    """What the policy saw and chose during one episode."""

    states: Tuple[OrientedState, ...]
    indices: Tuple[int, ...]
    log_probs: Tuple[float, ...]
    masks: Tuple[np.ndarray, ...] = field(repr=False)
    reward: float
    value: float


@dataclass
class BatchRollout:
    """
    Batched episode results.

    ``log_probs``, ``entropy`` and ``values`` keep their autograd history so
    a trainer can backpropagate through them.
    """

    solutions: List[Solution]
    traces: List[RolloutTrace]
    log_probs: torch.Tensor
    entropy: torch.Tensor
    values: torch.Tensor
    rewards: torch.Tensor


def rollout_batch(
    policy: PackingPolicy,
    instances: Sequence[ProblemInstance],
    strategy: str = "lb",
    mode: str = "sample",
    generator: Optional[torch.Generator] = None,
    windows: Optional[Sequence[SlotAssignment]] = None,
    method: str = "net",
) -> BatchRollout:
    """
    Run the policy on every instance until all boxes are packed.

    Parameters
    ----------
    policy : PackingPolicy
    instances : sequence of ProblemInstance
    strategy : {'lb', 'mul', 'macs'}
        Placement strategy applied to each selected state
    mode : {'sample', 'argmax'}
    generator : torch.Generator, optional
        Source of randomness for ``'sample'``
    windows : sequence of SlotAssignment, optional
        Per-instance slot assignment; defaults to :class:`FixedSlots`

    Raises
    ------
    TapCapacityError
        If an instance has more boxes than slots and no window is given
    """
    if mode not in ROLLOUT_MODES:
        raise TapValueError(f"mode must be one of {ROLLOUT_MODES}, got '{mode}'")
    cfg = policy.config
    for inst in instances:
        check_compatible(inst, cfg)
    if windows is None:
        windows = [FixedSlots(inst, cfg.capacity) for inst in instances]

    states = [initial_state(inst) for inst in instances]
    batch = len(states)
    dtype = policy.start_token.dtype
    rows = torch.arange(batch)

    hidden = policy.initial_hidden(batch)
    previous = policy.initial_previous(batch)
    log_sum = torch.zeros(batch, dtype=dtype)
    entropy = torch.zeros(batch, dtype=dtype)
    values: Optional[torch.Tensor] = None
    frozen: List[Optional[np.ndarray]] = [None] * batch
    records: List[List[Tuple[OrientedState, int, float, np.ndarray]]] = [[] for _ in states]

    while not all(state.is_done for state in states):
        active = [not state.is_done for state in states]
        observations = []
        for b, state in enumerate(states):
            if not active[b]:
                observations.append(placeholder(cfg))
                continue
            obs = observe(state, cfg, windows[b].slots(state), frozen[b])
            if frozen[b] is None:
                frozen[b] = obs.dynamic
            observations.append(obs)

        static, dynamic, heights, valid, live = collate(observations, dtype)
        encoded = policy.encode(static, dynamic)
        if values is None:
            values = policy.critic_value(encoded, live)
        probs, log_probs, hidden = policy.decode_step(
            encoded, previous, heights, hidden, valid, live
        )

        if mode == "argmax":
            chosen = log_probs.argmax(dim=1)
        else:
            chosen = torch.multinomial(probs.detach(), 1, generator=generator).squeeze(1)

        weight = torch.tensor(active, dtype=dtype)
        picked = log_probs[rows, chosen]
        log_sum = log_sum + picked * weight
        # Masked states have p = 0 and log p = -inf; zero log p first so 0 * -inf
        # never enters the backward pass.
        plogp = probs * log_probs.masked_fill(~valid, 0.0)
        entropy = entropy - plogp.sum(dim=1) * weight
        previous = encoded[rows, chosen, : cfg.static_dim]

        for b in range(batch):
            if not active[b]:
                continue
            box_id, orientation = observations[b].decode_state(chosen[b], cfg.n_orient)
            selected = states[b].instance.box(box_id).oriented(orientation)
            states[b] = states[b].apply(selected, strategy)
            windows[b].after_pack(states[b], box_id)
            records[b].append(
                (selected, int(chosen[b]), float(picked[b].detach()), observations[b].valid)
            )

    if values is None:
        values = torch.zeros(batch, dtype=dtype)
    solutions = [state.to_solution(method, strategy=strategy, mode=mode) for state in states]
    traces = [
        RolloutTrace(
            states=tuple(r[0] for r in rec),
            indices=tuple(r[1] for r in rec),
            log_probs=tuple(r[2] for r in rec),
            masks=tuple(r[3] for r in rec),
            reward=sol.reward.R,
            value=float(values[b].detach()),
        )
        for b, (rec, sol) in enumerate(zip(records, solutions))
    ]
    rewards = torch.tensor([sol.reward.R for sol in solutions], dtype=dtype)
    return BatchRollout(solutions, traces, log_sum, entropy, values, rewards)


def rollout(
    policy: PackingPolicy,
    inst: ProblemInstance,
    strategy: str = "lb",
    mode: str = "argmax",
    generator: Optional[torch.Generator] = None,
    window: Optional[SlotAssignment] = None,
    method: str = "net",
) -> Tuple[Solution, RolloutTrace]:
    """
    Solve one instance with the policy (no gradients).

    Examples
    --------
    >>> solution, trace = rollout(PackingPolicy(PolicyConfig(capacity=4, target_width=4)), f1)
    >>> len(solution)
    3
    """
    with torch.no_grad():
        result = rollout_batch(
            policy,
            [inst],
            strategy,
            mode,
            generator,
            None if window is None else [window],
            method,
        )
    return result.solutions[0], result.traces[0]
