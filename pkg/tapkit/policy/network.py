"""
Selection policy network.

The encoder embeds every oriented state from its static shape features and
its dynamic blocker masks. A recurrent decoder consumes the previously
selected state and the container height maps, attends over the encoded
states and points at the next state to transport. A small critic estimates
the episode reward from the mean encoded state.
"""

from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..core.geometry import orientation_count
from ..exceptions import TapFeasibilityError, TapValueError
from ..packing.container import HEIGHT_MODES, representation_size

DYNAMIC_MODES = ("full", "initial", "none")
DECODER_INPUTS = ("both", "shape", "height")


# ============================================================================
# Configuration
# ============================================================================


@dataclass(frozen=True)
class PolicyConfig:
    """
    Network shape and input ablations.

    Parameters
    ----------
    capacity : int
        Number of box slots ``n``; instances with more boxes need rolling mode
    dims_mode : {2, 3}
    target_width, target_depth : int
        Target container footprint (depth only used in 3D)
    container_count : int
        Number of target containers ``k``
    static_dim, dynamic_dim : int
        Embedding sizes; the encoder output and the recurrent hidden state
        have size ``static_dim + dynamic_dim``
    height_dim : int
        Embedding size of one container's height map
    critic_dim : int
        Hidden layer size of the critic
    height_mode : {'raw', 'zero-min', 'gradient'}
    dynamic_mode : {'full', 'initial', 'none'}
        Blocker masks updated every step, frozen at the first step, or zeroed
    decoder_input : {'both', 'shape', 'height'}
        What the recurrent cell consumes besides its hidden state
    """

    capacity: int = 10
    dims_mode: int = 2
    target_width: int = 5
    target_depth: int = 5
    container_count: int = 1
    static_dim: int = 64
    dynamic_dim: int = 64
    height_dim: int = 64
    critic_dim: int = 64
    height_mode: str = "gradient"
    dynamic_mode: str = "full"
    decoder_input: str = "both"

    def __post_init__(self) -> None:
        if self.dims_mode not in (2, 3):
            raise TapValueError(f"dims_mode must be 2 or 3, got {self.dims_mode}")
        if self.height_mode not in HEIGHT_MODES:
            raise TapValueError(f"height_mode must be one of {HEIGHT_MODES}")
        if self.dynamic_mode not in DYNAMIC_MODES:
            raise TapValueError(f"dynamic_mode must be one of {DYNAMIC_MODES}")
        if self.decoder_input not in DECODER_INPUTS:
            raise TapValueError(f"decoder_input must be one of {DECODER_INPUTS}")
        sizes = (
            self.capacity,
            self.target_width,
            self.target_depth,
            self.container_count,
            self.static_dim,
            self.dynamic_dim,
            self.height_dim,
            self.critic_dim,
        )
        if min(sizes) < 1:
            raise TapValueError(f"All sizes must be >= 1, got {sizes}")

    @property
    def n_orient(self) -> int:
        return orientation_count(self.dims_mode)

    @property
    def n_states(self) -> int:
        return self.capacity * self.n_orient

    @property
    def hidden_dim(self) -> int:
        return self.static_dim + self.dynamic_dim

    @property
    def static_features(self) -> int:
        extra = self.container_count if self.container_count > 1 else 0
        return self.dims_mode + extra

    @property
    def dynamic_features(self) -> int:
        return 3 * self.capacity

    @property
    def height_features(self) -> int:
        depth = self.target_depth if self.dims_mode == 3 else None
        return representation_size(self.height_mode, self.target_width, depth)

    @property
    def decoder_input_dim(self) -> int:
        size = 0
        if self.decoder_input in ("both", "shape"):
            size += self.static_dim
        if self.decoder_input in ("both", "height"):
            size += self.container_count * self.height_dim
        return size

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PolicyConfig":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise TapValueError(f"Unknown policy settings: {sorted(unknown)}")
        return cls(**data)


# ============================================================================
# Network
# ============================================================================


class PackingPolicy(nn.Module):
    """
    Encoder / recurrent attention decoder / critic over oriented box states.

    Shapes use ``B`` for the batch, ``S`` for ``capacity * n_orient`` states
    and ``k`` for the number of containers.
    """

    def __init__(self, config: Optional[PolicyConfig] = None):
        super().__init__()
        self.config = config or PolicyConfig()
        cfg = self.config
        hidden = cfg.hidden_dim

        self.static_embed = nn.Conv1d(cfg.static_features, cfg.static_dim, kernel_size=1)
        self.dynamic_embed = nn.Sequential(
            nn.Conv1d(cfg.dynamic_features, cfg.dynamic_dim, kernel_size=1),
            nn.ReLU(),
            nn.Conv1d(cfg.dynamic_dim, cfg.dynamic_dim, kernel_size=1),
        )
        self.height_embed = nn.Linear(cfg.height_features, cfg.height_dim)
        self.start_token = nn.Parameter(torch.empty(cfg.static_dim))
        self.cell = nn.GRUCell(cfg.decoder_input_dim, hidden)

        self.attn_w = nn.Linear(2 * hidden, hidden, bias=False)
        self.attn_v = nn.Parameter(torch.empty(hidden))
        self.ptr_w = nn.Linear(2 * hidden, hidden, bias=False)
        self.ptr_v = nn.Parameter(torch.empty(hidden))

        self.critic = nn.Sequential(
            nn.Linear(hidden, cfg.critic_dim),
            nn.ReLU(),
            nn.Linear(cfg.critic_dim, 1),
        )
        self._reset_vectors()

    def _reset_vectors(self) -> None:
        bound = self.config.hidden_dim**-0.5
        for vector in (self.start_token, self.attn_v, self.ptr_v):
            nn.init.uniform_(vector, -bound, bound)

    # ------------------------------------------------------------------
    # Encoder
    # ------------------------------------------------------------------

    def encode(self, static: torch.Tensor, dynamic: torch.Tensor) -> torch.Tensor:
        """
        Embed every state.

        Parameters
        ----------
        static : Tensor (B, S, static_features)
        dynamic : Tensor (B, S, 3 * capacity)

        Returns
        -------
        Tensor (B, S, static_dim + dynamic_dim)
            The first ``static_dim`` channels are the static embedding
        """
        cfg = self.config
        expected_static = (cfg.n_states, cfg.static_features)
        expected_dynamic = (cfg.n_states, cfg.dynamic_features)
        if tuple(static.shape[1:]) != expected_static:
            raise TapValueError(
                f"static features {tuple(static.shape)}, expected (B, {expected_static})"
            )
        if tuple(dynamic.shape[1:]) != expected_dynamic:
            raise TapValueError(
                f"dynamic features {tuple(dynamic.shape)}, expected (B, {expected_dynamic})"
            )
        s = self.static_embed(static.transpose(1, 2))
        d = self.dynamic_embed(dynamic.transpose(1, 2))
        return torch.cat([s, d], dim=1).transpose(1, 2)

    def embed_heights(self, heights: torch.Tensor) -> torch.Tensor:
        """(B, k, height_features) -> (B, k * height_dim); one shared layer per container."""
        return self.height_embed(heights).flatten(start_dim=1)

    def initial_hidden(self, batch: int) -> torch.Tensor:
        return self.start_token.new_zeros(batch, self.config.hidden_dim)

    def initial_previous(self, batch: int) -> torch.Tensor:
        return self.start_token.unsqueeze(0).expand(batch, -1)

    # ------------------------------------------------------------------
    # Decoder
    # ------------------------------------------------------------------

    def decode_step(
        self,
        encoded: torch.Tensor,
        previous: torch.Tensor,
        heights: torch.Tensor,
        hidden: torch.Tensor,
        valid: torch.Tensor,
        live: Optional[torch.Tensor] = None,
    ) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        """
        One selection step.

        Parameters
        ----------
        encoded : Tensor (B, S, D)
        previous : Tensor (B, static_dim)
            Static embedding of the previously selected state (start token first)
        heights : Tensor (B, k, height_features)
        hidden : Tensor (B, D)
        valid : BoolTensor (B, S)
            Selectable states
        live : BoolTensor (B, S), optional
            States attended to (unpacked real boxes); defaults to ``valid``

        Returns
        -------
        probs, log_probs : Tensor (B, S)
            Invalid states have probability 0 and log-probability ``-inf``
        hidden : Tensor (B, D)

        Raises
        ------
        TapFeasibilityError
            If a row has no valid state
        """
        if not bool(valid.any(dim=1).all()):
            raise TapFeasibilityError("Every state is masked in at least one batch row")
        live = valid if live is None else live | valid

        parts = []
        if self.config.decoder_input in ("both", "shape"):
            parts.append(previous)
        if self.config.decoder_input in ("both", "height"):
            parts.append(self.embed_heights(heights))
        hidden = self.cell(torch.cat(parts, dim=1), hidden)

        query = hidden.unsqueeze(1).expand(-1, encoded.size(1), -1)
        scores = torch.tanh(self.attn_w(torch.cat([encoded, query], dim=2))) @ self.attn_v
        weights = F.softmax(scores.masked_fill(~live, float("-inf")), dim=1)
        context = torch.bmm(weights.unsqueeze(1), encoded).squeeze(1)

        glimpse = context.unsqueeze(1).expand(-1, encoded.size(1), -1)
        logits = torch.tanh(self.ptr_w(torch.cat([encoded, glimpse], dim=2))) @ self.ptr_v
        log_probs = F.log_softmax(logits.masked_fill(~valid, float("-inf")), dim=1)
        return log_probs.exp(), log_probs, hidden

    # ------------------------------------------------------------------
    # Critic
    # ------------------------------------------------------------------

    def critic_value(
        self, encoded: torch.Tensor, live: Optional[torch.Tensor] = None
    ) -> torch.Tensor:
        """
        Reward estimate from the mean of the live encoded states.

        Returns
        -------
        Tensor (B,)
        """
        if live is None:
            pooled = encoded.mean(dim=1)
        else:
            weights = live.to(encoded.dtype).unsqueeze(2)
            pooled = (encoded * weights).sum(dim=1) / weights.sum(dim=1).clamp_min(1.0)
        return self.critic(pooled).squeeze(1)
