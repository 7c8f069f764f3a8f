"""The cross-domain tagger: stacked Bi-LSTMs, optional dual memory, three heads and a discriminator."""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from data.embeddings import EmbeddingLookup, Vocabulary
from diffcore import ops
from diffcore.node import DiffNode
from diffcore.params import FEATURE, ParamStore
from models.config import LstmUInput, MemoryInit, ModelMode, TrainingConfig
from models.corpus import Sentence
from models.tags import BOUNDARY_TAGS, UNIFIED_TAGS, UnifiedTag
from network.adversarial import DomainDiscriminator
from network.heads import SoftmaxHead
from network.lstm import BiLstm
from network.memory import DmiState, DualMemory, run_dmi
from training.errors import ConfigError

logger = logging.getLogger(__name__)

EMBEDDING_NAME = "embed.table"


@dataclass
class TaggerOutput:
    boundary: DiffNode
    unified: DiffNode
    h_b: DiffNode
    h_u: DiffNode
    opinion: Optional[DiffNode] = None
    domain: Optional[DiffNode] = None
    dmi: Optional[DmiState] = None

    @property
    def selector(self) -> Optional[DiffNode]:
        """Final-hop aspect attention, the per-word weight of the selective domain loss."""
        return self.dmi.alpha_a if self.dmi is not None else None


class Tagger:
    """All parameters live in ``store``; creation order is fixed so a seed fixes every draw."""

    def __init__(self, config: TrainingConfig, vocab: Vocabulary, table: np.ndarray, rng: np.random.Generator):
        self.config = config
        self.mode = config.mode
        self.vocab = vocab
        self.store = ParamStore()
        if table.shape != (len(vocab), config.embed_dim):
            raise ConfigError(f"embedding table {table.shape} does not match vocabulary "
                              f"{len(vocab)} x embed_dim {config.embed_dim}")
        if config.finetune_embeddings:
            self.table = self.store.add(EMBEDDING_NAME, table, FEATURE)
        else:
            self.table = self.store.add_buffer(EMBEDDING_NAME, table)
        self.embeddings = EmbeddingLookup(self.table, vocab, config.dropout)

        bound = config.init_bound
        self.lstm_b = BiLstm(self.store, "lstm_b", config.embed_dim,
                             config.hidden_per_direction(config.dim_b), rng, bound)
        dim_b = self.lstm_b.out_dim
        corr_dim = 2 * config.bilinear_k

        self.memory: Optional[DualMemory] = None
        if self.mode.uses_memory:
            self.memory = DualMemory(self.store, dim_b, config.bilinear_k, rng, bound,
                                     learned_init=config.memory_init is MemoryInit.LEARNED)
            boundary_in = corr_dim
            u_in = corr_dim if config.lstm_u_input is LstmUInput.CORRELATION else dim_b + corr_dim
        else:
            boundary_in = u_in = dim_b

        self.lstm_u = BiLstm(self.store, "lstm_u", u_in, config.hidden_per_direction(config.dim_u), rng, bound)
        self.boundary_head = SoftmaxHead(self.store, "head.boundary", boundary_in, len(BOUNDARY_TAGS), rng, bound)
        self.unified_head = SoftmaxHead(self.store, "head.unified", self.lstm_u.out_dim, len(UNIFIED_TAGS),
                                        rng, bound)
        self.opinion_head = None
        if self.memory is not None:
            self.opinion_head = SoftmaxHead(self.store, "head.opinion", corr_dim, 2, rng, bound)

        self.discriminator = None
        if self.mode.adversarial:
            disc_in = self.lstm_u.out_dim if self.mode.high_level_alignment else corr_dim
            self.discriminator = DomainDiscriminator(self.store, disc_in, rng, bound)
        logger.info("Assembled %s tagger with %d parameter arrays", self.mode.value, len(self.store))

    def boundary_scores(self, features: DiffNode) -> DiffNode:
        return self.boundary_head(features)

    def unified_scores(self, h_u: DiffNode) -> DiffNode:
        return self.unified_head(h_u)

    def opinion_scores(self, r_o: DiffNode) -> DiffNode:
        if self.opinion_head is None:
            raise ConfigError(f"mode {self.mode.value} has no opinion head")
        return self.opinion_head(r_o)

    def _represent(self, node: DiffNode, training: bool, rng) -> DiffNode:
        if not self.config.representation_dropout:
            return node
        return ops.dropout(node, self.config.dropout, training, rng)

    def forward_tokens(self, tokens: Sequence[str], training: bool = False,
                       rng: Optional[np.random.Generator] = None, with_domain: bool = True) -> TaggerOutput:
        embedded = self.embeddings(tokens, training, rng)
        h_b = self.lstm_b(embedded)

        state = None
        opinion = None
        if self.memory is not None:
            state = run_dmi(h_b, self.memory, self.config.hops,
                            dropout=lambda node: self._represent(node, training, rng))
            r_a, r_o = state.r_a, state.r_o
            boundary_in = r_a
            u_in = r_a if self.config.lstm_u_input is LstmUInput.CORRELATION else ops.concat([h_b, r_a])
            opinion = self.opinion_scores(r_o)
        else:
            boundary_in = u_in = h_b

        h_u = self._represent(self.lstm_u(u_in), training, rng)
        output = TaggerOutput(
            boundary=self.boundary_scores(boundary_in),
            unified=self.unified_scores(h_u),
            h_b=h_b,
            h_u=h_u,
            opinion=opinion,
            dmi=state,
        )
        if self.discriminator is not None and with_domain:
            feature = h_u if self.mode.high_level_alignment else boundary_in
            output.domain = self.discriminator.domain_scores(feature, self.config.lam)
        return output

    def forward(self, sentence: Sentence, training: bool = False,
                rng: Optional[np.random.Generator] = None, with_domain: bool = True) -> TaggerOutput:
        return self.forward_tokens(sentence.tokens, training, rng, with_domain)

    @staticmethod
    def decode(output: TaggerOutput) -> List[UnifiedTag]:
        """Greedy per-word argmax; ties go to the lowest tag code."""
        return [UnifiedTag.from_code(int(code)) for code in np.argmax(output.unified.value, axis=1)]

    def predict(self, sentence: Union[Sentence, Sequence[str]]) -> List[UnifiedTag]:
        tokens = sentence.tokens if isinstance(sentence, Sentence) else list(sentence)
        return self.decode(self.forward_tokens(tokens, with_domain=False))

    def predict_boundary(self, sentence: Sentence):
        output = self.forward_tokens(sentence.tokens, with_domain=False)
        return [BOUNDARY_TAGS[int(code)] for code in np.argmax(output.boundary.value, axis=1)]


def assemble(mode: Union[ModelMode, str], config: TrainingConfig, vocab: Vocabulary, table: np.ndarray,
             rng: np.random.Generator) -> Tagger:
    try:
        mode = ModelMode(mode)
    except ValueError as exc:
        raise ConfigError(f"unknown model mode {mode!r}") from exc
    return Tagger(config.with_overrides({"mode": mode}), vocab, table, rng)
