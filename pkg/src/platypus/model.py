"""Full recognition model: image encoder + prompt encoder + text decoder.

The decoder's cross-attention memory is the visual token sequence (with
positional encodings added) followed by the query's prompt tokens. Visual
key/value projections are computed once per image and shared across all
queries on that image.
"""

import numpy as np

from . import rng as R
from . import tensor as T
from .config import ModelConfig
from .decoder import TextDecoder, greedy_decode, teacher_forced_loss, pad_targets
from .encoder import ImageEncoder, pad_to_multiple
from .nn import Module, NEG_INF
from .prompt import PromptEncoder, PositionalEncoder
from .tensor import Tensor
from .vocab import Vocab

MAX_PROMPT_LEN = 7


def _tile_rows(x, n):
    """[L, d] -> [n, L, d] by broadcast (gradients sum back over n)."""
    z = Tensor(np.zeros((n, 1, 1), dtype=np.float32))
    return T.add(T.reshape(x, (1,) + tuple(x.shape)), z)


class PlatypusModel(Module):
    def __init__(self, cfg=None, seed=None):
        self.cfg = cfg or ModelConfig()
        self.seed = R.root_seed(seed)
        init = R.split(self.seed, "init")
        self.pe = PositionalEncoder(self.cfg.embed_dim, R.derive_key(self.seed, "pe"))
        self.encoder = ImageEncoder(init, self.cfg)
        self.prompts = PromptEncoder(init, self.cfg.embed_dim, self.pe)
        self.decoder = TextDecoder(init, self.cfg)
        self.vocab = Vocab.default()

    # -- persistence ---------------------------------------------------

    def state_dict(self):
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state):
        own = dict(self.named_parameters())
        missing = sorted(set(own) - set(state))
        extra = sorted(set(state) - set(own))
        if missing or extra:
            raise ValueError(f"parameter mismatch: missing {missing[:4]}, unexpected {extra[:4]}")
        for name, p in own.items():
            arr = np.asarray(state[name], dtype=p.data.dtype)
            if arr.shape != p.data.shape:
                raise ValueError(f"shape mismatch for {name}: {arr.shape} vs {p.data.shape}")
            p.data = np.ascontiguousarray(arr)
            p.grad = None

    # -- memory assembly -----------------------------------------------

    def _visual_memory(self, tokens, positions):
        """Add coordinate encodings so prompts and pixels share one frame."""
        return T.add(tokens, Tensor(self.pe.encode(positions)))

    def encode_for_decoding(self, image):
        """Encode one [H, W, 3] image -> (per-layer kv, valid, image_size)."""
        img = np.asarray(image, dtype=np.float32)
        vt = self.encoder.encode_image(img)
        mem = self._visual_memory(vt.tokens, vt.positions)
        return self.decoder.memory_kv(mem), vt.valid, (img.shape[1], img.shape[0])

    def _prompt_batch(self, tasks, spatials, image_sizes):
        """Assemble queries into [Q, 7, d] tokens plus a [Q, 7] validity mask."""
        rows, valid = [], np.zeros((len(tasks), MAX_PROMPT_LEN), dtype=bool)
        for i, (task, spatial, size) in enumerate(zip(tasks, spatials, image_sizes)):
            ps = self.prompts.assemble_prompt_sequence(task, spatial, image_size=size)
            k = ps.tokens.shape[0]
            valid[i, :k] = True
            tok = ps.tokens
            if k < MAX_PROMPT_LEN:
                pad = Tensor(np.zeros((MAX_PROMPT_LEN - k, self.cfg.embed_dim), dtype=np.float32))
                tok = T.concat([tok, pad], axis=0)
            rows.append(T.reshape(tok, (1, MAX_PROMPT_LEN, -1)))
        return T.concat(rows, axis=0), valid

    @staticmethod
    def _memory_mask(vis_valid, prompt_valid):
        """Additive [Q, 1, 1, L+K] mask from the two validity maps."""
        full = np.concatenate([vis_valid, prompt_valid], axis=1)
        return Tensor(np.where(full, 0.0, NEG_INF).astype(np.float32)[:, None, None, :])

    def _query_forward(self, visual_kv, vis_valid, prompt_tokens, prompt_valid, prefix):
        q = prompt_tokens.shape[0]
        if vis_valid.ndim == 1:
            kv = [(_tile_rows(k, q), _tile_rows(v, q)) for k, v in visual_kv]
            vis_valid = np.broadcast_to(vis_valid, (q, vis_valid.shape[0]))
        else:
            kv = visual_kv
        mask = self._memory_mask(vis_valid, prompt_valid)
        return self.decoder.forward(prefix, kv, mask, prompt_tokens=prompt_tokens,
                                    prompt_mask=None)

    # -- training ------------------------------------------------------

    def query_losses(self, image, queries):
        """Per-scenario teacher-forced losses for one full image.

        Returns {scenario: (mean-CE Tensor, position count)} with one
        batched decoder pass over all queries.
        """
        order = {"RAT": 0, "PPR": 1, "BPR": 2}
        queries = sorted(queries, key=lambda qr: order[qr.task.scenario])
        visual_kv, vis_valid, size = self.encode_for_decoding(image)
        tasks = [qr.task for qr in queries]
        spatials = [qr.spatial for qr in queries]
        prompt_tokens, prompt_valid = self._prompt_batch(tasks, spatials, [size] * len(queries))
        targets = pad_targets([qr.target_ids for qr in queries])
        logits = self._query_forward(visual_kv, vis_valid, prompt_tokens, prompt_valid,
                                     targets[:, :-1])
        out = {}
        start = 0
        for scenario in ("RAT", "PPR", "BPR"):
            stop = start + sum(1 for qr in queries if qr.task.scenario == scenario)
            if stop > start:
                part = T.slice_(logits, (slice(start, stop),))
                loss, n = teacher_forced_loss(part, targets[start:stop], counts=True)
                out[scenario] = (loss, n)
            start = stop
        return out

    def cropped_batch_loss(self, images, sizes, tasks, spatials, target_ids):
        """RAT-c loss over a padded batch of cropped images."""
        batch = pad_to_multiple(np.stack(images), self.cfg.pad_multiple)
        tokens, positions, valid, _ = self.encoder.encode_batch(batch, sizes)
        mem = T.add(tokens, Tensor(self.pe.encode(positions)))
        visual_kv = self.decoder.memory_kv(mem)
        prompt_tokens, prompt_valid = self._prompt_batch(tasks, spatials, sizes)
        targets = pad_targets(target_ids)
        logits = self._query_forward(visual_kv, valid, prompt_tokens, prompt_valid,
                                     targets[:, :-1])
        return teacher_forced_loss(logits, targets, counts=True)

    # -- inference -----------------------------------------------------

    def recognize_ids(self, image, tasks, spatials, max_len=None):
        """Greedy-decode a batch of queries against one image."""
        max_len = max_len or self.cfg.max_decode_len - 1
        with T.no_grad():
            visual_kv, vis_valid, size = self.encode_for_decoding(image)
            prompt_tokens, prompt_valid = self._prompt_batch(
                tasks, spatials, [size] * len(tasks))

            def step(prefix):
                return self._query_forward(visual_kv, vis_valid, prompt_tokens,
                                           prompt_valid, prefix)

            return greedy_decode(step, max_len, batch=len(tasks))

    def recognize_text(self, image, task, spatial=None, joiner=None):
        """Single-query convenience: decode and detokenize."""
        ids = self.recognize_ids(image, [task], [spatial])[0]
        if joiner is None:
            joiner = " " if task.granularity == "word" else "\n"
        return self.vocab.detokenize(ids, sep_joiner=joiner), ids

    def parameter_count(self):
        return int(sum(p.data.size for _, p in self.named_parameters()))
