"""Model configuration and the named presets used across the project."""

from dataclasses import dataclass, field, asdict


@dataclass
class StageConfig:
    blocks: int
    heads: int
    window: int


@dataclass
class ModelConfig:
    """Shared hyperparameters for encoder, prompt encoder and decoder.

    The encoder downsamples twice per configured stage relative to the
    patch grid: stage i runs at stride patch_size * 2**(i+1), and the FPN
    fuses everything back to the first stage's stride.
    """

    embed_dim: int = 256
    patch_size: int = 4
    encoder_stages: list = field(default_factory=lambda: [
        StageConfig(blocks=2, heads=8, window=8),
        StageConfig(blocks=2, heads=8, window=8),
        StageConfig(blocks=2, heads=8, window=8),
    ])
    fpn_out_dim: int = 256
    decoder_layers: int = 6
    decoder_heads: int = 8
    vocab_size: int = 0            # 0 -> filled from the default vocabulary
    max_decode_len: int = 256
    max_image_long_side_full: int = 1024
    max_image_long_side_cropped: int = 768

    def __post_init__(self):
        if self.vocab_size == 0:
            from .vocab import Vocab
            self.vocab_size = Vocab.default().size
        if self.fpn_out_dim != self.embed_dim:
            raise ValueError(
                f"fpn_out_dim ({self.fpn_out_dim}) must equal embed_dim ({self.embed_dim})")
        if self.embed_dim % 2:
            raise ValueError("embed_dim must be even (sin/cos position pairs)")
        for heads in [s.heads for s in self.encoder_stages] + [self.decoder_heads]:
            if self.embed_dim % heads:
                raise ValueError(f"embed_dim {self.embed_dim} not divisible by head count {heads}")
        for i, dim in enumerate(self.stage_dims):
            if dim % self.encoder_stages[i].heads:
                raise ValueError(
                    f"stage {i} width {dim} not divisible by {self.encoder_stages[i].heads} heads")

    @property
    def stage_dims(self):
        """Channel width per encoder stage; the last equals embed_dim."""
        n = len(self.encoder_stages)
        return [self.embed_dim // 2 ** (n - 1 - i) for i in range(n)]

    @property
    def stem_dim(self):
        """Patch-embedding width (pre-stage feature map)."""
        return max(self.stage_dims[0] // 2, 8)

    @property
    def pad_multiple(self):
        """Images are padded so both extents divide patch_size * 2**(stages-1)."""
        return self.patch_size * 2 ** (len(self.encoder_stages) - 1)

    @property
    def fused_stride(self):
        """Pixels per visual token after FPN fusion (first stage's stride)."""
        return self.patch_size * 2

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["encoder_stages"] = [StageConfig(**s) for s in d["encoder_stages"]]
        return cls(**d)


def preset(name):
    """Named configurations: `default` mirrors the full-size layout,
    `desk` and `tiny` are CPU-friendly shrinks."""
    if name == "default":
        return ModelConfig()
    if name == "desk":
        return ModelConfig(
            embed_dim=128,
            encoder_stages=[StageConfig(2, 4, 4), StageConfig(2, 4, 4)],
            fpn_out_dim=128,
            decoder_layers=2,
            decoder_heads=4,
            max_decode_len=96,
            max_image_long_side_full=256,
            max_image_long_side_cropped=192,
        )
    if name == "tiny":
        return ModelConfig(
            embed_dim=64,
            encoder_stages=[StageConfig(1, 4, 4), StageConfig(1, 4, 4)],
            fpn_out_dim=64,
            decoder_layers=2,
            decoder_heads=4,
            max_decode_len=80,
            max_image_long_side_full=192,
            max_image_long_side_cropped=128,
        )
    raise ValueError(f"unknown preset {name!r} (expected default/desk/tiny)")
