"""Network architecture configuration models."""

from enum import Enum
from typing import Literal

from pydantic import BaseModel, Field


class ModelKind(str, Enum):
    """Classifier architecture."""

    CNN = "cnn"
    CNN_BLSTM = "cnn-blstm"


# Two valid 3x3 conv + 2x2 pool stages need at least this many time columns.
MIN_VALID_WIDTH = 8


class CnnConfig(BaseModel):
    """Convolutional feature extractor and classifier head."""

    model_config = {"frozen": True}

    in_channels: int = Field(default=4, ge=1, le=8)
    freq_bins: int = Field(default=129, ge=8)
    input_width: int = Field(default=65, ge=1)
    conv1_filters: int = Field(default=32, ge=1)
    conv2_filters: int = Field(default=64, ge=1)
    kernel_size: Literal[3] = 3
    pool_size: Literal[2] = 2
    fc_hidden: int = Field(default=128, ge=1)
    n_classes: int = Field(default=2, ge=2)

    @property
    def time_padding(self) -> int:
        """Zero columns added on each side of the time axis before each conv."""
        return 0 if self.input_width >= MIN_VALID_WIDTH else 1

    def shape_trace(self) -> list[tuple[str, tuple[int, ...]]]:
        """Layer-by-layer output shapes for one input sample."""
        pad = self.time_padding
        h, w = self.freq_bins, self.input_width
        trace: list[tuple[str, tuple[int, ...]]] = [("input", (self.in_channels, h, w))]

        h, w = h - 2, w + 2 * pad - 2
        trace.append(("conv1", (self.conv1_filters, h, w)))
        h, w = h // 2, (w // 2 if w >= 2 else w)
        trace.append(("pool1", (self.conv1_filters, h, w)))

        h, w = h - 2, w + 2 * pad - 2
        trace.append(("conv2", (self.conv2_filters, h, w)))
        h, w = h // 2, (w // 2 if w >= 2 else w)
        trace.append(("pool2", (self.conv2_filters, h, w)))

        trace.append(("flatten", (self.conv2_filters * h * w,)))
        trace.append(("fc1", (self.fc_hidden,)))
        trace.append(("fc2", (self.n_classes,)))
        return trace

    @property
    def feature_dim(self) -> int:
        """Length of the flattened feature vector."""
        return self.shape_trace()[5][1][0]

    def pool_time(self) -> tuple[bool, bool]:
        """Whether each pooling stage halves the time axis."""
        trace = self.shape_trace()
        return trace[1][1][2] >= 2, trace[3][1][2] >= 2


class BlstmConfig(BaseModel):
    """Bidirectional LSTM stack on top of per-frame CNN features."""

    model_config = {"frozen": True}

    layers: int = Field(default=3, ge=1)
    hidden_per_direction: int = Field(default=64, ge=1)

    @property
    def output_dim(self) -> int:
        return 2 * self.hidden_per_direction


class NetworkSpec(BaseModel):
    """Everything needed to rebuild a network."""

    kind: ModelKind = ModelKind.CNN
    cnn: CnnConfig = Field(default_factory=CnnConfig)
    blstm: BlstmConfig | None = None
    seed: int = 0
    dtype: Literal["float32", "float64"] = "float32"
