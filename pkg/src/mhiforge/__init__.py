"""Motion history images, motion-based attention and late fusion for gesture video."""

from .attention import (
    NonLocalParams,
    SaliencyMap,
    apply_saliency,
    channel_global_average_pool,
    non_local_block,
    saliency_from_features,
)
from .errors import (
    BoxTooLarge,
    DimensionMismatch,
    EmptyStream,
    FileNotFound,
    IncompleteTrainSet,
    InsufficientFrames,
    InvalidBoundingBox,
    InvalidWeights,
    MhiError,
    NonFiniteInput,
    UnsupportedFormat,
)
from .frames import BoundingBox, Frame, FrameStream, open_directory, open_stream, to_grayscale
from .fusion import FusionWeights, fuse, sweep_fuse
from .mhi import MotionHistoryImage, compute_mhi, quantize_mhi
from .preprocess import AugmentationVariant, augment_set, plan_sampling, resize_bilinear, square_crop
from .rgb_mhi import RgbMhiImage, compute_rgb_mhi, quantize_rgb_mhi, split_thirds

__version__ = "0.1.0"
