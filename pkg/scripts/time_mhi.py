"""Time and memory profile of compute_mhi on a 224x224x64 random video."""

import time
import tracemalloc

import numpy as np

from mhiforge.frames import FrameStream
from mhiforge.mhi import compute_mhi
from mhiforge.rgb_mhi import compute_rgb_mhi

rng = np.random.default_rng(0)
video = rng.integers(0, 256, (64, 224, 224), dtype=np.uint8)
stream = FrameStream.from_arrays(video)

for name, fn in (("mhi", compute_mhi), ("rgb-mhi", compute_rgb_mhi)):
    fn(stream)
    times = []
    for _ in range(20):
        t0 = time.perf_counter()
        fn(stream)
        times.append(time.perf_counter() - t0)
    tracemalloc.start()
    fn(stream)
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    print(f"{name:8s} median {1000 * np.median(times):6.1f} ms  min {1000 * min(times):6.1f} ms  "
          f"peak extra {peak / 1024:.0f} KiB")

frame = 224 * 224
print(f"budget for mhi: 2 frames + accumulator = {(2 * frame + 8 * frame) / 1024:.0f} KiB")
