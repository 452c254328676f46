"""Write one synthetic gesture as PGM frames plus a manifest, for trying the CLI.

    python scripts/make_demo_video.py circle-cw demo/
    mhiforge rgb-mhi --input demo/manifest.txt --output demo_rgb.ppm
"""

import sys
from pathlib import Path

import numpy as np

from mhiforge import netpbm
from mhiforge.synthetic import GestureSpec, render_video


def main():
    trajectory = sys.argv[1] if len(sys.argv) > 1 else "circle-cw"
    out = Path(sys.argv[2] if len(sys.argv) > 2 else "demo")
    out.mkdir(parents=True, exist_ok=True)
    spec = GestureSpec(0, trajectory, frame_count=48, frame_size=128, blob_radius=8)
    video = render_video(spec, np.random.default_rng(0))
    names = []
    for t, frame in enumerate(video, start=1):
        name = f"frame_{t:04d}.pgm"
        netpbm.write(out / name, frame)
        names.append(name)
    (out / "manifest.txt").write_text("\n".join(names) + "\nbbox 40 16 48 96\n", encoding="utf-8")
    print(f"wrote {len(names)} frames to {out}")


if __name__ == "__main__":
    main()
