import gc

import numpy as np
import pytest
from hypothesis import given
from hypothesis.extra.numpy import arrays
from hypothesis import strategies as st

from conftest import random_video, write_frames
from mhiforge import netpbm
from mhiforge.errors import DimensionMismatch, EmptyStream, FileNotFound, UnsupportedFormat
from mhiforge.frames import (
    BoundingBox,
    Frame,
    FrameStream,
    decode_counter,
    luma,
    open_directory,
    open_input,
    open_stream,
    to_grayscale,
)
from mhiforge.mhi import compute_mhi


def _manifest(tmp_path, names, extra=""):
    m = tmp_path / "video.txt"
    m.write_text("\n".join(names) + ("\n" + extra if extra else "") + "\n", encoding="utf-8")
    return m


def test_manifest_of_32_gray_frames(tmp_path, rng):
    paths = write_frames(tmp_path / "v", random_video(rng, 32, 224, 224))
    m = _manifest(tmp_path, [f"v/{p.name}" for p in paths])
    s = open_stream(m)
    assert (s.frame_count, s.width, s.height, s.color_mode) == (32, 224, 224, "gray8")
    assert [f.index for f in s] == list(range(1, 33))


def test_manifest_bbox_line(tmp_path, rng):
    paths = write_frames(tmp_path, random_video(rng, 2, 8, 8))
    m = _manifest(tmp_path, [p.name for p in paths], "bbox 1 2 3 4")
    assert open_stream(m).bbox == BoundingBox(1, 2, 3, 4)


def test_manifest_mixed_dimensions(tmp_path, rng):
    netpbm.write(tmp_path / "a.pgm", random_video(rng, 1, 224, 224)[0])
    netpbm.write(tmp_path / "b.pgm", random_video(rng, 1, 100, 100)[0])
    with pytest.raises(DimensionMismatch):
        open_stream(_manifest(tmp_path, ["a.pgm", "b.pgm"]))


def test_manifest_mixed_color_modes(tmp_path, rng):
    netpbm.write(tmp_path / "a.pgm", random_video(rng, 1, 4, 4)[0])
    netpbm.write(tmp_path / "b.ppm", random_video(rng, 1, 4, 4, color=True)[0])
    with pytest.raises(DimensionMismatch):
        open_stream(_manifest(tmp_path, ["a.pgm", "b.ppm"]))


def test_empty_manifest(tmp_path):
    m = tmp_path / "empty.txt"
    m.write_text("", encoding="utf-8")
    with pytest.raises(EmptyStream):
        open_stream(m)


def test_missing_frame_file(tmp_path):
    with pytest.raises(FileNotFound):
        open_stream(_manifest(tmp_path, ["ghost.pgm"]))


def test_missing_manifest(tmp_path):
    with pytest.raises(FileNotFound):
        open_stream(tmp_path / "ghost.txt")


def test_bad_magic(tmp_path):
    (tmp_path / "x.pgm").write_bytes(b"P3\n1 1\n255\n0 0 0\n")
    with pytest.raises(UnsupportedFormat):
        open_stream(_manifest(tmp_path, ["x.pgm"]))


@pytest.mark.parametrize("names, expected", [
    (["f010.pgm", "f001.pgm", "f002.pgm"], ["f001.pgm", "f002.pgm", "f010.pgm"]),
    (["f2.pgm", "f10.pgm"], ["f10.pgm", "f2.pgm"]),
    (["b.pgm", "B.pgm", "a.pgm"], ["B.pgm", "a.pgm", "b.pgm"]),
])
def test_directory_order_is_bytewise(tmp_path, names, expected):
    for n in names:
        netpbm.write(tmp_path / n, np.zeros((2, 2), np.uint8))
    (tmp_path / "notes.txt").write_text("ignored")
    s = open_directory(tmp_path)
    assert [p.name for p in s.source] == expected


def test_empty_directory(tmp_path):
    with pytest.raises(EmptyStream):
        open_directory(tmp_path)


def test_open_input_dispatch(tmp_path, rng):
    paths = write_frames(tmp_path / "d", random_video(rng, 3, 4, 4))
    assert open_input(tmp_path / "d").frame_count == 3
    m = _manifest(tmp_path, [f"d/{p.name}" for p in paths[:2]])
    assert open_input(m).frame_count == 2


@pytest.mark.parametrize("rgb, y", [((255, 255, 255), 255), ((0, 0, 0), 0), ((255, 0, 0), 76),
                                    ((0, 255, 0), 150), ((0, 0, 255), 29)])
def test_luma_values(rgb, y):
    # 0.587*255 = 149.685 -> 150; 0.114*255 = 29.07 -> 29
    px = np.array([[rgb]], dtype=np.uint8)
    assert to_grayscale(Frame(1, px)).pixels[0, 0] == y


def test_luma_half_up():
    # 0.299*R + 0.587*G + 0.114*B = x.5 exactly when 299R+587G+114B ends in 500
    r, g, b = 0, 0, 0
    hits = 0
    for r in range(0, 256, 5):
        for g in range(0, 256, 5):
            for b in range(0, 256, 5):
                s = 299 * r + 587 * g + 114 * b
                if s % 1000 == 500:
                    hits += 1
                    assert luma(np.array([[[r, g, b]]], np.uint8))[0, 0] == s // 1000 + 1
    assert hits > 0


@given(arrays(np.uint8, st.tuples(st.integers(1, 6), st.integers(1, 6), st.just(3))))
def test_grayscale_idempotent(px):
    once = to_grayscale(Frame(1, px))
    twice = to_grayscale(once)
    assert twice.color_mode == "gray8"
    np.testing.assert_array_equal(once.pixels, twice.pixels)


def test_from_arrays_validation(rng):
    with pytest.raises(EmptyStream):
        FrameStream.from_arrays([])
    with pytest.raises(DimensionMismatch):
        FrameStream.from_arrays([np.zeros((2, 2), np.uint8), np.zeros((3, 2), np.uint8)])


def test_streaming_keeps_at_most_two_frames(tmp_path, rng):
    write_frames(tmp_path, random_video(rng, 40, 16, 16))
    stream = open_directory(tmp_path)
    gc.collect()
    decode_counter.reset()
    base = decode_counter.live
    compute_mhi(stream)
    gc.collect()
    assert decode_counter.peak - base <= 2
    assert decode_counter.live == base


def test_stream_yields_each_frame_once_in_order(tmp_path, rng):
    video = random_video(rng, 5, 3, 3, color=True)
    write_frames(tmp_path, video)
    frames = list(open_directory(tmp_path))
    assert [f.index for f in frames] == [1, 2, 3, 4, 5]
    for f, ref in zip(frames, video):
        np.testing.assert_array_equal(f.pixels, ref)
