import numpy as np
import pytest

from turbfree.errors import CountOutOfRange, EmptyStack, ShapeMismatch
from turbfree.types import Frame, FrameStack, ScalarImage, Scene, frame_to_scalar, validate_stack


def test_valid_stack_of_three_frames():
    frames = tuple(Frame(np.full((2, 2), i, dtype=np.uint8)) for i in range(3))
    assert validate_stack(FrameStack(frames)) is None


def test_shape_mismatch_names_second_frame():
    stack = FrameStack((Frame(np.zeros((2, 2), np.uint8)), Frame(np.zeros((4, 4), np.uint8))))
    with pytest.raises(ShapeMismatch) as info:
        validate_stack(stack)
    assert info.value.frame_index == 2


def test_bit_depth_mismatch_is_a_shape_mismatch():
    stack = FrameStack((Frame(np.zeros((2, 2), np.uint8)), Frame(np.zeros((2, 2), np.uint16), 16)))
    with pytest.raises(ShapeMismatch):
        validate_stack(stack)


def test_empty_stack():
    with pytest.raises(EmptyStack):
        validate_stack(FrameStack(()))


def test_count_out_of_range_reports_frame_and_pixel():
    bad = np.zeros((2, 2), dtype=np.int32)
    bad[1, 0] = 256
    stack = FrameStack((Frame(np.zeros((2, 2), np.uint8)), Frame(bad)))
    with pytest.raises(CountOutOfRange) as info:
        validate_stack(stack)
    assert (info.value.frame_index, info.value.pixel_index) == (2, 2)


def test_negative_count_rejected():
    with pytest.raises(CountOutOfRange):
        validate_stack(FrameStack((Frame(np.array([[-1]])),)))


@pytest.mark.parametrize("counts, expected", [
    ([[7]], [7.0]),
    ([[0, 1], [2, 3]], [0.0, 1.0, 2.0, 3.0]),
    ([[[10, 20, 30]]], [10.0, 20.0, 30.0]),
])
def test_frame_to_scalar_is_identity(counts, expected):
    frame = Frame(np.array(counts, dtype=np.uint8))
    img = frame_to_scalar(frame)
    assert img.shape == frame.shape
    assert img.values.reshape(-1).tolist() == expected


def test_frames_are_immutable():
    frame = Frame(np.zeros((2, 2), np.uint8))
    with pytest.raises(ValueError):
        frame.counts[0, 0, 0] = 1


def test_frame_copies_input():
    a = np.zeros((2, 2), np.uint8)
    frame = Frame(a)
    a[0, 0] = 9
    assert frame.counts[0, 0, 0] == 0


@pytest.mark.parametrize("kwargs", [
    dict(counts=np.zeros((2, 2)), bit_depth=8),          # float counts
    dict(counts=np.zeros((2, 2), np.uint8), bit_depth=12),
    dict(counts=np.zeros((2, 2, 2), np.uint8), bit_depth=8),
    dict(counts=np.zeros((0, 2), np.uint8), bit_depth=8),
])
def test_frame_rejects_bad_structure(kwargs):
    with pytest.raises((TypeError, ValueError)):
        Frame(**kwargs)


def test_scalar_image_rejects_nonfinite():
    with pytest.raises(ValueError):
        ScalarImage(np.array([[np.nan]]))


def test_scene_range():
    Scene(np.array([[0.0, 1.0]]))
    with pytest.raises(ValueError):
        Scene(np.array([[1.5]]))


def test_row_major_channel_interleaved_layout():
    counts = np.arange(12, dtype=np.uint8).reshape(2, 2, 3)
    frame = Frame(counts)
    # pixel (row 0, col 1), channel 2 is flat sample 5
    assert frame.counts.reshape(-1)[5] == counts[0, 1, 2]
