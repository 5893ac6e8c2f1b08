import numpy as np
import pytest

from turbfree.errors import BadDimensions
from turbfree.metrics import normalize_unit, ssim
from turbfree.reconstruct import PairingMode, mean_image, reconstruct_g2
from turbfree.rng import Stage, derive_seed, substream
from turbfree.scenes import builtin_scene, checker, letter
from turbfree.sim import (Distortion, IlluminationModel, Placement, SensorModel, SimModel,
                          TurbulenceModel, apply_turbulence, distort, draw_distortion,
                          gen_illumination, render_frame, render_reference, render_stack,
                          sense, speckle_cells, translate)
from turbfree.types import ScalarImage, Scene


def test_substreams_are_reproducible_and_distinct():
    a = substream(42, 3, Stage.SENSOR).random(4)
    assert np.array_equal(a, substream(42, 3, Stage.SENSOR).random(4))
    assert not np.array_equal(a, substream(42, 4, Stage.SENSOR).random(4))
    assert not np.array_equal(a, substream(42, 3, Stage.ILLUMINATION).random(4))
    assert not np.array_equal(a, substream(43, 3, Stage.SENSOR).random(4))


def test_substream_accepts_full_64bit_seeds():
    substream(2 ** 64 - 1, 0, Stage.SENSOR)
    assert 0 <= derive_seed(-1, 5) < 2 ** 64


# -- illumination --------------------------------------------------------------------

def test_constant_illumination():
    img = gen_illumination(IlluminationModel(37.5, 4, False), (5, 6), 0, 1)
    assert np.all(img.values == 37.5)


def test_speckle_mean_within_three_standard_errors():
    model = IlluminationModel(200.0, 4, True)
    means = np.array([gen_illumination(model, (64, 64), a, 11).values.mean() for a in range(200)])
    se = means.std(ddof=1) / np.sqrt(means.size)
    assert abs(means.mean() - 200.0) < 3 * se


def test_speckle_cells_have_unit_contrast():
    model = IlluminationModel(50.0, 4, True)
    cells = np.concatenate([speckle_cells(model, (64, 64), substream(5, a, Stage.ILLUMINATION))
                            .ravel() for a in range(100)])
    assert cells.var() / cells.mean() ** 2 == pytest.approx(1.0, abs=0.1)


def test_speckle_is_correlated_over_a_cell():
    model = IlluminationModel(100.0, 8, True)
    v = gen_illumination(model, (64, 64), 0, 3).values[:, :, 0]
    assert np.all(v >= 0)
    # node values are reproduced exactly on the cell lattice
    cells = speckle_cells(model, (64, 64), substream(3, 0, Stage.ILLUMINATION))
    np.testing.assert_array_equal(v[::8, ::8], cells[:8, :8])


# -- turbulence -----------------------------------------------------------------------

def test_zero_turbulence_is_identity():
    img = ScalarImage(np.random.default_rng(0).random((16, 16)))
    out = apply_turbulence(img, TurbulenceModel.off(), 0, 123)
    assert out == img


def test_turbulence_model_validation():
    with pytest.raises(ValueError):
        TurbulenceModel(-1.0)
    with pytest.raises(ValueError):
        TurbulenceModel(1.0, (2.0, 1.0))


def bilinear_oracle(a, dx, dy):
    """Per-pixel sampling of a(y - dy, x - dx) with zero outside."""
    h, w = a.shape
    out = np.zeros_like(a)

    def at(y, x):
        return a[y, x] if 0 <= y < h and 0 <= x < w else 0.0

    for y in range(h):
        for x in range(w):
            sy, sx = y - dy, x - dx
            y0, x0 = int(np.floor(sy)), int(np.floor(sx))
            fy, fx = sy - y0, sx - x0
            out[y, x] = ((1 - fy) * (1 - fx) * at(y0, x0) + (1 - fy) * fx * at(y0, x0 + 1)
                         + fy * (1 - fx) * at(y0 + 1, x0) + fy * fx * at(y0 + 1, x0 + 1))
    return out


def test_jitter_matches_shifted_index_oracle():
    scene = np.pad(checker(16, 4), 6)
    model = TurbulenceModel(2.0, (0.0, 0.0), 0.0)
    rng = substream(9, 0, Stage.TURBULENCE_POST)
    d = draw_distortion(model, substream(9, 0, Stage.TURBULENCE_POST))
    out = apply_turbulence(ScalarImage(scene), model, 0, rng).values[:, :, 0]
    np.testing.assert_allclose(out, bilinear_oracle(scene, d.dx, d.dy), atol=1e-12)
    assert out.sum() == pytest.approx(scene.sum(), rel=1e-12)


def test_integer_translation_is_exact():
    a = np.arange(25.0).reshape(5, 5, 1)
    out = translate(a, 1.0, -2.0)
    assert out[0, 1, 0] == a[2, 0, 0]
    assert out[0, 0, 0] == 0.0 and out[4, 4, 0] == 0.0


def test_gain_only_scales():
    model = TurbulenceModel(0.0, (0.0, 0.0), 0.3)
    img = ScalarImage(np.random.default_rng(1).random((8, 8)))
    d = draw_distortion(model, substream(2, 5, Stage.TURBULENCE_POST))
    out = apply_turbulence(img, model, 5, 2)
    assert d.gain != 1.0
    np.testing.assert_array_equal(out.values, d.gain * img.values)


def test_gain_is_never_negative():
    out = distort(np.ones((3, 3, 1)), Distortion(0.0, 0.0, 0.0, 0.0))
    assert np.all(out == 0.0)


def test_blur_preserves_mass_in_the_interior():
    a = np.zeros((41, 41, 1))
    a[20, 20, 0] = 1.0
    out = distort(a, Distortion(0.0, 0.0, 2.0, 1.0))
    assert out.sum() == pytest.approx(1.0, rel=1e-9)
    assert out[20, 20, 0] < 1.0


# -- sensor --------------------------------------------------------------------------

def test_noiseless_sensor_reproduces_integer_expectation():
    expected = np.random.default_rng(3).integers(0, 256, (6, 6)).astype(float)
    frame = sense(ScalarImage(expected), SensorModel(1.0, False, 0.0, 8), substream(0, 0, 3))
    assert np.array_equal(frame.counts[:, :, 0], expected)


def test_poisson_mean():
    frame = sense(ScalarImage(np.full((64, 64), 100.0)), SensorModel(1.0, True, 0.0, 16),
                  substream(1, 0, Stage.SENSOR))
    assert 97 <= frame.counts.mean() <= 103


def test_clamp_to_dynamic_range():
    frame = sense(ScalarImage(np.full((2, 2), 1e6)), SensorModel(1.0, True, 5.0, 8),
                  substream(1, 0, Stage.SENSOR))
    assert np.all(frame.counts == 255)


def test_quantum_efficiency_and_read_noise():
    rng = substream(4, 0, Stage.SENSOR)
    frame = sense(ScalarImage(np.full((128, 128), 1000.0)), SensorModel(0.5, False, 3.0, 16), rng)
    c = frame.counts.astype(float)
    assert c.mean() == pytest.approx(500.0, abs=0.2)
    assert c.std() == pytest.approx(3.0, rel=0.1)


def test_sensor_validation():
    with pytest.raises(ValueError):
        SensorModel(0.0)
    with pytest.raises(ValueError):
        SensorModel(1.0, True, 0.0, 12)


# -- stack rendering ------------------------------------------------------------------

def test_all_off_renders_quantized_scene():
    scene = Scene(letter(32) * 0.7 + 0.1)
    stack = render_stack(scene, SimModel.all_off(100.0), 4)
    expected = np.rint(scene.reflectance * 100.0)
    for frame in stack:
        assert np.array_equal(frame.counts, expected)
    g = reconstruct_g2(stack, PairingMode.AC).values
    assert np.array_equal(g, 2.0 * expected ** 2)


def test_energy_sanity():
    scene = builtin_scene("checker", 32)
    model = SimModel.all_off(150.0)
    frame = render_stack(scene, model, 1)[0]
    total = (scene.reflectance * 150.0).sum()
    assert abs(int(frame.counts.sum()) - total) <= frame.counts.size * 0.5


def test_same_seed_same_stack():
    scene = builtin_scene("letter", 32)
    a = render_stack(scene, SimModel(seed=99), 6)
    assert a == render_stack(scene, SimModel(seed=99), 6)
    assert a != render_stack(scene, SimModel(seed=100), 6)


@pytest.mark.parametrize("threads", [1, 3, 8])
def test_render_is_thread_independent(threads):
    scene = builtin_scene("letter", 32)
    base = render_stack(scene, SimModel(seed=5), 9, threads=1)
    assert render_stack(scene, SimModel(seed=5), 9, threads=threads) == base


def test_frames_do_not_depend_on_generation_order():
    scene = builtin_scene("letter", 32)
    model = SimModel(seed=8)
    stack = render_stack(scene, model, 6)
    assert render_frame(scene, model, 4) == stack[4]
    assert render_stack(scene, model, 3).frames == stack.frames[:3]


def test_frames_differ_under_turbulence():
    stack = render_stack(builtin_scene("letter", 32), SimModel(seed=1), 3)
    assert stack[0] != stack[1]


@pytest.mark.parametrize("placement", list(Placement))
def test_placements_render(placement):
    scene = builtin_scene("letter-rgb", 32)
    stack = render_stack(scene, SimModel(seed=2, placement=placement), 2)
    assert stack.shape == (32, 32, 3)


def test_pre_object_turbulence_keeps_object_edges():
    # turbulence only on the illumination path cannot move the object itself
    scene = builtin_scene("letter", 32)
    model = SimModel(IlluminationModel(100.0, 1, False), sensor=SensorModel(1.0, False),
                     placement=Placement.PRE, seed=3)
    for frame in render_stack(scene, model, 4):
        lit = frame.counts[:, :, 0] > 0
        assert not np.any(lit & (scene.reflectance[:, :, 0] == 0))


def test_bad_dimensions():
    with pytest.raises(BadDimensions):
        render_stack(builtin_scene("letter", 32), SimModel(frame_shape=(16, 16)), 2)
    with pytest.raises(ValueError):
        render_stack(builtin_scene("letter", 32), SimModel(), 0)


def test_turbulence_blurs_the_mean_frame():
    scene = builtin_scene("letter", 64)
    model = SimModel(IlluminationModel(200.0, 4, True), TurbulenceModel(2.0, (0.5, 2.5)),
                     SensorModel(1.0, True, 0.0, 16), seed=21)
    ref = normalize_unit(render_reference(scene, model).counts.astype(float))
    mean_score = ssim(normalize_unit(mean_image(render_stack(scene, model, 100))), ref)
    still = SimModel(model.illumination, TurbulenceModel.off(), model.sensor, seed=21)
    single = [ssim(normalize_unit(f.counts.astype(float)), ref)
              for f in render_stack(scene, still, 5)]
    assert mean_score < min(single)
