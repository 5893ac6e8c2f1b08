import numpy as np
import pytest

from turbfree.cli import main
from turbfree.io import read_image, read_stack
from turbfree.reconstruct import mean_image, normalize_display


def test_selfcheck(capsys):
    assert main(["selfcheck"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") == 4


def test_simulate_is_byte_deterministic(tmp_path):
    args = ["simulate", "--seed", "7", "-m", "5", "--set", "scene_size=32"]
    assert main(args + ["--out", str(tmp_path / "a.tfis")]) == 0
    assert main(args + ["--out", str(tmp_path / "b.tfis")]) == 0
    assert (tmp_path / "a.tfis").read_bytes() == (tmp_path / "b.tfis").read_bytes()


def test_simulate_dumps_frames(tmp_path):
    assert main(["simulate", "-m", "3", "--set", "scene_size=24", "--out", str(tmp_path / "s.tfis"),
                 "--dump-frames", str(tmp_path / "frames")]) == 0
    stack = read_stack(tmp_path / "s.tfis")
    dumped = sorted((tmp_path / "frames").iterdir())
    assert [p.name for p in dumped] == ["frame_1.png", "frame_2.png", "frame_3.png"]
    assert read_image(dumped[1]) == stack[1]


def test_simulate_from_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"scene = checker\nscene_size = 16\nm = 4\nstack = {tmp_path / 'c.tfis'}\n")
    assert main(["simulate", "--config", str(cfg)]) == 0
    assert read_stack(tmp_path / "c.tfis").m == 4


@pytest.fixture
def stack_file(tmp_path):
    path = tmp_path / "s.tfis"
    assert main(["simulate", "-m", "6", "--set", "scene_size=32", "--out", str(path)]) == 0
    return path


def test_reconstruct_and_dump_mean(tmp_path, stack_file):
    out, mean = tmp_path / "g.png", tmp_path / "mean.pgm"
    assert main(["reconstruct", str(stack_file), "--mode", "cc", "--out", str(out),
                 "--dump-mean", str(mean), "--raw", str(tmp_path / "g.npy")]) == 0
    stack = read_stack(stack_file)
    assert read_image(mean) == normalize_display(mean_image(stack), 8)
    raw = np.load(tmp_path / "g.npy")
    assert raw.shape == (32, 32, 1) and raw.min() >= 0
    assert read_image(out).shape == (32, 32, 1)


def test_reconstruct_from_frame_directory(tmp_path):
    frames = tmp_path / "frames"
    main(["simulate", "-m", "3", "--set", "scene_size=16", "--out", str(tmp_path / "s.tfis"),
          "--dump-frames", str(frames)])
    assert main(["reconstruct", str(frames), "--out", str(tmp_path / "g.png")]) == 0


def test_reconstruct_cc_on_single_frame_fails(tmp_path, capsys):
    main(["simulate", "-m", "1", "--set", "scene_size=16", "--out", str(tmp_path / "one.tfis")])
    code = main(["reconstruct", str(tmp_path / "one.tfis"), "--mode", "cc",
                 "--out", str(tmp_path / "g.png")])
    assert code == 1
    assert "cross-correlation mode needs at least 2 frames" in capsys.readouterr().err


def test_missing_file_names_path(tmp_path, capsys):
    code = main(["reconstruct", str(tmp_path / "absent.tfis"), "--out", str(tmp_path / "g.png")])
    assert code == 1
    assert "absent.tfis" in capsys.readouterr().err


def test_evaluate(tmp_path, stack_file, capsys):
    g, mean = tmp_path / "g.png", tmp_path / "mean.png"
    main(["reconstruct", str(stack_file), "--out", str(g), "--dump-mean", str(mean)])
    capsys.readouterr()
    assert main(["evaluate", str(g), str(g), "--csv", str(tmp_path / "e.csv")]) == 0
    assert capsys.readouterr().out == "ssim,psnr\n1.000000,99.000000\n"
    assert (tmp_path / "e.csv").read_text() == "ssim,psnr\n1.000000,99.000000\n"
    assert main(["evaluate", str(g), str(mean), "--raw"]) == 0
    ssim_value = float(capsys.readouterr().out.splitlines()[1].split(",")[0])
    assert ssim_value < 1.0


def test_sweep_writes_four_rows(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    assert main(["sweep", "--ms", "1,10,20,30", "--set", "scene_size=32",
                 "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "m,ssim,psnr"
    assert [r.split(",")[0] for r in rows[1:]] == ["1", "10", "20", "30"]
    assert capsys.readouterr().out == out.read_text()


def test_sweep_is_deterministic(tmp_path):
    args = ["sweep", "--ms", "2,4", "--set", "scene_size=24", "--seed", "3"]
    main(args + ["--out", str(tmp_path / "a.csv")])
    main(args + ["--out", str(tmp_path / "b.csv")])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


@pytest.mark.parametrize("argv", [
    [], ["reconstruct"], ["reconstruct", "x", "--out", "y", "--mode", "zz"], ["bogus"],
    ["simulate", "--set", "noequals"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_unknown_config_key_is_data_error(capsys):
    assert main(["simulate", "--set", "bogus=1"]) == 1
    assert "bogus" in capsys.readouterr().err
