import json

import pytest

from diffstr.cli import main

TINY = {
    "profile": "toy",
    "vision": {"d_enc": 16, "n_enc_layers": 1, "n_enc_heads": 2},
    "decoder": {"d": 16, "n_layers": 1, "n_heads": 2},
    "train": {"epochs": 2, "warmup_epochs": 1, "batch_size": 4},
    "eval": {"seeds": [1]},
}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def tree(d):
    return {p.relative_to(d).as_posix(): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    cfg = root / "tiny.json"
    cfg.write_text(json.dumps(TINY))
    assert main(["render-data", "--out", str(root / "data"), "--n", "8", "--seed", "7"]) == 0
    assert main(["train", "--config", str(cfg), "--data", str(root / "data"),
                 "--out", str(root / "run")]) == 0
    return root


def test_render_data_deterministic(tmp_path, capsys):
    for name in ("a", "b"):
        code, out, _ = run(capsys, "render-data", "--out", tmp_path / name, "--n", 4, "--seed", 7)
        assert code == 0 and out.strip() == str(tmp_path / name)
    a, b = tree(tmp_path / "a"), tree(tmp_path / "b")
    assert a == b and len(a) == 6


def test_render_data_empty(tmp_path, capsys):
    code, _, _ = run(capsys, "render-data", "--out", tmp_path / "e", "--n", 0, "--seed", 1)
    assert code == 0
    assert (tmp_path / "e" / "labels.tsv").read_text() == ""


def test_render_data_unwritable(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, out, err = run(capsys, "render-data", "--out", blocker / "sub", "--n", 2)
    assert code != 0 and out == "" and "render-data" in err


def test_render_data_seed_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("DIFFSTR_SEED", "7")
    run(capsys, "render-data", "--out", tmp_path / "env", "--n", 2)
    run(capsys, "render-data", "--out", tmp_path / "flag", "--n", 2, "--seed", 7)
    assert tree(tmp_path / "env") == tree(tmp_path / "flag")


def test_train_missing_config(tmp_path, capsys):
    code, _, err = run(capsys, "train", "--config", tmp_path / "nope.json", "--data", tmp_path,
                       "--out", tmp_path / "o")
    assert code != 0 and str(tmp_path / "nope.json") in err


def test_train_resume_unsupported(tmp_path, capsys):
    code, _, err = run(capsys, "train", "--data", tmp_path, "--out", tmp_path / "o", "--resume")
    assert code != 0 and "unsupported" in err


def test_train_outputs(trained):
    run_dir = trained / "run"
    for name in ("config.resolved.json", "metrics.jsonl", "best.ckpt", "final.ckpt", "train_eval.json"):
        assert (run_dir / name).is_file()
    assert not (run_dir / ".lock").exists()
    resolved = json.loads((run_dir / "config.resolved.json").read_text())
    assert resolved["decoder"]["d"] == 16 and resolved["diffusion"]["T"] == 20
    lines = (run_dir / "metrics.jsonl").read_text().splitlines()
    assert len(lines) == 2 * 2 and {"loss", "lr", "step"} <= set(json.loads(lines[0]))


def test_locked_output_refused(trained, tmp_path, capsys):
    out = tmp_path / "locked"
    out.mkdir()
    (out / ".lock").write_text("123")
    code, _, err = run(capsys, "evaluate", "--checkpoint", trained / "run" / "final.ckpt",
                       "--data", trained / "data", "--out", out)
    assert code != 0 and "locked" in err


def test_recognize_trace(trained, capsys):
    args = ("recognize", "--checkpoint", trained / "run" / "final.ckpt",
            "--image", trained / "data" / "000000.png", "--seed", 3, "--trace")
    code, out, _ = run(capsys, *args)
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 20 + 1
    masks = [line.split("\t", 1)[1].count("␣") for line in lines[:-1]]
    assert all(a >= b for a, b in zip(masks, masks[1:]))
    assert lines[-2].startswith("t=0")
    assert run(capsys, *args)[1] == out


def test_recognize_unreadable(trained, tmp_path, capsys):
    bad = tmp_path / "bad.png"
    bad.write_text("not an image")
    code, _, err = run(capsys, "recognize", "--checkpoint", trained / "run" / "final.ckpt", "--image", bad)
    assert code != 0 and "bad.png" in err
    code, _, _ = run(capsys, "recognize", "--checkpoint", tmp_path / "none.ckpt", "--image", bad)
    assert code != 0


def test_evaluate_four_seeds(trained, tmp_path, capsys):
    code, out, _ = run(capsys, "evaluate", "--checkpoint", trained / "run" / "final.ckpt",
                       "--data", trained / "data", "--out", tmp_path / "ev", "--seeds", "1,2,3,4")
    assert code == 0
    report = json.loads((tmp_path / "ev" / "report.json").read_text())
    assert report["seeds"] == [1, 2, 3, 4] and len(report["runs"]) == 4
    rows = out.splitlines()
    assert [r.split("\t")[0] for r in rows] == ["seed 1", "seed 2", "seed 3", "seed 4", "mean"]


def test_evaluate_empty(trained, tmp_path, capsys):
    run(capsys, "render-data", "--out", tmp_path / "empty", "--n", 0)
    code, _, err = run(capsys, "evaluate", "--checkpoint", trained / "run" / "final.ckpt",
                       "--data", tmp_path / "empty", "--out", tmp_path / "ev")
    assert code != 0 and "empty dataset" in err


def test_ablate_steps_arity(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({**TINY, "data": {"n_train": 8, "n_val": 4, "render": {"max_len": 4}}, "vocab": {"max_label_len": 4},
                               "train": {**TINY["train"], "epochs": 2}}))
    code, out, _ = run(capsys, "ablate-steps", "--config", cfg, "--out", tmp_path / "ab", "--T", "2,3,4")
    assert code == 0
    assert len(out.splitlines()) == 1 + 3
    assert sorted(p.name for p in (tmp_path / "ab").glob("T*.json")) == ["T2.json", "T3.json", "T4.json"]
    code, _, err = run(capsys, "ablate-steps", "--config", cfg, "--out", tmp_path / "ab2", "--T", "2,0")
    assert code != 0


def test_set_override_unknown_key(tmp_path, capsys):
    code, _, err = run(capsys, "ablate-head", "--out", tmp_path / "x", "--set", "train.nope=1")
    assert code != 0 and "train.nope" in err
