# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The eegssl Authors

import json

import numpy as np
import pytest

import eegssl


def test_layout_and_distance_graph():
    names, positions = eegssl.standard_layout()
    assert len(names) == 19
    assert positions.shape == (19, 3)
    w = eegssl.distance_graph(positions)
    assert w.shape == (19, 19)
    np.testing.assert_array_equal(w, w.T)


def test_featurize_shape_and_log_floor():
    window = np.zeros((19, 200))
    f = eegssl.featurize(window, 4)
    assert f.shape == (4, 19, 25)
    assert np.all(f == np.log(1e-8))
    with pytest.raises(ValueError):
        eegssl.featurize(np.zeros((19, 201)), 4)


def test_correlation_graph_and_transitions():
    rng = np.random.default_rng(0)
    w = eegssl.correlation_graph(rng.normal(size=(6, 100)), 2)
    assert np.all(np.count_nonzero(w, axis=1) <= 2)
    assert np.all(np.diag(w) == 0)
    out, inn = eegssl.transitions(w)
    sums = out.sum(axis=1)
    assert np.allclose(sums[sums != 0], 1.0, atol=1e-12)
    assert inn.shape == (6, 6)


def test_corrupt_all_strategies():
    rng = np.random.default_rng(1)
    window = rng.normal(size=(19, 200))
    for name in eegssl.strategies():
        out = eegssl.corrupt(window, name, seed=3)
        assert out.shape == window.shape
        np.testing.assert_array_equal(out, eegssl.corrupt(window, name, seed=3))
    removed = eegssl.corrupt(window, "remove_channel", channel=4)
    assert np.all(removed[4] == 0)
    np.testing.assert_array_equal(np.delete(removed, 4, axis=0), np.delete(window, 4, axis=0))
    with pytest.raises(ValueError, match="jitter_window"):
        eegssl.corrupt(window, "shuffle")


def test_auroc_with_ties():
    assert eegssl.auroc([0.1, 0.4, 0.4, 0.8], [0, 0, 1, 1]) == pytest.approx(0.875)
    with pytest.raises(ValueError):
        eegssl.auroc([0.1, 0.2], [1, 1])


def test_synth_corpus():
    corpus = eegssl.synth_corpus(n_subjects=2, windows_per_subject=3, seed=5)
    assert [r["subject_id"] for r in corpus] == ["subj000", "subj001"]
    assert corpus[0]["samples"].shape == (19, 600)
    assert len(corpus[0]["labels"]) == 600


def test_run_arm_small():
    cfg = eegssl.default_config()
    cfg.update(pretrain_epochs=1, finetune_epochs=2, batch_size=16)
    cfg["model"].update(num_layers=1, hidden_dim=4)
    report = eegssl.run_arm(cfg, pretrain=True, n_subjects=5, windows_per_subject=6)
    assert 0.0 <= report["auroc"] <= 1.0
    assert len(report["pretrain_loss"]) == 1
    assert report["epochs"] >= 1


def test_cli_exit_codes(tmp_path):
    code, out, err = eegssl.cli(["synth-data", "--subjects", "3", "--windows-per-subject", "2",
                                 "--out", str(tmp_path / "c")])
    assert code == 0
    assert json.loads(out)["subjects"] == 3
    code, out, err = eegssl.cli(["synth-data", "--subjects", "0"])
    assert code == 2
    assert out == ""
    assert "subjects" in err
