"""Shared fixtures: synthetic pair directories and one smoke-trained model."""

import pytest

from pairgen import make_pair_dir


@pytest.fixture
def pair_dir(tmp_path):
    """Eight train pairs and two test pairs, the smoke-test scale."""
    root = tmp_path / "export"
    make_pair_dir(root, n_train=8, n_test=2)
    return root


@pytest.fixture(scope="module")
def smoke_run(tmp_path_factory):
    """One 2-epoch training run on 8 pairs, shared by the tests that score it."""
    from gan_harness.train import TrainSettings, train

    root = tmp_path_factory.mktemp("smoke")
    pair_root = root / "export"
    make_pair_dir(pair_root, n_train=8, n_test=2)
    out_dir = root / "run"
    checkpoint = train(pair_root, TrainSettings(epochs=2, batch_size=2, seed=3), out_dir)
    return pair_root, out_dir, checkpoint
