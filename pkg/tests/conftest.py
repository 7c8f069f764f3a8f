import numpy as np
import pytest

from data.synth import default_synth_spec, generate
from diffcore.node import precision
from models.corpus import Sentence
from models.tags import DomainLabel, OpinionLabel, UnifiedTag


@pytest.fixture
def float64():
    with precision("float64"):
        yield


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def pizza_sentence():
    return Sentence(
        tokens=["the", "pizza", "is", "great"],
        unified_tags=[UnifiedTag.O, UnifiedTag.S_POS, UnifiedTag.O, UnifiedTag.O],
        opinion_labels=[OpinionLabel.NOT_OPINION, OpinionLabel.NOT_OPINION, OpinionLabel.NOT_OPINION,
                        OpinionLabel.OPINION],
    )


@pytest.fixture
def laptop_sentence():
    return Sentence(
        tokens=["the", "battery", "life", "is", "bad"],
        domain=DomainLabel.TARGET,
        opinion_labels=[OpinionLabel.NOT_OPINION] * 4 + [OpinionLabel.OPINION],
    )


@pytest.fixture
def synth_dir(tmp_path):
    spec = default_synth_spec(seed=7, train_size=24, test_size=8)
    generate(spec, tmp_path / "synth")
    return tmp_path / "synth"
