import numpy as np
import pytest

from ctxfilter.core import validate_posteriors
from ctxfilter.corpus import load_corpus_dir, write_corpus
from ctxfilter.errors import ValidationError
from ctxfilter.scoring import soc_score
from ctxfilter.synth import ScenarioSpec, generate

SMALL = dict(num_utterances=6, utterance_chunks=2, chunk_frames=20, num_phones=12,
             distractor_list_size=50, pronunciation_length_range=(2, 4))


def test_planted_one_hot_scores_one():
    spec = ScenarioSpec(seed=3, peak_prob=1.0, noise_epsilon=0.0, target_words_per_utt=1,
                        frames_per_phone=1, pronunciation_length_range=(2, 2), **{k: v for k, v in SMALL.items()
                                                                                   if k != "pronunciation_length_range"})
    c = generate(spec)
    for u in c.utterances:
        (wid,) = u.ground_truth
        assert soc_score(u.posteriors, c.word_list.by_id(wid).pronunciations[0]) == 1.0


@pytest.mark.parametrize("seed", [0, 42])
def test_plantedness_peak_one(seed):
    c = generate(ScenarioSpec(seed=seed, peak_prob=1.0, noise_epsilon=0.0, **SMALL))
    for u in c.utterances:
        for wid in u.ground_truth:
            assert soc_score(u.posteriors, c.word_list.by_id(wid).pronunciations[0]) == 1.0


def test_no_targets():
    c = generate(ScenarioSpec(target_words_per_utt=0, **SMALL))
    assert all(u.ground_truth == () for u in c.utterances)


def test_validity_and_truth_subset():
    c = generate(ScenarioSpec(seed=9, **SMALL))
    ids = set(c.word_list.word_ids.tolist())
    for u in c.utterances:
        assert validate_posteriors(u.posteriors, "strict")
        assert set(u.ground_truth) <= ids
        assert len(u.ground_truth) == 2
        assert u.posteriors.num_frames == 40


def test_unique_pronunciations():
    c = generate(ScenarioSpec(num_phones=3, distractor_list_size=30, pronunciation_length_range=(2, 3),
                              utterance_chunks=2, chunk_frames=20, num_utterances=2))
    prons = [w.pronunciations[0] for w in c.word_list]
    assert len(set(prons)) == len(prons) == 30


def test_determinism_and_thread_independence():
    a = generate(ScenarioSpec(seed=11, **SMALL))
    b = generate(ScenarioSpec(seed=11, **SMALL), threads=3)
    assert a.word_list.words == b.word_list.words
    for x, y in zip(a.utterances, b.utterances):
        assert x.ground_truth == y.ground_truth
        assert np.array_equal(x.posteriors.frames, y.posteriors.frames)
    c = generate(ScenarioSpec(seed=12, **SMALL))
    assert not np.array_equal(a.utterances[0].posteriors.frames, c.utterances[0].posteriors.frames)


def test_byte_identical_files(tmp_path):
    spec = ScenarioSpec(seed=42, **SMALL)
    write_corpus(generate(spec), tmp_path / "a")
    write_corpus(generate(spec), tmp_path / "b")
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    assert files
    for rel in files:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()


def test_written_corpus_reloads(tmp_path):
    c = generate(ScenarioSpec(seed=5, **SMALL))
    write_corpus(c, tmp_path)
    back = load_corpus_dir(tmp_path)
    assert back.word_list.words == c.word_list.words
    for x, y in zip(c.utterances, back.utterances):
        assert x.utt_id == y.utt_id and x.ground_truth == y.ground_truth
        assert np.array_equal(x.posteriors.frames, y.load().frames)


@pytest.mark.parametrize("kwargs", [
    {"peak_prob": 0.9, "noise_epsilon": 0.2},
    {"peak_prob": 0.0},
    {"noise_epsilon": 1.0},
    {"pronunciation_length_range": (4, 2)},
    {"target_words_per_utt": 8, "utterance_chunks": 1},
    {"num_phones": 2, "pronunciation_length_range": (1, 1), "distractor_list_size": 3},
    {"seed": -1},
])
def test_infeasible_specs(kwargs):
    with pytest.raises(ValidationError):
        ScenarioSpec(**{**SMALL, **kwargs})
