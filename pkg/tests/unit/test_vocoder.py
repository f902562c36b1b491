"""Tests for chunkvc.vocoder (causal shuffle vocoder)."""

import numpy as np
import pytest

from chunkvc.config import preset_config
from chunkvc.exceptions import ShapeError
from chunkvc.kernels import ConvSpec, ConvState
from chunkvc.model_io import init_weights
from chunkvc.vocoder import ConvLayer, ShuffleVocoder, receptive_frames, residual_block
from chunkvc.vocoder.shuffle import upsample_stage
from tests.helpers import tiny_config


def _vocoder(seed=0, **vocoder):
    cfg = tiny_config(vocoder=vocoder) if vocoder else tiny_config()
    return ShuffleVocoder(cfg.vocoder, cfg.mel, init_weights(cfg, seed)), cfg


def _mel(cfg, frames, seed=0):
    return np.random.default_rng(seed).standard_normal((cfg.mel.n_mels, frames)).astype(np.float32)


@pytest.mark.parametrize("frames", range(1, 17))
def test_output_is_hop_samples_per_frame(frames):
    vocoder, cfg = _vocoder()
    samples, _ = vocoder.vocode_chunk(_mel(cfg, frames), vocoder.new_state())
    assert samples.shape == (320 * frames,)
    assert vocoder.samples_per_frame == 320
    assert np.all(np.abs(samples) <= 1.0)


@pytest.mark.parametrize("split", range(0, 9))
def test_chunked_matches_single_shot(split):
    vocoder, cfg = _vocoder(seed=1)
    mel = _mel(cfg, 8, seed=1)
    whole, _ = vocoder.vocode_chunk(mel, vocoder.new_state())
    first, state = vocoder.vocode_chunk(mel[:, :split], vocoder.new_state())
    second, _ = vocoder.vocode_chunk(mel[:, split:], state)
    np.testing.assert_array_equal(np.concatenate([first, second]), whole)


def test_frame_by_frame_matches_batch():
    vocoder, cfg = _vocoder(seed=2)
    mel = _mel(cfg, 8, seed=2)
    whole, _ = vocoder.vocode_chunk(mel, vocoder.new_state())
    state = vocoder.new_state()
    parts = []
    for t in range(8):
        out, state = vocoder.vocode_chunk(mel[:, t : t + 1], state)
        parts.append(out)
    np.testing.assert_array_equal(np.concatenate(parts), whole)


@pytest.mark.parametrize("seed", range(10))
def test_frame_granular_causality(seed):
    vocoder, cfg = _vocoder(seed=seed)
    mel = _mel(cfg, 8, seed=seed)
    base, _ = vocoder.vocode_chunk(mel, vocoder.new_state())
    for t in range(8):
        moved = mel.copy()
        moved[:, t] += 1.0
        out, _ = vocoder.vocode_chunk(moved, vocoder.new_state())
        np.testing.assert_array_equal(out[: t * 320], base[: t * 320])


def test_perturbing_frame_three_keeps_first_960_samples():
    vocoder, cfg = _vocoder(seed=4)
    mel = _mel(cfg, 4, seed=4)
    base, _ = vocoder.vocode_chunk(mel, vocoder.new_state())
    mel[:, 3] *= -2.0
    out, _ = vocoder.vocode_chunk(mel, vocoder.new_state())
    np.testing.assert_array_equal(out[:960], base[:960])


def test_receptive_frames_bounds_influence():
    vocoder, cfg = _vocoder(seed=5)
    rf = vocoder.receptive_frames()
    frames = rf + 4
    mel = _mel(cfg, frames, seed=5)
    base, _ = vocoder.vocode_chunk(mel, vocoder.new_state())
    moved = mel.copy()
    moved[:, 0] += 3.0
    out, _ = vocoder.vocode_chunk(moved, vocoder.new_state())
    np.testing.assert_array_equal(out[rf * 320 :], base[rf * 320 :])


def test_default_receptive_frames():
    cfg = preset_config("full")
    # pre 7 + four stages of rate-scaled branches + post 7
    assert receptive_frames(cfg.vocoder, cfg.mel) == 55


def test_two_stage_factorisation_matches_length():
    vocoder, cfg = _vocoder(seed=6, upsample_factors=[16, 20])
    samples, _ = vocoder.vocode_chunk(_mel(cfg, 3), vocoder.new_state())
    assert samples.shape == (960,)


def test_factor_product_must_equal_hop():
    cfg = tiny_config()
    bad = cfg.vocoder.model_copy(update={"upsample_factors": [8, 8, 2, 2]})
    with pytest.raises(ShapeError):
        ShuffleVocoder(bad, cfg.mel, init_weights(cfg, 0))


def test_channel_mismatch():
    vocoder, _ = _vocoder()
    with pytest.raises(ShapeError):
        vocoder.vocode_chunk(np.zeros((3, 2), np.float32), vocoder.new_state())


def test_zero_stuff_mode_is_causal_and_streams():
    vocoder, cfg = _vocoder(seed=7, upsample_mode="zero_stuff")
    mel = _mel(cfg, 6, seed=7)
    whole, _ = vocoder.vocode_chunk(mel, vocoder.new_state())
    assert whole.shape == (6 * 320,)
    first, state = vocoder.vocode_chunk(mel[:, :2], vocoder.new_state())
    second, _ = vocoder.vocode_chunk(mel[:, 2:], state)
    np.testing.assert_array_equal(np.concatenate([first, second]), whole)
    moved = mel.copy()
    moved[:, 4] += 1.0
    out, _ = vocoder.vocode_chunk(moved, vocoder.new_state())
    np.testing.assert_array_equal(out[: 4 * 320], whole[: 4 * 320])


def test_zero_stuff_weight_shapes():
    cfg = tiny_config(vocoder={"upsample_mode": "zero_stuff"})
    weights = init_weights(cfg, 0)
    assert weights["vocoder.stages.0.upsample.weight"].shape == (4, 4, 3)
    shuffle = init_weights(tiny_config(), 0)
    assert shuffle["vocoder.stages.0.upsample.weight"].shape == (32, 4, 3)


# ---------------------------------------------------------------------------
# Building blocks
# ---------------------------------------------------------------------------


def _layer(name, spec, weight, bias=None):
    bias = np.zeros(spec.out_channels) if bias is None else bias
    return ConvLayer(name=name, spec=spec, weight=weight, bias=bias)


def _branch(rng, channels, kernel, dilations, scale=1.0, tag="b"):
    pairs = []
    for j, d in enumerate(dilations):
        s1, s2 = ConvSpec(channels, channels, kernel, d), ConvSpec(channels, channels, kernel)
        pairs.append(
            (
                _layer(f"{tag}.{j}.conv1", s1, scale * rng.standard_normal(s1.weight_shape)),
                _layer(f"{tag}.{j}.conv2", s2, scale * rng.standard_normal(s2.weight_shape)),
            )
        )
    return pairs


def _states(branches):
    return {
        layer.name: ConvState.zeros(layer.spec)
        for branch in branches
        for pair in branch
        for layer in pair
    }


def test_zero_branch_weights_give_identity():
    rng = np.random.default_rng(0)
    branches = [_branch(rng, 3, 3, [1, 3], scale=0.0)]
    x = rng.standard_normal((3, 10)).astype(np.float32)
    out, _ = residual_block(x, branches, _states(branches), 0.1)
    np.testing.assert_array_equal(out, x)


def test_residual_block_averages_branches():
    rng = np.random.default_rng(1)
    one = _branch(rng, 2, 3, [1], tag="a")
    x = rng.standard_normal((2, 6)).astype(np.float32)
    single, _ = residual_block(x, [one], _states([one]), 0.1)
    doubled, _ = residual_block(x, [one, one], _states([one]), 0.1)
    np.testing.assert_allclose(doubled, single, rtol=1e-6)
    with pytest.raises(ShapeError):
        residual_block(x, [], {}, 0.1)


def test_residual_block_chunked_matches_single_shot():
    rng = np.random.default_rng(2)
    branches = [_branch(rng, 2, 3, [1, 3], tag="a"), _branch(rng, 2, 5, [1, 3], tag="b")]
    x = rng.standard_normal((2, 12)).astype(np.float32)
    whole, _ = residual_block(x, branches, _states(branches), 0.1)
    first, tails = residual_block(x[:, :5], branches, _states(branches), 0.1)
    second, _ = residual_block(x[:, 5:], branches, tails, 0.1)
    np.testing.assert_array_equal(np.concatenate([first, second], axis=1), whole)


def test_upsample_stage_is_permuted_conv_output():
    rng = np.random.default_rng(3)
    spec = ConvSpec(2, 10, 3)
    layer = _layer("up", spec, rng.standard_normal(spec.weight_shape), rng.standard_normal(10))
    x = rng.standard_normal((2, 4)).astype(np.float32)
    states = {"up": ConvState.zeros(spec)}
    out, _ = upsample_stage(x, layer, 5, "shuffle", states)
    conv_out, _ = layer(x, states)
    assert out.shape == (2, 20)
    np.testing.assert_array_equal(np.sort(out, axis=None), np.sort(conv_out, axis=None))


def test_factor_one_stage_is_plain_conv():
    rng = np.random.default_rng(4)
    spec = ConvSpec(3, 3, 3)
    layer = _layer("up", spec, rng.standard_normal(spec.weight_shape))
    x = rng.standard_normal((3, 5)).astype(np.float32)
    states = {"up": ConvState.zeros(spec)}
    out, _ = upsample_stage(x, layer, 1, "shuffle", states)
    conv_out, _ = layer(x, states)
    np.testing.assert_array_equal(out, conv_out)
