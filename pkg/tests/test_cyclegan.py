import struct

import numpy as np
import pytest

from fetalsep import nn
from fetalsep.cyclegan import (
    CycleGanModel,
    DiscriminatorSpec,
    GeneratorSpec,
    LayerSpec,
    Network,
    TrainConfig,
    build_model,
    cycle_loss,
    extract_fecg,
    load_checkpoint,
    save_checkpoint,
    total_objective,
    train,
)
from fetalsep.errors import (
    BadConfigError,
    CorruptFileError,
    EmptyDatasetError,
    VersionMismatchError,
)
from fetalsep.preprocessing import PreprocessConfig, preprocess, slide, stitch
from fetalsep.signals import Signal

SMALL_G = GeneratorSpec(channels=(4, 4, 6), kernels=(5, 5, 5), final_kernel=7, attn_ch=3)
SMALL_D = DiscriminatorSpec(channels=(3, 4), kernel=5)


def small_model(seed=0, lam=4.0):
    return build_model(SMALL_G, SMALL_D, lam=lam, seed=seed, window_len=16)


def identity_network():
    net = Network([LayerSpec("conv1d", out_ch=1, kernel=1)], 1, 16, np.random.default_rng(0))
    net.store["layer0.w"].value[...] = 1.0
    net.store["layer0.b"].value[...] = 0.0
    return net


def random_windows(rng, n, m=16):
    return rng.normal(size=(n, m))


class TestBuildModel:
    def test_same_seed_bit_identical(self):
        a, b = small_model(seed=7), small_model(seed=7)
        for name, net in a.networks().items():
            other = b.networks()[name]
            for pname, p in net.store.items():
                np.testing.assert_array_equal(p.value, other.store[pname].value)

    def test_different_seeds_differ(self):
        a, b = small_model(seed=1), small_model(seed=2)
        assert not np.array_equal(a.g.store.flat_values(), b.g.store.flat_values())

    def test_generator_preserves_shape(self):
        model = build_model(seed=0)  # default 200-sample architecture
        x = np.random.default_rng(0).normal(size=(3, 1, 200))
        for net in (model.g, model.f):
            assert net.forward(x)[0].shape == x.shape

    def test_discriminator_outputs_distributions(self):
        model = build_model(seed=0)
        x = np.random.default_rng(1).normal(size=(4, 1, 200))
        probs = model.d_y.forward(x)[0]
        assert probs.shape == (4, 2)
        np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-12)
        assert np.all(probs >= 0) and np.all(probs <= 1)

    def test_odd_window_rejected(self):
        with pytest.raises(BadConfigError):
            build_model(window_len=201)

    def test_depth_3_drops_first_conv(self):
        specs4 = GeneratorSpec(depth=4).layer_specs()
        specs3 = GeneratorSpec(depth=3).layer_specs()
        assert sum(s.kind == "conv1d" for s in specs4) == 4
        assert sum(s.kind == "conv1d" for s in specs3) == 3


class TestObjectives:
    def test_identity_cycle_loss_is_zero(self):
        g, f = identity_network(), identity_network()
        rng = np.random.default_rng(2)
        x, y = random_windows(rng, 4), random_windows(rng, 4)
        assert cycle_loss(g, f, x, y, "logcosh") == pytest.approx(0.0)

    def test_l1_cycle_with_constant_offset(self):
        g = identity_network()
        f = identity_network()
        f.store["layer0.b"].value[...] = 0.5  # F(G(x)) = x + 0.5
        rng = np.random.default_rng(3)
        x, y = random_windows(rng, 4), random_windows(rng, 4)
        # second term: G(F(y)) = y + 0.5 as well
        assert cycle_loss(g, f, x, y, "l1") == pytest.approx(1.0)

    def test_cycle_matches_manual_recomposition(self):
        model = small_model(seed=3)
        rng = np.random.default_rng(4)
        x, y = random_windows(rng, 5), random_windows(rng, 5)
        value = cycle_loss(model.g, model.f, x, y, "l2")
        fwd = nn.l2_loss(model.f.forward(model.g.forward(x[:, None, :])[0])[0], x[:, None, :])[0]
        bwd = nn.l2_loss(model.g.forward(model.f.forward(y[:, None, :])[0])[0], y[:, None, :])[0]
        assert value == pytest.approx(fwd + bwd, abs=1e-12)

    def test_total_objective_component_sum(self):
        model = small_model(seed=5)
        rng = np.random.default_rng(6)
        x, y = random_windows(rng, 6), random_windows(rng, 6)
        loss_g, loss_dx, loss_dy, parts = total_objective(model, x, y)
        assert loss_g == pytest.approx(
            parts["adv_g"] + parts["adv_f"] + model.lam * parts["cycle"], abs=1e-12
        )
        assert loss_dx > 0 and loss_dy > 0

    def test_lambda_affine(self):
        model = small_model(seed=7)
        rng = np.random.default_rng(8)
        x, y = random_windows(rng, 6), random_windows(rng, 6)
        values = {}
        for lam in (0.0, 1.0, 4.0, 10.0):
            model.lam = lam
            loss_g, _, _, parts = total_objective(model, x, y)
            values[lam] = (loss_g, parts["cycle"], parts["adv_g"] + parts["adv_f"])
        base_adv = values[0.0][0]
        cyc = values[1.0][1]
        for lam, (loss_g, cycle_part, adv) in values.items():
            assert cycle_part == pytest.approx(cyc, abs=1e-12)
            assert loss_g == pytest.approx(base_adv + lam * cyc, abs=1e-9)


class TestTraining:
    def test_one_epoch_mutates_parameters(self):
        model = small_model(seed=9)
        before = model.g.store.flat_values().copy()
        rng = np.random.default_rng(10)
        train(model, random_windows(rng, 8), random_windows(rng, 8), TrainConfig(epochs=1, batch_size=4, seed=0))
        assert np.linalg.norm(model.g.store.flat_values() - before) > 0

    def test_seed_repeat_identical_losses(self):
        rng = np.random.default_rng(11)
        x, y = random_windows(rng, 10), random_windows(rng, 10)
        cfg = TrainConfig(epochs=3, batch_size=4, seed=21)
        _, table1 = train(small_model(seed=12), x, y, cfg)
        _, table2 = train(small_model(seed=12), x, y, cfg)
        assert table1 == table2

    def test_empty_dataset_rejected(self):
        model = small_model()
        with pytest.raises(EmptyDatasetError):
            train(model, np.zeros((0, 16)), np.zeros((4, 16)), TrainConfig(epochs=1))


class TestExtract:
    def test_identity_generator_returns_zscored_windows(self):
        model = build_model(seed=0)
        net = Network([LayerSpec("conv1d", out_ch=1, kernel=1)], 1, 200, np.random.default_rng(0))
        net.store["layer0.w"].value[...] = 1.0
        model.g = net
        rng = np.random.default_rng(13)
        sig = Signal(rng.normal(size=2400).cumsum() * 0.05 + rng.normal(size=2400), 200)
        pp = PreprocessConfig(truncate_s=0.0)
        out = extract_fecg(model, sig, pp)
        ws = slide(preprocess(sig, pp), pp.window_len, stride=pp.window_len)
        expected = stitch(ws, ws.windows)
        np.testing.assert_allclose(out.samples, expected.samples, atol=1e-12)
        assert out.fs == 200
        assert len(out) == ws.offsets[-1] + pp.window_len


class TestCheckpoint:
    def test_round_trip_bit_exact(self, tmp_path):
        model = small_model(seed=14)
        rng = np.random.default_rng(15)
        train(model, random_windows(rng, 8), random_windows(rng, 8), TrainConfig(epochs=1, batch_size=4, seed=3))
        path = tmp_path / "model.ckpt"
        save_checkpoint(model, path)
        loaded = load_checkpoint(path)
        assert loaded.epoch == model.epoch
        for name, net in model.networks().items():
            other = loaded.networks()[name]
            assert other.store.t == net.store.t
            for pname, p in net.store.items():
                q = other.store[pname]
                np.testing.assert_array_equal(p.value, q.value)
                np.testing.assert_array_equal(p.m, q.m)
                np.testing.assert_array_equal(p.v, q.v)
        assert loaded.rng.bit_generator.state == model.rng.bit_generator.state

    def test_truncated_file_rejected(self, tmp_path):
        model = small_model(seed=16)
        path = tmp_path / "model.ckpt"
        save_checkpoint(model, path)
        raw = path.read_bytes()
        path.write_bytes(raw[: len(raw) - 100])
        with pytest.raises(CorruptFileError):
            load_checkpoint(path)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "model.ckpt"
        path.write_bytes(b"NOPE" + b"\x00" * 64)
        with pytest.raises(CorruptFileError):
            load_checkpoint(path)

    def test_version_mismatch(self, tmp_path):
        model = small_model(seed=17)
        path = tmp_path / "model.ckpt"
        save_checkpoint(model, path)
        raw = bytearray(path.read_bytes())
        raw[4:8] = struct.pack("<I", 99)
        path.write_bytes(bytes(raw))
        with pytest.raises(VersionMismatchError):
            load_checkpoint(path)

    def test_resume_matches_uninterrupted(self, tmp_path):
        rng = np.random.default_rng(18)
        x, y = random_windows(rng, 12), random_windows(rng, 12)

        straight = small_model(seed=19)
        _, table_straight = train(straight, x, y, TrainConfig(epochs=2, batch_size=4, seed=5))

        resumed = small_model(seed=19)
        _, table_first = train(resumed, x, y, TrainConfig(epochs=1, batch_size=4, seed=5))
        path = tmp_path / "mid.ckpt"
        save_checkpoint(resumed, path)
        reloaded = load_checkpoint(path)
        _, table_second = train(reloaded, x, y, TrainConfig(epochs=2, batch_size=4, seed=5))

        assert table_first + table_second == table_straight
        for name, net in straight.networks().items():
            np.testing.assert_array_equal(
                net.store.flat_values(), reloaded.networks()[name].store.flat_values()
            )
