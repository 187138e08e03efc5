import numpy as np
import pytest

torch = pytest.importorskip("torch")

from linegom.board import Board
from linegom.evaluator import Evaluator
from linegom.formats import load_weights, write_weights
from linegom.heads import HeadWeights
from linegom.mapping import MAPPING_TENSOR_NAMES, MappingWeights, NetConfig
from linegom.reference import reference_evaluate
from linegom.mapping import bake_codebook
from linegom.trainer import TrainNet, board_planes, toy_dataset, total_loss, train
from linegom.trainer.model import star_block
from linegom.trainer.train import Batch, toy_board, toy_sample


@pytest.fixture(scope="module")
def trained():
    net = TrainNet.seeded(NetConfig.test(), seed=0, scale=0.7)
    data = toy_dataset(2000, seed=1)
    losses = train(net, data, steps=120, seed=2)
    return net, losses


def random_game(rng, plies, size=15):
    b = Board(size, size)
    for _ in range(plies):
        moves = b.legal_moves(near_only=True)
        b.place_move(*moves[int(rng.integers(len(moves)))])
        if b.outcome.name != "ONGOING":
            b.undo_move()
            break
    return b


def net_outputs(net, board):
    planes = torch.from_numpy(board_planes(board)).to(net.dw_w.dtype)[None]
    legal = torch.from_numpy((board.cells == 0).reshape(1, board.h, board.w))
    with torch.no_grad():
        logp, logits = net(planes, legal)
    policy = logp.exp().numpy()[0]
    policy[~legal.numpy()[0]] = 0.0
    return policy, torch.softmax(logits, dim=1).numpy()[0]


class TestParity:
    def test_matches_float_reference(self, mapping_weights, head_weights):
        net = TrainNet.from_weights(mapping_weights, head_weights).double().eval()
        rng = np.random.default_rng(7)
        for plies in (0, 5, 18):
            b = random_game(rng, plies)
            ref = reference_evaluate(b, mapping_weights, head_weights)
            policy, value = net_outputs(net, b)
            assert np.abs(policy - ref.policy).max() < 1e-4
            assert np.abs(value - np.array(ref.value)).max() < 1e-4

    def test_trained_policy_argmax_matches_engine(self, trained):
        # export the trained net and run it through the integer pipeline; a
        # peaked policy must survive codebook and head quantization
        net, _ = trained
        mapping, heads = net.to_weights()
        codebook = bake_codebook(mapping)
        rng = np.random.default_rng(11)
        agree = 0
        for _ in range(50):
            b, _ = toy_board(rng)
            quant = Evaluator(b, codebook, heads).evaluate(b)
            policy, _ = net_outputs(net, b)
            agree += int(np.argmax(policy) == np.argmax(quant.policy))
        assert agree >= 45


class TestGradients:
    def test_star_block_gradcheck(self):
        cfg = NetConfig.test()
        net = TrainNet.seeded(cfg, seed=1, scale=0.7).double()
        x = torch.randn(3, cfg.c, dtype=torch.double, requires_grad=True)
        assert torch.autograd.gradcheck(
            lambda t: star_block(t, net, "sb1"), (x,), atol=1e-4)

    def test_dynamic_policy_gradcheck(self):
        cfg = NetConfig.test()
        net = TrainNet.seeded(cfg, seed=2, scale=0.7).double()
        fp = torch.randn(2, cfg.c, 5, 5, dtype=torch.double, requires_grad=True)
        legal = torch.ones(2, 5, 5, dtype=torch.bool)

        def fn(t):
            return net.policy_head(t, t.mean(dim=(2, 3)), legal)

        assert torch.autograd.gradcheck(fn, (fp,), atol=1e-4)

    def test_full_graph_backward_finite(self):
        net = TrainNet.seeded(NetConfig.test(), seed=3, scale=0.7)
        batch = Batch.collate([toy_sample(np.random.default_rng(i)) for i in range(4)])
        loss = total_loss(net, batch)
        loss.backward()
        for p in net.parameters():
            assert p.grad is not None and torch.isfinite(p.grad).all()


class TestExport:
    def test_weight_file_round_trip(self, tmp_path):
        net = TrainNet.seeded(NetConfig.test(), seed=5, scale=0.7)
        mapping, heads = net.to_weights()
        path = tmp_path / "trained.mixw"
        write_weights(path, mapping, heads)
        m2, h2 = load_weights(path)
        for g in mapping.groups:
            for name in MAPPING_TENSOR_NAMES:
                assert np.array_equal(mapping.groups[g][name], m2.groups[g][name])
        for name, t in heads.tensors.items():
            assert np.array_equal(t, h2.tensors[name])

    def test_round_trip_through_net(self, mapping_weights, head_weights):
        net = TrainNet.from_weights(mapping_weights, head_weights)
        mapping, heads = net.to_weights()
        for g in mapping.groups:
            for name in MAPPING_TENSOR_NAMES:
                assert np.array_equal(mapping.groups[g][name],
                                      mapping_weights.groups[g][name])
        for name, t in heads.tensors.items():
            assert np.array_equal(t, head_weights.tensors[name])


class TestTraining:
    def test_toy_loss_halves(self, trained):
        _, losses = trained
        start = float(np.mean(losses[:10]))
        end = float(np.mean(losses[-10:]))
        assert end < 0.5 * start

    def test_training_is_seeded(self):
        results = []
        for _ in range(2):
            net = TrainNet.seeded(NetConfig.test(), seed=9, scale=0.7)
            data = toy_dataset(200, seed=3)
            results.append(train(net, data, steps=5, seed=4))
        assert results[0] == results[1]

    def test_distillation_blends_targets(self):
        from linegom.trainer.train import distill_batch
        teacher = TrainNet.seeded(NetConfig.test(), seed=13, scale=0.7).eval()
        batch = Batch.collate([toy_sample(np.random.default_rng(i)) for i in range(4)])
        mixed = distill_batch(batch, teacher, mix=0.75)
        assert torch.allclose(mixed.policy.flatten(1).sum(dim=1),
                              torch.ones(4), atol=1e-5)
        assert torch.allclose(mixed.value.sum(dim=1), torch.ones(4), atol=1e-5)
        assert (mixed.policy[~batch.legal] == 0).all()
        student = TrainNet.seeded(NetConfig.test(), seed=14, scale=0.7)
        losses = train(student, [toy_sample(np.random.default_rng(9))] * 32,
                       steps=3, batch_size=8, teacher=teacher)
        assert all(np.isfinite(losses))


class TestDataset:
    def test_binary_round_trip(self, tmp_path):
        from linegom.trainer.train import load_dataset, save_dataset
        samples = toy_dataset(20, seed=6)
        path = tmp_path / "toy.mixd"
        save_dataset(path, samples)
        back = load_dataset(path)
        assert len(back) == len(samples)
        for a, b in zip(samples, back):
            assert np.array_equal(a.planes, b.planes)
            assert np.array_equal(a.legal, b.legal)
            assert np.array_equal(a.policy, b.policy)
            assert np.array_equal(a.value, b.value)

    def test_bad_magic_rejected(self, tmp_path):
        from linegom.trainer.train import load_dataset
        path = tmp_path / "junk.mixd"
        path.write_bytes(b"NOPE" + b"\x00" * 12)
        with pytest.raises(ValueError):
            load_dataset(path)
