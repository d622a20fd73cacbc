import json

import numpy as np

from ...enums import MechanismKind
from ...exceptions import AlphabetError, ConfigError, MechanismMismatch
from ...mechanisms import BATCH_ENCODERS, PrivacyBudget, PrivatizedBatch, PublicCoin
from ..base import Base


class TestPublicCoin(Base):

    def test_draw_sizes(self):
        coin = PublicCoin.draw(10, self.rng, count=50)
        self.assertEqual(coin.count, 50)
        self.assertTrue((coin.mask.sum(axis=1) == 5).all())

    def test_draw_is_uniform(self):
        draws = 20_000
        coin = PublicCoin.draw(6, self.rng, count=draws)
        inclusion = coin.mask.mean(axis=0)
        sigma = np.sqrt(0.25 / draws)
        for x in range(6):
            self.assertWithinSigmas(inclusion[x], 0.5, sigma, msg=f'symbol {x}')
        # each of the C(6, 3) = 20 subsets equally likely
        codes = coin.mask.astype(np.int64) @ (1 << np.arange(6))
        counts = np.unique(codes, return_counts=True)[1]
        self.assertEqual(counts.size, 20)
        self.assertWithinSigmas(counts.max(), draws / 20, np.sqrt(draws / 20), sigmas=6)

    def test_members(self):
        coin = PublicCoin.from_members([[3, 0], [1, 2]], 4)
        self.assertEqual(coin.to_json(), [[0, 3], [1, 2]])
        self.assertEqual(coin.contains([0, 1, 2, 3], 1).tolist(), [False, True, True, False])
        self.assertClose(coin.mass([0.1, 0.2, 0.3, 0.4]), 0.5)
        self.assertEqual(coin, PublicCoin.from_members(coin.to_json(), 4))

    def test_invalid(self):
        for members, k in (([[0]], 4), ([[0, 4]], 4), ([[0, 1]], 3)):
            with self.assertRaises(AlphabetError, msg=f'{members} k={k}'):
                PublicCoin.from_members(members, k)
        with self.assertRaises(AlphabetError):
            PublicCoin.draw(5, self.rng)


# -----------------------------------------------------------------------


class TestPrivatizedBatch(Base):

    def test_every_mechanism_registered(self):
        self.assertEqual(set(BATCH_ENCODERS), set(MechanismKind))

    def test_shapes(self):
        budget = PrivacyBudget(1.0)
        symbols = self.rng.integers(0, 6, size=40)
        pairs = self.rng.integers(0, 6, size=(40, 2))
        for kind, samples, shape in (
            (MechanismKind.RR, symbols, (40,)),
            (MechanismKind.RAPPOR, symbols, (40, 6)),
            (MechanismKind.HR, symbols, (40,)),
            (MechanismKind.HRPair, pairs, (40, 2)),
            (MechanismKind.RAPTOR, symbols, (40,)),
            (MechanismKind.RAPTOR2, pairs, (40, 3)),
        ):
            batch = PrivatizedBatch.from_samples(kind, samples, 6, budget, self.rng)
            self.assertEqual(batch.messages.shape, shape, msg=str(kind))
            self.assertEqual(batch.n, 40, msg=str(kind))
            self.assertEqual(len(batch), 40, msg=str(kind))
            self.assertEqual(batch.budget, budget, msg=str(kind))
            self.assertEqual(batch.coin is not None,
                             kind in (MechanismKind.RAPTOR, MechanismKind.RAPTOR2), msg=str(kind))

    def test_parallel_raptor_batch(self):
        coin = PublicCoin.draw(4, self.rng, count=3)
        batch = PrivatizedBatch.from_samples(MechanismKind.RAPTOR, [0, 1, 2], 4,
                                             PrivacyBudget(3.0), self.rng, coin)
        self.assertEqual(batch.messages.shape, (3, 3))

    def test_json(self):
        batch = PrivatizedBatch.from_samples(MechanismKind.RAPTOR2, [[0, 1], [2, 3]], 4,
                                             PrivacyBudget(1.0), self.rng)
        record = json.loads(batch.to_json())
        self.assertEqual(set(record), {'mechanism', 'k', 'epsilon', 'coin', 'messages'})
        self.assertEqual(record['mechanism'], 'raptor2')
        restored = PrivatizedBatch.from_json(batch.to_json())
        self.assertEqual(restored.kind, MechanismKind.RAPTOR2)
        self.assertEqual(restored.coin, batch.coin)
        np.testing.assert_array_equal(restored.messages, batch.messages)
        self.assertIsNone(PrivatizedBatch.from_json(
            {'mechanism': 'hr', 'k': 3, 'epsilon': 1, 'messages': [0, 3]}).coin)

    def test_bad_records(self):
        for record in (
            {'mechanism': 'morse', 'k': 3, 'epsilon': 1, 'messages': []},
            {'k': 3, 'epsilon': 1, 'messages': []},
            {'mechanism': 'hr', 'k': None, 'epsilon': 1, 'messages': []},
            {'mechanism': 'rappor', 'k': 4, 'epsilon': 1, 'messages': [[0, 1, 0]]},
            {'mechanism': 'hr-pair', 'k': 4, 'epsilon': 1, 'messages': [0, 1]},
            {'mechanism': 'raptor', 'k': 4, 'epsilon': 1, 'messages': [0, 1]},
            {'mechanism': 'raptor2', 'k': 4, 'epsilon': 1, 'messages': [[0, 1, 0]]},
        ):
            with self.assertRaises(MechanismMismatch, msg=f'{record}'):
                PrivatizedBatch.from_json(record)

    def test_messages_out_of_range(self):
        for kind, k, messages in (
            (MechanismKind.RR, 3, [0, 3]),
            (MechanismKind.HR, 3, [0, 4]),
            (MechanismKind.RAPPOR, 2, [[0, 2]]),
            (MechanismKind.HRPair, 3, [[0, -1]]),
        ):
            with self.assertRaises(AlphabetError, msg=str(kind)):
                PrivatizedBatch(kind, k, 1.0, messages)

    def test_coin_alphabet_mismatch(self):
        with self.assertRaises(AlphabetError):
            PrivatizedBatch(MechanismKind.RAPTOR, 6, 1.0, [0, 1], PublicCoin.from_members([[0, 1]], 4))

    def test_bad_epsilon(self):
        with self.assertRaises(ConfigError):
            PrivatizedBatch(MechanismKind.HR, 3, 0.0, [0])

    def test_expect(self):
        batch = PrivatizedBatch(MechanismKind.HR, 3, 1.0, [0, 1])
        batch.expect(MechanismKind.HR)
        with self.assertRaises(MechanismMismatch):
            batch.expect(MechanismKind.RR)


__all__ = [
    'TestPrivatizedBatch',
    'TestPublicCoin',
]
