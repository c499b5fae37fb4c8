import pytest

from rankdec.channel import RankErrorSpec, add_rank_errors, make_rng, rank_error_matrix, spawn_rngs
from rankdec.code import CodeParams, encode, random_message, rank_distance, word_rank, zero_word
from rankdec.errors import RankTooLarge

PARAMS = [CodeParams(3, 1, 5, 2, 1, 2), CodeParams(4, 2, 5, 2, 2, 2), CodeParams(5, 1, 7, 2, 2, 4)]


@pytest.mark.parametrize("params", PARAMS)
def test_exact_rank_over_seeded_trials(params):
    tower = params.tower()
    rngs = spawn_rngs(17, 100)
    for i, rng in enumerate(rngs):
        e = i % (params.n + 1)
        M = encode(params, random_message(params, rng), tower)
        Y = add_rank_errors(tower, M, e, rng)
        assert rank_distance(tower, Y, M) == e


def test_zero_errors_leave_word_unchanged():
    p = PARAMS[0]
    tower = p.tower()
    M = encode(p, random_message(p, make_rng(1)), tower)
    assert add_rank_errors(tower, M, RankErrorSpec(0, seed=5)) == M


def test_full_rank_error():
    p = PARAMS[0]
    tower = p.tower()
    for seed in range(20):
        E = add_rank_errors(tower, zero_word(p), RankErrorSpec(p.n, seed=seed))
        assert word_rank(tower, E) == p.n


def test_same_seed_same_output():
    p = PARAMS[1]
    tower = p.tower()
    M = encode(p, random_message(p, make_rng(2)), tower)
    assert add_rank_errors(tower, M, RankErrorSpec(3, seed=9)) == add_rank_errors(tower, M, RankErrorSpec(3, seed=9))
    assert add_rank_errors(tower, M, RankErrorSpec(3, seed=9)) != add_rank_errors(tower, M, RankErrorSpec(3, seed=10))


def test_rank_too_large():
    p = PARAMS[0]
    tower = p.tower()
    with pytest.raises(RankTooLarge):
        add_rank_errors(tower, zero_word(p), p.n + 1)
    with pytest.raises(RankTooLarge):
        rank_error_matrix(tower, -1, make_rng(0))


def test_spawned_streams_are_reproducible():
    a = [int(r.integers(0, 10 ** 9)) for r in spawn_rngs(5, 4)]
    b = [int(r.integers(0, 10 ** 9)) for r in spawn_rngs(5, 4)]
    assert a == b and len(set(a)) == 4
