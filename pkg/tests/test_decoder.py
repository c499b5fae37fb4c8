import itertools

import pytest

from helpers import synthetic_interpolation
from rankdec.channel import add_rank_errors, make_rng, spawn_rngs
from rankdec.code import CodeParams, derive_parameters, encode, random_message, rank_distance
from rankdec.decoder import (
    CandidateSpace,
    CoefficientIdentities,
    InterpolationPoly,
    blocks_to_vec,
    build_candidate_space,
    coefficient_identities,
    decode,
    enumerate_list,
    evaluate_interpolation,
    global_solve,
    interpolate,
    interpolation_counts,
    step_operator,
    verify_periodicity,
)
from rankdec.errors import RadiusTooLarge
from rankdec.fields import MessagePoly

REF = CodeParams(3, 1, 15, 2, 1, 2)
SMALL = CodeParams(3, 1, 5, 2, 1, 2)


def affine_points(p, basis, F):
    for cs in itertools.product(range(F.order), repeat=len(basis)):
        out = list(p)
        for c, b in zip(cs, basis):
            out = [F.add(x, F.mul(c, y)) for x, y in zip(out, b)]
        yield tuple(out)


def candidate_vectors(space, enum):
    return {tuple(blocks_to_vec(space.tower, f.blocks)) for f, _ in enum.items}


# -- interpolation ---------------------------------------------------------------------

def test_interpolation_counts_reference():
    assert interpolation_counts(REF, 8) == (38, 30)


def test_interpolation_on_zero_word():
    tower = REF.tower()
    Y = encode(REF, MessagePoly.zero(2, 1), tower)
    for e in range(0, 9):
        Q = interpolate(Y, e, REF, tower)
        assert not Q.is_zero()
        assert all(v == 0 for row in evaluate_interpolation(Q, Y, REF, tower) for v in row)


def test_interpolation_radius_guard():
    tower = REF.tower()
    Y = encode(REF, MessagePoly.zero(2, 1), tower)
    interpolate(Y, 9, REF, tower)  # 9 * 6 = 54 < 56
    with pytest.raises(RadiusTooLarge):
        interpolate(Y, 10, REF, tower)
    with pytest.raises(RadiusTooLarge):
        decode(Y, 9, REF, tower)


def test_interpolation_is_deterministic():
    tower = SMALL.tower()
    rng = make_rng(3)
    Y = add_rank_errors(tower, encode(SMALL, random_message(SMALL, rng), tower), 1, rng)
    assert interpolate(Y, 1, SMALL, tower) == interpolate(Y, 1, SMALL, tower)


# -- coefficient identities --------------------------------------------------------------

@pytest.mark.parametrize("params", [REF, SMALL, CodeParams(5, 1, 7, 2, 2, 4), CodeParams(4, 2, 5, 2, 2, 3)])
def test_transmitted_message_satisfies_identities(params):
    tower = params.tower()
    e_max = derive_parameters(params).e_max
    for i, rng in enumerate(spawn_rngs(21, 6)):
        e = i % (e_max + 1)
        f = random_message(params, rng)
        Y = add_rank_errors(tower, encode(params, f, tower), e, rng)
        Q = interpolate(Y, e, params, tower)
        ids = coefficient_identities(Q, params, tower)
        assert ids.holds(f.blocks)


def test_identity_zero_involves_only_first_block():
    tower = SMALL.tower()
    rng = make_rng(4)
    Y = add_rank_errors(tower, encode(SMALL, random_message(SMALL, rng), tower), 1, rng)
    ids = CoefficientIdentities(interpolate(Y, 1, SMALL, tower), SMALL, tower)
    f = random_message(SMALL, rng)
    g = MessagePoly((f.blocks[0], (tower.fqn.random(rng),)))
    assert ids.residual(f.blocks, 0) == ids.residual(g.blocks, 0)


def test_identities_without_y_terms_reduce_to_a0():
    params = SMALL
    tower = params.tower()
    rng = make_rng(5)
    F = tower.fqn
    A0 = [F.random(rng, 2) for _ in range(4)]
    Aw = [[[0] * 2 for _ in range(3)] for _ in range(2)]
    ids = CoefficientIdentities(InterpolationPoly(A0, Aw, 1), params, tower)
    f = random_message(params, rng)
    assert [ids.residual(f.blocks, u) for u in range(4)] == A0


# -- candidate space ----------------------------------------------------------------------

def test_s1_gives_trivial_kernel():
    params = CodeParams(5, 1, 7, 2, 2, 1)
    tower = params.tower()
    rng = make_rng(6)
    for _ in range(5):
        f = random_message(params, rng)
        e = derive_parameters(params).e_max
        Y = add_rank_errors(tower, encode(params, f, tower), e, rng)
        res = decode(Y, e, params, tower)
        assert res.stats.kernel_dim == 0 and res.messages == [f]


def test_step_operator_kernel_lifts_to_fr():
    params = CodeParams(5, 1, 3, 1, 2, 2)
    tower = params.tower()
    rng = make_rng(7)
    f = random_message(params, rng)
    Q = synthetic_interpolation(params, tower, rng, f, "kernel")
    T = step_operator(Q, params, tower)
    assert len(T.kernel) == 1 and T.kernel[0][0] == 0
    assert len(T.kernel_fr) == tower.vec_len


@pytest.mark.parametrize("params", [CodeParams(5, 1, 3, 1, 2, 2), CodeParams(3, 1, 5, 1, 2, 2),
                                    CodeParams(5, 1, 3, 2, 2, 2)])
def test_recursive_matches_global_with_kernel(params):
    tower = params.tower()
    rng = make_rng(8)
    f = random_message(params, rng)
    Q = synthetic_interpolation(params, tower, rng, f, "kernel")
    space = build_candidate_space(Q, params, tower)
    assert space.mode == "recursive" and space.kernel_dim == tower.vec_len
    enum = enumerate_list(space, record=True)
    assert not enum.overflow
    sol = global_solve(Q, params, tower)
    assert candidate_vectors(space, enum) == set(affine_points(sol.particular, sol.basis, tower.fr))
    assert any(g == f for g, _ in enum.items)
    assert len(enum.items) <= (tower.r ** space.kernel_dim) ** params.m
    assert verify_periodicity(space, enum.visited)


def test_zero_step_operator_falls_back_to_global():
    params = CodeParams(3, 1, 5, 2, 1, 2)
    tower = params.tower()
    rng = make_rng(9)
    f = random_message(params, rng)
    Q = synthetic_interpolation(params, tower, rng, f, "zero")
    space = CandidateSpace(Q, params, tower)
    assert space.step.is_zero and space.mode == "global"
    enum = enumerate_list(space)
    assert any(g == f for g, _ in enum.items)
    assert len(enum.items) == tower.r ** space.kernel_dim


def test_list_cap_sets_overflow():
    params = CodeParams(5, 1, 3, 1, 2, 2)
    tower = params.tower()
    rng = make_rng(10)
    f = random_message(params, rng)
    Q = synthetic_interpolation(params, tower, rng, f, "kernel", tail_zero=True)
    space = build_candidate_space(Q, params, tower)
    assert len(enumerate_list(space).items) == 125
    enum = enumerate_list(space, max_list=7)
    assert enum.overflow and len(enum.items) == 7
    assert space.default_max_list() == 125


def test_inconsistent_step_prunes_branch():
    params = CodeParams(5, 1, 3, 1, 2, 2)
    tower = params.tower()
    rng = make_rng(11)
    f = random_message(params, rng)
    Q = synthetic_interpolation(params, tower, rng, f, "kernel")
    # a constant term in the x^1 coefficient of identity 0 is outside the image of T
    Q.A0[0][1] = tower.fqn.add(Q.A0[0][1], 1)
    space = build_candidate_space(Q, params, tower)
    enum = enumerate_list(space)
    assert enum.items == [] and enum.pruned == 1
    assert global_solve(Q, params, tower) is None


# -- full decoder ----------------------------------------------------------------------------

@pytest.mark.parametrize("params", [SMALL, CodeParams(5, 1, 3, 1, 2, 3), CodeParams(5, 1, 7, 2, 2, 4),
                                    CodeParams(4, 1, 5, 2, 2, 3), CodeParams(7, 1, 5, 2, 3, 6),
                                    CodeParams(3, 3, 5, 2, 1, 2), CodeParams(4, 2, 5, 2, 1, 3)])
def test_containment_across_parameters(params):
    tower = params.tower()
    e_max = derive_parameters(params).e_max
    for i, rng in enumerate(spawn_rngs(31, 8)):
        e = i % (e_max + 1)
        f = random_message(params, rng)
        Y = add_rank_errors(tower, encode(params, f, tower), e, rng)
        res = decode(Y, e, params, tower, record=True)
        assert f in res.messages
        assert all(rank_distance(tower, encode(params, g, tower), Y) <= e for g in res.messages)
        assert res.stats.kernel_dim <= tower.vec_len * (params.s - 1)
        assert verify_periodicity(res.space, res.enumeration.visited)


def test_recursive_matches_global_on_real_decodes():
    tower = SMALL.tower()
    for e in (0, 1):
        for rng in spawn_rngs(40 + e, 10):
            f = random_message(SMALL, rng)
            Y = add_rank_errors(tower, encode(SMALL, f, tower), e, rng)
            Q = interpolate(Y, e, SMALL, tower)
            space = build_candidate_space(Q, SMALL, tower)
            enum = enumerate_list(space)
            sol = global_solve(Q, SMALL, tower)
            assert candidate_vectors(space, enum) == set(affine_points(sol.particular, sol.basis, tower.fr))


def test_zero_errors_recover_message():
    tower = REF.tower()
    f = random_message(REF, make_rng(12))
    res = decode(encode(REF, f, tower), 0, REF, tower)
    assert res.messages == [f] and res.list == [f]


def test_decode_stats_fields():
    tower = REF.tower()
    rng = make_rng(13)
    f = random_message(REF, rng)
    Y = add_rank_errors(tower, encode(REF, f, tower), 8, rng)
    st = decode(Y, 8, REF, tower).stats
    assert (st.interp_unknowns, st.interp_constraints) == (38, 30)
    assert st.kernel_bound == 15
    assert st.list_size == 1 and st.branches >= 3
    assert set(st.as_dict()) >= {"kernel_dim", "list_size", "branches", "interp_unknowns", "interp_constraints"}


def test_large_periodic_list_matches_global():
    params = CodeParams(5, 1, 3, 2, 2, 2)
    tower = params.tower()
    rng = make_rng(14)
    f = random_message(params, rng)
    Q = synthetic_interpolation(params, tower, rng, f, "kernel", tail_zero=True)
    space = build_candidate_space(Q, params, tower)
    enum = enumerate_list(space, record=True)
    assert len(enum.items) == 125 ** 2 and not enum.overflow
    sol = global_solve(Q, params, tower)
    assert sol.dim == 6
    assert candidate_vectors(space, enum) == set(affine_points(sol.particular, sol.basis, tower.fr))
    assert verify_periodicity(space, enum.visited[:40])
