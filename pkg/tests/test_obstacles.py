from fractions import Fraction

import pytest

from conftest import half
from dihom import build_grid, cohomology_ranks, complex_slice, cup0
from dihom.errors import DomainError
from dihom.obstacles import (Obstacle, ObstacleModel, avoidance_class, betti_profile, cap_chain,
                             cap_image, chain_cochain, component_labels, cup, cup_all, enumerate_classes)


def classes(M, u, v):
    return {c.chain: c for cs in enumerate_classes(M, u, v).values() for c in cs}


def test_obstacle_validation():
    with pytest.raises(DomainError):
        Obstacle("x", (Fraction(1), Fraction(1, 2)))
    with pytest.raises(DomainError):
        ObstacleModel((4, 4), [Obstacle("a", half(1, 1)), Obstacle("b", half(1, 3))])
    with pytest.raises(DomainError):
        ObstacleModel((2, 2), [Obstacle("a", half(5, 1))])


def test_planar_counts(planar):
    assert len(classes(planar, (0, 0), (4, 4))) == 12
    assert set(classes(planar, (0, 0), (3, 2))) == {(), ("O1",), ("O3",), ("O1", "O3")}
    assert enumerate_classes(planar, (4, 4), (0, 0)) == {}


def test_planar_counts_match_engine_everywhere(planar, planar_grid):
    X = planar_grid
    for u in X.vertices:
        for v in X.vertices:
            if not all(a <= b for a, b in zip(u, v)):
                continue
            rank = cohomology_ranks(complex_slice(X, u, v, 1), [1]).ranks[1]
            assert rank == len(classes(planar, u, v)), (u, v)


def test_planar_cup_idempotent(planar):
    for c in classes(planar, (0, 0), (4, 4)).values():
        assert cup(planar, c, c) == c


def test_planar_cup_incomparable_is_zero(planar):
    cs = classes(planar, (0, 0), (4, 4))
    assert cup(planar, cs[("O2",)], cs[("O3",)]) is None
    assert cup(planar, cs[("O1",)], cs[("O3", "O4")]).chain == ("O1", "O3", "O4")


def test_cup_interval_mismatch(planar):
    a = classes(planar, (0, 0), (4, 4))[()]
    b = classes(planar, (0, 0), (3, 2))[()]
    with pytest.raises(DomainError):
        cup(planar, a, b)


def test_spatial_generators(spatial):
    gens = enumerate_classes(spatial, (0, 0, 0), (4, 4, 4))
    assert {c.chain for c in gens[2]} == {("O1",), ("O2",), ("O3",), ("O4",)}
    assert {c.chain for c in gens[3]} == {("O1", "O2"), ("O1", "O3"), ("O1", "O4"), ("O2", "O4"), ("O3", "O4")}
    assert {c.chain for c in gens[4]} == {("O1", "O2", "O4"), ("O1", "O3", "O4")}


def test_spatial_cup(spatial):
    cs = classes(spatial, (0, 0, 0), (4, 4, 4))
    c1, c2, c3, c4 = (cs[(f"O{i}",)] for i in range(1, 5))
    assert cup(spatial, c2, c3) is None
    top = cup_all(spatial, c1, c3, c4)
    assert top.chain == ("O1", "O3", "O4") and top.coeff == 1
    # odd classes anticommute and square to zero
    for a in (c1, c2, c3, c4):
        assert cup(spatial, a, a) is None
        for b in (c1, c2, c3, c4):
            ab, ba = cup(spatial, a, b), cup(spatial, b, a)
            if ab is not None:
                assert ab.chain == ba.chain and ab.coeff == -ba.coeff


def test_cap_chain_examples(planar):
    u, beta, v = (0, 0), (3, 2), (4, 4)
    a = classes(planar, u, beta)[("O1", "O3")]
    b = classes(planar, beta, v)[("O4",)]
    assert cap_chain(planar, a, b).chain == ("O1", "O3", "O4")
    assert cap_chain(planar, classes(planar, u, beta)[()], classes(planar, beta, v)[()]).chain == ()
    with pytest.raises(DomainError):
        cap_chain(planar, b, a)


def test_cap_image_avoids_o2(planar):
    image = {c.chain for c in cap_image(planar, (0, 0), (3, 2), (4, 4))}
    assert image == {ch for ch in classes(planar, (0, 0), (4, 4)) if "O2" not in ch}


def test_cap_chain_associative(spatial):
    pts = [(0, 0, 0), (1, 1, 1), (2, 3, 2), (4, 4, 4)]
    for a in classes(spatial, pts[0], pts[1]).values():
        for b in classes(spatial, pts[1], pts[2]).values():
            for c in classes(spatial, pts[2], pts[3]).values():
                left = cap_chain(spatial, cap_chain(spatial, a, b), c)
                right = cap_chain(spatial, a, cap_chain(spatial, b, c))
                assert left == right


def test_spatial_profiles(spatial):
    assert betti_profile(spatial, (0, 0, 0), (4, 4, 4)) == (1, 4, 5, 2)
    assert betti_profile(spatial, (0, 0, 0), (2, 3, 2)) == (1, 2, 1)
    assert betti_profile(spatial, (2, 3, 2), (4, 4, 4)) == (1, 1)


def test_single_spatial_obstacle_matches_engine():
    # one removed cube: a circle of traces, detected in HM^2
    M = ObstacleModel((2, 2, 2), [Obstacle("O", half(1, 1, 1))])
    assert betti_profile(M, (0, 0, 0), (2, 2, 2)) == (1, 1)
    X = build_grid(M.to_grid_spec())
    ranks = cohomology_ranks(complex_slice(X, (0, 0, 0), (2, 2, 2)), [1, 2, 3]).ranks
    assert (ranks[1], ranks[2], ranks[3]) == (1, 1, 0)


def test_component_labels_bijective(planar, planar_grid):
    labels = component_labels(planar, planar_grid, (0, 0), (4, 4))
    assert len({c.chain for c in labels}) == 12


def test_avoidance_products_in_engine(planar, planar_grid):
    u, v = (0, 0), (4, 4)
    c1 = avoidance_class(planar, planar_grid, u, v, "O1")
    c3 = avoidance_class(planar, planar_grid, u, v, "O3")
    c2 = avoidance_class(planar, planar_grid, u, v, "O2")
    assert cup0(c1, c3) == chain_cochain(planar, planar_grid, u, v, ("O1", "O3"))
    assert cup0(c2, c3).is_zero()
    assert cup0(c1, c1) == c1


def test_json_round_trip(spatial):
    again = ObstacleModel.from_json(spatial.to_json())
    assert again.to_json() == spatial.to_json()
    assert spatial.to_json()["obstacles"][0]["coords"] == ["1/2", "1/2", "1/2"]
    assert spatial.to_grid_spec().forbidden == {(0, 0, 0), (2, 1, 2), (1, 2, 1), (3, 3, 3)}
