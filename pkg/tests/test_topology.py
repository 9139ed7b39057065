import itertools

import pytest

from ksetlab.topology import (BOT, TOP, Complex, NotPureError, betti_mod2, codim, combined_order,
                              combined_order_cmp, complex_from_json, complex_to_json, dumps_complex,
                              face_order_cmp, is_pure, is_shellable_exhaustive, kuhn_facet, kuhn_facet_count,
                              kuhn_index_of, kuhn_indices, kuhn_input_complex, kuhn_order, kuhn_order_cmp,
                              loads_complex, pseudosphere, pseudosphere_order_cmp, signature, simplex, skeleton,
                              uniform_pseudosphere, verify_shelling_order)
from ksetlab.views import Vertex

from . import oracles


def V(p, x):
    return Vertex(p, x)


def s(*pairs):
    return simplex(pairs)


HOLLOW = Complex.from_simplices([s((1, 1), (2, 1)), s((2, 1), (3, 1)), s((1, 1), (3, 1))])
TWO_EDGES = Complex.from_simplices([s((1, 1), (2, 1)), s((1, 2), (2, 2))])


def test_simplex_must_be_chromatic():
    with pytest.raises(ValueError):
        simplex([(1, 1), (1, 2)])


def test_pseudosphere_examples():
    K = uniform_pseudosphere(3, [1, 2])
    assert len(K) == 8 and K.dim == 2
    assert len(pseudosphere([(1, [1, 2, 3])])) == 3
    assert len(uniform_pseudosphere(4, [1, 2])) == 16
    with pytest.raises(ValueError):
        pseudosphere([(1, [])])


def test_skeleton_examples():
    K = uniform_pseudosphere(4, [1, 2])
    assert len(skeleton(K, 2)) == 32
    assert skeleton(K, 0).facets == {frozenset([v]) for v in K.vertices()}
    assert skeleton(K, 5) == K


def test_faces_downward_closed():
    K = skeleton(uniform_pseudosphere(4, [1, 2, 3]), 2)
    faces = K.faces()
    for f in list(faces)[:200]:
        for r in range(1, len(f)):
            for sub in itertools.combinations(f, r):
                assert frozenset(sub) in faces


def test_kuhn_examples():
    assert len(kuhn_input_complex(3, 2)) == 10
    assert kuhn_facet((0, 0), 3) == s((1, 0), (2, 0), (3, 0))
    assert kuhn_facet((3, 3), 3) == s((1, 2), (2, 2), (3, 2))
    for n in range(1, 7):
        for k in range(1, 4):
            K = kuhn_input_complex(n, k)
            assert len(K) == oracles.kuhn_count(n, k) == kuhn_facet_count(n, k)
            for x in kuhn_indices(n, k):
                assert kuhn_index_of(kuhn_facet(x, n), k) == x


def test_face_order_examples():
    U = [1, 2, 3]
    assert signature(frozenset(), U) == (TOP, TOP, TOP)
    full = s((1, 0), (2, 0), (3, 0))
    assert signature(full, U) == (BOT, BOT, BOT)
    missing1 = s((2, 0), (3, 0))
    assert face_order_cmp(full, missing1, U) == -1
    assert face_order_cmp(full, full, U) == 0
    # absent = TOP and BOT < TOP, so the empty simplex sorts last
    assert face_order_cmp(frozenset(), missing1, U) == 1


def test_pseudosphere_order_examples():
    assert pseudosphere_order_cmp(s((1, 1), (2, 1)), s((1, 1), (2, 2))) == -1
    assert pseudosphere_order_cmp(s((1, 1), (2, 1)), s((1, 1), (2, 1))) == 0
    assert pseudosphere_order_cmp(s((1, 2), (2, 1)), s((1, 1), (2, 9))) == 1
    with pytest.raises(ValueError):
        pseudosphere_order_cmp(s((1, 1)), s((2, 1)))


def test_combined_order_composes():
    a, b = s((1, 1), (2, 1)), s((1, 1), (3, 1))
    assert combined_order_cmp(a, b, [1, 2, 3]) == face_order_cmp(a, b, [1, 2, 3])
    c = s((1, 1), (2, 2))
    assert combined_order_cmp(a, c, [1, 2, 3]) == pseudosphere_order_cmp(a, c)


def test_kuhn_order_examples():
    assert kuhn_order_cmp((0, 0), (1, 0)) == -1
    assert kuhn_order_cmp((1, 0), (1, 1)) == -1
    assert kuhn_order_cmp((2, 0), (2, 1)) == -1
    assert kuhn_order_cmp((1, 1), (1, 1)) == 0


def test_shelling_examples():
    assert verify_shelling_order(HOLLOW, combined_order(HOLLOW)).ok
    rep = verify_shelling_order(TWO_EDGES, TWO_EDGES.sorted_facets())
    assert not rep.ok and rep.witness == (0, 1)
    with pytest.raises(NotPureError):
        verify_shelling_order(Complex.from_simplices([s((1, 1), (2, 1)), s((3, 1))]), [])
    with pytest.raises(ValueError):
        verify_shelling_order(HOLLOW, HOLLOW.sorted_facets()[:2])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_skeleton_combined_order_small(n):
    for m in (1, 2, 3):
        for d in range(n):
            K = skeleton(uniform_pseudosphere(n, range(1, m + 1)), d)
            assert verify_shelling_order(K, combined_order(K)).ok


def test_kuhn_order_is_shelling_small():
    for n in range(1, 5):
        for k in range(1, 4):
            K = kuhn_input_complex(n, k)
            assert verify_shelling_order(K, kuhn_order(K)).ok


def test_exhaustive_shellability():
    tri = Complex.from_simplices([s((1, 1), (2, 1), (3, 1))])
    assert is_shellable_exhaustive(tri) == tri.sorted_facets()
    order = is_shellable_exhaustive(HOLLOW)
    assert order is not None and verify_shelling_order(HOLLOW, order).ok
    assert is_shellable_exhaustive(TWO_EDGES) is None
    with pytest.raises(ValueError, match="exceeds cap"):
        is_shellable_exhaustive(uniform_pseudosphere(4, [1, 2]), cap=10)


def test_bad_order_of_shellable_complex_is_rejected():
    # path a-b-c-d: starting with the two end edges breaks the prefix condition
    path = Complex.from_simplices([s((1, 1), (2, 1)), s((2, 1), (3, 1)), s((3, 1), (4, 1))])
    f = path.sorted_facets()
    ends = [x for x in f if (2, 1) not in [(v.color, v.label) for v in x] or (3, 1) not in [(v.color, v.label) for v in x]]
    bad = [ends[0], ends[1]] + [x for x in f if x not in ends]
    assert not verify_shelling_order(path, bad).ok


def test_betti_examples():
    solid = Complex.from_simplices([s((1, 1), (2, 1), (3, 1))])
    assert betti_mod2(solid) == [0, 0, 0]
    assert betti_mod2(HOLLOW) == [0, 1]
    assert betti_mod2(Complex.from_simplices([s((1, 1)), s((2, 1))])) == [1]
    assert betti_mod2(TWO_EDGES) == [1, 0]
    assert betti_mod2(HOLLOW, up_to=0) == [0]


def test_purity_and_codim():
    K = uniform_pseudosphere(3, [1, 2])
    assert is_pure(K)
    f = K.sorted_facets()[0]
    assert codim(f, K) == 0
    assert codim(frozenset([next(iter(f))]), K) == 2
    impure = Complex.from_simplices([s((1, 1), (2, 1)), s((3, 1))])
    assert not is_pure(impure)
    with pytest.raises(ValueError):
        codim(s((3, 1)), impure)


def test_empty_complex_conventions():
    E = Complex()
    assert E.is_empty() and betti_mod2(E) == []
    with pytest.raises(ValueError):
        skeleton(E, 1)


def test_json_round_trip():
    K = kuhn_input_complex(3, 2)
    assert loads_complex(dumps_complex(K)) == K
    doc = complex_to_json(HOLLOW)
    assert complex_from_json(doc) == HOLLOW
    assert doc["facets"][0][0] == {"p": 1, "label": "1"}
