import itertools
import random

import networkx as nx
import pytest

from ehk import structures as st
from ehk.errors import InvalidParams
from ehk.generators import (GenSpec, gen_breaker_instance, gen_ehf_with_gadgets, gen_grid_of_cliques,
                            gen_named, gen_random_chordal, gen_random_ehf, generate)
from ehk.graph import Graph, is_chordal


def as_nx(G):
    H = nx.Graph()
    H.add_nodes_from(G.vertices)
    H.add_edges_from(G.edges())
    return H


def test_genspec_round_trip_and_reproducible():
    for text in ("family=ehf,n=20,p=0.2,seed=1", "family=chordal,n=30,density=0.4,seed=7",
                 "family=random,n=12,p=0.5,seed=3", "family=grid,rows=2,cols=3,size=3",
                 "family=named,kind=pyramid,lengths=1-2-2", "family=gadget,n=25,p=0.1,seed=2"):
        spec = GenSpec.parse(text)
        assert GenSpec.parse(spec.encode()) == spec
        assert sorted(generate(spec).edges()) == sorted(generate(GenSpec.parse(text)).edges())
    with pytest.raises(InvalidParams):
        GenSpec.parse("family=nosuch,n=3")


def test_ehf_examples():
    assert gen_random_ehf(5, 0.0, 0).m == 0
    G = gen_random_ehf(20, 0.2, 1)
    assert st.find_even_hole(G) is None
    with pytest.raises(InvalidParams):
        gen_random_ehf(61, 0.1, 0)


def test_ehf_corpus_is_in_class_c():
    for seed in range(200):
        rng = random.Random(seed)
        G = gen_random_ehf(rng.randint(6, 30), rng.choice([0.1, 0.2, 0.35]), seed)
        assert st.find_even_hole(G) is None
        assert st.in_class_C(G)[0], seed


def test_gadget_corpus_keeps_its_structures():
    G = gen_ehf_with_gadgets(30, 0.1, 5)
    assert st.find_even_hole(G) is None
    assert any(c.is_proper for _, c in st.enumerate_wheels(G))
    assert st.detect_loaded_pyramid(G) is not None


def test_chordal_examples():
    F = gen_random_chordal(20, 0.0, 3)
    assert nx.is_forest(as_nx(F))
    for seed in range(40):
        G = gen_random_chordal(14, random.Random(seed).random(), seed)
        assert is_chordal(G) and nx.is_chordal(as_nx(G))
        assert not any(len(h) >= 4 for h in st.all_holes(G))
    G = gen_random_chordal(34, 0.5, 1)
    assert G.n == 34 and is_chordal(G)


def test_chordal_clique_cap():
    G = gen_random_chordal(40, 0.9, 2, max_clique=4)
    assert max(len(c) for c in nx.find_cliques(as_nx(G))) <= 4


def test_named_examples():
    K23 = gen_named("theta", lengths=(2, 2, 2))
    assert nx.is_isomorphic(as_nx(K23), nx.complete_bipartite_graph(2, 3))
    prism = gen_named("prism", lengths=(1, 1, 1))
    assert nx.is_isomorphic(as_nx(prism), nx.cartesian_product(nx.complete_graph(3), nx.complete_graph(2)))
    checks = [
        ("theta", dict(lengths=(2, 3, 4)), st.detect_theta),
        ("prism", dict(lengths=(1, 2, 3)), st.detect_prism),
        ("near_prism", dict(lengths=(0, 2, 3)), st.detect_near_prism),
        ("pyramid", dict(lengths=(1, 2, 2)), st.detect_pyramid),
        ("pyramid", dict(lengths=(2, 3, 3)), st.detect_pyramid),
        ("loaded_pyramid", dict(l1=3, l3=3, k=2, attach=(1, 2)), st.detect_loaded_pyramid),
    ]
    for kind, params, detector in checks:
        G = gen_named(kind, **params)
        w = detector(G)
        assert w is not None and st.validate_witness(G, w), kind
    assert gen_named("hole", length=7).m == 7


@pytest.mark.parametrize("kind,params", [
    ("pyramid", dict(lengths=(1, 1, 2))),
    ("theta", dict(lengths=(1, 2, 2))),
    ("prism", dict(lengths=(0, 1, 1))),
    ("hole", dict(length=3)),
    ("wheel", dict(length=6, neighbors=(0, 1))),
    ("loaded_pyramid", dict(l1=1, l3=3, k=1, attach=1)),
    ("extended_near_prism", dict(lengths=(3, 3, 3), cross=((0, 1), (0, 2)))),
    ("nosuch", dict()),
])
def test_named_rejects_bad_lengths(kind, params):
    with pytest.raises(InvalidParams):
        gen_named(kind, **params)


def test_grid_of_cliques():
    G = gen_grid_of_cliques(2, 3, 3)
    assert G.n == 18
    assert max(len(c) for c in nx.find_cliques(as_nx(G))) >= 3
    with pytest.raises(InvalidParams):
        gen_grid_of_cliques(0, 3, 3)


def test_breaker_instances():
    for seed in range(30):
        inst = gen_breaker_instance(seed)
        G = inst.G
        assert st.detect_c4(G) is None
        assert inst.b not in inst.X
        assert set(itertools.chain.from_iterable(inst.parts)) == set(inst.X)
        assert G.n <= 40
