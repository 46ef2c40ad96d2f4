import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netcfg import witness as wt
from netcfg.classical import triangle_bits
from netcfg.distribution import OutcomeDistribution
from netcfg.quantum import acin, add_noise, assemble, born_distribution, computational_bases, ghz, product, w_state
from netcfg.topology import builtin


def pure(component):
    n = len(component.dims)
    return assemble([component], [list(range(n))])


@pytest.mark.parametrize("n", [3, 4, 5])
def test_ghz_entangled(n):
    v = wt.witness_entanglement(pure(ghz(0.6, n)))
    assert v.entangled and v.pair_tests == n - 1
    assert v.render().splitlines()[-1] == "ENTANGLED"


def test_w_entangled():
    alphas = np.array([0.3, 0.5, 0.4, 0.6])
    v = wt.witness_entanglement(pure(w_state(alphas / np.linalg.norm(alphas))))
    assert v.entangled and v.pair_tests == 3


def test_exceptional_acin_state():
    v = wt.witness_entanglement(pure(acin([0.5, 0, 0.5, 0.5, 0.5], 0.0)))
    first, second = v.pairs
    assert first.dependent and first.margin == pytest.approx(0.125, abs=1e-12)
    assert not second.dependent and abs(second.margin) <= 1e-12
    assert v.overall == "Inconclusive"
    assert v.render() == ("pair (1,2): DEPENDENT margin=0.125 at (0,0)\n"
                          f"pair (2,3): INDEPENDENT max margin={second.margin:.9g}\nINCONCLUSIVE")


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_product_states_inconclusive(seed):
    rng = np.random.default_rng(seed)
    vecs = []
    for _ in range(3):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        vecs.append(z / np.linalg.norm(z))
    v = wt.witness_entanglement(pure(product(vecs)))
    assert not v.entangled
    assert not any(p.dependent for p in v.pairs)


def test_mixed_state_rejected():
    with pytest.raises(wt.WitnessError, match="pure"):
        wt.witness_entanglement(pure(add_noise(ghz(0.3, 3), 0.9)))


def test_explicit_pairs():
    v = wt.witness_entanglement(pure(ghz(0.6, 4)), pairs=[(0, 3)])
    assert v.pair_tests == 1 and v.pairs[0].pair == (0, 3)


def test_pair_requires_two_parties():
    d = born_distribution(pure(ghz(0.3, 3)), computational_bases(pure(ghz(0.3, 3))))
    with pytest.raises(wt.WitnessError):
        wt.pair_independence(d)


def test_k_separability():
    s = pure(ghz(0.5, 3))
    d = born_distribution(s, computational_bases(s))
    assert wt.k_separability_test(d, 10, blocks=[[0], [1, 2]]).violated
    prod = OutcomeDistribution.from_array(np.einsum("i,j,k->ijk", [0.3, 0.7], [0.5, 0.5], [0.1, 0.9]))
    assert not wt.k_separability_test(prod, 10, blocks=[[0, 1], [2]]).violated
    with pytest.raises(wt.WitnessError):
        wt.k_separability_test(d, 10, blocks=[[0, 1, 2]])


def test_compatibility_refutes_chain():
    v = wt.compatibility_check(triangle_bits(0.5, 0.5, 0.5), builtin("chain", 3), "family", m=10)
    assert v.incompatible and v.conclusion == "Incompatible"
    assert v.render().splitlines()[-1] == "INCOMPATIBLE with 3-party network [{1,2},{2,3}]"


def test_compatibility_one_sided():
    d = triangle_bits(0.5, 0.5, 0.5)
    v = wt.compatibility_check(d, builtin("cycle", 3), "greedy")
    assert v.conclusion == "NotRefuted" and v.render().endswith("NOT REFUTED")


def test_strategy_errors():
    d = triangle_bits(0.5, 0.5, 0.5)
    with pytest.raises(wt.WitnessError, match="parties"):
        wt.compatibility_check(d, builtin("chain", 4))
    with pytest.raises(wt.WitnessError, match="unknown"):
        wt.strategy_weights(builtin("chain", 3), "best")
    with pytest.raises(wt.WitnessError, match="assignments"):
        wt.strategy_weights(builtin("chain", 3), "decompose")
