import math

import numpy as np
import pytest

from locent.entropy import global_entropy, m_local_entropy, next_symbol_entropy
from locent.errors import BudgetExceeded, NondeterministicUnsupported
from locent.matrices import build_matrices
from locent.pfsa import Pfsa

from conftest import REF


@pytest.fixture
def mats(t1):
    return build_matrices(t1)


def test_next_symbol_entropy_reference(t1, mats):
    rep = next_symbol_entropy(t1, mats)
    assert rep.value == pytest.approx(REF["next_symbol_nats"], abs=1e-6)
    assert rep.log_base == "nats"


def test_next_symbol_entropy_hand_weights(t1, mats):
    # visit vector (3.125, 0.9375); local entropies 1.029653 and 0.673012
    np.testing.assert_allclose(mats.prefix_vector, [3.125, 0.9375], atol=1e-12)
    h0 = -(0.5 * math.log(0.5) + 0.3 * math.log(0.3) + 0.2 * math.log(0.2))
    h1 = -(0.6 * math.log(0.6) + 0.4 * math.log(0.4))
    assert h0 == pytest.approx(1.029653, abs=1e-6)
    assert h1 == pytest.approx(0.673012, abs=1e-6)
    expect = (3.125 * h0 + 0.9375 * h1) / 4.0625
    assert next_symbol_entropy(t1, mats).value == pytest.approx(expect, abs=1e-12)


def test_uniform_single_state_bits():
    # two symbols at 0.25 plus halting 0.5: 1.5 bits
    a = Pfsa(alphabet_size=2, num_states=1,
             transitions=[(0, 0, 0.25, 0), (0, 1, 0.25, 0)],
             initial=[1.0], final=[0.5])
    rep = next_symbol_entropy(a, build_matrices(a), base="bits")
    assert rep.value == pytest.approx(1.5, abs=1e-12)
    assert rep.log_base == "bits"


def test_global_entropy_reference(t1, mats):
    rep = global_entropy(t1, mats)
    assert rep.value == pytest.approx(REF["global_nats"], abs=1e-6)


def test_global_is_mean_length_times_next(t1, mats):
    ns = next_symbol_entropy(t1, mats).value
    assert global_entropy(t1, mats).value == pytest.approx(4.0625 * ns, abs=1e-12)


def test_geometric_global_entropy():
    # one state, a/0.5, halt 0.5: entropy of the geometric length law
    a = Pfsa(alphabet_size=2, num_states=1,
             transitions=[(0, 0, 0.5, 0)], initial=[1.0], final=[0.5])
    rep = global_entropy(a, build_matrices(a))
    assert rep.value == pytest.approx(2.0 * math.log(2.0), abs=1e-12)


def test_two_local_reference(t1, mats):
    rep = m_local_entropy(t1, mats, 2)
    assert rep.value == pytest.approx(REF["two_local_nats"], abs=1e-6)
    assert rep.m == 2
    assert rep.contexts_evaluated == 2
    assert rep.contexts_skipped_zero_mass == 0


def test_two_local_hand_mixture(t1, mats):
    # contexts a and b weighted 2.125 and 0.9375; conditionals are the two
    # per-state local distributions
    h0 = -(0.5 * math.log(0.5) + 0.3 * math.log(0.3) + 0.2 * math.log(0.2))
    h1 = -(0.6 * math.log(0.6) + 0.4 * math.log(0.4))
    expect = (2.125 * h0 + 0.9375 * h1) / 3.0625
    assert m_local_entropy(t1, mats, 2).value == pytest.approx(expect, abs=1e-12)


def test_one_local_single_context(t1, mats):
    rep = m_local_entropy(t1, mats, 1)
    assert rep.contexts_evaluated == 1
    assert rep.contexts_skipped_zero_mass == 0
    # the empty context mixes the states by total infix mass
    h0 = -(0.5 * math.log(0.5) + 0.3 * math.log(0.3) + 0.2 * math.log(0.2))
    h1 = -(0.6 * math.log(0.6) + 0.4 * math.log(0.4))
    w0 = 3.125
    w1 = 0.9375
    p = np.array([0.5 * w0, 0.3 * w0, 0.2 * w0]) + np.array([0.6 * w1, 0.0, 0.4 * w1])
    p /= p.sum()
    expect = float(-(p[p > 0] * np.log(p[p > 0])).sum())
    del h0, h1
    assert rep.value == pytest.approx(expect, abs=1e-12)


def test_three_local_skips_impossible_context(t1, mats):
    # context bb has zero infix weight
    rep = m_local_entropy(t1, mats, 3)
    assert rep.contexts_evaluated == 3
    assert rep.contexts_skipped_zero_mass == 1


def test_bits_conversion(t1, mats):
    nats = m_local_entropy(t1, mats, 2).value
    bits = m_local_entropy(t1, mats, 2, base="bits").value
    assert bits == pytest.approx(nats / math.log(2.0), abs=1e-12)


def test_budget_exceeded(t1, mats):
    with pytest.raises(BudgetExceeded):
        m_local_entropy(t1, mats, 30, context_budget=1000)


def test_invalid_m(t1, mats):
    with pytest.raises(ValueError):
        m_local_entropy(t1, mats, 0)


def test_nondeterministic_rejected_for_next_symbol():
    a = Pfsa(alphabet_size=2, num_states=2,
             transitions=[(0, 0, 0.4, 0), (0, 0, 0.2, 1), (0, 1, 0.2, 0),
                          (1, 0, 0.6, 0)],
             initial=[1.0, 0.0], final=[0.2, 0.4])
    mats = build_matrices(a)
    with pytest.raises(NondeterministicUnsupported):
        next_symbol_entropy(a, mats)
    with pytest.raises(NondeterministicUnsupported):
        global_entropy(a, mats)


def test_spread_initial_rejected_for_next_symbol(t1):
    a = Pfsa(alphabet_size=2, num_states=2, transitions=t1.transitions,
             initial=[0.5, 0.5], final=[0.2, 0.4])
    with pytest.raises(NondeterministicUnsupported):
        next_symbol_entropy(a, build_matrices(a))


def test_m_local_allows_nondeterministic():
    # the infix-weighted mixture needs no per-prefix state identity
    a = Pfsa(alphabet_size=2, num_states=2,
             transitions=[(0, 0, 0.4, 0), (0, 0, 0.2, 1), (0, 1, 0.2, 0),
                          (1, 0, 0.6, 0)],
             initial=[1.0, 0.0], final=[0.2, 0.4])
    rep = m_local_entropy(a, build_matrices(a), 2)
    assert 0.0 < rep.value < math.log(3.0)
