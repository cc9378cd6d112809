import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from udrs import kernels
from udrs.modelsem import determiner_table

pytestmark = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")


def brute_count(pred):
    n = len(pred)
    return sum(all((pred[i] >> j) & 1 == 0 or p.index(j) < p.index(i) for i in range(n) for j in range(n))
               for p in itertools.permutations(range(n)))


@st.composite
def dags(draw, max_n=6):
    n = draw(st.integers(0, max_n))
    pred = [0] * n
    for i in range(n):
        for j in range(i):
            if draw(st.booleans()):
                pred[i] |= 1 << j
    perm = draw(st.permutations(range(n)))
    out = [0] * n
    for i in range(n):          # relabel so the DAG is not always topologically sorted
        m = 0
        for j in range(n):
            if (pred[i] >> j) & 1:
                m |= 1 << perm[j]
        out[perm[i]] = m
    return out


@settings(max_examples=200)
@given(dags())
def test_linear_extension_backends_agree(pred):
    arr = np.array(pred, dtype=np.int64)
    want = brute_count(pred)
    assert kernels.count_linear_extensions_numpy(arr) == want
    assert kernels.count_linear_extensions_numba(arr) == want


@given(st.integers(0, 5000), st.integers(1, 300), st.integers(1, 14))
def test_decode_bits_backends_agree(start, count, nbits):
    a = kernels.decode_bits_numpy(start, count, nbits)
    b = kernels.decode_bits_numba(start, count, nbits)
    assert a.dtype == b.dtype == np.bool_
    assert np.array_equal(a, b)
    row = a[0]
    assert sum(int(v) << i for i, v in enumerate(row)) == start % (1 << nbits)


@pytest.mark.parametrize("name", sorted(determiner_table(2)))
@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_gq_properties_backends_agree(name, n):
    t = determiner_table(2)[name].table(n)
    assert np.array_equal(kernels.gq_properties_numpy(t, n), kernels.gq_properties_numba(t, n))


def test_gq_entails():
    tab = determiner_table(2)
    n = 4
    assert kernels.gq_entails_numpy(tab["no"].table(n), tab["few"].table(n), n)
    assert not kernels.gq_entails_numpy(tab["every"].table(n), tab["some"].table(n), n)   # empty restrictor
    assert kernels.gq_entails_numpy(tab["some"].table(n), tab["a"].table(n), n)


def test_backend_switch(monkeypatch):
    monkeypatch.setattr(kernels, "USE_NUMBA", False)
    assert kernels.backend() == "numpy"
    assert kernels.count_linear_extensions([0, 1, 0]) == 3
    monkeypatch.setattr(kernels, "USE_NUMBA", True)
    assert kernels.backend() == "numba"
    assert kernels.count_linear_extensions([0, 1, 0]) == 3
