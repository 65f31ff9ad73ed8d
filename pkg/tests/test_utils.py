# tests/test_utils.py

import hashlib

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssvlab.utils import digest_arrays, digest_file, thread_map


class TestThreadMap:
    @given(st.lists(st.integers(-1000, 1000), max_size=30), st.integers(1, 4))
    def test_preserves_order(self, items, threads):
        assert thread_map(lambda v: v * v, items, threads=threads) == [v * v for v in items]

    def test_empty(self):
        assert thread_map(str, [], threads=3) == []

    def test_worker_error_propagates(self):
        def fail_on_three(v):
            if v == 3:
                raise ValueError("three")
            return v

        with pytest.raises(ValueError, match="three"):
            thread_map(fail_on_three, range(6), threads=2)


class TestDigests:
    def test_stable_and_order_sensitive(self):
        a = np.arange(6.0)
        b = np.ones(3)
        assert digest_arrays(a, b) == digest_arrays(a.copy(), b.copy())
        assert digest_arrays(a, b) != digest_arrays(b, a)

    def test_shape_enters_digest(self):
        a = np.arange(6.0)
        assert digest_arrays(a) != digest_arrays(a.reshape(3, 2))

    def test_dtype_normalised(self):
        assert digest_arrays(np.arange(4)) == digest_arrays(np.arange(4.0))

    def test_file_digest(self, tmp_path):
        path = tmp_path / "blob.bin"
        payload = bytes(range(256)) * 5000
        path.write_bytes(payload)
        assert digest_file(path) == hashlib.sha256(payload).hexdigest()
