import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from gftmpnn.datagen import LABEL_NAMES
from gftmpnn.errors import DimensionMismatchError, UnknownCategoryError
from gftmpnn.preprocess import (
    LabelMap,
    ScalerState,
    decode_labels,
    encode_labels,
    fit_min_max,
    one_hot_encode,
    transform_min_max,
)

COMPONENTS = ["amf", "ausf", "udm"]


class TestOneHot:
    def test_components(self):
        out = one_hot_encode(["amf", "ausf", "udm"], COMPONENTS)
        np.testing.assert_array_equal(out, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])

    def test_single_entry_vocabulary(self):
        np.testing.assert_array_equal(one_hot_encode(["x", "x"], ["x"]), [[1], [1]])

    def test_unknown(self):
        with pytest.raises(UnknownCategoryError):
            one_hot_encode(["smf"], COMPONENTS)

    @given(st.lists(st.sampled_from(COMPONENTS), max_size=30))
    def test_rows_sum_to_one(self, values):
        out = one_hot_encode(values, COMPONENTS)
        assert out.shape == (len(values), 3)
        assert np.all(out.sum(axis=1) == 1)
        np.testing.assert_array_equal(out.argmax(axis=1), [COMPONENTS.index(v) for v in values])


class TestMinMax:
    def test_fit(self):
        s = fit_min_max(np.array([[2.0, 5.0], [4.0, 5.0], [6.0, 5.0]]))
        np.testing.assert_array_equal(s.minimum, [2.0, 5.0])
        np.testing.assert_array_equal(s.maximum, [6.0, 5.0])

    def test_transform(self):
        x = np.array([[2.0, 5.0], [4.0, 5.0], [6.0, 5.0]])
        out = transform_min_max(x, fit_min_max(x))
        np.testing.assert_array_equal(out, [[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]])

    def test_out_of_range_clamped(self):
        s = fit_min_max(np.array([[2.0], [4.0], [6.0]]))
        np.testing.assert_array_equal(transform_min_max(np.array([[8.0], [0.0]]), s), [[1.0], [0.0]])

    def test_column_count(self):
        s = fit_min_max(np.zeros((3, 2)))
        with pytest.raises(DimensionMismatchError):
            transform_min_max(np.zeros((3, 3)), s)

    def test_json_round_trip(self):
        s = fit_min_max(np.random.default_rng(0).normal(size=(5, 4)))
        t = ScalerState.from_json(s.to_json())
        np.testing.assert_array_equal(t.minimum, s.minimum)
        np.testing.assert_array_equal(t.maximum, s.maximum)

    @settings(max_examples=50)
    @given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 5)),
                  elements=st.floats(-1e6, 1e6)))
    def test_fitting_data_spans_unit_interval(self, x):
        out = transform_min_max(x, fit_min_max(x))
        assert np.all((out >= 0.0) & (out <= 1.0))
        varying = x.max(axis=0) > x.min(axis=0)
        cols = np.flatnonzero(varying)
        assert np.all(out[x.argmin(axis=0)[cols], cols] == 0.0)
        assert np.all(out[x.argmax(axis=0)[cols], cols] == 1.0)
        assert not out[:, ~varying].any()

    @settings(max_examples=50)
    @given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 5)),
                  elements=st.floats(0.0, 1.0)))
    def test_idempotent_on_unit_data(self, x):
        x = np.vstack([x, np.zeros(x.shape[1]), np.ones(x.shape[1])])
        np.testing.assert_array_equal(transform_min_max(x, fit_min_max(x)), x)


class TestLabels:
    def test_first_occurrence(self):
        labels, m = encode_labels(["normal", "amfx1_bridge-delif", "normal"])
        np.testing.assert_array_equal(labels, [0, 1, 0])
        assert m.names == ("normal", "amfx1_bridge-delif")
        assert labels.dtype == np.int64

    def test_single_class(self):
        labels, m = encode_labels(["a"] * 4)
        assert not labels.any() and len(m) == 1

    def test_sixteen_classes(self):
        labels, m = encode_labels(list(LABEL_NAMES))
        np.testing.assert_array_equal(labels, np.arange(16))
        assert m.index("udmx1_vcpu-overload-start") == 15

    def test_unknown_name(self):
        with pytest.raises(UnknownCategoryError):
            LabelMap(("a",)).index("b")

    @given(st.lists(st.text(max_size=4), min_size=1, max_size=40))
    def test_round_trip(self, names):
        labels, m = encode_labels(names)
        assert decode_labels(labels, m) == names
        assert sorted(set(labels.tolist())) == list(range(len(m)))
