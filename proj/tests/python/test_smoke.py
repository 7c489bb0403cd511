import numpy as np
import pytest

import hyperstar as hs


def test_hamilton_basis_table():
    e, i, j, k = np.eye(4)
    assert np.array_equal(hs.hamilton(i, j), k)
    assert np.array_equal(hs.hamilton(j, i), -k)
    assert np.array_equal(hs.hamilton(j, k), i)
    assert np.array_equal(hs.hamilton(k, i), j)
    assert np.array_equal(hs.hamilton(i, i), -e)
    q = np.array([0.5, -1.5, 2.0, 3.25])
    assert np.array_equal(hs.hamilton(q, e), q)
    assert np.array_equal(hs.hamilton(e, q), q)


def test_ph_compose_matrix_matches_kron_sum():
    rng = np.random.default_rng(7)
    n = 3
    a = rng.standard_normal((n, n, n))
    f = rng.standard_normal((n, 5, 4))
    want = sum(np.kron(a[i], f[i]) for i in range(n))
    got = hs.ph_compose_matrix(a, f)
    assert got.shape == (15, 12)
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-14)


def test_kronecker_matches_numpy():
    rng = np.random.default_rng(8)
    a = rng.standard_normal((2, 3))
    b = rng.standard_normal((4, 5))
    np.testing.assert_array_equal(hs.kronecker(a, b), np.kron(a, b))


def test_quaternion_kernel_is_pattern_composition():
    rng = np.random.default_rng(9)
    f = rng.standard_normal((4, 2, 3, 3, 3))
    pattern = hs.init_a("quat_pattern", 4)
    np.testing.assert_allclose(
        hs.quaternion_conv_kernel(f), hs.ph_compose_conv(pattern, f), rtol=0, atol=0
    )


def test_conv2d_matches_direct_sum():
    rng = np.random.default_rng(10)
    x = rng.standard_normal((2, 3, 5, 5))
    k = rng.standard_normal((4, 3, 3, 3))
    got = hs.conv2d(x, k, stride=1, pad=0)
    assert got.shape == (2, 4, 3, 3)
    want = np.zeros_like(got)
    for n in range(2):
        for o in range(4):
            for h in range(3):
                for w in range(3):
                    want[n, o, h, w] = np.sum(x[n, :, h : h + 3, w : w + 3] * k[o])
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-12)


def test_hyper_instance_norm_statistics():
    rng = np.random.default_rng(11)
    x = rng.standard_normal((2, 8, 6, 6)) * 3.0 + 1.0
    y = hs.hyper_instance_norm(x, 4, np.ones(2), np.zeros(8))
    means = y.mean(axis=(2, 3))
    np.testing.assert_allclose(means, 0.0, rtol=0, atol=1e-12)
    # All components of a block share one pooled variance close to 1.
    pooled = y.reshape(2, 2, 4, 36).var(axis=(2, 3)) * 4
    np.testing.assert_allclose(pooled, 1.0, rtol=0, atol=1e-3)


def test_hyper_adain_identity_style_equals_plain_norm():
    rng = np.random.default_rng(12)
    x = rng.standard_normal((2, 8, 4, 4))
    plain = hs.hyper_instance_norm(x, 4, np.ones(2), np.zeros(8))
    styled = hs.hyper_adain(x, 4, np.zeros((2, 2)), np.zeros((2, 8)))
    np.testing.assert_array_equal(styled, plain)


def test_init_a_schemes():
    a = hs.init_a("rand_integer", 4, seed=5)
    assert a.shape == (4, 4, 4)
    assert set(np.unique(a)) <= {-1.0, 0.0, 1.0}
    assert np.array_equal(hs.init_a("rand_integer", 4, seed=5), a)
    assert not np.array_equal(hs.init_a("rand_integer", 4, seed=6), a)
    x = hs.init_a("xavier", 3, seed=1)
    assert x.shape == (3, 3, 3)
    with pytest.raises(Exception):
        hs.init_a("made_up", 4)


def test_channel_layout_round_trip():
    rng = np.random.default_rng(13)
    rgb = rng.uniform(-1, 1, size=(2, 3, 4, 4))
    for n in (3, 4):
        np.testing.assert_array_equal(hs.to_rgb_channels(hs.to_model_channels(rgb, n), n), rgb)
    luma = hs.to_model_channels(rgb, 1)
    assert luma.shape == (2, 1, 4, 4)
    np.testing.assert_allclose(
        luma[:, 0], 0.299 * rgb[:, 0] + 0.587 * rgb[:, 1] + 0.114 * rgb[:, 2], atol=1e-12
    )
