"""Eigendecomposition invariants and level-density statistics."""

from __future__ import annotations

import numpy as np
import pytest

import tbrisim as tb
from tbrisim.exceptions import InsufficientStatisticsError, PreconditionError


def test_one_by_one():
    d = tb.diagonalize(np.array([[2.5]]))
    assert d.energies.tolist() == [2.5]
    assert d.vectors.tolist() == [[1.0]]


def test_two_by_two_analytic():
    a, b = 1.0, 0.25
    d = tb.diagonalize(np.array([[a, b], [b, a]]))
    assert np.allclose(d.energies, [a - b, a + b], atol=1e-14)
    inv_sqrt2 = 1 / np.sqrt(2)
    assert np.allclose(np.abs(d.vectors), inv_sqrt2, atol=1e-14)


def test_reconstruction_small(small_2_4):
    d = small_2_4.decomp
    h = small_2_4.h.entries
    recon = d.vectors @ np.diag(d.energies) @ d.vectors.T
    assert np.abs(recon - h).max() < 1e-10


def test_orthonormality(fig2):
    c = fig2.decomp.vectors
    assert np.abs(c.T @ c - np.eye(c.shape[0])).max() < 1e-10


def test_energies_ascending(fig1):
    assert np.all(np.diff(fig1.decomp.energies) >= 0)


def test_trace_identity(fig1):
    lhs = fig1.decomp.energies.sum()
    rhs = np.trace(fig1.h.entries)
    assert abs(lhs - rhs) < 1e-8 * abs(rhs)


def test_frobenius_identity(fig1):
    lhs = (fig1.decomp.energies**2).sum()
    rhs = (fig1.h.entries**2).sum()
    assert abs(lhs - rhs) < 1e-8 * abs(rhs)


def test_sign_gauge_fixed(fig1):
    c = fig1.decomp.vectors
    lead = np.argmax(np.abs(c), axis=0)
    assert np.all(c[lead, np.arange(c.shape[1])] > 0)


def test_diagonalize_deterministic(small_3_6):
    again = tb.diagonalize(small_3_6.h)
    assert np.array_equal(again.energies, small_3_6.decomp.energies)
    assert np.array_equal(again.vectors, small_3_6.decomp.vectors)


def test_diagonalize_rejects_bad_input():
    with pytest.raises(PreconditionError):
        tb.diagonalize(np.ones((2, 3)))
    with pytest.raises(PreconditionError):
        tb.diagonalize(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_stats_equidistant_spectrum():
    energies = np.arange(101, dtype=float) * 0.5
    decomp = tb.EigenDecomposition(energies=energies, vectors=np.eye(101))
    stats = tb.spectral_stats(decomp)
    assert stats.mean_spacing_mid == pytest.approx(0.5, rel=1e-12)


def test_stats_density_integrates_to_n(fig1):
    stats = fig1.stats
    e = fig1.decomp.energies
    grid = np.linspace(e[0] - 10 * stats.bandwidth, e[-1] + 10 * stats.bandwidth, 20001)
    total = np.trapezoid(stats.rho(grid), grid)
    assert abs(total - len(e)) < 1e-6 * len(e)


def test_stats_mid_spacing_matches_central_average(fig1):
    """Windowed estimate vs a from-scratch spacing average over the 51 central levels."""
    e = np.sort(fig1.decomp.energies)
    median = np.median(e)
    central = e[np.argsort(np.abs(e - median))[:51]]
    direct = float(np.mean(np.diff(np.sort(central))))
    stats = tb.spectral_stats(fig1.decomp)
    assert stats.mean_spacing_mid == pytest.approx(direct, rel=0.01)


def test_stats_window_too_small(fig1):
    with pytest.raises(InsufficientStatisticsError):
        tb.spectral_stats(fig1.decomp, window=1e-9)


def test_stats_needs_three_levels():
    decomp = tb.EigenDecomposition(energies=np.array([0.0, 1.0]), vectors=np.eye(2))
    with pytest.raises(PreconditionError):
        tb.spectral_stats(decomp)


def test_decomposition_dump_round_trip(tmp_path, small_3_6):
    path = tmp_path / "d.bin"
    tb.dump_decomposition(small_3_6.decomp, small_3_6.params, path)
    loaded, header = tb.load_decomposition(path)
    assert loaded.energies.tobytes() == small_3_6.decomp.energies.tobytes()
    assert loaded.vectors.tobytes(order="F") == small_3_6.decomp.vectors.tobytes(order="F")
    assert np.array_equal(loaded.vectors, small_3_6.decomp.vectors)
    assert header["size"] == 20 and header["seed"] == small_3_6.params.seed
