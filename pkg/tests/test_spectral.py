import numpy as np
import pytest

from monopole_lab import spectral as sp


def test_exact_levels_and_multiplicities():
    levels = sp.exact_spectrum(1, 2)
    assert [lv.value for lv in levels] == [0.5, 3.5, 8.5]
    assert [lv.multiplicity for lv in levels] == [2, 4, 6]
    assert all(lv.source is sp.Source.EXACT for lv in levels)


def test_tamm_levels_coincide_with_n_one():
    assert [(lv.value, lv.multiplicity) for lv in sp.tamm_spectrum(4)] == \
        [(lv.value, lv.multiplicity) for lv in sp.exact_spectrum(1, 4)]


def test_grid_floor():
    with pytest.raises(sp.GridTooCoarse):
        sp.reduce_sector(1, 0, 10)


def test_sector_matrix_is_hermitian_and_matches_bisection():
    p = sp.reduce_sector(-2, 1, 128)
    h = p.dense()
    assert np.allclose(h, h.conj().T)
    dense = np.linalg.eigvalsh(h)[:5]
    assert np.allclose(sp.solve_sector(p, 5), dense, rtol=1e-12, atol=1e-9)


def test_count_below_matches_solve():
    p = sp.reduce_sector(0, 0, 400)
    below = sp.eigenvalues_below(p, 13.0)
    assert len(below) == sp.count_below(p, 13.0) == 4  # j = 0, 1, 2, 3 in m = 0


def test_sector_range_is_conservative():
    ms = sp.sector_range(-1, 8.0, 2000)
    levels = sp.numeric_spectrum(-1, 8.0)
    used = {m for lv in levels for m in lv.sectors}
    assert used <= set(ms)


@pytest.mark.parametrize("n,e_max,expected", [
    (0, 7.0, [(0.0, 1), (2.0, 3), (6.0, 5)]),
    (-2, 2.0, [(1.0, 3)]),
    (-1, 4.0, [(0.5, 2), (3.5, 4)]),
])
def test_numeric_spectrum_examples(n, e_max, expected):
    levels = sp.numeric_spectrum(n, e_max)
    assert [lv.multiplicity for lv in levels] == [m for _, m in expected]
    for lv, (value, _) in zip(levels, expected):
        assert lv.value == pytest.approx(value, rel=1e-3, abs=1e-9)


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("MONOPOLE_LAB_THREADS", "3")
    assert sp._thread_count() == 3
    monkeypatch.setenv("MONOPOLE_LAB_THREADS", "0")
    assert sp._thread_count() >= 1
    monkeypatch.setenv("MONOPOLE_LAB_THREADS", "-2")
    with pytest.raises(ValueError):
        sp._thread_count()


def test_threaded_and_serial_runs_agree():
    a = sp.numeric_spectrum(2, 12.0, threads=1)
    b = sp.numeric_spectrum(2, 12.0, threads=4)
    assert a == b


def test_cluster_levels_groups_and_rejects_ambiguity():
    pairs = [(1.0, 0), (1.0 + 1e-7, 1), (2.0, 0)]
    levels = sp.cluster_levels(pairs)
    assert [(lv.multiplicity, lv.sectors) for lv in levels] == [(2, (0, 1)), (1, (0,))]
    with pytest.raises(sp.ClusterAmbiguity):
        sp.cluster_levels([(1.0, 0), (1.0 + 3e-4, 1)])


def test_compare_spectra_reports_mismatch():
    a = [sp.SpectrumLevel(0.5, 2, sp.Source.NUMERIC), sp.SpectrumLevel(3.6, 3, sp.Source.NUMERIC)]
    b = sp.exact_spectrum(1, 1)
    cmp = sp.compare_spectra(a, b, 2)
    assert cmp.multiplicity_mismatches == [1]
    assert cmp.max_rel_error == pytest.approx(0.1 / 3.5)
    assert not cmp.passes(1e-3)
    with pytest.raises(ValueError):
        sp.compare_spectra(a, b, 3)


def test_compare_spectra_zero_reference_uses_absolute_error():
    a = [sp.SpectrumLevel(1e-9, 1, sp.Source.NUMERIC)]
    cmp = sp.compare_spectra(a, sp.exact_spectrum(0, 0), 1)
    assert cmp.rows[0].rel_error == pytest.approx(1e-9)


def test_level_rejects_zero_multiplicity():
    with pytest.raises(ValueError):
        sp.SpectrumLevel(1.0, 0, sp.Source.EXACT)
