import math

import numpy as np
import pytest

import semdot


def test_element_stiffness_symmetric_and_pinned_entry():
    ke = semdot.element_stiffness_q4(semdot.MaterialModel(E1=1.0, nu=0.3))
    assert ke.shape == (8, 8)
    assert np.allclose(ke, ke.T, atol=1e-14)
    assert math.isclose(ke[0, 0], (0.5 - 0.3 / 6) / (1 - 0.09), rel_tol=1e-12)
    # rigid x-translation is a zero-energy mode
    t = np.zeros(8)
    t[0::2] = 1.0
    assert np.max(np.abs(ke @ t)) < 1e-12


def test_filter_partition_of_unity():
    f = semdot.Filter(6, 4, rmin=2.0, upsilon=1.0)
    x = np.full((4, 6), 0.37)
    assert np.allclose(f.apply(x, 6, 4), 0.37, atol=1e-13)
    rho = f.nodal_densities(x, 6, 4)
    assert rho.shape == (5, 7)
    assert np.allclose(rho, 0.37, atol=1e-13)


def test_heaviside_projection_values():
    assert semdot.heaviside_step(0.5, 0.5) == pytest.approx(1e-3)
    assert semdot.heaviside_smooth(1.0, 0.4, 2.0) == 1.0
    assert semdot.heaviside_smooth(0.5, 0.5, 7.0) == pytest.approx(0.5)


def test_bisect_threshold_hits_volume_target():
    rho = np.full((9, 13), 0.55)
    out = semdot.bisect_threshold(rho, vstar=0.3, beta=3.0)
    assert out["volume"] == pytest.approx(0.3, abs=1e-4)
    assert out["x_new"].shape == (8, 12)
    assert 0.0 <= out["psi"] <= 1.0


def test_extract_boundary_closed_loop():
    rho = np.full((7, 7), 1e-3)
    rho[2:5, 2:5] = 1.0
    lines = semdot.extract_boundary(rho, psi=0.5, grid_n=6)
    assert len(lines) == 1
    points, closed = lines[0]
    assert closed
    assert points.shape[1] == 2


def test_run_small_problem(tmp_path):
    out = semdot.run("deep-beam", out_dir=str(tmp_path), nx=18, ny=9, rmin=1.5, max_iter=12)
    assert out["iterations"] == 12
    assert out["x_new"].shape == (9, 18)
    vol = out["history"]["volume"]
    assert np.all(np.abs(vol - 0.3) <= 1e-4)
    for name in ["history.csv", "design.txt", "design.vti", "boundary.svg", "run.json"]:
        assert (tmp_path / name).exists()


def test_run_rejects_bad_config():
    with pytest.raises(semdot.SemdotError):
        semdot.run("deep-beam", upsilon=0.5, max_iter=2)
    with pytest.raises(semdot.SemdotError):
        semdot.run("not-a-preset", max_iter=2)
