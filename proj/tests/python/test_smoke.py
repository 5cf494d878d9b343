import math

import numpy as np
import pytest

import mipt


def test_vertex_invariants():
    for c, e_p, g_t in [
        (mipt.cartan.IDENTITY, 0.0, 0.0),
        (mipt.cartan.CNOT, 2 / 3, 1 / 3),
        (mipt.cartan.ISWAP, 2 / 3, 2 / 3),
        (mipt.cartan.SWAP, 0.0, 1.0),
    ]:
        inv = mipt.invariants_from_cartan(c)
        assert inv.e_p == pytest.approx(e_p, abs=1e-10)
        assert inv.g_t == pytest.approx(g_t, abs=1e-10)
        from_matrix = mipt.invariants_from_gate(mipt.cartan_gate(c))
        assert from_matrix.e_p == pytest.approx(e_p, abs=1e-10)


def test_gate_matrix_and_schmidt():
    u = mipt.cartan_gate(mipt.cartan.CNOT)
    assert u.shape == (4, 4)
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12)
    assert np.allclose(mipt.operator_schmidt(u), [2, 2, 0, 0], atol=1e-10)
    assert np.allclose(mipt.operator_schmidt(np.eye(4, dtype=complex)), [4, 0, 0, 0], atol=1e-10)


def test_inverse_map_and_errors():
    c = mipt.cartan_from_invariants(0.5, 0.5)
    assert c.as_tuple() == pytest.approx((math.pi / 4,) * 3, abs=1e-10)
    with pytest.raises(mipt.MiptError) as err:
        mipt.cartan_from_invariants(0.7, 0.5)
    assert err.value.code == "outside_region"


def test_gate_info_dict():
    info = mipt.gate_info(cartan=(math.pi / 2, math.pi / 2, 0))
    assert info["dual_unitary"] is True
    assert info["e_p"] == pytest.approx(2 / 3)
    assert mipt.gate_info(e_p=0.5, g_t=0.5)["cartan"] == pytest.approx([math.pi / 4] * 3)


def test_analytics():
    assert mipt.page_entropy(1, 1) == pytest.approx(1 / 3, rel=1e-15)
    assert mipt.measurement_only_entropy(3, 0.0, 10) == mipt.page_entropy(3, 3)
    total = sum(mipt.unmeasured_probability(5, k, 0.2, 4) for k in range(6))
    assert total == pytest.approx(1.0, abs=1e-12)
    table = mipt.analytic_csv(2, [1], [0.0, 1.0])
    assert table.splitlines()[0] == "N,t,p,entropy_nats"


def test_sweep_is_deterministic_and_round_trips(tmp_path):
    kwargs = dict(p_grid=[0.0, 0.3], n_traj=8, master_seed=3)
    a = mipt.sweep(6, mipt.cartan.ISWAP, workers=1, **kwargs)
    b = mipt.sweep(6, mipt.cartan.ISWAP, workers=2, **kwargs)
    assert a == b
    assert len(a) == 2 and a.n_traj == 8
    path = tmp_path / "curve_L6.csv"
    mipt.write_curve_csv(path, a)
    assert mipt.read_curve_csv(path) == a
    assert mipt.EntropyCurve.from_csv(a.to_csv()) == a


def test_trajectory_record():
    rec = mipt.run_trajectory(4, mipt.cartan.CNOT, 0.2, t_steps=3, seed=9, record_timeseries=True)
    assert len(rec["entropy_series"]) == 3
    assert rec["final_entropy"] == rec["entropy_series"][-1]


def test_run_experiment(tmp_path):
    spec = {"name": "tiny", "gate": {"cartan": [0, 0, 0]}, "sizes": [4], "p_grid": [0.0, 0.5],
            "n_traj": 5, "master_seed": 2}
    curves = mipt.run_experiment(spec, tmp_path)
    assert [c.L for c in curves] == [4]
    assert (tmp_path / "spec.json").exists()
    assert (tmp_path / "curve_L4.csv").exists()
    assert mipt.run_experiment(spec, tmp_path, reuse=True)[0] == curves[0]


def synthetic_curves():
    curves = []
    for L in (6, 8, 10, 12):
        c = mipt.EntropyCurve()
        c.L = L
        c.n_traj = 1
        c.p_values = [0.03 * i for i in range(21)]
        c.mean_entropy = [math.log(L) + 1 - math.tanh((p - 0.3) * math.sqrt(L)) for p in c.p_values]
        c.std_err = [0.01] * 21
        c.std_dev = [0.01] * 21
        curves.append(c)
    return curves


def test_fit_collapse():
    curves = synthetic_curves()
    fit = mipt.fit_collapse(curves, n_bootstrap=5, seed=1)
    assert fit.p_c == pytest.approx(0.3, abs=0.01)
    assert fit.nu == pytest.approx(2.0, abs=0.2)
    assert fit.sizes_used == [6, 8, 10, 12]
    assert mipt.collapse_quality(curves, 0.3, 2.0) < 1e-2
    assert mipt.crossing_estimate(curves)["p_c_approx"] == pytest.approx(0.3, abs=0.01)
    assert mipt.collapsed_points_csv(curves, 0.3, 2.0).startswith("L,p,x,y,std_err\n")
    with pytest.raises(mipt.MiptError) as err:
        mipt.fit_collapse(curves[:2])
    assert err.value.code == "degenerate_fit"
