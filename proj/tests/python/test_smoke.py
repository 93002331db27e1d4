# Copyright 2026 The ssm-dyn Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import numpy as np
import pytest

import ssmdyn


def test_kron_vec_rule():
    rng = np.random.default_rng(1)
    a, x, b = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3))
    lhs = ssmdyn.vec(a @ x @ b)
    rhs = ssmdyn.kron(b.T, a) @ ssmdyn.vec(x)
    assert np.allclose(lhs, rhs)
    assert np.allclose(ssmdyn.unvec(ssmdyn.vec(x), 3), x)


def test_expm_pauli():
    sx = ssmdyn.pauli("x")
    u = ssmdyn.expm(-0.5j * np.pi * sx)
    assert np.allclose(u, -1j * sx)


def test_ssm_dimensions():
    for model, dim in ((ssmdyn.dfs4_model("x"), 14), (ssmdyn.ns3_model(), 5)):
        l0, _ = model.assemble()
        s = ssmdyn.kernel_projector(l0)
        assert s["ssm_dim"] == dim
        assert abs(np.trace(s["p0"]).real - dim) < 1e-8
        assert np.allclose(s["p0"] @ s["p0"], s["p0"], atol=1e-10)


def test_gate_identity():
    b = ssmdyn.logical_basis_j0()
    h = ssmdyn.dfs_gate_hamiltonian("z")
    assert np.allclose(b.conj().T @ h @ b, ssmdyn.pauli("z"), atol=1e-10)


def test_ns3_sweep_slope():
    model = ssmdyn.ns3_model()
    grid = ssmdyn.default_grid()
    recs = ssmdyn.run_sweep(model, grid, threads=2)
    assert len(recs) == len(grid)
    fit = ssmdyn.loglog_fit([r["T"] for r in recs], [r["distance"] for r in recs], 4)
    assert abs(fit["slope"] - 1.0) < 0.1


def test_spin_boson_projection():
    sb = ssmdyn.spin_boson_model(3, 6)
    dark = sum(np.outer(v, v.conj()) for v in sb["dark_states"])
    assert np.allclose(sb["h0"] @ dark, 0, atol=1e-10)
    assert np.allclose(dark @ sb["h1"] @ dark, sb["analytic_projection"], atol=1e-10)


def test_scenario_report(tmp_path):
    report = ssmdyn.run_scenario("second_order", out_dir=tmp_path)
    assert all(c["passed"] for c in report["checks"])
    assert (tmp_path / "manifest.json").exists()
    recs = ssmdyn.read_sweep_csv(tmp_path / "second_order.csv")
    assert len(recs) == 8


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        ssmdyn.validate_scenario("nonsense")
    with pytest.raises(ValueError):
        ssmdyn.pauli("w")
