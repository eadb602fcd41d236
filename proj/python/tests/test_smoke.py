# Copyright 2026 The qtem Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math
import pathlib

import pytest

import qtem

NETLISTS = pathlib.Path(__file__).resolve().parents[2] / "data" / "netlists"


def test_constants():
    k = qtem.constants()
    assert k["version"] == "CODATA-2018"
    assert math.isclose(k["phi0"], k["h"] / (2 * k["e"]), rel_tol=1e-15)


def test_units():
    assert math.isclose(qtem.parse_as("100fF", "F"), 1e-13, rel_tol=1e-15)
    with pytest.raises(qtem.ValidationError):
        qtem.parse_as("1", "F")
    with pytest.raises(ValueError):
        qtem.parse_as("1nH", "F")


def test_oscillator_spectrum():
    k = qtem.constants()
    s = qtem.spectrum((NETLISTS / "lc.net").read_text(), levels=3)
    hw = k["hbar"] / math.sqrt(1e-9 * 1e-12)
    for n, e in enumerate(s["energies"]):
        assert abs(e / (hw * (n + 0.5)) - 1) < 1e-6
    assert s["parities"] == ["even", "odd", "even"]
    assert len(s["wavefunctions"][0]) == len(s["phi"])
    assert s["double_well"] is None


def test_flux_qubit():
    s = qtem.spectrum((NETLISTS / "flux_qubit.net").read_text(), levels=2, half_flux=True)
    assert s["parities"] == ["even", "odd"]
    dw = s["double_well"]
    assert dw["splitting"] > 0
    assert 0.7 < dw["delta_phi"] / qtem.constants()["phi0"] < 0.75


def test_washboard():
    ej = 1e-22
    w = qtem.washboard(ej, 1e-15, 0.0)
    assert math.isclose(w["barrier_height"], 2 * ej, rel_tol=1e-14)
    assert qtem.washboard(ej, 1e-15, qtem.critical_current(ej))["barrier_height"] <= 2e-9 * ej


def test_dispersive():
    r = qtem.dispersive(5e9, 6e9, 0.01, 20)
    assert abs(r["measured_shift_per_photon"] / (2 * 0.01**2 * r["delta"]) - 1) < 1e-9
    sweep = qtem.dispersive_sweep(5e9, 6e9, [1e-3, 1e-2, 1e-1], 8)
    assert abs(sweep["transform_slope"] - 3) < 0.1
    with pytest.raises(qtem.ValidationError):
        qtem.dispersive(5e9, 6e9, 0.2, 20)


def test_optics():
    k = qtem.constants()
    e100 = 100 * k["e"]
    d = qtem.magnetic_deflection(e100, 1e-6, k["phi0"], drift=0.1)
    assert d["ratio"] == 0.5
    assert abs(d["theta"] - 6.13e-5) < 1e-7
    assert abs(qtem.photons_for_magnetic(k["Z0"]) - 215.26) < 0.01
    beta = qtem.electron_kinematics(300e3 * k["e"])["beta"]
    assert abs(qtem.photons_for_electric(k["Z0"], beta)["ratio_to_magnetic"] - beta**2) < 1e-12
    r = qtem.radiation_budget(300, 60, 1e-10)
    assert abs(r["hole_flux"] * 1e9 - 45.93) < 0.01
    assert r["shield_factor"] == pytest.approx(625)


def test_protocol():
    for k in (1, 5, 10):
        e = qtem.enumerate_outcomes(k, 0.3)
        assert abs(e["p_one"] - math.sin(k * 0.3 / 2) ** 2) < 1e-12
    mc = qtem.monte_carlo(10, 0.3, trials=20000, seed=1)
    sigma = math.sqrt(mc["analytic_p"] * (1 - mc["analytic_p"]) / mc["completed"])
    assert abs(mc["detect_freq"] - mc["analytic_p"]) < 4 * sigma
    assert mc["rng_algorithm"] == "philox4x32-10"
    assert qtem.monte_carlo(6, 0.2, trials=5000, seed=3, workers=1) == qtem.monte_carlo(
        6, 0.2, trials=5000, seed=3, workers=2, range_size=65536
    )
    assert qtem.cnot_role_reversal_error() <= 1e-15


def test_cli():
    code, out, _ = qtem.run_cli(["--format", "json", "qnd-check"])
    assert code == 0
    assert json.loads(out)["max_elementwise_error"] <= 1e-15
    code, _, err = qtem.run_cli(["scan", "--param", "nope", "--from", "1", "--to", "2"])
    assert code == 2
    assert "unknown sweep parameter" in err
