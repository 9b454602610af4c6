# SPDX-FileCopyrightText: Copyright (c) 2026 The aerial-forge Authors. All rights reserved.
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import os
import pathlib
import subprocess

import numpy as np
import pytest

import aerial_forge as af

CONFIGS = pathlib.Path(__file__).resolve().parents[2] / "configs"


def test_structured_errors():
    with pytest.raises(af.AerialForgeError) as info:
        af.load_engine(b"junk bytes that are not a blob")
    assert info.value.code == "BadMagic"
    with pytest.raises(af.AerialForgeError) as info:
        af.decompose_prbs(3, [4, 16])
    assert info.value.code == "UnsupportedPrbSize"


def test_blob_roundtrip_and_infer():
    d = af.reference_cnn(1, 24, init="random", seed=3, snr_bucket_db=5, prb_size=4)
    blob = af.serialize_engine(d)
    e = af.load_engine(blob)
    assert af.serialize_engine(e.definition) == blob
    assert e.meta == (5, 4)
    assert e.input_shape == [2, 1, 24]
    x = np.random.default_rng(0).standard_normal((2, 1, 24)).astype(np.float32)
    out = e.infer(x)
    assert set(out) == {"h_denoised", "snr_db"}
    assert out["h_denoised"].shape == (2, 1, 24)
    assert out["snr_db"].shape == (1,)
    again = e.infer(x)
    assert np.array_equal(out["h_denoised"], again["h_denoised"])


def test_identity_reference_reproduces_input():
    e = af.make_engine(af.reference_cnn(2, 6, init="identity", snr_bucket_db=15, prb_size=1))
    x = np.random.default_rng(1).standard_normal((2, 2, 6)).astype(np.float32)
    out = e.infer(x)
    assert np.array_equal(out["h_denoised"], x)
    assert out["snr_db"][0] == 15.0


def test_dense_matches_numpy():
    rng = np.random.default_rng(2)
    m = rng.standard_normal((3, 8)).astype(np.float32)
    b = rng.standard_normal(3).astype(np.float32)
    e = af.make_engine(af.EngineBuilder("x", [8]).dense("d", "input", 8, 3, m, b).output("y", "d", [3]).build())
    x = rng.standard_normal(8).astype(np.float32)
    np.testing.assert_allclose(e.infer(x)["y"], m.astype(np.float64) @ x + b, rtol=1e-5, atol=1e-5)


def test_exported_weights_validate(tmp_path):
    # The trainer's export path: fill weights in layout order, write the blob
    # and goldens computed outside the engine, then validate-blob.
    d = af.reference_cnn(1, 6, init="zero", snr_bucket_db=0, prb_size=1)
    d.weights = np.zeros(len(d.weights), dtype=np.float32)
    blob = tmp_path / "m.aerb"
    blob.write_bytes(af.serialize_engine(d))
    x = np.ones(12, dtype=np.float32)
    golden = af.GoldenVectors([(0, x, np.zeros(12, dtype=np.float32)), (1, x, np.zeros(1, dtype=np.float32))])
    gpath = tmp_path / "m.aergv"
    gpath.write_bytes(golden.to_bytes())
    assert len(af.parse_golden(gpath.read_bytes())) == 2

    report = af.verify_golden(af.load_engine_file(blob), af.load_golden_file(gpath))
    assert report["passed"] and not report["vacuous"]
    code, out, _ = af.run_cli(["validate-blob", "--blob", str(blob), "--golden", str(gpath)])
    assert code == 0 and "overall: PASS" in out

    bad = af.GoldenVectors([(0, x, np.full(12, 0.5, dtype=np.float32))])
    gpath.write_bytes(bad.to_bytes())
    code, out, _ = af.run_cli(["validate-blob", "--blob", str(blob), "--golden", str(gpath)])
    assert code == 4 and "overall: FAIL" in out


def test_dataset_roundtrip(tmp_path):
    path = tmp_path / "d.aeds"
    count, crc = af.generate_dataset(path, 6, seed=4, prb_sizes=[1, 4], snr_db=[40.0])
    assert count == 6
    assert af.generate_dataset(tmp_path / "e.aeds", 6, seed=4, prb_sizes=[1, 4], snr_db=[40.0])[1] == crc
    records = af.read_dataset(path)
    assert len(records) == 6
    for r in records:
        assert r["prb_size"] in (1, 4)
        assert r["ls_input"].shape == (2, 1, 6 * r["prb_size"])
        assert r["target"].shape == r["ls_input"].shape
        # 40 dB: the LS input sits close to the true channel.
        err = np.mean((r["ls_input"] - r["target"]) ** 2)
        assert err < 1e-2 * np.mean(r["target"] ** 2) + 1e-3


def test_bank_yaml_and_cnn_estimate(tmp_path):
    af.write_reference_bank(tmp_path, [-5, 5], [1, 4], time_symbols=1, init="identity", golden_count=2)
    manifest = af.parse_bank_manifest((tmp_path / "bank.yaml").read_text())
    assert manifest["snr_grid"] == [-5, 5]
    assert len(manifest["models"]) == 4
    assert af.parse_bank_manifest(af.format_bank_manifest(manifest)) == manifest

    bank = af.load_bank(tmp_path)
    assert len(bank) == 4
    h = (np.random.default_rng(5).standard_normal((1, 30)) + 1j).astype(np.complex64)
    r = bank.cnn_estimate(h, 0.1)
    assert r["blocks"] == [4, 1]
    assert np.array_equal(r["h"], h)


def test_estimators_on_a_slot():
    s = af.generate_slot(4, 0.0, seed=8)
    h_ls, nv = af.ls_estimate(s["rx_pilots"], s["pilots"])
    np.testing.assert_allclose(h_ls, s["rx_pilots"] / s["pilots"], rtol=1e-6, atol=1e-6)
    assert nv > 0
    assert af.tdl_max_excess_delay("TDL-C", 300e-9) == pytest.approx(2.5957e-6, abs=1e-9)

    ls_err = mmse_err = 0.0
    for seed in range(20):
        s = af.generate_slot(4, 0.0, seed=seed)
        h_ls, _ = af.ls_estimate(s["rx_pilots"], s["pilots"])
        h_mmse = af.mmse_estimate(h_ls, s["noise_var"])
        ls_err += np.mean(np.abs(h_ls - s["h_dmrs"]) ** 2)
        mmse_err += np.mean(np.abs(h_mmse - s["h_dmrs"]) ** 2)
    assert mmse_err < 0.5 * ls_err


def test_sweep_rows():
    rows = af.run_sweep(CONFIGS / "receiver.yaml", slots=2, seed=1, snrs=[0.0, 20.0], kinds=["ls", "perfect"])
    assert [(r["kind"], r["snr_db"]) for r in rows] == [("ls", 0.0), ("ls", 20.0), ("perfect", 0.0), ("perfect", 20.0)]
    for r in rows:
        assert r["slots"] == 2 and 0.0 <= r["ber"] <= 1.0
    assert rows[3]["mse_dmrs"] == 0.0
    assert af.parse_snr_spec("0:10:5") == [0.0, 5.0, 10.0]


@pytest.mark.skipif("AERIAL_FORGE_CLI" not in os.environ, reason="CLI binary not built")
def test_cli_binary(tmp_path):
    cli = os.environ["AERIAL_FORGE_CLI"]
    assert subprocess.run([cli, "--help"], capture_output=True).returncode == 0
    out = tmp_path / "r.csv"
    p = subprocess.run(
        [cli, "simulate", "--manifest", str(CONFIGS / "receiver.yaml"), "--slots", "2", "--snr", "10",
         "--no-timing", "--out", str(out)],
        capture_output=True, text=True)
    assert p.returncode == 0, p.stderr
    lines = out.read_text().splitlines()
    assert lines[0] == "# aerial-forge results v1"
    assert len(lines) == 3
    missing = subprocess.run([cli, "simulate", "--manifest", str(tmp_path / "nope.yaml")], capture_output=True)
    assert missing.returncode == 2
