"""Smoke tests for the python bindings and the CLI."""

import json
import os
import subprocess
from pathlib import Path

import numpy as np
import pytest

import teqsci

DATA = Path(os.environ.get("TEQSCI_TEST_DATA_DIR", "tests/data"))


@pytest.fixture(scope="module")
def h2_table():
    return teqsci.parse_fcidump_file(str(DATA / "h2_sto3g.fcidump"))


@pytest.fixture(scope="module")
def reference():
    with open(DATA / "reference.json") as f:
        return json.load(f)


def test_parse_and_fields(h2_table):
    assert h2_table.n_orbitals == 2
    assert h2_table.n_electrons == 2
    assert h2_table.ms2 == 0
    assert h2_table.h1(0, 0) == pytest.approx(-1.2563391051013919, abs=1e-14)


def test_casci_against_reference(h2_table, reference):
    sol = teqsci.casci(h2_table, 2)
    assert sol.eigenvalues[0] == pytest.approx(reference["h2_sto3g"]["fci"][0], abs=1e-8)
    assert teqsci.hf_energy(h2_table) == pytest.approx(reference["h2_sto3g"]["e_hf"], abs=1e-8)


def test_qsci_full_sector_equals_casci(h2_table):
    basis = teqsci.sector_basis(2, 2, 0)
    configs = teqsci.ConfigurationSet(4)
    for d in basis:
        configs.insert(d, teqsci.TAG_BASELINE)
    result = teqsci.qsci_energies(h2_table, configs, 3)
    sol = teqsci.casci(h2_table, 3)
    assert np.allclose(result.eigenvalues, sol.eigenvalues[:3], atol=1e-10)

    h = teqsci.build_subspace_hamiltonian_dense(h2_table, configs)
    assert np.allclose(h, h.T)
    assert np.linalg.eigvalsh(h)[0] == pytest.approx(sol.eigenvalues[0], abs=1e-10)


def test_jordan_wigner_expectation(h2_table):
    op = teqsci.jordan_wigner(h2_table)
    assert op.is_hermitian()
    hf = teqsci.hf_determinant(2, 2, 0)
    state = teqsci.Statevector.basis_state(hf)
    e = teqsci.expectation(op, state)
    assert e.imag == pytest.approx(0.0, abs=1e-12)
    assert e.real == pytest.approx(teqsci.hf_energy(h2_table), abs=1e-10)


def test_evolution_and_sampling(h2_table):
    op = teqsci.jordan_wigner(h2_table)
    hf = teqsci.hf_determinant(2, 2, 0)
    state = teqsci.Statevector.basis_state(hf)
    plan = teqsci.build_trotter_plan(op, 0.3, 2)
    evolved = teqsci.evolve(state, plan)
    assert evolved.norm_squared() == pytest.approx(1.0, abs=1e-10)
    batch = teqsci.sample(evolved, 500, 42)
    assert sum(c for _, c in batch.outcomes()) == 500
    # Same seed, same outcomes.
    again = teqsci.sample(evolved, 500, 42)
    assert batch.outcomes() == again.outcomes()


def test_spin_augment_and_postselect():
    d = teqsci.Determinant.from_string("1001")
    aug = teqsci.spin_augment(d)
    assert sorted(str(a) for a in aug) == ["0110", "1001"]


def test_oniom_helpers():
    layer = teqsci.LayerEnergies("x", -10.0, -2.0, -2.5)
    assert teqsci.oniom_energy(layer) == pytest.approx(-10.5)
    profile = teqsci.relative_profile([layer, teqsci.LayerEnergies("y", -9.9, -2.0, -2.5)], "x")
    assert profile[0]["delta_ev"] == 0.0
    assert profile[1]["delta_ev"] == pytest.approx(0.1 * teqsci.HARTREE_TO_EV)


def test_pipeline_run_and_recount(tmp_path):
    config = teqsci.RunConfig()
    config.fcidump_path = str(DATA / "h4_chain.fcidump")
    config.output_dir = str(tmp_path / "run")
    config.initial_electrons = 2
    config.initial_orbital_count = 2
    config.dt_grid = [1e-3, 1.0]
    config.shots_per_pair = 150
    config.states = [0, 1]
    config.n_roots = 3
    config.seed = 5
    assert teqsci.validate_config(config) == []
    teqsci.run_pipeline(config)

    out = tmp_path / "run"
    # Independent set-union recount over the JSON lines output.
    union = set()
    per_pair_shots = {}
    with open(out / "shots.jsonl") as f:
        for line in f:
            rec = json.loads(line)
            bits = rec["bitstring"]
            per_pair_shots[(rec["dt"], rec["j"])] = per_pair_shots.get(
                (rec["dt"], rec["j"]), 0) + rec["count"]
            det = teqsci.Determinant.from_string(bits)
            if det.n_electrons() == 4 and det.sz2() == 0:
                union.add(bits)
                union.update(str(a) for a in teqsci.spin_augment(det))
    assert all(v == 150 for v in per_pair_shots.values())

    configs = json.loads((out / "configurations.json").read_text())
    members = {m["bits"] for m in configs["members"]}
    baseline = {m["bits"] for m in configs["members"] if "baseline" in m["tags"]}
    assert members == baseline | union

    subspace = json.loads((out / "subspace.json").read_text())
    assert len(subspace["eigenvalues"]) == 3
    metrics = json.loads((out / "metrics.json").read_text())
    labels = [r["label"] for r in metrics["rows"]]
    assert any(l.startswith("TE-QSCI") for l in labels)


def test_cli_validate_and_report(tmp_path):
    cli = os.environ.get("TEQSCI_CLI")
    if not cli:
        pytest.skip("CLI path not provided")
    proc = subprocess.run(
        [cli, "validate", "--fcidump", str(DATA / "h4_chain.fcidump"),
         "--initial-size", "2,2"],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "OK" in proc.stdout

    proc = subprocess.run(
        [cli, "validate", "--fcidump", "/nonexistent"],
        capture_output=True, text=True)
    assert proc.returncode == 2

    proc = subprocess.run(
        [cli, "report", "--fixtures", str(DATA / "table1_fixture.json"),
         "--out", str(tmp_path)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    te_rows = [r for r in metrics["rows"] if r["label"] == "TE-QSCI(8,8)"]
    assert len(te_rows) == 1
    assert te_rows[0]["e_corr_ev"] == pytest.approx(-0.69, abs=1e-9)
    assert te_rows[0]["delta_e_ev"][0] == pytest.approx(1.23, abs=1e-9)
    assert te_rows[0]["delta_e_ev"][1] == pytest.approx(1.27, abs=1e-9)
