"""Config parsing, digests, manifest, and process exit codes."""

import json

import pytest

from treegreen.cli import (RunManifest, config_digest, main, parse_config, run)
from treegreen.errors import RangeError, SchemaError
from treegreen.model import Cauchy, Constant, Uniform

_MINIMAL = {"experiment": "dos", "tree": {"branching": 2},
            "potential": {"u": [0]}}


def _doc(**overrides):
    doc = json.loads(json.dumps(_MINIMAL))
    doc.update(overrides)
    return doc


# ---------------------------------------------------------------------------
# parsing and defaults
# ---------------------------------------------------------------------------

def test_minimal_config_defaults():
    cfg = parse_config(_doc())
    assert cfg.experiment == "dos"
    assert cfg.tree.branching == 2
    assert cfg.tree.period == 1
    assert cfg.potential.periodic_values == (0.0,)
    assert cfg.potential.coupling == 0.0
    assert cfg.potential.disorder.distribution == Uniform(-1.0, 1.0)
    assert cfg.potential.disorder.correlation == "iid"
    assert cfg.energy_points == 512
    assert cfg.eta_schedule == (1e-3,)
    assert cfg.lambda_schedule == ()
    assert cfg.pool_size == 100_000
    assert cfg.replicas == 8
    assert cfg.alphas == (0.1, 0.25)
    assert cfg.seed == 0
    assert cfg.warmup is None
    assert cfg.average_generations is None


def test_parse_full_document():
    doc = _doc(
        potential={"u": [0.5, -0.5], "coupling": 0.2,
                   "disorder": {"distribution": {"name": "cauchy",
                                                 "scale": 2.0}}},
        tree={"branching": 3, "period": 2},
        energy_grid={"min": -4, "max": 4, "points": 33},
        eta_schedule=[1e-2, 1e-3], lambda_schedule=[0.5, 0.1],
        interval=[-0.5, 0.5], pool_size=5000, replicas=4,
        alphas=[0.5], seed=11, warmup=100, average_generations=3,
        chain_depth=200, chain_count=900,
        tail_exponent=0.75, tail_threshold=5.0)
    cfg = parse_config(doc)
    assert cfg.tree.branching == 3
    assert cfg.potential.periodic_values == (0.5, -0.5)
    assert cfg.potential.disorder.distribution == Cauchy(2.0)
    assert cfg.energy_min == -4.0 and cfg.energy_max == 4.0
    assert cfg.energy_points == 33
    assert cfg.eta_schedule == (1e-2, 1e-3)
    assert cfg.lambda_schedule == (0.5, 0.1)
    assert cfg.interval == (-0.5, 0.5)
    assert cfg.warmup == 100
    assert cfg.average_generations == 3
    assert cfg.chain_depth == 200 and cfg.chain_count == 900
    assert cfg.tail_exponent == 0.75 and cfg.tail_threshold == 5.0


def test_parse_mixture_components():
    doc = _doc(potential={"u": [0], "disorder": {
        "correlation": "mixture",
        "kappa": 0.5,
        "components": [[0.5, {"name": "constant", "value": 1}],
                       [0.5, {"name": "constant", "value": -1}]]}})
    spec = parse_config(doc).potential.disorder
    assert spec.correlation == "mixture"
    assert spec.components == ((0.5, Constant(1.0)), (0.5, Constant(-1.0)))
    assert spec.declared_kappa == 0.5


def test_corrupt_hook_passthrough():
    cfg = parse_config(_doc(_corrupt_bound_factor=1e-8))
    assert cfg.corrupt_bound_factor == 1e-8
    assert parse_config(_doc()).corrupt_bound_factor is None


@pytest.mark.parametrize("mutate, path", [
    (lambda d: d.update(bogus=1), "bogus"),
    (lambda d: d.update(experiment="nope"), "experiment"),
    (lambda d: d.pop("tree"), "tree"),
    (lambda d: d["tree"].pop("branching"), "tree.branching"),
    (lambda d: d["tree"].update(period=3), "tree.period"),
    (lambda d: d.update(pool_size=True), "pool_size"),
    (lambda d: d.update(tail_exponent=True), "tail_exponent"),
    (lambda d: d.update(eta_schedule=[1e-3, "x"]), "eta_schedule[1]"),
    (lambda d: d.update(interval=[1.0]), "interval"),
    (lambda d: d["potential"].update(disorder={"distribution":
                                               {"name": "nope"}}),
     "potential.disorder.distribution.name"),
    (lambda d: d["potential"].update(disorder={"components": [[0.5]]}),
     "potential.disorder.components[0]"),
])
def test_schema_errors_carry_dotted_paths(mutate, path):
    doc = _doc()
    mutate(doc)
    with pytest.raises(SchemaError) as err:
        parse_config(doc)
    assert path in str(err.value)


def test_unknown_experiment_lists_known_names():
    with pytest.raises(SchemaError) as err:
        parse_config(_doc(experiment="nope"))
    msg = str(err.value)
    for name in ("cauchy_oracle", "continuity", "dos", "fluctuation_suite",
                 "radial_contrast"):
        assert name in msg


def test_out_of_range_values_raise_model_errors():
    with pytest.raises(RangeError):
        parse_config(_doc(tree={"branching": 1}))
    with pytest.raises(RangeError):
        parse_config(_doc(replicas=1))


# ---------------------------------------------------------------------------
# digest and manifest
# ---------------------------------------------------------------------------

def test_config_digest_key_order_invariant():
    a = config_digest({"a": 1, "b": [1, 2]})
    b = config_digest({"b": [1, 2], "a": 1})
    assert a == b
    assert len(a) == 64
    assert config_digest({"a": 2, "b": [1, 2]}) != a


def test_manifest_json_fields():
    m = RunManifest("dos", "d" * 64, 0, "t0", "t1", "0.0", "python", 1,
                    ("dos.csv",), None, {"points": 1})
    doc = m.to_json()
    assert set(doc) == {"experiment", "config_digest", "seed", "started",
                        "finished", "package_version", "backend",
                        "artifact_version", "outputs", "checks_passed",
                        "summary"}
    assert doc["outputs"] == ["dos.csv"]
    json.dumps(doc)


# ---------------------------------------------------------------------------
# whole runs through main()
# ---------------------------------------------------------------------------

_DOS_FREE = {"experiment": "dos", "tree": {"branching": 2},
             "potential": {"u": [0]},
             "energy_grid": {"min": -3, "max": 3, "points": 7}}

_FLUCT = {"experiment": "fluctuation_suite", "tree": {"branching": 2},
          "potential": {"u": [0], "disorder": {"distribution":
                                               {"name": "uniform"}}},
          "energy_grid": {"min": -1, "max": 1, "points": 2},
          "eta_schedule": [1e-2], "lambda_schedule": [0.3],
          "pool_size": 20000, "replicas": 2, "alphas": [0.1, 0.25],
          "seed": 3, "warmup": 200, "average_generations": 2}


def _write_config(tmp_path, doc):
    p = tmp_path / "config.json"
    p.write_text(json.dumps(doc))
    return p


def test_main_success_writes_manifest(tmp_path, capsys):
    cfg = _write_config(tmp_path, _DOS_FREE)
    out = tmp_path / "out"
    assert main(["--config", str(cfg), "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "checks: none" in stdout
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["experiment"] == "dos"
    assert manifest["artifact_version"] == 1
    assert manifest["backend"] in ("python", "cython")
    assert manifest["config_digest"] == config_digest(_DOS_FREE)
    assert manifest["checks_passed"] is None
    assert sorted(manifest["outputs"]) == ["bands.csv", "dos.csv"]
    for name in manifest["outputs"]:
        assert (out / name).exists()


def test_main_failed_checks_exit_one(tmp_path, capsys):
    doc = dict(_FLUCT, _corrupt_bound_factor=1e-8)
    cfg = _write_config(tmp_path, doc)
    out = tmp_path / "out"
    assert main(["--config", str(cfg), "--out", str(out)]) == 1
    assert "checks: FAILED" in capsys.readouterr().out
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["checks_passed"] is False


def test_main_missing_config_file(tmp_path, capsys):
    code = main(["--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "out")])
    assert code == 2
    assert "cannot read config" in capsys.readouterr().err


def test_main_invalid_json(tmp_path, capsys):
    p = tmp_path / "config.json"
    p.write_text("{not json")
    assert main(["--config", str(p), "--out", str(tmp_path / "out")]) == 2
    assert "not valid JSON" in capsys.readouterr().err


def test_main_schema_error_exit_two(tmp_path, capsys):
    cfg = _write_config(tmp_path, _doc(experiment="nope"))
    assert main(["--config", str(cfg), "--out", str(tmp_path / "out")]) == 2
    assert "error:" in capsys.readouterr().err


def test_main_unwritable_out_dir(tmp_path, capsys):
    cfg = _write_config(tmp_path, _DOS_FREE)
    blocker = tmp_path / "blocker"
    blocker.write_text("a regular file")
    # the output path runs through a regular file, so mkdir cannot succeed
    out = blocker / "out"
    assert main(["--config", str(cfg), "--out", str(out)]) == 2
    assert "cannot write outputs" in capsys.readouterr().err


def test_main_seed_override_changes_digest(tmp_path):
    cfg = _write_config(tmp_path, _DOS_FREE)
    a, b = tmp_path / "a", tmp_path / "b"
    main(["--config", str(cfg), "--out", str(a)])
    main(["--config", str(cfg), "--out", str(b), "--seed", "7"])
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    assert ma["seed"] == 0 and mb["seed"] == 7
    assert ma["config_digest"] != mb["config_digest"]
    assert mb["config_digest"] == config_digest({**_DOS_FREE, "seed": 7})


def test_run_function_returns_code_and_manifest(tmp_path):
    code, manifest = run(_DOS_FREE, tmp_path / "out")
    assert code == 0
    assert manifest.checks_passed is None
    assert manifest.experiment == "dos"
