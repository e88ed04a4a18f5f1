"""Command line entry point: config file in, CSV curves and manifest out.

Exit codes: 0 for a clean run, 1 when the experiment ran but a certified
check failed, 2 for configuration or environment errors.  All output files
other than the manifest are deterministic functions of the effective
config; the manifest records the config digest, seed, backend, and wall
clock timestamps.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from ._kernels import BACKEND
from .errors import SchemaError, TreegreenError
from .experiments import EXPERIMENTS, ExperimentConfig, run_experiment
from .model import (Bernoulli, Cauchy, Constant, DisorderSpec, Gaussian,
                    PotentialSpec, TreeParams, Uniform)

ARTIFACT_VERSION = 1

_DIST_FIELDS = {
    "uniform": (Uniform, {"low": -1.0, "high": 1.0}),
    "cauchy": (Cauchy, {"scale": 1.0}),
    "gaussian": (Gaussian, {"mean": 0.0, "sd": 1.0}),
    "bernoulli": (Bernoulli, {"p": 0.5}),
    "constant": (Constant, {"value": 0.0}),
}


def _fail(path: str, why: str):
    raise SchemaError(f"{path}: {why}")


def _check_keys(doc: dict, path: str, allowed: set[str]):
    for key in doc:
        if key not in allowed:
            _fail(f"{path}.{key}" if path else key, "unknown field")


def _get_number(doc: dict, path: str, key: str, default=None):
    if key not in doc:
        if default is None:
            _fail(f"{path}.{key}", "required number missing")
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(f"{path}.{key}", f"expected a number, got {type(v).__name__}")
    return float(v)


def _get_int(doc: dict, path: str, key: str, default=None):
    if key not in doc:
        if default is None:
            _fail(f"{path}.{key}", "required integer missing")
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(f"{path}.{key}", f"expected an integer, got {type(v).__name__}")
    return v


def _get_list(doc: dict, path: str, key: str, default):
    if key not in doc:
        return default
    v = doc[key]
    if not isinstance(v, list):
        _fail(f"{path}.{key}" if path else key,
              f"expected a list, got {type(v).__name__}")
    return v


def _number_list(raw, path: str) -> tuple[float, ...]:
    out = []
    for i, v in enumerate(raw):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            _fail(f"{path}[{i}]", "expected a number")
        out.append(float(v))
    return tuple(out)


def _parse_distribution(doc, path: str):
    if not isinstance(doc, dict):
        _fail(path, "expected a distribution object")
    name = doc.get("name")
    if name not in _DIST_FIELDS:
        _fail(f"{path}.name",
              f"expected one of {sorted(_DIST_FIELDS)}, got {name!r}")
    cls, fields = _DIST_FIELDS[name]
    _check_keys(doc, path, {"name", *fields})
    kwargs = {k: _get_number(doc, path, k, default) for k, default in
              fields.items()}
    return cls(**kwargs)


def _parse_disorder(doc, path: str) -> DisorderSpec:
    if not isinstance(doc, dict):
        _fail(path, "expected an object")
    _check_keys(doc, path, {"distribution", "correlation", "components",
                            "kappa"})
    corr = doc.get("correlation", "iid")
    if not isinstance(corr, str):
        _fail(f"{path}.correlation", "expected a string")
    components = None
    if "components" in doc:
        raw = doc["components"]
        if not isinstance(raw, list) or not raw:
            _fail(f"{path}.components", "expected a nonempty list")
        comps = []
        for i, item in enumerate(raw):
            if not (isinstance(item, list) and len(item) == 2):
                _fail(f"{path}.components[{i}]",
                      "expected a [weight, distribution] pair")
            w = item[0]
            if isinstance(w, bool) or not isinstance(w, (int, float)):
                _fail(f"{path}.components[{i}][0]", "expected a number")
            comps.append((float(w), _parse_distribution(
                item[1], f"{path}.components[{i}][1]")))
        components = tuple(comps)
    dist = _parse_distribution(doc["distribution"],
                               f"{path}.distribution") \
        if "distribution" in doc else (components[0][1] if components
                                       else Uniform(-1.0, 1.0))
    kappa = None
    if "kappa" in doc:
        kappa = _get_number(doc, path, "kappa")
    return DisorderSpec(dist, corr, components, kappa)


_TOP_KEYS = {
    "experiment", "tree", "potential", "energy_grid", "eta_schedule",
    "lambda_schedule", "interval", "pool_size", "replicas", "alphas", "seed",
    "warmup", "average_generations", "chain_depth", "chain_count",
    "tail_exponent", "tail_threshold", "_corrupt_bound_factor",
}


def parse_config(doc: dict) -> ExperimentConfig:
    """Validate a config document and build the experiment configuration.

    Raises SchemaError with a dotted field path for shape problems; the
    model layer raises RangeError and friends for out-of-range values.
    """
    if not isinstance(doc, dict):
        _fail("", "config must be a JSON object")
    _check_keys(doc, "", _TOP_KEYS)

    exp = doc.get("experiment")
    if exp not in EXPERIMENTS:
        _fail("experiment",
              f"expected one of {sorted(EXPERIMENTS)}, got {exp!r}")

    tree_doc = doc.get("tree")
    if not isinstance(tree_doc, dict):
        _fail("tree", "required object missing")
    _check_keys(tree_doc, "tree", {"branching", "period"})
    branching = _get_int(tree_doc, "tree", "branching")

    pot_doc = doc.get("potential", {})
    if not isinstance(pot_doc, dict):
        _fail("potential", "expected an object")
    _check_keys(pot_doc, "potential", {"u", "coupling", "disorder"})
    u = _number_list(_get_list(pot_doc, "potential", "u", [0.0]),
                     "potential.u")
    if not u:
        _fail("potential.u", "must be nonempty")
    coupling = _get_number(pot_doc, "potential", "coupling", 0.0)
    disorder = _parse_disorder(pot_doc.get("disorder", {}),
                               "potential.disorder")
    period = _get_int(tree_doc, "tree", "period", len(u))
    if period != len(u):
        _fail("tree.period", f"period {period} does not match the "
              f"{len(u)} background values")

    grid_doc = doc.get("energy_grid", {})
    if not isinstance(grid_doc, dict):
        _fail("energy_grid", "expected an object")
    _check_keys(grid_doc, "energy_grid", {"min", "max", "points"})
    emin = _get_number(grid_doc, "energy_grid", "min") \
        if "min" in grid_doc else None
    emax = _get_number(grid_doc, "energy_grid", "max") \
        if "max" in grid_doc else None
    points = _get_int(grid_doc, "energy_grid", "points", 512)

    etas = _number_list(_get_list(doc, "", "eta_schedule", [1e-3]),
                        "eta_schedule")
    lams = _number_list(_get_list(doc, "", "lambda_schedule", []),
                        "lambda_schedule")
    interval = _number_list(_get_list(doc, "", "interval", [-1.0, 1.0]),
                            "interval")
    if len(interval) != 2:
        _fail("interval", "expected [lo, hi]")
    alphas = _number_list(_get_list(doc, "", "alphas", [0.1, 0.25]), "alphas")

    hook = None
    if "_corrupt_bound_factor" in doc:
        hook = _get_number(doc, "", "_corrupt_bound_factor")

    params = TreeParams(branching, depth=0, period=period)
    pot = PotentialSpec(u, disorder, coupling)
    return ExperimentConfig(
        experiment=exp,
        tree=params,
        potential=pot,
        energy_min=emin,
        energy_max=emax,
        energy_points=points,
        eta_schedule=etas,
        lambda_schedule=lams,
        interval=(interval[0], interval[1]),
        pool_size=_get_int(doc, "", "pool_size", 100_000),
        replicas=_get_int(doc, "", "replicas", 8),
        alphas=alphas,
        seed=_get_int(doc, "", "seed", 0),
        warmup=_get_int(doc, "", "warmup", -1) if "warmup" in doc else None,
        average_generations=_get_int(doc, "", "average_generations", -1)
        if "average_generations" in doc else None,
        chain_depth=_get_int(doc, "", "chain_depth", 400),
        chain_count=_get_int(doc, "", "chain_count", 4000),
        tail_exponent=_get_number(doc, "", "tail_exponent", 0.5),
        tail_threshold=_get_number(doc, "", "tail_threshold", 10.0),
        corrupt_bound_factor=hook,
    )


def config_digest(doc: dict) -> str:
    """Digest of the canonical JSON form of a config document."""
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    experiment: str
    config_digest: str
    seed: int
    started: str
    finished: str
    package_version: str
    backend: str
    artifact_version: int
    outputs: tuple[str, ...]
    checks_passed: bool | None
    summary: dict

    def to_json(self) -> dict:
        return {
            "experiment": self.experiment,
            "config_digest": self.config_digest,
            "seed": self.seed,
            "started": self.started,
            "finished": self.finished,
            "package_version": self.package_version,
            "backend": self.backend,
            "artifact_version": self.artifact_version,
            "outputs": list(self.outputs),
            "checks_passed": self.checks_passed,
            "summary": self.summary,
        }


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def run(doc: dict, out_dir, threads: int = 1) -> tuple[int, RunManifest]:
    """Parse, run, and write the manifest.  Returns (exit_code, manifest)."""
    from . import __version__

    cfg = parse_config(doc)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = _now()
    result = run_experiment(cfg, out, threads)
    manifest = RunManifest(
        experiment=cfg.experiment,
        config_digest=config_digest(doc),
        seed=cfg.seed,
        started=started,
        finished=_now(),
        package_version=__version__,
        backend=BACKEND,
        artifact_version=ARTIFACT_VERSION,
        outputs=result.files,
        checks_passed=result.checks_passed,
        summary=result.summary,
    )
    (out / "manifest.json").write_text(
        json.dumps(manifest.to_json(), indent=2, sort_keys=True) + "\n")
    code = 1 if result.checks_passed is False else 0
    return code, manifest


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="treegreen",
        description="Resolvent experiments on regular trees")
    parser.add_argument("--config", required=True,
                        help="path to a JSON config file")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads (never affects results)")
    args = parser.parse_args(argv)

    try:
        doc = json.loads(Path(args.config).read_text())
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        if not isinstance(doc, dict):
            print("error: config must be a JSON object", file=sys.stderr)
            return 2
        doc = {**doc, "seed": args.seed}

    try:
        code, manifest = run(doc, args.out, max(1, args.threads))
    except TreegreenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return 2
    for name in manifest.outputs:
        print(f"wrote {Path(args.out) / name}")
    print(f"wrote {Path(args.out) / 'manifest.json'}")
    if manifest.checks_passed is None:
        print("checks: none")
    else:
        print(f"checks: {'passed' if manifest.checks_passed else 'FAILED'}")
    return code


if __name__ == "__main__":
    sys.exit(main())
