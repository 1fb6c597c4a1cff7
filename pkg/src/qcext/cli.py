"""Command line front end.

Every subcommand reads a JSON config, runs deterministically for a fixed
(config, seed) pair, and emits one JSON report.  The `results` section is
byte-identical across reruns; wall-clock timings live outside it.  Exit
codes: 0 success, 1 a check or verification failed, 2 config/schema
problems, 3 a search budget ran out (a partial report is still written).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .coeffs import ModuleVector, TrivialReals
from .embedding import SearchBudget, calibrate_c, seeded_rng, spec_from_json
from .errors import BudgetExhaustedError, ConfigError, QcextError
from .extension import asnec_demo, extend, extend_general, restriction_check
from .groups import as_fraction
from .qc import (
    QuasiCocycle,
    antisymmetrize,
    brooks,
    brooks_homogenized,
    cyclic_homomorphism,
    defect,
    embed_on_factor,
    step_quasimorphism,
    tree_edge_cocycle,
)
from .scl import cl_upper, undistortion_pipeline, free_dist_experiment
from .separating import separation_report
from .suite import ball_domain, run_full_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3


def tag(value, provenance: str) -> dict:
    """Report numerics always travel with a provenance label."""
    if provenance not in (
        "exact",
        "empirical-lower-bound",
        "certified-upper-bound",
        "external-reference",
    ):
        raise ConfigError(f"unknown report provenance {provenance!r}")
    return {"value": str(value), "provenance": provenance}


def vector_json(vec: ModuleVector) -> dict:
    if isinstance(vec.module, TrivialReals):
        return tag(vec.scalar(), "exact")
    entries = {str(idx): str(vec.coefficient(idx)) for idx in vec.support()}
    out = tag(vec.norm_pth_power(), "exact")
    out["norm_pth_power"] = out.pop("value")
    out["entries"] = dict(sorted(entries.items()))
    return out


def _require(config: dict, key: str):
    if key not in config:
        raise ConfigError(f"config is missing the required key {key!r}")
    return config[key]


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def _budget(config: dict) -> SearchBudget | None:
    if "budget" not in config:
        return None
    raw = config["budget"]
    if not isinstance(raw, dict):
        raise ConfigError("budget must be an object")
    return SearchBudget.from_json(raw)


def _c_value(config: dict):
    if "c" not in config:
        return None
    try:
        return as_fraction(config["c"])
    except (ValueError, TypeError) as e:
        raise ConfigError(f"bad polygon constant: {config['c']!r}") from e


def _spec(config: dict):
    return spec_from_json(_require(config, "spec"))


def build_input(spec, item: dict) -> tuple[str, QuasiCocycle]:
    """One cocycle input from its config stanza."""
    if not isinstance(item, dict):
        raise ConfigError("each input must be an object")
    kind = _require(item, "kind")
    lam = item.get("lambda")
    if lam is None:
        if len(spec.lambdas()) != 1:
            raise ConfigError("input needs a lambda label")
        lam = spec.lambdas()[0]
    if lam not in spec.lambdas():
        raise ConfigError(f"unknown subgroup label {lam!r}")

    if kind == "cyclic-homomorphism":
        slope = as_fraction(item.get("slope", 1))
        if spec.family == "free_product":
            q = cyclic_homomorphism(spec, lam=lam, slope=slope)
        else:
            q = cyclic_homomorphism(spec, slope=slope)
    elif kind == "step":
        if spec.family != "free_rel_cyclic":
            raise ConfigError("the step function lives on a relative cyclic subgroup")
        q = step_quasimorphism(spec)
    elif kind in ("brooks", "brooks-homogenized"):
        if spec.family != "free_product":
            raise ConfigError(f"{kind} inputs target a free factor")
        factor = spec.factor(lam)
        w = factor.parse(str(_require(item, "w")))
        make = brooks if kind == "brooks" else brooks_homogenized
        q = embed_on_factor(spec, lam, make(factor, w))
    elif kind == "tree-edge":
        if spec.family != "free_product":
            raise ConfigError("tree-edge inputs target a free factor")
        q = tree_edge_cocycle(spec, lam, p=int(item.get("p", 2)))
    else:
        raise ConfigError(f"unknown input kind {kind!r}")

    if item.get("antisymmetrize"):
        q = antisymmetrize(q)
    return lam, q


def build_inputs(spec, config: dict) -> dict:
    items = _require(config, "inputs")
    if not isinstance(items, list) or not items:
        raise ConfigError("inputs must be a non-empty list")
    out: dict[str, QuasiCocycle] = {}
    for item in items:
        lam, q = build_input(spec, item)
        if lam in out:
            raise ConfigError(f"duplicate input for label {lam!r}")
        out[lam] = q
    return out


# -- subcommand handlers ---------------------------------------------------------


def cmd_extend(config: dict, seed: int) -> tuple[dict, int]:
    spec = _spec(config)
    inputs = build_inputs(spec, config)
    budget = _budget(config)
    mode = config.get("mode", "strict")
    if mode == "strict":
        result = extend(spec, inputs, c_value=_c_value(config), budget=budget,
                        seed=seed)
    elif mode == "symmetrize":
        result = extend_general(spec, inputs, c_value=_c_value(config),
                                budget=budget)
    else:
        raise ConfigError(f"unknown extend mode {mode!r}")

    values = []
    for text in config.get("evaluate", []):
        g = spec.parse(str(text))
        values.append({"g": str(g), "iota": vector_json(result.iota(g))})
    restrictions = []
    for lam in sorted(inputs):
        restrictions.append(
            restriction_check(result, lam, samples=int(config.get(
                "restriction_samples", 20)), seed=seed)
        )
    result.sync_notes()
    payload = result.to_json()
    payload["certificate_tagged"] = tag(result.certificate.value,
                                        "certified-upper-bound")
    payload["values"] = values
    payload["restriction"] = restrictions
    return payload, EXIT_OK


def cmd_separating(config: dict, seed: int) -> tuple[dict, int]:
    spec = _spec(config)
    budget = _budget(config)
    c = _c_value(config)
    lams = config.get("lambdas")
    pairs = _require(config, "pairs")
    if not isinstance(pairs, list):
        raise ConfigError("pairs must be a list of [f, g] pairs")
    rows = []
    for pair in pairs:
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ConfigError(f"bad pair {pair!r}")
        f, g = spec.parse(str(pair[0])), spec.parse(str(pair[1]))
        report = separation_report(spec, f, g, c_value=c, budget=budget, lams=lams)
        for lam in sorted(report):
            sep = report[lam]
            data = sep.to_json()
            data["distances"] = [tag(d, "exact") for d in sep.distances]
            rows.append(data)
    return {"reports": rows}, EXIT_OK


def cmd_defect(config: dict, seed: int) -> tuple[dict, int]:
    spec = _spec(config)
    inputs = build_inputs(spec, config)
    budget = _budget(config)
    result = extend(spec, inputs, c_value=_c_value(config), budget=budget, seed=seed)

    radius = int(config.get("radius", 2))
    samples = int(config.get("samples", 120))
    elements = ball_domain(spec, radius)
    rng = seeded_rng(seed, "cli:defect")
    for _ in range(samples):
        elements.append(spec.random_element(rng, 4))
    est = defect(result.iota, elements)
    result.sync_notes()
    ok = est.leq_exact(result.certificate.value)
    payload = {
        "certificate": tag(result.certificate.value, "certified-upper-bound"),
        "certificate_detail": result.certificate.to_json(),
        "empirical_defect": {
            "pth_power": tag(est.exact_pth_power_max, "empirical-lower-bound"),
            "p": est.p,
            "witness": [str(w) for w in est.witness] if est.witness else None,
            "pairs_checked": est.pairs_checked,
        },
        "within_certificate": ok,
        "conditional": result.conditional,
        "conditional_reasons": sorted(set(map(str, result.conditional_reasons))),
    }
    return payload, EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_calibrate(config: dict, seed: int) -> tuple[dict, int]:
    spec = _spec(config)
    report = calibrate_c(
        spec,
        samples=int(config.get("samples", 200)),
        ngon_sizes=tuple(config.get("ngon_sizes", (3, 4, 5, 6))),
        seed=seed,
        element_size=int(config.get("element_size", 6)),
        budget=_budget(config),
    )
    payload = report.to_json()
    payload["max_ratio"] = tag(report.max_ratio, "empirical-lower-bound")
    payload["note"] = (
        "empirical lower estimate of the polygon constant; "
        "supply the calibrated value as \"c\" to downstream commands"
    )
    return payload, EXIT_OK


def cmd_asnec(config: dict, seed: int) -> tuple[dict, int]:
    payload = asnec_demo(
        n=int(config.get("n", 1)),
        k_max=int(config.get("k_max", 6)),
        seed=seed,
    )
    ok = payload["violation_grows"] and payload["symmetrized"]["defect_within_certificate"]
    return payload, EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_scl_bound(config: dict, seed: int) -> tuple[dict, int]:
    spec = _spec(config)
    if spec.family != "free_product":
        raise ConfigError("scl-bound transports along a free-product embedding")
    lam = _require(config, "lambda")
    if lam not in spec.lambdas():
        raise ConfigError(f"unknown subgroup label {lam!r}")
    factor = spec.factor(lam)
    h = factor.parse(str(_require(config, "h")))
    phi_cfg = _require(config, "phi")
    kind = _require(phi_cfg, "kind")
    if kind == "brooks-homogenized":
        phi = brooks_homogenized(factor, factor.parse(str(_require(phi_cfg, "w"))))
    elif kind == "cyclic-homomorphism":
        raise ConfigError("a homomorphism vanishes on [H,H]; nothing to transport")
    else:
        raise ConfigError(f"unsupported phi kind {kind!r}")
    y_gens = None
    if "y_gens" in config:
        y_gens = [factor.parse(str(t)) for t in config["y_gens"]]
    reference = None
    if "reference_scl_h" in config:
        reference = as_fraction(config["reference_scl_h"])

    report = undistortion_pipeline(
        spec, lam, h, phi,
        y_gens=y_gens,
        c_value=_c_value(config),
        budget=_budget(config),
        scl_h_reference=reference,
        seed=seed,
    )
    bound = report["bound"]
    upper_cfg = config.get("upper")
    if upper_cfg is not None:
        n = int(upper_cfg.get("n", 1))
        comms = [
            (spec.parse(str(u)), spec.parse(str(v)))
            for u, v in _require(upper_cfg, "commutators")
        ]
        target = spec.group.syllable(spec.names.index(lam), h)
        count = cl_upper(spec.group, target**n, comms)
        report["upper"] = {
            "cl": tag(count, "exact"),
            "scl_upper": tag(Fraction(count, n), "certified-upper-bound"),
        }
    payload = {
        "g": report["g"],
        "lower": {
            "value": tag(bound.lower, "certified-upper-bound"),
            "witness": bound.lower_witness,
        },
        "constants": report["constants"].to_json(),
        "chain": report["chain"],
        "restriction_consistent": report["restriction_consistent"],
        "conditional": report["conditional"],
    }
    if "upper" in report:
        payload["upper"] = report["upper"]
    if "scl_h_transport" in report:
        payload["scl_h_transport"] = report["scl_h_transport"]
    ok = report["restriction_consistent"]
    return payload, EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_distortion(config: dict, seed: int) -> tuple[dict, int]:
    k_list = config.get("k_list", list(range(1, 7)))
    if not isinstance(k_list, list) or not all(
        isinstance(k, int) and k >= 1 for k in k_list
    ):
        raise ConfigError("k_list must be a list of positive integers")
    payload = free_dist_experiment(k_list, seed=seed)
    ok = payload["distortion_witnessed"]
    return payload, EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_verify(config: dict, seed: int) -> tuple[dict, int]:
    spec = _spec(config)
    inputs = None
    if "inputs" in config:
        inputs = build_inputs(spec, config)
    payload = run_full_suite(
        spec,
        cocycles=inputs,
        c_value=_c_value(config),
        budget=_budget(config),
        seed=seed,
        samples=int(config.get("samples", 500)),
        radius=int(config.get("radius", 3)),
    )
    return payload, EXIT_OK if payload["all_passed"] else EXIT_CHECK_FAILED


HANDLERS = {
    "extend": cmd_extend,
    "separating": cmd_separating,
    "defect": cmd_defect,
    "calibrate-c": cmd_calibrate,
    "as-nec-demo": cmd_asnec,
    "scl-bound": cmd_scl_bound,
    "distortion": cmd_distortion,
    "verify": cmd_verify,
}


def _emit(report: dict, out_path: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qcext",
        description="extend quasi-cocycles from embedded subgroups with "
        "certified defect bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in HANDLERS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="write the report here")
    args = parser.parse_args(argv)

    started = time.monotonic()
    threads = os.environ.get("QCEXT_THREADS", "1")
    envelope = {
        "command": args.command,
        "seed": args.seed,
        "version": __version__,
        "environment": {"threads": threads, "execution": "serial"},
    }

    try:
        config = _load_config(args.config)
        envelope["config"] = config
        results, code = HANDLERS[args.command](config, args.seed)
        envelope["results"] = results
        envelope["status"] = "ok" if code == EXIT_OK else "check-failed"
    except ConfigError as e:
        sys.stderr.write(f"config error: {e}\n")
        return EXIT_CONFIG
    except BudgetExhaustedError as e:
        envelope["status"] = "budget-exhausted"
        envelope["error"] = str(e)
        envelope["results"] = envelope.get("results", {})
        envelope["timings"] = {"total_s": round(time.monotonic() - started, 3)}
        _emit(envelope, args.out)
        sys.stderr.write(f"budget exhausted: {e}\n")
        return EXIT_BUDGET
    except (QcextError, AssertionError) as e:
        sys.stderr.write(f"check failed: {e}\n")
        return EXIT_CHECK_FAILED

    envelope["timings"] = {"total_s": round(time.monotonic() - started, 3)}
    _emit(envelope, args.out)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
