"""Reproducible experiment harness.

Subcommands build instances, run Monte-Carlo decoding trials, compute exact
product-expansions, verify gates, and measure distances.  Every report embeds
the resolved configuration and a fixture hash over the canonical JSON bytes;
wall-clock timings are only attached on request and never hashed, keeping
identical configurations byte-identical.

Exit codes: 0 success, 1 usage error, 2 in-promise decoding failure,
3 inconsistent input.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .gf import GF, Field
from . import linalg as la
from .codes import (BudgetExceeded, LinearCode, punctured_tensor_rs, rs_code)
from .decoder import DualTensorInstance, alpha_decode, random_codeword, random_error
from .expansion import pe_exact
from .qdecoder import (CssProductInstance, InconsistentInput, QdecParams,
                       SubsystemProductInstance, coset_min_weight, css_decode,
                       single_shot_decode, subsystem_decode, syndrome_decode)
from .rng import stream
from .subsystem import (CssPair, check_matrices, logical_coset_equal,
                        quantum_rs, subsystem_distance, subsystem_product)
from . import transversal as tv

EXIT_OK, EXIT_USAGE, EXIT_PROMISE, EXIT_INCONSISTENT = 0, 1, 2, 3


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def finalize_report(config: dict, results: dict, timings: dict | None = None) -> dict:
    body = {"artifact_version": __version__, "config": config, "results": results}
    body["fixture_hash"] = hashlib.sha256(canonical_json(body).encode()).hexdigest()
    if timings is not None:
        body["timing"] = timings  # informational only, never hashed
    return body


def write_report(report: dict, path: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=1) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def write_csv(rows: list[dict], path: str) -> None:
    if not rows:
        return
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def _fraction(text: str) -> Fraction:
    if "/" in text:
        num, den = text.split("/")
        return Fraction(int(num), int(den))
    return Fraction(text)


# ---------------------------------------------------------------------------
# build-code
# ---------------------------------------------------------------------------


def cmd_build_code(args) -> int:
    F = GF(args.q)
    if args.kind == "rs":
        code = rs_code(F, args.n, args.k)
        doc = {"kind": "rs", "code": code.to_json()}
    elif args.kind == "qrs":
        pair = quantum_rs(F, args.n, args.kx, args.kz)
        doc = {"kind": "qrs", "pair": pair.to_json()}
    elif args.kind == "subsystem-product":
        f1 = quantum_rs(F, args.n, args.kx, args.kz)
        f2 = quantum_rs(F, args.n, args.kx2, args.kz2)
        inst = SubsystemProductInstance(
            [f1, f2], QdecParams(_fraction(args.eps), _fraction(args.rho), args.gamma))
        doc = inst.to_json()
    elif args.kind == "css-product":
        f1 = quantum_rs(F, args.n, args.k, args.k)
        f2 = quantum_rs(F, args.n, args.k2, args.k2)
        inst = CssProductInstance(
            [f1, f2], QdecParams(_fraction(args.eps), _fraction(args.rho), args.gamma))
        doc = inst.to_json()
    elif args.kind == "dual-tensor":
        inst = DualTensorInstance.build(F, args.n, args.k, args.k2,
                                        _fraction(args.eps), _fraction(args.rho),
                                        args.gamma)
        doc = inst.to_json()
        doc["kind"] = "dual-tensor"
    elif args.kind == "punctured-tensor-rs":
        ec = punctured_tensor_rs(F, args.m, args.u, args.k, seed=args.seed)
        doc = {"kind": "punctured-tensor-rs", "code": ec.base.to_json(),
               "points": [int(x) for x in ec.points.ravel()], "u": args.u,
               "m": args.m, "box_k": args.k, "is_mds": bool(ec.base.is_mds())}
    elif args.kind == "triple-product":
        gate = tv.triple_product_build(F, args.m, args.u, args.seed)
        doc = gate.to_json()
        doc["kind"] = "triple-product"
    else:
        raise ValueError(f"unknown kind {args.kind}")
    report = finalize_report({"command": "build-code", "kind": args.kind,
                              "q": args.q, "seed": args.seed}, doc)
    write_report(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# decode-trials
# ---------------------------------------------------------------------------


def _noise_weight(n_cells: int, args, rng: np.random.Generator) -> int:
    if args.noise_weight is not None:
        return args.noise_weight
    return int(rng.binomial(n_cells, args.noise_rate))


def _error_vector(F: Field, n_cells: int, weight: int, rng) -> np.ndarray:
    e = np.zeros(n_cells, dtype=np.int64)
    if weight:
        pos = rng.permutation(n_cells)[:weight]
        e[pos] = F.random(rng, weight, nonzero=True)
    return e


def _dual_tensor_trials(inst: DualTensorInstance, args) -> tuple[dict, list[dict], bool]:
    F = inst.field
    n = inst.n
    rows = []
    trial_seconds: list[float] = []
    promise_radius = int(inst.d0) if inst.d0 >= 1 else 0
    in_ok = in_fail = out_n = 0
    for trial in range(args.trials):
        rng = stream(args.seed, trial)
        a = random_codeword(inst, rng)
        w = _noise_weight(n * n, args, rng)
        b = _error_vector(F, n * n, w, rng).reshape(n, n)
        w = int(np.count_nonzero(b))
        t_trial = time.time()
        res = alpha_decode(inst, F.add(a, b))
        trial_seconds.append(time.time() - t_trial)
        member = inst.member(res.word)
        in_promise = w <= promise_radius
        ok = member and not res.fallback and res.residual <= inst.alpha * max(w, 0) \
            and (w > 0 or res.residual == 0)
        if in_promise:
            in_ok += ok
            in_fail += not ok
        else:
            out_n += 1
        rows.append({"trial": trial, "weight": w, "residual": res.residual,
                     "fallback": res.fallback, "member": member,
                     "in_promise": in_promise, "success": bool(ok),
                     **{k: v for k, v in res.stages.items() if k != "reason"}})
    agg = {"trials": args.trials, "in_promise_success": in_ok,
           "in_promise_failure": in_fail, "out_of_promise": out_n,
           "promise_radius": promise_radius,
           "alpha": [inst.alpha.numerator, inst.alpha.denominator],
           "mean_residual": sum(r["residual"] for r in rows) / max(len(rows), 1)}
    return agg, rows, in_fail == 0, trial_seconds


def _subsystem_trials(inst: SubsystemProductInstance, args) -> tuple[dict, list[dict], bool]:
    F = inst.field
    prod = inst.product
    N = prod.n
    QZp = prod.logical_z_space()
    QXp = prod.logical_x_space()
    cm = check_matrices(prod, "tensor")
    promise_radius = math.floor(inst.params.delta * N)
    rows = []
    trial_seconds: list[float] = []
    in_ok = in_fail = out_n = 0
    for trial in range(args.trials):
        rng = stream(args.seed, trial)
        cz = la.matmul(F, F.random(rng, QZp.shape[0])[None, :], QZp)[0]
        cx = la.matmul(F, F.random(rng, QXp.shape[0])[None, :], QXp)[0]
        w = _noise_weight(N, args, rng)
        ez = _error_vector(F, N, w, rng)
        ex = _error_vector(F, N, w, rng)
        t_trial = time.time()
        res = subsystem_decode(inst, F.add(cx, ex), F.add(cz, ez))
        trial_seconds.append(time.time() - t_trial)
        ok_z = logical_coset_equal(prod, "z", res.coset_z.representative, cz)
        ok_x = logical_coset_equal(prod, "x", res.coset_x.representative, cx)
        # syndrome path must land in the same logical cosets
        s_x = la.matvec(F, cm.hx, F.add(cx, ex))
        s_z = la.matvec(F, cm.hz, F.add(cz, ez))
        sres = syndrome_decode(inst, cm, s_x, s_z)
        agree_z = logical_coset_equal(prod, "z",
                                      F.sub(F.add(cz, ez), sres.coset_z.representative),
                                      res.coset_z.representative)
        agree_x = logical_coset_equal(prod, "x",
                                      F.sub(F.add(cx, ex), sres.coset_x.representative),
                                      res.coset_x.representative)
        in_promise = w <= promise_radius
        ok = ok_z and ok_x and agree_z and agree_x
        if in_promise:
            in_ok += ok
            in_fail += not ok
        else:
            out_n += 1
        rows.append({"trial": trial, "weight": w, "success": bool(ok),
                     "coset_z_ok": bool(ok_z), "coset_x_ok": bool(ok_x),
                     "syndrome_path_agrees": bool(agree_z and agree_x),
                     "fallback": res.fallback, "in_promise": in_promise})
    agg = {"trials": args.trials, "in_promise_success": in_ok,
           "in_promise_failure": in_fail, "out_of_promise": out_n,
           "promise_radius": promise_radius,
           "delta": [inst.params.delta.numerator, inst.params.delta.denominator]}
    return agg, rows, in_fail == 0, trial_seconds


def _css_trials(inst: CssProductInstance, args) -> tuple[dict, list[dict], bool]:
    F = inst.field
    code = inst.code
    N = code.n
    promise_radius = math.floor(inst.params.delta * N)
    rows = []
    trial_seconds: list[float] = []
    in_ok = in_fail = out_n = 0
    for trial in range(args.trials):
        rng = stream(args.seed, trial)
        cz = code.qz.codeword(F.random(rng, code.qz.k))
        cx = code.qx.codeword(F.random(rng, code.qx.k))
        w = _noise_weight(N, args, rng)
        ez = _error_vector(F, N, w, rng)
        ex = _error_vector(F, N, w, rng)
        t_trial = time.time()
        try:
            res = css_decode(inst, F.add(cx, ex), F.add(cz, ez))
            ok = (logical_coset_equal(code, "z", res.coset_z.representative, cz)
                  and logical_coset_equal(code, "x", res.coset_x.representative, cx))
            fb = res.fallback
        except Exception:
            ok, fb = False, True
        trial_seconds.append(time.time() - t_trial)
        in_promise = w <= promise_radius
        if in_promise:
            in_ok += ok
            in_fail += not ok
        else:
            out_n += 1
        rows.append({"trial": trial, "weight": w, "success": bool(ok),
                     "fallback": bool(fb), "in_promise": in_promise})
    agg = {"trials": args.trials, "in_promise_success": in_ok,
           "in_promise_failure": in_fail, "out_of_promise": out_n,
           "promise_radius": promise_radius}
    return agg, rows, in_fail == 0


def _load_instance(path: str) -> dict:
    """Accept either a bare instance document or a build-code report."""
    with open(path) as fh:
        doc = json.load(fh)
    if "kind" not in doc and "results" in doc:
        doc = doc["results"]
    return doc


def cmd_decode_trials(args) -> int:
    doc = _load_instance(args.instance)
    kind = doc.get("kind")
    t0 = time.time()
    if kind == "dual-tensor":
        inst = DualTensorInstance.from_json(doc)
        agg, rows, clean, secs = _dual_tensor_trials(inst, args)
    elif kind == "subsystem-product":
        inst = SubsystemProductInstance.from_json(doc)
        agg, rows, clean, secs = _subsystem_trials(inst, args)
    elif kind == "css-product":
        inst = CssProductInstance.from_json(doc)
        agg, rows, clean, secs = _css_trials(inst, args)
    else:
        raise ValueError(f"cannot decode instances of kind {kind}")
    config = {"command": "decode-trials", "instance_kind": kind,
              "instance": doc, "trials": args.trials, "seed": args.seed,
              "noise_weight": args.noise_weight, "noise_rate": args.noise_rate}
    timings = None
    if args.timings:
        total = time.time() - t0
        arr = sorted(secs) or [0.0]
        timings = {"seconds": total,
                   "mean_trial_seconds": sum(arr) / len(arr),
                   "p95_trial_seconds": arr[min(len(arr) - 1,
                                                int(0.95 * len(arr)))]}
    report = finalize_report(config, {"aggregate": agg, "trial_table": rows}, timings)
    write_report(report, args.out)
    if args.csv:
        write_csv(rows, args.csv)
    return EXIT_OK if clean else EXIT_PROMISE


def cmd_decode_one(args) -> int:
    """Decode a single word (or syndrome pair) and emit a DecodeReport."""
    doc = _load_instance(args.instance)
    kind = doc.get("kind")
    with open(args.word if args.word else args.syndrome) as fh:
        payload = json.load(fh)
    t0 = time.time()
    if kind == "dual-tensor":
        if args.syndrome:
            raise ValueError("dual-tensor instances decode words, not syndromes")
        inst = DualTensorInstance.from_json(doc)
        word = np.array(payload, dtype=np.int64)
        res = alpha_decode(inst, word)
        results = {"residual": res.residual, "fallback": res.fallback,
                   "stage_bounds": {
                       "stage1": [inst.stage1_bound.numerator, inst.stage1_bound.denominator],
                       "alpha": [inst.alpha.numerator, inst.alpha.denominator],
                       "d0": [inst.d0.numerator, inst.d0.denominator]},
                   "stages": res.stages,
                   "word": [int(x) for x in res.word.ravel()]}
        ok = not res.fallback
    elif kind == "subsystem-product":
        inst = SubsystemProductInstance.from_json(doc)
        if args.syndrome:
            cm = check_matrices(inst.product, "tensor")
            s_x = np.array(payload["s_x"], dtype=np.int64)
            s_z = np.array(payload["s_z"], dtype=np.int64)
            res = syndrome_decode(inst, cm, s_x, s_z)
        else:
            res = subsystem_decode(inst,
                                   np.array(payload["c_x"], dtype=np.int64),
                                   np.array(payload["c_z"], dtype=np.int64))
        results = {"fallback": res.fallback,
                   "coset_x": [int(x) for x in res.coset_x.representative],
                   "coset_z": [int(x) for x in res.coset_z.representative]}
        ok = not res.fallback
    else:
        raise ValueError(f"cannot decode instances of kind {kind}")
    if args.timings:
        results["millis"] = (time.time() - t0) * 1000.0
    report = finalize_report({"command": "decode-one", "instance_kind": kind},
                             {k: v for k, v in results.items() if k != "millis"})
    if args.timings:
        report["timing"] = {"millis": results["millis"]}
    write_report(report, args.out)
    return EXIT_OK if ok else EXIT_PROMISE


# ---------------------------------------------------------------------------
# pe-exact / distance / gate-verify / single-shot
# ---------------------------------------------------------------------------


def cmd_pe_exact(args) -> int:
    with open(args.codes) as fh:
        docs = json.load(fh)
    codes = [LinearCode.from_json(d) for d in docs]
    try:
        res = pe_exact(codes, budget=args.budget)
    except BudgetExceeded as exc:
        write_report(finalize_report({"command": "pe-exact", "budget": args.budget},
                                     {"refused": str(exc)}), args.out)
        return EXIT_USAGE
    report = finalize_report({"command": "pe-exact", "budget": args.budget,
                              "codes": docs}, res.to_json())
    write_report(report, args.out)
    return EXIT_OK


def cmd_distance(args) -> int:
    doc = _load_instance(args.instance)
    if doc.get("kind") == "rs" or "gen" in doc:
        code = LinearCode.from_json(doc.get("code", doc))
        d = code.min_distance(budget=args.budget)
    else:
        pair = CssPair.from_json(doc["pair"] if "pair" in doc else doc)
        d = subsystem_distance(pair, budget=args.budget, seed=args.seed)
    report = finalize_report(
        {"command": "distance", "budget": args.budget, "instance": doc},
        {"distance": None if math.isinf(d.value) else int(d.value),
         "infinite": math.isinf(d.value), "exact": d.exact, "method": d.method})
    write_report(report, args.out)
    return EXIT_OK


def cmd_gate_verify(args) -> int:
    t0 = time.time()
    if args.params:
        r, q = (int(x) for x in args.params.split(","))
        F = GF(q)
        gate = tv.build_transrs_gate(F, r)
        phase = tv.phase_identity_test(gate, args.trials, args.seed)
        sym = tv.exponent_set_check(r, q)
        results = {"certificate": gate.certificate.to_json(),
                   "exponent_check_empty": sym.empty,
                   "phase_trials": phase.trials, "phase_passed": phase.passed,
                   "label": gate.label}
        ok = gate.certificate.holds and sym.empty and phase.all_passed
        config = {"command": "gate-verify", "params": args.params,
                  "trials": args.trials, "seed": args.seed}
    else:
        doc = _load_instance(args.instance)
        if doc.get("kind") != "triple-product":
            raise ValueError("gate-verify --instance expects a triple-product document")
        f = doc["field"]
        F = Field.get(f["p"], f["e"], tuple(f["modulus"]))
        gate = tv.triple_product_build(F, doc["params"]["m"], doc["params"]["u"],
                                       seed=args.seed)
        phase = tv.triple_phase_identity_test(gate, args.trials, args.seed) \
            if gate.certificate.holds else None
        results = {"certificate": gate.certificate.to_json(),
                   "phase_trials": None if phase is None else phase.trials,
                   "phase_passed": None if phase is None else phase.passed,
                   "label": gate.label}
        ok = gate.certificate.holds and (phase is None or phase.all_passed)
        config = {"command": "gate-verify", "instance": doc["params"],
                  "trials": args.trials, "seed": args.seed}
    timings = {"seconds": time.time() - t0} if args.timings else None
    write_report(finalize_report(config, results, timings), args.out)
    return EXIT_OK if ok else EXIT_PROMISE


def cmd_single_shot_trials(args) -> int:
    doc = _load_instance(args.instance)
    inst = SubsystemProductInstance.from_json(doc)
    F = inst.field
    prod = inst.product
    cm = check_matrices(prod, "amplified")
    gauge = prod.qx.dual().gen
    rows = []
    ok_n = 0
    for trial in range(args.trials):
        rng = stream(args.seed, trial)
        e = _error_vector(F, prod.n, args.error_weight, rng)
        g = la.matmul(F, F.random(rng, gauge.shape[0])[None, :], gauge)[0]
        s = la.matvec(F, cm.hz, F.add(e, g))
        v = _stripe_safe_noise(F, inst, args.syndrome_noise, rng)
        res = single_shot_decode(inst, cm, F.add(s, v), args.distance)
        if res.correction is None:
            ok = False
            resid = None
        else:
            diff = F.sub(res.correction.representative, e)
            ok = bool(not diff.any() or la.in_row_space(F, gauge, diff))
            resid = coset_min_weight(F, gauge, diff, cap=3)
        ok_n += ok
        rows.append({"trial": trial, "error_weight": int(np.count_nonzero(e)),
                     "syndrome_noise": int(np.count_nonzero(v)),
                     "success": bool(ok), "residual_weight": resid,
                     "denoise_failures": res.denoise_failures})
    agg = {"trials": args.trials, "successes": ok_n,
           "success_rate": ok_n / max(args.trials, 1)}
    config = {"command": "single-shot-trials", "instance": doc,
              "trials": args.trials, "seed": args.seed,
              "error_weight": args.error_weight,
              "syndrome_noise": args.syndrome_noise, "distance": args.distance}
    write_report(finalize_report(config, {"aggregate": agg, "trial_table": rows}),
                 args.out)
    if args.csv:
        write_csv(rows, args.csv)
    return EXIT_OK if ok_n == args.trials else EXIT_PROMISE


def _stripe_safe_noise(F: Field, inst: SubsystemProductInstance, weight: int,
                       rng: np.random.Generator) -> np.ndarray:
    """Syndrome noise of the given weight hitting distinct stripes, so each
    per-stripe outer decode sees at most one corruption."""
    f1, f2 = inst.factors
    n = f1.n
    m1 = f1.qz.parity_check().shape[0]
    m2 = f2.qz.parity_check().shape[0]
    total = 2 * m1 * n + 2 * m2 * n
    v = np.zeros(total, dtype=np.int64)
    stripes: set[tuple[int, int]] = set()
    placed = 0
    while placed < weight:
        pos = int(rng.integers(total))
        if pos < 2 * m1 * n:
            stripe = (0, pos % n)
        else:
            stripe = (1, (pos - 2 * m1 * n) // (2 * m2))
        if stripe in stripes:
            continue
        stripes.add(stripe)
        v[pos] = int(F.random(rng, None, nonzero=True))
        placed += 1
    return v


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="prodcodes",
                                 description="finite-field product-code laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-code", help="construct an instance and write JSON")
    b.add_argument("--kind", required=True,
                   choices=["rs", "qrs", "subsystem-product", "css-product",
                            "dual-tensor", "punctured-tensor-rs", "triple-product"])
    b.add_argument("--q", type=int, required=True)
    b.add_argument("--n", type=int, default=0)
    b.add_argument("--k", type=int, default=0)
    b.add_argument("--k2", type=int, default=0)
    b.add_argument("--kx", type=int, default=0)
    b.add_argument("--kz", type=int, default=0)
    b.add_argument("--kx2", type=int, default=0)
    b.add_argument("--kz2", type=int, default=0)
    b.add_argument("--m", type=int, default=0)
    b.add_argument("--u", type=int, default=1)
    b.add_argument("--eps", default="1/2")
    b.add_argument("--rho", default="1/8")
    b.add_argument("--gamma", type=int, default=20)
    b.add_argument("--seed", type=int, required=True)
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_build_code)

    d = sub.add_parser("decode-trials", help="Monte-Carlo decoding trials")
    d.add_argument("--instance", required=True)
    group = d.add_mutually_exclusive_group(required=True)
    group.add_argument("--noise-weight", type=int, default=None)
    group.add_argument("--noise-rate", type=float, default=None)
    d.add_argument("--trials", type=int, required=True)
    d.add_argument("--seed", type=int, required=True)
    d.add_argument("--out", default=None)
    d.add_argument("--csv", default=None)
    d.add_argument("--timings", action="store_true")
    d.set_defaults(func=cmd_decode_trials)

    o = sub.add_parser("decode-one", help="decode a single word or syndrome")
    o.add_argument("--instance", required=True)
    mx = o.add_mutually_exclusive_group(required=True)
    mx.add_argument("--word", default=None, help="JSON flat row-major array")
    mx.add_argument("--syndrome", default=None, help='JSON {"s_x": [...], "s_z": [...]}')
    o.add_argument("--out", default=None)
    o.add_argument("--timings", action="store_true")
    o.set_defaults(func=cmd_decode_one)

    p = sub.add_parser("pe-exact", help="exact product-expansion of a code tuple")
    p.add_argument("--codes", required=True)
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_pe_exact)

    g = sub.add_parser("gate-verify", help="verify a transversal gate instance")
    mutex = g.add_mutually_exclusive_group(required=True)
    mutex.add_argument("--params", default=None, help="r,q for the RS instance")
    mutex.add_argument("--instance", default=None, help="triple-product JSON")
    g.add_argument("--trials", type=int, default=1000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.add_argument("--timings", action="store_true")
    g.set_defaults(func=cmd_gate_verify)

    s = sub.add_parser("single-shot-trials", help="noisy-syndrome decoding trials")
    s.add_argument("--instance", required=True)
    s.add_argument("--syndrome-noise", type=int, required=True)
    s.add_argument("--error-weight", type=int, default=1)
    s.add_argument("--distance", type=int, required=True)
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", default=None)
    s.add_argument("--csv", default=None)
    s.set_defaults(func=cmd_single_shot_trials)

    t = sub.add_parser("distance", help="distance of a code or subsystem pair")
    t.add_argument("--instance", required=True)
    t.add_argument("--budget", type=int, default=2_000_000)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", default=None)
    t.set_defaults(func=cmd_distance)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InconsistentInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
