"""Command-line front end.

Every command reads a channel (``--channel FILE`` or ``--zoo KIND`` with
parameters), runs one computation and writes a report that embeds the full
run configuration.  ``qconv replay REPORT`` re-executes that configuration
and writes a byte-identical report.

Exit codes: 0 success, 2 precondition violation, 64 unknown command,
65 malformed channel file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .channels import ZOO, ChannelSpecError, channel_from_spec, complementary, minimal_dilation
from .matqi import DimensionError, PureState, max_entangled

EXIT_PRECONDITION = 2
EXIT_USAGE = 64
EXIT_DATAERR = 65

COMMANDS = ("q1", "certify", "entropy", "bound", "decouple", "privacy", "decoder", "symsdp-search", "sweep", "replay")
ZOO_PARAMS = ("d", "q", "p", "S", "sigma", "din", "dout", "kraus_rank", "seed")
SIG_DIGITS = 12
INT_PARAMS = ("n", "d", "din", "dout", "kraus_rank", "seed", "restarts")


class Precondition(ValueError):
    """Raised for parameters outside the target operation's domain."""


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _clean(obj):
    """JSON-ready copy with floats rounded to 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            if np.max(np.abs(obj.imag), initial=0.0) == 0:
                return _clean(obj.real.tolist())
            return {"re": _clean(obj.real.tolist()), "im": _clean(obj.imag.tolist())}
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        x = float(f"{x:.{SIG_DIGITS}g}")
        return 0.0 if x == 0 else x
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    return obj


def dumps(report: dict) -> str:
    return json.dumps(_clean(report), indent=2) + "\n"


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    fields = list(rows[0])
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.{SIG_DIGITS}g}" if isinstance(v, float) else v) for k, v in _clean(r).items()})
    return buf.getvalue()


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def _channel_doc(args) -> dict:
    if args.channel and args.zoo:
        raise Precondition("give either --channel or --zoo, not both")
    if args.channel:
        try:
            with open(args.channel) as fh:
                return json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ChannelSpecError(f"cannot read channel spec {args.channel!r}: {exc}") from exc
    if args.zoo:
        params = {}
        for k in ZOO_PARAMS:
            v = getattr(args, k, None)
            if v is not None:
                params[k] = json.loads(v) if k in ("S", "sigma") else v
        return {"zoo": args.zoo, "params": params}
    raise Precondition("a channel is required (--channel FILE or --zoo KIND)")


PARAM_KEYS = {
    "q1": ("restarts", "seed", "check_degradable"),
    "certify": (),
    "entropy": ("kind", "eps", "smooth", "cond"),
    "bound": ("kind", "n", "eps", "delta", "mu", "mu_convention", "logne", "const", "q1", "dimA"),
    "decouple": ("d", "eta", "eps", "trials", "berta_trials", "seed"),
    "privacy": ("code",),
    "decoder": ("d",),
    "symsdp-search": ("ns", "eps"),
    "sweep": ("target", "param", "values", "kind", "n", "eps", "delta", "mu", "d"),
}


def _load_channel(doc):
    # out-of-range zoo parameters are precondition violations, not malformed specs
    if isinstance(doc, dict) and doc.get("zoo") in ZOO and isinstance(doc.get("params", {}), dict):
        try:
            return ZOO[doc["zoo"]](**doc.get("params", {}))
        except TypeError as exc:
            raise ChannelSpecError(f"bad parameters for {doc['zoo']!r}: {exc}") from exc
        except ValueError as exc:
            raise Precondition(str(exc)) from exc
    try:
        return channel_from_spec(doc)
    except ChannelSpecError:
        raise
    except ValueError as exc:
        raise Precondition(str(exc)) from exc


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise Precondition(message)


def cmd_q1(ch, p: dict) -> dict:
    from .entropies import q1

    restarts = p.get("restarts") or 20
    _require(restarts >= 1, "restarts must be >= 1")
    check = None
    if p.get("check_degradable"):
        from .degradable import certify_degradability, conditional_entropy_f_given_ep, symmetrized_dilation

        cert = certify_degradability(ch)
        _require(cert.degrading_choi is not None, "channel is not certified degradable")
        check = conditional_entropy_f_given_ep(symmetrized_dilation(ch, cert.degrading_choi))
    res = q1(ch, restarts=restarts, seed=p.get("seed") or 0, dilation_entropy=check)
    return {
        "value": res.value,
        "state": res.state,
        "converged": res.converged,
        "iterations": res.iterations,
        "restarts": res.restarts,
        "grid_value": res.grid_value,
        "degrading_check": res.degrading_check,
    }


def cmd_certify(ch, p: dict) -> dict:
    from .degradable import certify_degradability

    cert = certify_degradability(ch)
    out = cert.to_dict()
    out["degrading_choi"] = cert.degrading_choi
    return out


def _choi_state(ch, cond: str):
    din = ch.din
    phi = np.outer(max_entangled(din), max_entangled(din).conj())
    if cond == "B":
        return ch.apply_local(phi, [din, din], 1), din, ch.dout
    comp = complementary(ch)
    return comp.apply_local(phi, [din, din], 1), din, comp.dout


def cmd_entropy(ch, p: dict) -> dict:
    from .entropies import hmax_bipartite, hmax_smooth_bipartite, hmin_bipartite, hmin_smooth_bipartite

    kind = p.get("kind") or "hmin"
    _require(kind in ("hmin", "hmax"), "kind must be hmin or hmax")
    eps = p.get("eps")
    smooth = bool(p.get("smooth")) or bool(eps)
    eps = 0.0 if eps is None else eps
    _require(0 <= eps < 1, "epsilon must be in [0, 1)")
    _require(not smooth or eps > 0, "smoothing needs epsilon > 0")
    cond = p.get("cond") or "B"
    _require(cond in ("B", "E"), "cond must be B or E")
    rho, da, db = _choi_state(ch, cond)
    if kind == "hmin":
        val = hmin_smooth_bipartite(rho, da, db, eps) if smooth else hmin_bipartite(rho, da, db)
    else:
        val = hmax_smooth_bipartite(rho, da, db, eps) if smooth else hmax_bipartite(rho, da, db)
    return {"kind": kind, "eps": eps, "smooth": smooth, "cond": cond, "state": "choi", "value": val}


def cmd_bound(ch, p: dict) -> dict:
    from . import converse as cv
    from .entropies import q1

    kind = p.get("kind")
    _require(kind in ("thm1", "thm2", "thm3", "weak"), "bound kind must be thm1, thm2, thm3 or weak")
    n = p.get("n")
    _require(n is not None and n >= 1, "n must be a positive integer")
    eps = p.get("eps")
    _require(eps is not None, "epsilon is required")
    delta = p.get("delta") or 0.0
    dim_a = p.get("dimA") or ch.din
    logne = p.get("logne") or 0.0
    const = cv.THM3_CONST if p.get("const") is None else p["const"]

    def evaluate(q, mu):
        if kind == "weak":
            return cv.weak_bound(q, n, eps)
        if kind == "thm1":
            return cv.thm1_bound(q, dim_a, n, eps, mu)
        if kind == "thm2":
            return cv.thm2_bound(q, dim_a, n, eps, delta, mu)
        return cv.thm3_bound(q, dim_a, n, eps, mu, logne, const)

    # validate preconditions before any expensive work
    try:
        evaluate(0.0, 0.0)
    except cv.PreconditionError as exc:
        raise Precondition(str(exc)) from exc
    q1_res = None
    q = p.get("q1")
    if q is None:
        q1_res = q1(ch, restarts=10, seed=0)
        q = max(0.0, q1_res.value)
    mu_info = None
    mu = p.get("mu")
    if mu is None and kind != "weak":
        est = cv.default_mu(ch, p.get("mu_convention") or "optimizer",
                            rho=None if q1_res is None else q1_res.state)
        mu = est.value
        mu_info = {"convention": est.convention, "raw": est.raw, "cap": est.cap}
    rep = evaluate(q, mu or 0.0)
    out = rep.to_dict()
    out["mu_estimate"] = mu_info
    return out


def _abe_state(ch) -> PureState:
    din = ch.din
    dil = minimal_dilation(ch)
    u = dil.U  # (B E) x A'
    phi = max_entangled(din).reshape(din, din)
    psi = (phi @ u.T).reshape(-1)
    return PureState(psi, [("A", din), ("B", dil.out_dim), ("E", dil.env_dim)])


def cmd_decouple(ch, p: dict) -> dict:
    from . import converse as cv
    from .entropies import hmin_bipartite, hmin_smooth_bipartite
    from .matqi import partial_trace

    psi = _abe_state(ch)
    da = ch.din
    eta = 0.05 if p.get("eta") is None else p["eta"]
    eps = 0.3 if p.get("eps") is None else p["eps"]
    trials = p.get("trials") or 20
    berta_trials = p.get("berta_trials") or 100
    seed = p.get("seed") or 0
    _require(0 <= eta < 1, "eta must be in [0, 1)")
    _require(0 < eps <= 1, "epsilon must be in (0, 1]")
    _require(berta_trials >= 10, "berta trials must be >= 10")
    d = p.get("d")
    _require(d is None or 1 <= d <= da, f"d must be in [1, {da}]")
    rho = psi.density()
    ae = partial_trace(rho, ["A", "E"])
    if eta > 0:
        h = hmin_smooth_bipartite(ae.matrix, ae.dims[0], ae.dims[1], eta)
    else:
        h = hmin_bipartite(ae.matrix, ae.dims[0], ae.dims[1])
    if d is None:
        d = max(1, min(da, cv.one_shot_rank(h, eps)))
    results = [cv.decoupling_trial(psi, d, eta, eps, seed + k, hmin_eta=h) for k in range(trials)]
    best = min(results, key=lambda r: r.distance)
    berta = cv.berta_average(psi, d, berta_trials, seed)
    return {
        "d": d,
        "hmin_eta": h,
        "bound": best.bound,
        "best_distance": best.distance,
        "best_seed": best.seed,
        "holds": best.distance <= best.bound,
        "distances": [r.distance for r in results],
        "berta_mean": berta.mean,
        "berta_stderr": berta.stderr,
        "berta_bound": berta.bound,
        "berta_holds": berta.holds,
    }


def default_private_code(ch):
    """Computational-basis signals with the pretty-good measurement on their outputs."""
    from .converse import PrivateCode
    from .matqi import pinv_psd

    sig = np.array([np.diag(np.eye(ch.din)[x]) for x in range(ch.din)], dtype=complex)
    outs = ch(sig)
    s_inv = pinv_psd(outs.sum(axis=0), 0.5)
    povm = s_inv[None] @ outs @ s_inv[None]
    rest = np.eye(ch.dout) - povm.sum(axis=0)
    povm[0] = povm[0] + (rest + rest.conj().T) / 2
    return PrivateCode(sig, povm)


def cmd_privacy(ch, p: dict) -> dict:
    from .converse import PrivateCode, private_code_metrics

    doc = p.get("code")
    if doc is None:
        code = default_private_code(ch)
    else:
        def cm(a):
            a = np.asarray(a, dtype=float)
            return a[..., 0] + 1j * a[..., 1]

        code = PrivateCode(cm(doc["signals"]), cm(doc["povm"]))
    err, priv = private_code_metrics(ch, code)
    return {"M": code.M, "error": err, "privacy": priv}


def cmd_decoder(ch, p: dict) -> dict:
    from .converse import max_entangled_input, optimal_decoder

    d = p.get("d") or ch.din
    _require(1 <= d <= ch.din, f"d must be in [1, {ch.din}]")
    res = optimal_decoder(ch, max_entangled_input(d, ch.din))
    return {"d": d, "fidelity": res.fidelity, "entanglement_fidelity": res.entanglement_fidelity}


def _schur_matrix(ch):
    ks = np.asarray(ch.kraus)
    off = ks - np.einsum("kii->ki", ks)[:, :, None] * np.eye(ch.din)[None]
    if ch.din != ch.dout or np.max(np.abs(off)) > 1e-12:
        return None
    diag = np.einsum("kii->ki", ks)
    return diag.T @ diag.conj()


def cmd_symsdp(ch, p: dict) -> dict:
    from . import degradable as dg
    from . import symsdp

    ns = p.get("ns") or [1, 2]
    eps = 0.5 if p.get("eps") is None else p["eps"]
    _require(0 < eps < 1, "epsilon must be in (0, 1)")
    _require(all(1 <= n <= symsdp.MAX_N for n in ns), f"n must be in [1, {symsdp.MAX_N}]")
    s = _schur_matrix(ch)
    if s is not None:
        dil = dg.schur_direct_dilation(s)
    else:
        cert = dg.certify_degradability(ch)
        _require(cert.degrading_choi is not None, "channel is not certified degradable")
        dil = dg.type_i_lift(ch, dg.symmetrized_dilation(ch, cert.degrading_choi)).dilation
    ext = dg.extract_symmetric_channel(dil)
    _require(dil.dE <= symsdp.MAX_E and ext.dG <= symsdp.MAX_G,
             f"search scope is |E| <= {symsdp.MAX_E}, |G| <= {symsdp.MAX_G} (got {dil.dE}, {ext.dG})")
    recs = symsdp.search(ext.W, ext.chi, ns=ns, eps=eps)
    return {"sign": ext.sign, "dG": ext.dG, "dE": dil.dE,
            "records": [{k: v for k, v in r.to_dict().items() if k != "candidate"} for r in recs]}


SWEEP_TARGETS = {
    "q1": lambda res: {"value": res["value"]},
    "certify": lambda res: {"verdict": res["verdict"], "degrade_slack": res["degrade_slack"],
                            "antidegrade_slack": res["antidegrade_slack"]},
    "bound": lambda res: {"total": res["total"], "rate": res["total"] / res["n"]},
    "decoder": lambda res: {"fidelity": res["fidelity"]},
    "entropy": lambda res: {"value": res["value"]},
}


def _sweep_point(job):
    idx, target, chan_doc, params, name, value = job
    chan_doc = json.loads(json.dumps(chan_doc))
    params = dict(params)
    if name in INT_PARAMS and float(value).is_integer():
        value = int(value)
    if "zoo" in chan_doc and name in ZOO_PARAMS:
        chan_doc.setdefault("params", {})[name] = value
    else:
        params[name] = value
    res = COMMAND_FUNCS[target](_load_channel(chan_doc), params)
    row = {"index": idx, name: value}
    row.update(SWEEP_TARGETS[target](res))
    return row


def cmd_sweep(ch_doc, p: dict) -> dict:
    target = p.get("target")
    _require(target in SWEEP_TARGETS, f"sweep target must be one of {sorted(SWEEP_TARGETS)}")
    name = p.get("param")
    _require(bool(name), "sweep needs --param")
    in_channel = "zoo" in ch_doc and name in ZOO_PARAMS
    _require(in_channel or name in PARAM_KEYS[target],
             f"parameter {name!r} is neither a zoo channel parameter nor a {target} option")
    values = p.get("values") or []
    _require(len(values) > 0, "sweep needs --values")
    sub = {k: p.get(k) for k in ("kind", "n", "eps", "delta", "mu", "d") if p.get(k) is not None}
    jobs = [(i, target, ch_doc, sub, name, v) for i, v in enumerate(values)]
    workers = max(1, int(os.environ.get("QCONV_THREADS", "1") or 1))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as ex:
            rows = list(ex.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    rows.sort(key=lambda r: r["index"])
    return {"rows": rows}


COMMAND_FUNCS = {
    "q1": cmd_q1,
    "certify": cmd_certify,
    "entropy": cmd_entropy,
    "bound": cmd_bound,
    "decouple": cmd_decouple,
    "privacy": cmd_privacy,
    "decoder": cmd_decoder,
    "symsdp-search": cmd_symsdp,
}


def run_config(config: dict, fmt: str = "json") -> str:
    """Execute a run configuration and return the serialized report.

    The configuration is first rounded exactly as it will be written, so the
    embedded config and the computation always agree and a replay of the
    report is byte-identical.
    """
    config = json.loads(json.dumps(_clean(config)))
    command = config["command"]
    if command == "sweep":
        _load_channel(config["channel"])
        result = cmd_sweep(config["channel"], config["params"])
        if fmt == "csv":
            return _csv(result["rows"])
    else:
        ch = _load_channel(config["channel"])
        result = COMMAND_FUNCS[command](ch, config["params"])
        if fmt == "csv":
            flat = {k: v for k, v in _clean(result).items() if not isinstance(v, (list, dict))}
            return _csv([flat])
    report = {"artifact": f"qconv {__version__}", "config": config, "result": result}
    return dumps(report)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _add_channel(sp):
    g = sp.add_argument_group("channel")
    g.add_argument("--channel", help="channel-spec JSON file")
    g.add_argument("--zoo", help="zoo channel kind (identity, erasure, dephasing, depolarizing, schur, constant, random)")
    g.add_argument("--d", type=int, dest="zoo_d", help="zoo dimension parameter")
    g.add_argument("--q", type=float, help="erasure probability")
    g.add_argument("--p", type=float, help="noise parameter")
    g.add_argument("--S", help="Schur multiplier as JSON")
    g.add_argument("--sigma", help="output state of a constant channel as JSON")
    g.add_argument("--din", type=int)
    g.add_argument("--dout", type=int)
    g.add_argument("--kraus-rank", type=int, dest="kraus_rank")
    g.add_argument("--channel-seed", type=int, dest="chan_seed")


def _add_output(sp):
    sp.add_argument("-o", "--output", help="report path (default: stdout)")
    sp.add_argument("--format", choices=("json", "csv"), default="json")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qconv", description="Converse bounds and entropies for quantum channels.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("q1", help="single-letter coherent information")
    _add_channel(sp)
    sp.add_argument("--restarts", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--check-degradable", action="store_true", dest="check_degradable")
    _add_output(sp)

    sp = sub.add_parser("certify", help="degradability certificate")
    _add_channel(sp)
    _add_output(sp)

    sp = sub.add_parser("entropy", help="min/max entropy of the Choi state")
    _add_channel(sp)
    sp.add_argument("--kind", choices=("hmin", "hmax"), default="hmin")
    sp.add_argument("--smooth", action="store_true")
    sp.add_argument("--eps", type=float)
    sp.add_argument("--cond", choices=("B", "E"), default="B")
    _add_output(sp)

    sp = sub.add_parser("bound", help="converse bound report")
    sp.add_argument("kind", choices=("thm1", "thm2", "thm3", "weak"))
    _add_channel(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--mu", type=float)
    sp.add_argument("--mu-convention", choices=("optimizer", "uniform"), dest="mu_convention")
    sp.add_argument("--logne", type=float, help="log N_E of the symmetric channel (thm3)")
    sp.add_argument("--const", type=float, help="constant in the O(log n) term (thm3)")
    sp.add_argument("--q1", type=float, help="use this Q^(1) instead of optimizing")
    sp.add_argument("--dimA", type=int)
    _add_output(sp)

    sp = sub.add_parser("decouple", help="one-shot decoupling simulation")
    _add_channel(sp)
    sp.add_argument("--rank", type=int, dest="d", help="code rank d (default: one-shot rank)")
    sp.add_argument("--eta", type=float, default=0.05)
    sp.add_argument("--eps", type=float, default=0.3)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--berta-trials", type=int, default=100, dest="berta_trials")
    sp.add_argument("--seed", type=int, default=0)
    _add_output(sp)

    sp = sub.add_parser("privacy", help="error and privacy of a private code")
    _add_channel(sp)
    sp.add_argument("--code", help="code JSON {signals, povm} as [re, im] arrays")
    _add_output(sp)

    sp = sub.add_parser("decoder", help="optimal decoder fidelity")
    _add_channel(sp)
    sp.add_argument("--rank", type=int, dest="d")
    _add_output(sp)

    sp = sub.add_parser("symsdp-search", help="dual SDP search on multiply symmetric states")
    _add_channel(sp)
    sp.add_argument("--ns", type=_ints, default=[1, 2])
    sp.add_argument("--eps", type=float, default=0.5)
    _add_output(sp)

    sp = sub.add_parser("sweep", help="grid over one parameter")
    _add_channel(sp)
    sp.add_argument("--target", required=True, choices=sorted(SWEEP_TARGETS))
    sp.add_argument("--param", required=True)
    sp.add_argument("--values", type=_floats, required=True)
    sp.add_argument("--kind")
    sp.add_argument("--n", type=int)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--mu", type=float)
    sp.add_argument("--rank", type=int, dest="d")
    _add_output(sp)

    sp = sub.add_parser("replay", help="re-run the configuration embedded in a report")
    sp.add_argument("report")
    _add_output(sp)
    return ap


def _channel_args(args):
    class A:
        pass

    a = A()
    a.channel = getattr(args, "channel", None)
    a.zoo = getattr(args, "zoo", None)
    for k in ZOO_PARAMS:
        setattr(a, k, None)
    a.d = getattr(args, "zoo_d", None)
    a.q = getattr(args, "q", None)
    a.p = getattr(args, "p", None)
    a.S = getattr(args, "S", None)
    a.sigma = getattr(args, "sigma", None)
    a.din = getattr(args, "din", None)
    a.dout = getattr(args, "dout", None)
    a.kraus_rank = getattr(args, "kraus_rank", None)
    a.seed = getattr(args, "chan_seed", None)
    return a


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    first = next((a for a in argv if not a.startswith("-")), None)
    if first is None or first not in COMMANDS:
        if any(a in ("-h", "--help") for a in argv) and first is None:
            make_parser().print_help()
            return 0
        sys.stderr.write(f"qconv: unknown command {first!r}; choose from {', '.join(COMMANDS)}\n")
        return EXIT_USAGE
    try:
        args = make_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_PRECONDITION if exc.code else 0
    try:
        if args.command == "replay":
            try:
                with open(args.report) as fh:
                    config = json.load(fh)["config"]
            except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ChannelSpecError(f"cannot read report {args.report!r}: {exc}") from exc
            if config.get("command") not in COMMANDS[:-1]:
                raise ChannelSpecError(f"report has unknown command {config.get('command')!r}")
            fmt = args.format
        else:
            cargs = _channel_args(args)
            doc = _channel_doc(cargs)
            params = {}
            for k in PARAM_KEYS[args.command]:
                params[k] = getattr(args, k, None)
            if args.command == "privacy" and params.get("code") is not None:
                try:
                    with open(params["code"]) as fh:
                        params["code"] = json.load(fh)
                except (OSError, json.JSONDecodeError) as exc:
                    raise ChannelSpecError(f"cannot read code file: {exc}") from exc
            config = {"command": args.command, "channel": doc, "params": params}
            fmt = args.format
        text = run_config(config, fmt)
    except ChannelSpecError as exc:
        sys.stderr.write(f"qconv: {exc}\n")
        return EXIT_DATAERR
    except (Precondition, DimensionError, ValueError) as exc:
        sys.stderr.write(f"qconv: precondition violated: {exc}\n")
        return EXIT_PRECONDITION
    _write(text, args.output)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
