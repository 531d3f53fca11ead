"""Batch front door: load a model config, run one named command, write
deterministic JSON/CSV artifacts.

Model config schema (YAML, one document per model), version 1::

    schema: 1
    family: geometric        # power_law | geometric | stretched |
                             # parity_perturbed | tabulated
    # family parameters by name, e.g.
    gamma: 1.0
    x: 2.0
    beta_const: -1.1

    # power_law:        gamma, p, delta, q, shift
    # geometric:        gamma, x, delta | beta_const
    # stretched:        gamma, x, q_tilde, beta_const
    # parity_perturbed: p, c_odd, c_even
    # tabulated:        a_values: [..], b_values: [..], tail: {family: ..}

Unknown keys are rejected (exit 3).  Commands::

    classify          regime + self-adjointness verdict
    jost              Jost solution at --z (JSON bundle + CSV table)
    poly              orthonormal polynomials at --z up to --n
    asym              supercritical polynomial prefactor check at --z
    eig               eigenvalues in --grid window + finite-section oracle
    mass              spectral mass at real --z
    identity          the kappa sum rule at --z (Im z > 0)
    carleman-density  a.c. density on --grid (classical growth)
    report            re-read an artifact JSON (--artifact) and summarize

Exit codes: 0 success, 2 convergence/precision failure, 3 config error,
4 regime refusal.  Identical config + precision gives bit-identical
artifacts: floats are serialized by shortest round-trip repr, keys sorted,
no timestamps.  The environment variable JACOBI_JOST_BITS sets the default
escalation precision (--bits overrides).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Optional

import numpy as np
import yaml

from . import __version__
from .coefficients import (
    RegimeKind,
    check_essential_selfadjointness,
    classify,
    ell1_diagnostics,
    model_from_dict,
    model_hash,
)
from .errors import (
    InconsistentTail,
    JacobiJostError,
    ModelError,
    NearCritical,
    NotConverged,
    PrecisionError,
    RegimeMismatch,
    TailNotSummable,
    UnsupportedRegime,
    ZeroCrossing,
    DegenerateWronskian,
)

KIND_DISPLAY = {
    RegimeKind.SUBCRITICAL: "SubCritical",
    RegimeKind.SUPERCRITICAL: "SuperCritical",
    RegimeKind.CARLEMAN_SUBCRITICAL: "Carleman-SubCritical",
    RegimeKind.CARLEMAN_SUPERCRITICAL: "Carleman-SuperCritical",
    RegimeKind.UNSUPPORTED: "Unsupported",
}

VERDICT_DISPLAY = {
    "esa": "essentially self-adjoint",
    "deficiency_1_1": "deficiency (1,1)",
    "unknown": "undetermined",
}


def _parse_complex(s: str) -> complex:
    try:
        return complex(s.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ModelError(f"cannot parse {s!r} as a complex number") from None


def _parse_grid(s: str) -> list[float]:
    parts = s.split(":")
    if len(parts) != 3:
        raise ModelError("--grid expects lo:hi:step")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise ModelError("--grid needs step > 0 and hi >= lo")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    return repr(obj)


def _write_artifacts(out: Optional[str], artifact: dict, rows: Optional[list] = None,
                     header: Optional[list] = None) -> None:
    blob = json.dumps(_jsonable(artifact), sort_keys=True, indent=2) + "\n"
    if out is None:
        sys.stdout.write(blob)
    else:
        with open(out + ".json", "w") as fh:
            fh.write(blob)
        if rows is not None:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow(
                    [
                        repr(float(v)) if isinstance(v, (float, np.floating)) else v
                        for v in row
                    ]
                )
            with open(out + ".csv", "w") as fh:
                fh.write(buf.getvalue())


def _load_model(path: str):
    if not os.path.exists(path):
        raise ModelError(f"model config not found: {path}")
    with open(path) as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ModelError(f"config parse error in {path}: {exc}") from None
    return model_from_dict(data)


# --------------------------------------------------------------------------
# command handlers
# --------------------------------------------------------------------------

def _cmd_classify(model, args) -> int:
    regime = classify(model)
    sa = check_essential_selfadjointness(model, regime)
    diag = ell1_diagnostics(model, n_max=min(4096, 4096))
    lines = [
        f"regime: {KIND_DISPLAY[regime.kind]}",
        f"beta_inf = {regime.beta_inf!r}, kappa_inf = {regime.kappa_inf!r}",
        f"self-adjointness: {VERDICT_DISPLAY[sa.verdict]} ({sa.reason})",
    ]
    if regime.kind is RegimeKind.UNSUPPORTED:
        lines.append("refusal: |beta_inf| = 1 is outside the supported regimes")
    for fl in regime.flags:
        lines.append(f"warning: ell^1 hypothesis violated ({fl})")
    print("\n".join(lines))
    artifact = {
        "cmd": "classify",
        "model_hash": model_hash(model),
        "regime": regime.kind.value,
        "display": KIND_DISPLAY[regime.kind],
        "beta_inf": regime.beta_inf,
        "kappa_inf": regime.kappa_inf,
        "is_carleman": regime.is_carleman,
        "flags": list(regime.flags),
        "selfadjoint": sa.verdict,
        "selfadjoint_display": VERDICT_DISPLAY[sa.verdict],
        "reason": sa.reason,
        "kdev_summable": diag.kdev_summable,
        "betadiff_summable": diag.betadiff_summable,
        "alpha_summable": diag.alpha_summable,
        "version": __version__,
    }
    _write_artifacts(args.out, artifact)
    return 0


def _build_bundle(model, z, args, regime):
    from .carleman import carleman_jost
    from .volterra import jost_f

    n_trunc = args.n_trunc or 2000
    if regime.is_carleman:
        return carleman_jost(model, z, n_trunc, regime=regime, tol=args.tol)
    return jost_f(model, z, n_trunc, regime=regime, tol=args.tol)


def _cmd_jost(model, args) -> int:
    if args.z is None:
        raise ModelError("jost needs --z")
    z = _parse_complex(args.z)
    regime = classify(model)
    bundle = _build_bundle(model, z, args, regime)
    N = bundle.n_max
    log10 = math.log(10.0)
    rows = []
    for n in range(N + 1):
        rows.append(
            (
                n,
                bundle.f_log_abs[n] / log10,
                bundle.f_phase[n],
                abs(bundle.u[n]),
                float(np.angle(bundle.u[n])),
            )
        )
    artifact = {
        "cmd": "jost",
        "model_hash": model_hash(model),
        "z": z,
        "n_range": [-1, N],
        "omega": bundle.omega,
        "f_minus1_log10": bundle.f_minus1.log_abs / log10,
        "f_minus1_phase": bundle.f_minus1.phase,
        "kernel_sign": bundle.meta.get("kernel_sign"),
        "residual_sup": bundle.meta.get("residual_sup"),
        "certificate": bundle.certificate,
        "f_log10_abs": [la / log10 for la in bundle.f_log_abs.tolist()],
        "f_phase": bundle.f_phase.tolist(),
        "version": __version__,
    }
    _write_artifacts(args.out, artifact, rows, ["n", "log10_abs_f", "arg_f", "abs_u", "arg_u"])
    print(f"jost: N={N} omega={bundle.omega!r} residual={bundle.meta.get('residual_sup'):.3g}")
    return 0


def _cmd_poly(model, args) -> int:
    from .solutions import orthonormal_polys

    if args.z is None:
        raise ModelError("poly needs --z")
    z = _parse_complex(args.z)
    n = args.n or 256
    P = orthonormal_polys(model, z, n)
    log10 = math.log(10.0)
    rows = [(m, P.log_abs[m + 1] / log10, P.phase[m + 1]) for m in range(-1, n + 1)]
    artifact = {
        "cmd": "poly",
        "model_hash": model_hash(model),
        "z": z,
        "n": n,
        "log10_abs": [v / log10 for v in P.log_abs.tolist()],
        "phase": P.phase.tolist(),
        "version": __version__,
    }
    _write_artifacts(args.out, artifact, rows, ["n", "log10_abs_P", "arg_P"])
    print(f"poly: computed P_n up to n={n} at z={z!r}")
    return 0


def _cmd_asym(model, args) -> int:
    from .solutions import poly_prefactor_supercritical

    if args.z is None:
        raise ModelError("asym needs --z")
    z = _parse_complex(args.z)
    regime = classify(model)
    rep = poly_prefactor_supercritical(
        model, z, n_lo=max(8, (args.n or 400) // 2), n_hi=args.n or 400,
        n_max=args.n_trunc, regime=regime,
    )
    rows = [
        (n, float(v), rep["predicted"], float(v) - rep["predicted"])
        for n, v in zip(rep["ns"], rep["measured"])
    ]
    artifact = {
        "cmd": "asym",
        "model_hash": model_hash(model),
        "z": z,
        "predicted": rep["predicted"],
        "rel_max": rep["rel_max"],
        "rel_last": rep["rel_last"],
        "omega": rep["omega"],
        "version": __version__,
    }
    _write_artifacts(args.out, artifact, rows, ["n", "rescaled", "prediction", "residual"])
    print(
        f"asym: prefactor predicted {rep['predicted']!r}, max rel dev {rep['rel_max']:.3g}"
    )
    return 0


def _cmd_eig(model, args) -> int:
    from .spectral import finite_section_eigs, spectral_report

    if args.grid is None:
        raise ModelError("eig needs --grid lo:hi:step (step sets the scan density)")
    lams = _parse_grid(args.grid)
    lo, hi = lams[0], lams[-1]
    grid = max(8, len(lams) - 1)
    rep = spectral_report(model, lo, hi, n_trunc=args.n_trunc, grid=grid, tol=args.tol)

    # finite-section oracle with the N -> N+20 stability rule
    N0 = args.n or 60
    o1 = finite_section_eigs(model, N0, lo, hi, bits=args.bits)
    o2 = finite_section_eigs(model, N0 + 20, lo, hi, bits=args.bits)
    stable = len(o1) == len(o2) and all(
        abs(x - y) <= 1e-8 * max(1.0, abs(x)) for x, y in zip(o1, o2)
    )
    gaps = [
        min(abs(e - o) for o in o2) if o2 else math.inf for e in rep["eigenvalues"]
    ]
    verdict = "OK" if (stable and gaps and max(gaps) < 1e-6 * max(1.0, abs(hi))) else (
        "OK" if (stable and not rep["eigenvalues"]) else "MISMATCH"
    )
    artifact = {
        "cmd": "eig",
        "model_hash": model_hash(model),
        "interval": [lo, hi],
        "eigenvalues": rep["eigenvalues"],
        "masses": {
            "series": rep["masses"],
            "jost": rep["mass_boundary_route"],
        },
        "mass_total": rep["mass_total"],
        "oracle": {"N": N0 + 20, "eigs": list(o2), "stable": stable},
        "oracle_gaps": gaps,
        "n_trunc": rep["n_trunc"],
        "verdict": verdict,
        "version": __version__,
    }
    _write_artifacts(args.out, artifact)
    print(
        f"eig: {len(rep['eigenvalues'])} eigenvalues in [{lo}, {hi}], "
        f"oracle verdict {verdict}"
    )
    return 0 if verdict == "OK" else 2


def _cmd_mass(model, args) -> int:
    from .spectral import spectral_mass

    if args.z is None:
        raise ModelError("mass needs --z (a real eigenvalue)")
    lam = float(_parse_complex(args.z).real)
    m = spectral_mass(model, lam, n_trunc=args.n_trunc, tol=args.tol)
    artifact = {
        "cmd": "mass",
        "model_hash": model_hash(model),
        "lam": lam,
        "mass_series": m.mass_norm,
        "mass_jost": m.mass_boundary,
        "agreement": m.agreement,
        "n_stop": m.n_stop,
        "version": __version__,
    }
    _write_artifacts(args.out, artifact)
    print(f"mass at {lam}: series {m.mass_norm!r}, jost {m.mass_boundary!r}")
    return 0


def _cmd_identity(model, args) -> int:
    from .solutions import identity_kappa

    if args.z is None:
        raise ModelError("identity needs --z with Im z > 0")
    z = _parse_complex(args.z)
    rep = identity_kappa(model, z, n_sum=args.n or 500, n_fit=args.n_trunc or 4000)
    ok = rep.gap < 1e-2
    artifact = {
        "cmd": "identity",
        "model_hash": model_hash(model),
        "z": z,
        "lhs": rep.lhs,
        "rhs_partial": rep.rhs_partial,
        "tail_bound": rep.tail_bound,
        "gap": rep.gap,
        "kappa_upper": rep.kappa_upper,
        "kappa_lower": rep.kappa_lower,
        "ok": ok,
        "version": __version__,
    }
    _write_artifacts(args.out, artifact)
    print(
        f"identity: lhs {rep.lhs!r} vs rhs {rep.rhs_partial!r} "
        f"(gap {rep.gap:.3g}, tail bound {rep.tail_bound:.3g}) -> {'OK' if ok else 'FAIL'}"
    )
    return 0 if ok else 2


def _cmd_carleman_density(model, args) -> int:
    from .carleman import omega_carleman
    from .coefficients import classify as _classify

    if args.grid is None:
        raise ModelError("carleman-density needs --grid lo:hi:step")
    lams = _parse_grid(args.grid)
    regime = _classify(model)
    if not (regime.is_carleman and regime.is_subcritical):
        raise RegimeMismatch("a.c. density needs classical growth with |beta_inf| < 1")
    pref = math.sqrt(1.0 - regime.beta_inf**2) / math.pi
    n_trunc = args.n_trunc or 20000
    rows = []
    dens = []
    for lam in lams:
        om = omega_carleman(model, lam, n_trunc, regime=regime)
        d = pref / abs(om) ** 2
        dens.append(d)
        rows.append((lam, abs(om), d))
    artifact = {
        "cmd": "carleman-density",
        "model_hash": model_hash(model),
        "grid": [lams[0], lams[-1], lams[1] - lams[0] if len(lams) > 1 else 0.0],
        "n_trunc": n_trunc,
        "density": dens,
        "positive": bool(all(d > 0 for d in dens)),
        "version": __version__,
    }
    _write_artifacts(args.out, artifact, rows, ["lam", "abs_omega", "density"])
    print(f"carleman-density: {len(lams)} points, min {min(dens):.6g}, max {max(dens):.6g}")
    return 0


def _cmd_report(args) -> int:
    path = args.artifact
    if path is None or not os.path.exists(path):
        raise ModelError("report needs --artifact pointing at an existing JSON artifact")
    with open(path) as fh:
        art = json.load(fh)
    cmd = art.get("cmd", "?")
    lines = [f"artifact: {cmd} (model {art.get('model_hash', '?')})"]
    status = "OK"
    if cmd == "classify":
        lines.append(f"regime {art['display']}: {art['selfadjoint_display']}")
        if art["regime"] == "unsupported":
            status = "REFUSED"
            lines.append("refusal: |beta_inf| = 1 is outside the supported regimes")
        for fl in art.get("flags", []):
            lines.append(f"warning: ell^1 hypothesis violated ({fl})")
    elif cmd == "eig":
        lines.append(
            f"{len(art['eigenvalues'])} eigenvalues, oracle verdict {art['verdict']}, "
            f"mass total {art['mass_total']!r}"
        )
        status = art["verdict"] if art["verdict"] != "OK" else "OK"
    elif cmd == "identity":
        lines.append(f"gap {art['gap']!r} (tail bound {art['tail_bound']!r})")
        status = "OK" if art.get("ok") else "FAIL"
    elif cmd == "jost":
        lines.append(f"residual {art.get('residual_sup')!r}, omega {art.get('omega')!r}")
    lines.append(f"status {status}")
    print("\n".join(lines))
    return 0


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="jacobi-jost",
        description="Jost solutions and spectral data for fast-growth Jacobi matrices",
    )
    p.add_argument("--model", help="path to a YAML model config")
    p.add_argument(
        "--cmd",
        required=True,
        choices=[
            "classify",
            "jost",
            "poly",
            "asym",
            "eig",
            "mass",
            "identity",
            "carleman-density",
            "report",
        ],
    )
    p.add_argument("--z", help="spectral parameter, e.g. '1+1i' or '0.5'")
    p.add_argument(
        "--grid",
        help="real grid lo:hi:step (use --grid=-1:1:0.1 for a negative lower end)",
    )
    p.add_argument("--n", type=int, help="index cutoff (command-specific)")
    p.add_argument("--n-trunc", type=int, dest="n_trunc", help="series truncation")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--bits", type=int, help="escalation precision (default env JACOBI_JOST_BITS)")
    p.add_argument("--out", help="artifact basename; writes .json (+ .csv for tables)")
    p.add_argument("--artifact", help="input artifact for --cmd report")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.bits:
        os.environ["JACOBI_JOST_BITS"] = str(args.bits)
    try:
        if args.cmd == "report":
            return _cmd_report(args)
        if args.model is None:
            raise ModelError(f"--cmd {args.cmd} needs --model")
        model = _load_model(args.model)
        handler = {
            "classify": _cmd_classify,
            "jost": _cmd_jost,
            "poly": _cmd_poly,
            "asym": _cmd_asym,
            "eig": _cmd_eig,
            "mass": _cmd_mass,
            "identity": _cmd_identity,
            "carleman-density": _cmd_carleman_density,
        }[args.cmd]
        return handler(model, args)
    except (UnsupportedRegime, RegimeMismatch, TailNotSummable, NearCritical) as exc:
        print(f"regime refusal: {exc}", file=sys.stderr)
        return 4
    except (NotConverged, PrecisionError, ZeroCrossing, DegenerateWronskian) as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return 2
    except (ModelError, InconsistentTail) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except JacobiJostError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
