"""Command-line interface: words, spectrum, equilibrium, verify, lift, render.

Exit codes: 0 success, 1 verification failure, 2 config or admission-gate
rejection, 3 capacity overflow.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import Config, load_config
from .equilibrium import (
    EquilibriumState,
    bad_mass_decay,
    build_mu,
    first_hyperbolic_time_stats,
    gibbs_report,
    invariance_residual,
    integrate_potential,
    lyapunov_estimate,
    nonlacunary_check,
    pressure_identity_residual,
    sample_orbits,
    uniqueness_crosscheck,
)
from .errors import CapacityError, ConfigError, HorseshoeError
from .hyperbolic import counting_gamma, derive_constants, hyperbolic_word_mask
from .lift3d import (
    LiftedMeasureApprox,
    Section,
    entropy_equality_report,
    lift_phi_integral_gap,
    semiconjugacy_residual,
)
from .render import generation_point_cloud, render_generation_svg
from .reportio import write_csv, write_json
from .symbolic import (
    LOG_OMEGA,
    bad_word_exponent_check,
    bad_words_upper_bound,
    count_bad_words_exact,
    count_words,
    enumerate_words,
    entropy_cesaro_estimate,
    entropy_growth_estimate,
    word_matrix,
)
from .transfer import (
    Z_n,
    distortion_report,
    spectral_solve,
    tn_recursion_residual,
)


def _provenance(cfg: Config) -> dict:
    return {
        "package": "horseshoe-thermo",
        "version": __version__,
        "numpy": np.__version__,
        "config": cfg.echo(),
    }


def _constants_block(k) -> dict:
    return {
        "gamma": k.gamma,
        "c": k.c,
        "theta": k.theta,
        "beta_exp": k.beta_exp,
        "A_sup": k.A_sup,
        "epsilon": k.epsilon,
        "gamma_counting": counting_gamma(),
    }


def cmd_words(cfg: Config, args) -> int:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    n = args.n if args.n is not None else cfg.n_max
    if args.enumerate:
        words = enumerate_words(n)
        write_csv(out / "words.csv", ["word"], [["".join(map(str, w))] for w in words])
        print(f"{len(words)} words of length {n} -> {out / 'words.csv'}")
    elif args.bad:
        gamma = args.gamma if args.gamma is not None else counting_gamma()
        exact = count_bad_words_exact(gamma, n)
        bound = bad_words_upper_bound(gamma, n)
        write_csv(
            out / "bad_words.csv",
            ["n", "gamma", "exact", "bound"],
            [[n, gamma, exact, bound]],
        )
        print(f"n={n} gamma={gamma:.6f} exact={exact} bound={bound}")
    else:
        rows = [[m, count_words(m)] for m in range(1, n + 1)]
        write_csv(out / "word_counts.csv", ["n", "count"], rows)
        print(f"N({n}) = {rows[-1][1]}")
    return 0


def cmd_spectrum(cfg: Config, args) -> int:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    phi = cfg.potential()
    k = derive_constants(cfg.parameters)
    spec = spectral_solve(phi, cfg.depth, cfg.parameters, tol=cfg.tolerances["power_iteration"])
    lower = math.exp(phi.inf_val + LOG_OMEGA)
    report = {
        "provenance": _provenance(cfg),
        "constants": _constants_block(k),
        "spectral": {
            "lambda": spec.lam,
            "pressure": spec.pressure,
            "depth": spec.depth,
            "iterations": spec.iterations,
            "residual_right": spec.residual_right,
            "residual_left": spec.residual_left,
            "lower_bound": lower,
            "lower_bound_ok": spec.lam >= lower - cfg.tolerances["golden_ratio"],
            "tolerance": cfg.tolerances["power_iteration"],
        },
    }
    write_json(out / "report.json", report)
    rows_h = [["".join(map(str, w)), float(v)] for w, v in zip(spec.h.words, spec.h.values)]
    write_csv(out / "eigenfunction.csv", ["word", "h"], rows_h)
    rows_nu = [["".join(map(str, w)), float(v)] for w, v in zip(spec.nu.words, spec.nu.masses)]
    write_csv(out / "eigenmeasure.csv", ["word", "nu"], rows_nu)
    if args.matrix:
        from .transfer import build_matrix

        M = build_matrix(phi, cfg.depth, cfg.parameters)
        (out / "matrix.txt").write_text("\n".join(M.coo_lines()) + "\n")
    print(f"lambda = {spec.lam:.12f} pressure = {spec.pressure:.12f} -> {out / 'report.json'}")
    return 0


def _equilibrium_state(cfg: Config) -> tuple[EquilibriumState, object]:
    phi = cfg.potential()
    k = derive_constants(cfg.parameters)
    spec = spectral_solve(phi, cfg.depth, cfg.parameters, tol=cfg.tolerances["power_iteration"])
    if cfg.sabotage == "gibbs":
        masses = spec.nu.masses.copy()
        first = np.array([w[0] == 2 for w in spec.nu.words])
        masses[first] *= 50.0
        spec.nu.masses = masses / masses.sum()
    return build_mu(spec), k


def cmd_equilibrium(cfg: Config, args) -> int:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    mu, k = _equilibrium_state(cfg)
    n_max = min(cfg.n_max, cfg.depth - 1)
    gamma_c = counting_gamma()
    gibbs = gibbs_report(mu, n_max, k)
    decay = bad_mass_decay(mu, gamma_c, min(cfg.n_max, mu.depth))
    pressure = pressure_identity_residual(mu)
    lyap = lyapunov_estimate(mu, k, seed=cfg.seed)
    samples = sample_orbits(mu, k, 500, 100, seed=cfg.seed)
    nonlac = nonlacunary_check(samples, k.theta)
    unique = uniqueness_crosscheck(mu, k, n_points=500)
    tails = first_hyperbolic_time_stats(mu, k, min(cfg.n_max, mu.depth))
    report = {
        "provenance": _provenance(cfg),
        "constants": _constants_block(k),
        "gibbs": {
            "rows": gibbs.rows,
            "k2": {str(n): v for n, v in gibbs.k2_estimates.items()},
        },
        "decay": {"gamma": gamma_c, "rows": decay},
        "pressure": pressure,
        "lyapunov": lyap,
        "nonlacunary": nonlac,
        "uniqueness": unique,
        "first_hyperbolic_time": tails,
        "invariance_residual": invariance_residual(mu),
        "phi_integral": integrate_potential(mu),
    }
    write_json(out / "report.json", report)
    write_csv(
        out / "gibbs.csv",
        ["n", "count", "min", "max"],
        [[r["n"], r["count"], r["min"], r["max"]] for r in gibbs.rows],
    )
    write_csv(
        out / "decay.csv",
        ["n", "mass", "count", "envelope"],
        [[r["n"], r["mass"], r["count"], r["envelope"]] for r in decay],
    )
    print(f"equilibrium report -> {out / 'report.json'}")
    return 0


def _check(name: str, ok: bool, detail: str, results: list) -> None:
    results.append({"name": name, "pass": bool(ok), "detail": detail})
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")


def cmd_verify(cfg: Config, args) -> int:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    phi = cfg.potential()
    mu, k = _equilibrium_state(cfg)
    results: list[dict] = []
    n_max = min(cfg.n_max, cfg.depth - 1)

    lower = math.exp(phi.inf_val + LOG_OMEGA)
    _check(
        "eigenvalue_lower_bound",
        mu.lam >= lower - cfg.tolerances["golden_ratio"],
        f"lambda={mu.lam:.12f} >= {lower:.12f} - tol",
        results,
    )

    dist = distortion_report(phi, n_max, k, cfg.parameters)
    half = max(r["max_spread"] for r in dist[: max(1, n_max // 2)])
    full = max(r["max_spread"] for r in dist)
    plateau_ok = full <= half * 1.5 + 1e-9
    _check(
        "birkhoff_distortion_plateau",
        plateau_ok,
        f"max spread {full:.6f} vs first-half max {half:.6f}",
        results,
    )

    gibbs = gibbs_report(mu, n_max, k)
    mins = [r["min"] for r in gibbs.rows if r["count"] > 0]
    maxs = [r["max"] for r in gibbs.rows if r["count"] > 0]
    ratio = max(maxs) / min(mins)
    k2_half = gibbs.k2_estimates[max(1, n_max // 2)]
    k2_full = gibbs.k2_estimates[n_max]
    _check(
        "gibbs_ratio_plateau",
        ratio < 10.0 and k2_full / k2_half <= 1.5,
        f"max/min={ratio:.4f}, K2 growth {k2_full / k2_half:.4f}",
        results,
    )

    gamma_c = counting_gamma()
    decay = bad_mass_decay(mu, gamma_c, min(cfg.n_max, mu.depth))
    dec_ok = all(
        decay[i + 1]["mass"] < decay[i]["mass"] for i in range(3, len(decay) - 1)
    ) and all(r["mass"] <= r["envelope"] + 1e-12 for r in decay)
    _check(
        "bad_cylinder_mass_decay",
        dec_ok,
        f"mass(4)={decay[3]['mass']:.3e} mass({len(decay)})={decay[-1]['mass']:.3e}",
        results,
    )

    dens_ok = True
    dens_checked = 0
    for n in range(1, min(14, cfg.n_max + 4) + 1):
        words = word_matrix(n)
        weak = (words != 2).sum(axis=1)
        good = np.nonzero(weak <= k.gamma * n)[0]
        for i in good:
            from .hyperbolic import hyperbolic_times_of_word

            times = hyperbolic_times_of_word(tuple(int(s) for s in words[i]), k)
            dens_checked += 1
            if not len(times) > k.theta * n:
                dens_ok = False
    _check(
        "hyperbolic_time_density",
        dens_ok,
        f"{dens_checked} non-bad words all exceed theta*n prefix times",
        results,
    )

    pres = pressure_identity_residual(mu)
    tol_p = (
        cfg.tolerances["pressure_identity"]
        if phi.family == "constant"
        else cfg.tolerances["pressure_identity_nonconstant"]
    )
    _check(
        "pressure_identity",
        pres["residual_cylinder"] <= tol_p and pres["residual_block"] <= tol_p,
        f"cylinder residual {pres['residual_cylinder']:.3e}, block {pres['residual_block']:.3e}",
        results,
    )

    rec = tn_recursion_residual(phi, min(10, cfg.depth - 2), k, cfg.parameters, mu.lam)
    res_seq = [r["residual"] for r in rec]
    k0 = None
    for i in range(len(res_seq)):
        if all(res_seq[j + 1] <= res_seq[j] + 1e-12 for j in range(i, len(res_seq) - 1)):
            k0 = i
            break
    _check(
        "recursion_residual_decay",
        k0 is not None and k0 <= 2,
        f"decreasing from k0={k0}",
        results,
    )

    zvals = [mu.lam ** (-n) * Z_n(phi, n, k, cfg.parameters)["optimistic"] for n in range(1, n_max + 1)]
    cesaro = (1.0 + sum(zvals[: n_max - 1])) / n_max
    _check(
        "normalized_envelope_bounds",
        max(zvals) <= 2.0 and cesaro >= 0.05,
        f"max lam^-n Z_n = {max(zvals):.4f}, cesaro avg = {cesaro:.4f}",
        results,
    )

    semi = semiconjugacy_residual(2000, cfg.parameters, seed=cfg.seed)
    _check(
        "semiconjugacy",
        semi <= cfg.tolerances["semiconjugacy"],
        f"max residual {semi:.3e}",
        results,
    )

    ent = entropy_equality_report(cfg.parameters)
    _check(
        "zero_fiber_entropy",
        ent["fiber_counts_constant"]
        and abs(ent["word_growth_estimate"] - LOG_OMEGA) <= cfg.tolerances["entropy_growth"],
        f"counts {ent['fiber_counts'][:3]}..., growth {ent['word_growth_estimate']:.6f}",
        results,
    )

    unique = uniqueness_crosscheck(mu, k, n_points=200)
    _check(
        "jacobian_partition_of_unity",
        unique["partition_max_dev"] <= cfg.tolerances["jacobian_partition"],
        f"max deviation {unique['partition_max_dev']:.3e}",
        results,
    )

    inv = invariance_residual(mu)
    _check("pushforward_invariance", inv <= 1e-10, f"residual {inv:.3e}", results)

    n_fail = sum(0 if r["pass"] else 1 for r in results)
    report = {
        "provenance": _provenance(cfg),
        "constants": _constants_block(k),
        "checks": results,
        "failures": n_fail,
    }
    write_json(out / "report.json", report)
    print(f"{len(results) - n_fail}/{len(results)} checks passed -> {out / 'report.json'}")
    return 0 if n_fail == 0 else 1


def cmd_lift(cfg: Config, args) -> int:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    mu, k = _equilibrium_state(cfg)
    section = Section()
    gaps = []
    for n in range(0, min(cfg.n_max, 10) + 1):
        state = LiftedMeasureApprox(n, mu, section)
        gaps.append(lift_phi_integral_gap(state))
    semi = semiconjugacy_residual(10000, cfg.parameters, seed=cfg.seed)
    ent = entropy_equality_report(cfg.parameters)
    report = {
        "provenance": _provenance(cfg),
        "constants": _constants_block(k),
        "lift": {
            "section": {"z0_P0": section.z0_P0, "z0_P1": section.z0_P1},
            "semiconjugacy_residual": semi,
            "integral_gaps": [
                {"n": g["n"], "lifted": g["lifted"], "base": g["base"], "gap": g["gap"]}
                for g in gaps
            ],
            "z_independence": gaps[0]["certificate"],
            "entropy": ent,
        },
    }
    write_json(out / "report.json", report)
    if args.points:
        rows = generation_point_cloud(min(cfg.n_max, 8), cfg.parameters, seed=cfg.seed)
        write_csv(out / "points.csv", ["x", "y", "z", "generation"], rows)
    print(f"lift report -> {out / 'report.json'}")
    return 0


def cmd_render(cfg: Config, args) -> int:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    n = args.generations
    for g in range(1, n + 1):
        count = render_generation_svg(g, cfg.parameters, out / f"generation_{g}.svg")
        print(f"generation {g}: {count} cylinders -> {out / f'generation_{g}.svg'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="horseshoe-thermo")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", type=str, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--depth", type=int, default=None)
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--n-max", type=int, default=None)
        sp.add_argument("--potential-family", type=str, default=None)
        sp.add_argument("--potential-params", type=str, default=None)

    sp = sub.add_parser("words", help="word counting and enumeration")
    common(sp)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--count", action="store_true")
    sp.add_argument("--enumerate", action="store_true")
    sp.add_argument("--bad", action="store_true")
    sp.add_argument("--gamma", type=float, default=None)
    sp.set_defaults(func=cmd_words)

    sp = sub.add_parser("spectrum", help="spectral triple at the configured depth")
    common(sp)
    sp.add_argument("--matrix", action="store_true", help="export the operator matrix")
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("equilibrium", help="equilibrium-state reports")
    common(sp)
    sp.set_defaults(func=cmd_equilibrium)

    sp = sub.add_parser("verify", help="run the full verification suite")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("lift", help="3D lift identities")
    common(sp)
    sp.add_argument("--points", action="store_true", help="export a 3D point cloud")
    sp.set_defaults(func=cmd_lift)

    sp = sub.add_parser("render", help="SVG cylinder footprints")
    common(sp)
    sp.add_argument("--generations", type=int, default=3)
    sp.set_defaults(func=cmd_render)
    return p


def _config_from_args(args) -> Config:
    overrides = {
        "seed": getattr(args, "seed", None),
        "depth": getattr(args, "depth", None),
        "threads": getattr(args, "threads", None),
        "output_dir": getattr(args, "out", None),
        "n_max": getattr(args, "n_max", None),
        "potential.family": getattr(args, "potential_family", None),
    }
    pp = getattr(args, "potential_params", None)
    if pp:
        for i, val in enumerate(pp.split(",")):
            overrides[f"potential.params.{i}"] = float(val)
    return load_config(getattr(args, "config", None), overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return args.func(cfg, args)
    except ConfigError as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return 3
    except HorseshoeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
