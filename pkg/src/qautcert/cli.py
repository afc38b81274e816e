"""Command-line front end: run verification suites per partition, emit
deterministic JSON certificates (timings quarantined in their own section),
render Markdown reports, and diff certificates structurally.

Exit codes: 0 all selected suites passed, 1 at least one suite failed,
2 malformed configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import __version__
from .algebra import BlockSpec
from .arith import FloatConfig
from .cocycle import (
    FinAbGroup,
    fourier_function_algebra,
    spec_cocycle,
    verify_twist_theorem,
)
from .crossed import (
    GroupAction,
    conjugation_lemma_check,
    takesaki_takai_check,
)
from .pauli import (
    BlockEmbedding,
    depolarization_check,
    entangled_basis,
    is_unitary_error_basis,
    pvm_check,
    weyl_basis,
)
from .qaut import (
    GeneratorAssignment,
    QautPresentation,
    SnPresentation,
    arbitrary_permutations,
    block_preserving_permutations,
    direct_sum_assignment,
    check_relations,
    classical_assignment_aut,
    classical_theta_battery,
    covariance_check,
    haar_compat_check,
    permutation_assignment,
    pi_map,
    rearranged_Q_check,
    rho_map,
    strict_word_check,
    uet_pvm,
)
from .arith import Mat

SUITE_NAMES = ("ueb", "twist", "conj", "tt", "pvm", "homs", "shuffle", "cov", "haar")

ENV_PREFIX = "QAUTCERT_"

CONVENTIONS = {
    "pauli": "X diagonal (X|j> = w^j |j>), Z cyclic shift (Z|j> = |j+1>)",
    "weyl_product": "T_ij T_kl = w^(-jk) T_(i+k,j+l)",
    "pairing": "<chi, g> = prod_i zeta_(f_i)^(chi_i g_i) on matching tuples",
    "base_cocycle": "w'([j1,j2],[k1,k2]) = zeta_n^(j1 k2)",
    "sqrt_branch": "psi(h) = zeta_(2M)^(-k) for w'(h,h^-1) = zeta_M^k, shared within {h, h^-1}",
    "base_points": "torsor base point (0,0) per block",
    "layout": "interleaved (a1,b1,...,am,bm) <-> paired ((a..),(b..)) mixed radix",
    "shuffle": "(1,2,3,4) -> (1,3)(2,4), applied once at certificate assembly",
    "pi_prefactor": "1/n_r (forced by the column-sum relation)",
    "rho_prefactor": "1/n_s (forced by idempotency of the images)",
    "shuffle_constant": "n_s",
    "beta_targets": "x+1|s=t, y-1|s=t, v+1|r=t, w-1|r=t",
}


class ConfigError(ValueError):
    pass


class VersionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class SuiteConfig:
    partition: tuple[int, ...]
    backend: str = "exact"
    tol: float = 1e-9
    seed: int = 42
    suites: tuple[str, ...] = SUITE_NAMES
    out: str | None = None
    markdown: str | None = None
    force: bool = False
    workers: int = 1
    strict: bool = False

    def __post_init__(self):
        if not self.partition or any(n < 1 for n in self.partition):
            raise ConfigError("partition entries must be >= 1")
        if self.backend not in ("exact", "float"):
            raise ConfigError("backend must be exact or float")
        if self.tol <= 0:
            raise ConfigError("tolerance must be positive")
        unknown = [s for s in self.suites if s not in SUITE_NAMES]
        if unknown:
            raise ConfigError(f"unknown suites: {', '.join(unknown)}")
        N = sum(n * n for n in self.partition)
        cap = 16 if self.backend == "exact" else 36
        if N > cap and not self.force:
            raise ConfigError(
                f"N = {N} exceeds the desk-scale cap {cap} for the {self.backend} "
                "backend; pass --force to override")

    @property
    def spec(self) -> BlockSpec:
        return BlockSpec(self.partition)


# ---------------------------------------------------------------------------
# suites

def _suite_ueb(cfg: SuiteConfig) -> dict:
    spec = cfg.spec
    backend, tol = cfg.backend, cfg.tol
    fc = FloatConfig(tol)
    worst = 0.0
    cases = 0
    for n in sorted(set(spec.sizes)):
        wb = weyl_basis(n)
        family = wb.family if backend == "exact" else [m.to_float(fc) for m in wb.family]
        rep = is_unitary_error_basis(family, n)
        if not rep.ok:
            return {"passed": False, "failure": f"n={n}: {rep.failure}",
                    "worst_residual": rep.worst_residual}
        worst = max(worst, rep.worst_residual)
        for a in range(n):
            for b in range(n):
                unit = Mat.exact([[1 if (p, q) == (a, b) else 0 for q in range(n)]
                                  for p in range(n)])
                x = unit if backend == "exact" else unit.to_float(fc)
                drep = depolarization_check(family, x)
                if not drep.ok:
                    return {"passed": False,
                            "failure": f"depolarization n={n} unit ({a},{b})",
                            "worst_residual": drep.worst_residual}
                worst = max(worst, drep.worst_residual)
                cases += 1
        eb = entangled_basis(n)
        if backend == "float":
            for va in eb.vectors:
                for vb in eb.vectors:
                    ip = (va.to_float(fc).adjoint() @ vb.to_float(fc)).entry(0, 0)
                    expect = 1.0 if va is vb else 0.0
                    worst = max(worst, abs(ip - expect))
        cases += n * n
    emb = BlockEmbedding(spec)
    for s, n in enumerate(spec.sizes, start=1):
        fam = [emb.bracket_phi(s, i, j) for i in range(n) for j in range(n)]
        if backend == "float":
            fam = [p.to_float(fc) for p in fam]
        prep = pvm_check(fam)
        worst = max(worst, prep.worst_residual)
        cases += len(fam)
    return {"passed": True, "worst_residual": worst, "cases": cases,
            "block_sizes_checked": sorted(set(spec.sizes))}


def _suite_twist(cfg: SuiteConfig) -> dict:
    return verify_twist_theorem(cfg.spec, backend=cfg.backend, seed=cfg.seed)


def _suite_conj(cfg: SuiteConfig) -> dict:
    graded = fourier_function_algebra(cfg.spec)
    sigma = spec_cocycle(cfg.spec)
    return conjugation_lemma_check(graded, sigma, backend=cfg.backend, tol=cfg.tol)


def _tt_group(spec: BlockSpec) -> FinAbGroup:
    """Largest canonical translation subgroup keeping the double crossed
    product at desk scale (dimension <= 300)."""
    n1 = spec.sizes[0]
    full = []
    for n in spec.sizes:
        full += [n, n]
    for factors in (tuple(full), (n1, n1), (n1,)):
        order = 1
        for f in factors:
            order *= f
        if spec.N * order * order <= 300:
            return FinAbGroup(factors)
    return FinAbGroup((1,))


def _suite_tt(cfg: SuiteConfig) -> dict:
    spec = cfg.spec
    graded = fourier_function_algebra(spec)
    group = _tt_group(spec)
    G = graded.group
    cols = {}
    for g in group.elements():
        padded = tuple(g) + (0,) * (len(G.factors) - len(g))
        cols[g] = tuple(((i, G.pairing(graded.degrees[i], padded)),)
                        for i in range(graded.algebra.dim))
    action = GroupAction.from_columns(group, graded.algebra, cols)
    out = takesaki_takai_check(action, seed=cfg.seed)
    out["acting_group"] = list(group.factors)
    return out


def _suite_pvm(cfg: SuiteConfig) -> dict:
    return uet_pvm(cfg.spec, backend=cfg.backend, tol=cfg.tol)


def _suite_homs(cfg: SuiteConfig) -> dict:
    spec = cfg.spec
    fc = FloatConfig(cfg.tol)
    pi = pi_map(spec)
    qpres = QautPresentation(spec)
    # block-preserving by default, plus a few arbitrary permutations and one
    # direct sum: matrix-valued and block-crossing members exercise the
    # relation families the classical block-preserving points cannot reach
    perms = block_preserving_permutations(spec, 20, seed=cfg.seed)
    tagged = [("block", p) for p in perms]
    tagged += [("any", p) for p in arbitrary_permutations(spec, 3, seed=cfg.seed)]
    worst = 0.0
    battery_record = []
    for mode, perm in tagged:
        uasg = permutation_assignment(spec, perm)
        values = uasg.values
        if cfg.backend == "float":
            values = {k: v.to_float(fc) for k, v in values.items()}
        qvals = {sym: ft.substitute(values) if cfg.backend == "exact"
                 else ft_to_float(ft, fc).substitute(values)
                 for sym, ft in pi.items()}
        rep = check_relations(GeneratorAssignment(qpres, qvals))
        worst = max(worst, rep.worst_residual)
        battery_record.append(
            f"{mode}:" + ",".join(f"{k}->{v}" for k, v in sorted(perm.items())))
        if not rep.ok:
            return {"passed": False, "failure": f"pi battery: {rep.failing}",
                    "worst_residual": worst, "pi_battery": battery_record}
    dsum = direct_sum_assignment(spec, perms[:2])
    values = dsum.values
    if cfg.backend == "float":
        values = {k: v.to_float(fc) for k, v in values.items()}
    qvals = {sym: ft.substitute(values) if cfg.backend == "exact"
             else ft_to_float(ft, fc).substitute(values)
             for sym, ft in pi.items()}
    rep = check_relations(GeneratorAssignment(qpres, qvals))
    worst = max(worst, rep.worst_residual)
    battery_record.append("direct_sum:first-two-block-preserving")
    if not rep.ok:
        return {"passed": False, "failure": f"pi direct sum: {rep.failing}",
                "worst_residual": worst, "pi_battery": battery_record}
    rho, rho_report = rho_map(spec)
    if not rho_report["both_forms_agree"]:
        return {"passed": False, "failure": "rho displayed forms disagree",
                "worst_residual": worst}
    upres = SnPresentation(spec)
    battery = classical_theta_battery(spec, 10, seed=cfg.seed)
    theta_record = []
    for entry in battery:
        theta = entry[-1]
        qasg = classical_assignment_aut(spec, theta)
        values = qasg.values
        if cfg.backend == "float":
            values = {k: v.to_float(fc) for k, v in values.items()}
        uvals = {sym: ft.substitute(values) if cfg.backend == "exact"
                 else ft_to_float(ft, fc).substitute(values)
                 for sym, ft in rho.items()}
        rep = check_relations(GeneratorAssignment(upres, uvals))
        worst = max(worst, rep.worst_residual)
        theta_record.append(str(entry[:-1]))
        if not rep.ok:
            return {"passed": False, "failure": f"rho battery: {rep.failing}",
                    "worst_residual": worst, "theta_battery": theta_record}
    out = {"passed": True, "worst_residual": worst,
           "pi_permutations": len(perms), "rho_automorphisms": len(battery),
           "rho_forms_agree": True,
           "pi_battery": battery_record, "theta_battery": theta_record}
    if cfg.strict:
        out["strict_mode"] = strict_word_check(spec)
    return out


def ft_to_float(ft, fc: FloatConfig):
    from .formal import FormalTensor

    out = FormalTensor(ft.a, ft.b)
    for w, c in ft.terms.items():
        out.terms[w] = c.to_float(fc)
    return out


def _suite_shuffle(cfg: SuiteConfig) -> dict:
    return rearranged_Q_check(cfg.spec, backend=cfg.backend, tol=cfg.tol)


def _suite_cov(cfg: SuiteConfig) -> dict:
    return covariance_check(cfg.spec, backend=cfg.backend, tol=cfg.tol)


def _suite_haar(cfg: SuiteConfig) -> dict:
    return haar_compat_check(cfg.spec, backend=cfg.backend, tol=cfg.tol)


_SUITES = {
    "ueb": _suite_ueb,
    "twist": _suite_twist,
    "conj": _suite_conj,
    "tt": _suite_tt,
    "pvm": _suite_pvm,
    "homs": _suite_homs,
    "shuffle": _suite_shuffle,
    "cov": _suite_cov,
    "haar": _suite_haar,
}


# ---------------------------------------------------------------------------
# certificate assembly

def run(cfg: SuiteConfig) -> dict:
    """Execute the selected suites and assemble the certificate."""
    results: dict = {}
    timings: dict = {}

    def run_one(name):
        t0 = time.perf_counter()
        try:
            fragment = _SUITES[name](cfg)
        except Exception as exc:  # suite crashes are certificate failures
            fragment = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
        return name, fragment, time.perf_counter() - t0

    selected = list(cfg.suites)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            for name, fragment, dt in pool.map(run_one, selected):
                results[name] = fragment
                timings[name] = round(dt, 6)
    else:
        for name in selected:
            _, fragment, dt = run_one(name)
            results[name] = fragment
            timings[name] = round(dt, 6)
    passed = all(results[name].get("passed", False) for name in selected)
    cert = {
        "schema": 1,
        "tool": {"name": "qautcert", "version": __version__},
        "config": {
            "partition": list(cfg.partition),
            "backend": cfg.backend,
            "tol": cfg.tol,
            "seed": cfg.seed,
            "suites": sorted(cfg.suites),
            "force": cfg.force,
            "strict": cfg.strict,
        },
        "conventions": dict(CONVENTIONS),
        "suites": {name: results[name] for name in sorted(results)},
        "summary": {
            "passed": passed,
            "suites_passed": sum(1 for n in selected if results[n].get("passed")),
            "suites_failed": sum(1 for n in selected if not results[n].get("passed")),
        },
        "timings": timings,
    }
    return cert


def certificate_json(cert: dict) -> str:
    return json.dumps(cert, sort_keys=True, indent=2) + "\n"


def certificate_markdown(cert: dict) -> str:
    """Markdown rendering, a pure function of the certificate JSON."""
    lines = [
        f"# qautcert report (schema {cert['schema']}, v{cert['tool']['version']})",
        "",
        f"- partition: {cert['config']['partition']}",
        f"- backend: {cert['config']['backend']}  tol: {cert['config']['tol']}"
        f"  seed: {cert['config']['seed']}",
        f"- overall: {'PASS' if cert['summary']['passed'] else 'FAIL'}",
        "",
        "| suite | passed | worst residual | notes |",
        "|-------|--------|----------------|-------|",
    ]
    for name, frag in sorted(cert["suites"].items()):
        resid = frag.get("worst_residual", "")
        note = frag.get("failure", frag.get("error", ""))
        lines.append(f"| {name} | {frag.get('passed')} | {resid} | {note} |")
    lines.append("")
    lines.append("## Conventions")
    for k, v in sorted(cert["conventions"].items()):
        lines.append(f"- {k}: {v}")
    lines.append("")
    return "\n".join(lines)


def diff(cert_a: dict, cert_b: dict) -> str:
    """Structural delta ignoring the timing section; empty when identical."""
    if cert_a.get("tool", {}).get("version") != cert_b.get("tool", {}).get("version"):
        raise VersionMismatch("certificates come from different tool versions")
    deltas: list[str] = []

    def walk(a, b, path):
        if isinstance(a, dict) and isinstance(b, dict):
            for key in sorted(set(a) | set(b)):
                if path == "" and key == "timings":
                    continue
                walk(a.get(key), b.get(key), f"{path}.{key}" if path else key)
        elif isinstance(a, list) and isinstance(b, list):
            if len(a) != len(b):
                deltas.append(f"{path}: list length {len(a)} != {len(b)}")
                return
            for i, (x, y) in enumerate(zip(a, b)):
                walk(x, y, f"{path}[{i}]")
        elif a != b:
            deltas.append(f"{path}: {a!r} != {b!r}")

    walk(cert_a, cert_b, "")
    return "\n".join(deltas)


# ---------------------------------------------------------------------------
# argument handling

def _env_default(name: str, fallback):
    return os.environ.get(ENV_PREFIX + name, fallback)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qautcert",
        description="desk-scale verification suites for quantum automorphism "
                    "group constructions")
    sub = p.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run suites and write a certificate")
    runp.add_argument("--partition", default=_env_default("PARTITION", "2"),
                      help="comma-separated block sizes, e.g. 2,1")
    runp.add_argument("--backend", default=_env_default("BACKEND", "exact"),
                      choices=["exact", "float"])
    runp.add_argument("--tol", type=float, default=float(_env_default("TOL", "1e-9")))
    runp.add_argument("--seed", type=int, default=int(_env_default("SEED", "42")))
    runp.add_argument("--suites", default=_env_default("SUITES", ",".join(SUITE_NAMES)))
    runp.add_argument("--out", default=_env_default("OUT", None))
    runp.add_argument("--markdown", default=_env_default("MARKDOWN", None))
    runp.add_argument("--force", action="store_true",
                      default=_env_default("FORCE", "") == "1")
    runp.add_argument("--workers", type=int, default=int(_env_default("WORKERS", "1")))
    runp.add_argument("--strict", action="store_true",
                      default=_env_default("STRICT", "") == "1")
    diffp = sub.add_parser("diff", help="structurally compare two certificates")
    diffp.add_argument("cert_a")
    diffp.add_argument("cert_b")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "diff":
        with open(args.cert_a) as fa, open(args.cert_b) as fb:
            a, b = json.load(fa), json.load(fb)
        try:
            delta = diff(a, b)
        except VersionMismatch as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        if delta:
            print(delta)
            return 1
        return 0
    try:
        partition = tuple(int(x) for x in str(args.partition).split(","))
        cfg = SuiteConfig(
            partition=partition,
            backend=args.backend,
            tol=args.tol,
            seed=args.seed,
            suites=tuple(s.strip() for s in args.suites.split(",") if s.strip()),
            out=args.out,
            markdown=args.markdown,
            force=args.force,
            workers=args.workers,
            strict=args.strict,
        )
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    cert = run(cfg)
    text = certificate_json(cert)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.markdown:
        with open(cfg.markdown, "w") as fh:
            fh.write(certificate_markdown(cert))
    for name in sorted(cert["suites"]):
        frag = cert["suites"][name]
        status = "PASS" if frag.get("passed") else "FAIL"
        print(f"{name}: {status}", file=sys.stderr)
    return 0 if cert["summary"]["passed"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
