"""Seeded verification suites for the eight entanglement/coherence theorems.

Each trial is a pure function of ``(theorem, dims, seed ^ trial, cfg)`` and
returns a record of named checks. A check stores both compared quantities, the
relation, the tolerance and the residual, so a report's verdict can be
recomputed from the report alone (see ``recheck_report``).
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from math import prod
from typing import Callable, Sequence

import numpy as np

from .bases import random_cpb
from .coherence import coherence_pure, convex_roof_coherence, min_coherence_pure, min_relative_coherence, relative_coherence
from .entanglement import (
    entanglement_entropy,
    eof_2q,
    eof_convex_roof,
    is_entangled_pure,
    is_gme_pure,
    is_ppt,
    random_density,
    random_product_pure,
    random_pure,
    random_separable,
    relative_entropy_of_entanglement,
)
from .locc import Verdict, complete_product_extension, locc_distinguishable, regroup, replay_protocol
from .optimize import OptimizerConfig
from .qmat import PureState, all_bipartitions, check_dims, complement, permute_parties

SIG_DIGITS = 12
N_RANDOM_BASES = 20
NPT_MARGIN = 1e-2
MAX_REJECTIONS = 200

TOLERANCES = {
    1: {"coherent_min": 1e-6, "product_zero": 1e-9},
    2: {"min_vs_entropy": 1e-4},
    3: {"entangled_min": 1e-4, "separable_max": 1e-4},
    4: {"roof_vs_eof": 1e-3},
    5: {"coherent_min": 1e-6},
    6: {"ineq_slack": 1e-3},
    7: {"coherent_min": 1e-6, "product_zero": 1e-9},
    8: {"coherent_min": 1e-6, "product_zero": 1e-9},
}

DEFAULT_DIMS = {
    1: [(2, 2), (2, 3)],
    2: [(2, 2), (2, 3)],
    3: [(2, 2), (2, 3)],
    4: [(2, 2), (2, 3)],
    5: [(2, 2), (2, 3)],
    6: [(2, 2), (2, 3)],
    7: [(2, 2, 2)],
    8: [(2, 2, 2)],
}

CHECKS = {
    1: "entangled pure states are coherent in every random conditional product basis; "
    "product states have zero coherence in their product extension basis",
    2: "minimum pure-state coherence over conditional product bases equals the local entropy",
    3: "NPT states have positive convex-roof coherence; separable mixtures have none",
    4: "convex-roof coherence equals the entanglement of formation",
    5: "NPT states have positive relative coherence in every random conditional product basis",
    6: "minimal relative coherence is at least the relative entropy of entanglement",
    7: "multiparty pure states not fully product are coherent in fully local conditional product bases; "
    "fully product states have zero coherence in their extension basis",
    8: "GME states are coherent in bases distinguishable across some cut; "
    "biseparable states have zero coherence in a basis distinguishable across their product cut",
}

NOTES = [
    "basis minima are searched over conditional product bases (one-way LOCC distinguishable); "
    "optimizer values are upper bounds on the minima",
    "convex-roof inner minima use the local entropy of each pure element",
    "convex-roof decomposition size k = max(r, min(r^2, 2 * prod(dims))) for rank r",
]


# ---------------------------------------------------------------- checks


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    x = float(x)
    if np.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return float(f"{x:.{SIG_DIGITS}g}")


def _from_num(x) -> float:
    return {"+inf": np.inf, "-inf": -np.inf}.get(x, x) if isinstance(x, str) else float(x)


def evaluate(relation: str, lhs: float, rhs: float, tol: float) -> tuple[float, bool]:
    """Residual and pass flag. Relations: eq (|lhs-rhs| <= tol), gt (lhs > rhs),
    lt (lhs < rhs), ge (lhs >= rhs - tol)."""
    if relation == "eq":
        res = abs(lhs - rhs)
        return res, res <= tol
    if relation == "gt":
        return rhs - lhs, lhs > rhs
    if relation == "lt":
        return lhs - rhs, lhs < rhs
    if relation == "ge":
        res = rhs - lhs
        return res, res <= tol
    raise ValueError(f"unknown relation {relation!r}")


def check(name: str, lhs: float, relation: str, rhs: float, tol: float = 0.0) -> dict:
    lhs_n, rhs_n = _num(lhs), _num(rhs)
    res, ok = evaluate(relation, _from_num(lhs_n), _from_num(rhs_n), tol)
    return {"name": name, "lhs": lhs_n, "relation": relation, "rhs": rhs_n, "tol": tol, "residual": _num(res), "passed": bool(ok)}


@dataclass
class TheoremReport:
    theorem_id: int
    trials: int
    dims: list[list[int]]
    seed: int
    config: dict
    tolerances: dict
    checks_performed: str
    notes: list[str]
    records: list[dict]
    verdict: str = "fail"
    unconverged_trials: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def summary(self) -> str:
        lines = [
            f"theorem {self.theorem_id}: {self.verdict.upper()}  "
            f"({self.trials} trials x dims {', '.join('x'.join(map(str, d)) for d in self.dims)}, seed {self.seed})",
            f"{'trial':>5}  {'dims':<7} {'check':<28} {'lhs':>14} {'rel':>3} {'rhs':>14} {'residual':>11}  ok",
        ]
        for rec in self.records:
            dtxt = "x".join(map(str, rec["dims"]))
            for c in rec["checks"]:
                lines.append(
                    f"{rec['trial']:>5}  {dtxt:<7} {c['name']:<28} {_fmtv(c['lhs']):>14} {c['relation']:>3} "
                    f"{_fmtv(c['rhs']):>14} {_fmtv(c['residual']):>11}  {'yes' if c['passed'] else 'NO'}"
                )
        worst = max((c["residual"] for r in self.records for c in r["checks"] if c["relation"] == "eq"), default=None)
        if worst is not None:
            lines.append(f"max equality residual: {worst:.3e}")
        return "\n".join(lines)


def _fmtv(x) -> str:
    return x if isinstance(x, str) else f"{x:.6g}"


def recheck_report(report: dict) -> str:
    """Recompute the verdict of a serialized report from its per-trial records."""
    ok = True
    for rec in report["records"]:
        for c in rec["checks"]:
            _, passed = evaluate(c["relation"], _from_num(c["lhs"]), _from_num(c["rhs"]), c["tol"])
            ok = ok and passed
        if rec["critical"] and not rec["converged"]:
            ok = False
    return "pass" if ok else "fail"


# ---------------------------------------------------------------- sampling helpers


def _trial_cfg(cfg: OptimizerConfig, rng: np.random.Generator) -> OptimizerConfig:
    return replace(cfg, seed=int(rng.integers(2**62)))


def _npt_state(dims, rng, max_rank: int):
    """Random density of rank <= max_rank whose partial transpose has min eigenvalue <= -NPT_MARGIN."""
    for _ in range(MAX_REJECTIONS):
        rank = int(rng.integers(1, max_rank + 1))
        rho = random_density(dims, rank, rng)
        _, lam = is_ppt(rho)
        if lam <= -NPT_MARGIN:
            return rho, rank, lam
    raise RuntimeError("could not sample an NPT state")


def _entangled_pure(dims, rng) -> PureState:
    while True:
        psi = random_pure(dims, rng)
        if is_entangled_pure(psi):
            return psi


def _biseparable(dims, rng) -> tuple[PureState, tuple[int, ...]]:
    """phi_A (x) phi_B across a random cut, each side Haar random on its space."""
    m = len(dims)
    cuts = all_bipartitions(m)
    a = cuts[int(rng.integers(len(cuts)))]
    b = complement(m, a)
    da, db = prod(dims[k] for k in a), prod(dims[k] for k in b)
    za = rng.standard_normal(da) + 1j * rng.standard_normal(da)
    zb = rng.standard_normal(db) + 1j * rng.standard_normal(db)
    v = np.kron(za / np.linalg.norm(za), zb / np.linalg.norm(zb))
    layout = a + b
    back = tuple(layout.index(k) for k in range(m))
    v = permute_parties(v, tuple(dims[k] for k in layout), back)
    return PureState.normalized(v, dims), a


# ---------------------------------------------------------------- per-theorem trials


def _t1(dims, rng, cfg):
    tol = TOLERANCES[1]
    psi = _entangled_pure(dims, rng)
    vals = [coherence_pure(psi, random_cpb(dims, rng).expand()) for _ in range(N_RANDOM_BASES)]
    prod_psi = random_product_pure(dims, rng)
    ext = complete_product_extension(prod_psi)
    verdict = locc_distinguishable(ext)
    return [
        check("entangled_min_coherence", min(vals), "gt", tol["coherent_min"]),
        check("product_extension_coherence", coherence_pure(prod_psi, ext), "lt", tol["product_zero"]),
        check("extension_distinguishable", float(verdict.verdict == Verdict.DISTINGUISHABLE), "eq", 1.0),
    ], True, False


def _t2(dims, rng, cfg):
    psi = random_pure(dims, rng)
    res = min_coherence_pure(psi, (0,), _trial_cfg(cfg, rng))
    ent = entanglement_entropy(psi)
    return [check("min_coherence_vs_entropy", res.value, "eq", ent, TOLERANCES[2]["min_vs_entropy"])], res.converged, True


def _t3(dims, rng, cfg):
    tol = TOLERANCES[3]
    tcfg = _trial_cfg(cfg, rng)
    rho, rank, lam = _npt_state(dims, rng, min(2, prod(dims)))
    ent = convex_roof_coherence(rho, (0,), tcfg)
    n_terms = int(rng.integers(2, 5))
    sep = random_separable(dims, n_terms, rng)
    zero = convex_roof_coherence(sep, (0,), tcfg)
    return [
        check("npt_min_eigenvalue", lam, "lt", -NPT_MARGIN),
        check("npt_roof_coherence", ent.value, "gt", tol["entangled_min"]),
        check("separable_roof_coherence", zero.value, "lt", tol["separable_max"]),
    ], ent.converged and zero.converged, True, {"rank": rank, "separable_terms": n_terms}


def _t4(dims, rng, cfg):
    tol = TOLERANCES[4]["roof_vs_eof"]
    tcfg = _trial_cfg(cfg, rng)
    rank = int(rng.integers(1, prod(dims) + 1))
    rho = random_density(dims, rank, rng)
    roof = convex_roof_coherence(rho, (0,), tcfg)
    if tuple(dims) == (2, 2):
        ref, name, conv = eof_2q(rho), "roof_vs_eof_2q", True
    else:
        other = eof_convex_roof(rho, (0,), replace(tcfg, seed=tcfg.seed ^ 0x5A5A5A5A))
        ref, name, conv = other.value, "roof_vs_eof_convex_roof", other.converged
    return [check(name, roof.value, "eq", ref, tol)], roof.converged and conv, True, {"rank": rank}


def _t5(dims, rng, cfg):
    rho, rank, lam = _npt_state(dims, rng, prod(dims))
    vals = [relative_coherence(rho, random_cpb(dims, rng).expand()) for _ in range(N_RANDOM_BASES)]
    return [
        check("npt_min_eigenvalue", lam, "lt", -NPT_MARGIN),
        check("npt_min_relative_coherence", min(vals), "gt", TOLERANCES[5]["coherent_min"]),
    ], True, False, {"rank": rank}


def _t6(dims, rng, cfg):
    tcfg = _trial_cfg(cfg, rng)
    rank = int(rng.integers(1, prod(dims) + 1))
    rho = random_density(dims, rank, rng)
    mrc = min_relative_coherence(rho, (0,), tcfg)
    ree = relative_entropy_of_entanglement(rho, (0,), tcfg)
    return [check("min_rel_coherence_ge_ree", mrc.value, "ge", ree.value, TOLERANCES[6]["ineq_slack"])], (
        mrc.converged and ree.converged
    ), False, {"rank": rank}


def _t7(dims, rng, cfg):
    tol = TOLERANCES[7]
    if rng.random() < 0.5:
        psi = random_pure(dims, rng)
    else:
        psi, _ = _biseparable(dims, rng)
    entangled = any(is_entangled_pure(psi, cut) for cut in all_bipartitions(len(dims)))
    vals = [coherence_pure(psi, random_cpb(dims, rng).expand()) for _ in range(N_RANDOM_BASES)]
    prod_psi = random_product_pure(dims, rng)
    ext = complete_product_extension(prod_psi)
    verdict = locc_distinguishable(ext)
    return [
        check("entangled_some_cut", float(entangled), "eq", 1.0),
        check("entangled_min_coherence", min(vals), "gt", tol["coherent_min"]),
        check("product_extension_coherence", coherence_pure(prod_psi, ext), "lt", tol["product_zero"]),
        check("extension_distinguishable", float(verdict.verdict == Verdict.DISTINGUISHABLE), "eq", 1.0),
    ], True, False


def _t8(dims, rng, cfg):
    tol = TOLERANCES[8]
    m = len(dims)
    cuts = all_bipartitions(m)
    psi = random_pure(dims, rng)
    vals = []
    for _ in range(N_RANDOM_BASES):
        a = cuts[int(rng.integers(len(cuts)))]
        groups = (a, complement(m, a))
        vals.append(coherence_pure(psi, random_cpb(dims, rng, groups=groups).expand()))
    bisep, _ = _biseparable(dims, rng)
    product_cuts = [c for c in cuts if not is_entangled_pure(bisep, c)]
    cut = product_cuts[0]
    ext = complete_product_extension(bisep, cut)
    verdict = locc_distinguishable(ext, cut)
    replay = verdict.verdict == Verdict.DISTINGUISHABLE and replay_protocol(verdict.certificate["protocol"], regroup(ext, cut))
    return [
        check("gme", float(is_gme_pure(psi)), "eq", 1.0),
        check("gme_min_coherence", min(vals), "gt", tol["coherent_min"]),
        check("biseparable_not_gme", float(is_gme_pure(bisep)), "eq", 0.0),
        check("biseparable_extension_coherence", coherence_pure(bisep, ext), "lt", tol["product_zero"]),
        check("extension_distinguishable_across_cut", float(replay), "eq", 1.0),
    ], True, False


SUITES: dict[int, Callable] = {1: _t1, 2: _t2, 3: _t3, 4: _t4, 5: _t5, 6: _t6, 7: _t7, 8: _t8}


def _feasible(theorem_id: int, dims: Sequence[int]) -> None:
    if theorem_id not in SUITES:
        raise ValueError(f"theorem id must be 1..8, got {theorem_id}")
    if theorem_id <= 6 and len(dims) != 2:
        raise ValueError(f"theorem {theorem_id} needs bipartite dims, got {'x'.join(map(str, dims))}")
    if theorem_id >= 7 and len(dims) < 3:
        raise ValueError(f"theorem {theorem_id} needs at least three parties, got {'x'.join(map(str, dims))}")


def run_trial(theorem_id: int, dims: tuple[int, ...], trial: int, seed: int, cfg: OptimizerConfig) -> dict:
    trial_seed = int(seed) ^ int(trial)
    rng = np.random.default_rng(trial_seed)
    checks, converged, critical, *extra = SUITES[theorem_id](dims, rng, cfg)
    return {
        "trial": trial,
        "dims": list(dims),
        "seed": trial_seed,
        "checks": checks,
        "converged": bool(converged),
        "critical": bool(critical),
        "info": extra[0] if extra else {},
    }


def thread_count() -> int:
    raw = os.environ.get("ENTCOH_THREADS", "0")
    try:
        return max(0, int(raw))
    except ValueError:
        raise ValueError(f"ENTCOH_THREADS must be an integer, got {raw!r}") from None


def verify_theorem(
    theorem_id: int,
    trials: int,
    dims=None,
    seed: int = 0,
    cfg: OptimizerConfig | None = None,
    threads: int | None = None,
) -> TheoremReport:
    """Run ``trials`` seeded trials per dims entry; ``dims`` is one dims tuple or a list of them."""
    cfg = cfg or OptimizerConfig(restarts=8)
    if dims is None:
        dims_list = DEFAULT_DIMS.get(theorem_id, [])
    elif dims and isinstance(dims[0], (int, np.integer)):
        dims_list = [tuple(dims)]
    else:
        dims_list = [tuple(d) for d in dims]
    dims_list = [check_dims(d) for d in dims_list]
    for d in dims_list:
        _feasible(theorem_id, d)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    threads = thread_count() if threads is None else threads
    # trial index runs across dims blocks so every trial has a distinct seed
    jobs = [(d, b * trials + t) for b, d in enumerate(dims_list) for t in range(trials)]
    if threads > 0:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda job: run_trial(theorem_id, job[0], job[1], seed, cfg), jobs))
    else:
        records = [run_trial(theorem_id, d, t, seed, cfg) for d, t in jobs]
    records.sort(key=lambda r: r["trial"])
    report = TheoremReport(
        theorem_id=theorem_id,
        trials=trials,
        dims=[list(d) for d in dims_list],
        seed=int(seed),
        config={
            "restarts": cfg.restarts,
            "max_iters": cfg.max_iters,
            "tol": cfg.tol,
            "ansatz_size": cfg.ansatz_size,
            "random_bases_per_trial": N_RANDOM_BASES,
            "npt_margin": NPT_MARGIN,
        },
        tolerances=TOLERANCES[theorem_id],
        checks_performed=CHECKS[theorem_id],
        notes=NOTES,
        records=records,
        unconverged_trials=[r["trial"] for r in records if not r["converged"]],
    )
    report.verdict = recheck_report(report.to_dict())
    return report
