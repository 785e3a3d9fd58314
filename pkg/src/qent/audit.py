"""Monte Carlo audit of the entanglement criteria against the PPT and
concurrence oracles, plus a catalog of certified counterexample states.

Samples are drawn from the Ginibre-induced ensemble (Hilbert-Schmidt measure
at rank 4).  Sample ``k`` depends only on ``(seed, k)``; chunks are evaluated
by a thread pool and merged by sample index, so reports do not depend on the
number of workers.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from qent import states
from qent._fmt import dumps, fmt
from qent.criteria import TWO_THIRDS, classify, evaluate_batch, flags_from_values, signature
from qent.errors import NotFound, OracleDisagreement
from qent.scan import find_threshold

BOUNDARY_BAND = 1e-8
CERT_TOL = 1e-10
CHUNK = 2048
SANTOS_BOUND = 0.5


def _entangled(v):
    return (v["concurrence"] > CERT_TOL) & (v["min_ppt_eigenvalue"] < -CERT_TOL)


def _separable(v):
    return (v["concurrence"] <= CERT_TOL) & (v["min_ppt_eigenvalue"] >= -CERT_TOL)


# each predicate works on scalars (a report dict) and on arrays (evaluate_batch output)
PREDICATES = {
    "entangled_with_SL_above_2/3":
        lambda v: _entangled(v) & (v["s_linear"] > TWO_THIRDS + CERT_TOL),
    "separable_with_SL_below_2/3":
        lambda v: _separable(v) & (v["s_linear"] > CERT_TOL) & (v["s_linear"] < TWO_THIRDS - CERT_TOL),
    "useful_with_SL_above_2/3":
        lambda v: (v["n_value"] > 1 + CERT_TOL) & (v["s_linear"] > TWO_THIRDS + CERT_TOL),
    "Q_below_1_N_above_1":
        lambda v: (v["q_value"] < 1 - CERT_TOL) & (v["n_value"] > 1 + CERT_TOL),
    "satisfies_CHSH_but_Q_detected":
        lambda v: (v["m_value"] <= 1 - CERT_TOL) & (v["q_value"] > 1 + CERT_TOL),
}

# analytic candidates tried before any search
PREFERRED = {
    "entangled_with_SL_above_2/3": [("werner(r=0.5)", lambda: states.werner(0.5))],
    "separable_with_SL_below_2/3": [
        ("0.9*|00><00| + 0.1*I/4",
         lambda: states.validate(0.9 * states.product_state([0, 0, 1], [0, 0, 1]).matrix + 0.1 * np.eye(4) / 4)),
    ],
    "useful_with_SL_above_2/3": [("werner(r=0.4)", lambda: states.werner(0.4))],
    "Q_below_1_N_above_1": [("werner(r=0.5)", lambda: states.werner(0.5))],
    "satisfies_CHSH_but_Q_detected": [("werner(r=0.65)", lambda: states.werner(0.65))],
}

IMPLICATIONS = {
    "M>1 => Q>1": ("bell_chsh_violating", "q_detected"),
    "Q>1 => N>1": ("q_detected", "teleportation_useful"),
    "Q>1 => NPT": ("q_detected", "npt"),
    "M>1 => NPT": ("bell_chsh_violating", "npt"),
    "N>1 => NPT": ("teleportation_useful", "npt"),
}


def worker_count():
    env = os.environ.get("QENT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def boundary_mask(v):
    """Samples with an implication-relevant criterion within 1e-8 of its threshold."""
    band = BOUNDARY_BAND
    return (
        (np.abs(v["m_value"] - 1) <= band)
        | (np.abs(v["q_value"] - 1) <= band)
        | (np.abs(v["n_value"] - 1) <= band)
        | (np.abs(v["concurrence_witness"]) <= band)
        | (np.abs(v["min_ppt_eigenvalue"]) <= band)
    )


@dataclass
class Counterexample:
    predicate: str
    state: states.DensityMatrix
    report: object
    source: str
    searched: int = 0

    def to_dict(self):
        return {
            "predicate": self.predicate,
            "source": self.source,
            "searched": self.searched,
            "state": states.to_json_dict(self.state),
            "report": self.report.to_dict(),
        }


@dataclass
class AuditReport:
    samples: int
    ensemble: dict
    seed: int
    counts: dict
    boundary: int
    violation_count: dict
    unsound_claims: dict
    fractions: dict
    detection_power: dict
    entangled: int = 0
    detected: dict = field(default_factory=dict)
    counterexamples: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "samples": self.samples,
            "ensemble": self.ensemble,
            "seed": self.seed,
            "counts": dict(sorted(self.counts.items())),
            "boundary": self.boundary,
            "violation_count": self.violation_count,
            "unsound_claims": self.unsound_claims,
            "fractions": self.fractions,
            "detection_power": self.detection_power,
            "entangled": self.entangled,
            "detected": self.detected,
            "counterexamples": self.counterexamples,
        }

    def to_json(self):
        return dumps(self.to_dict()) + "\n"

    def counts_csv(self):
        lines = ["cell,count"]
        lines += [f"{k},{n}" for k, n in sorted(self.counts.items())]
        lines.append(f"boundary,{self.boundary}")
        return "\n".join(lines) + "\n"


def _chunk_stats(seed, rank, start, count, predicates, k):
    rhos = states.random_states(seed, rank, start, count)
    v = evaluate_batch(rhos)
    f = flags_from_values(v)
    f["npt"] = v["min_ppt_eigenvalue"] < 0
    edge = boundary_mask(v)
    ok = ~edge

    disagree = ok & ((v["min_ppt_eigenvalue"] < 0) != (v["concurrence_witness"] > 0))
    if np.any(disagree):
        i = int(np.flatnonzero(disagree)[0])
        raise OracleDisagreement(
            f"PPT and concurrence disagree on sample {start + i} (seed {seed}, rank {rank}): "
            f"min PT eigenvalue {v['min_ppt_eigenvalue'][i]:.6e}, concurrence witness "
            f"{v['concurrence_witness'][i]:.6e}\nstate: {states.dumps_state(states.DensityMatrix(rhos[i]))}"
        )

    ent = f["npt"]
    sigs = {}
    for i in np.flatnonzero(ok):
        key = signature(f["bell_chsh_violating"][i], f["q_detected"][i], f["teleportation_useful"][i],
                        f["paper_linear_entropy_flag"][i])
        key += "|entangled" if ent[i] else "|separable"
        sigs[key] = sigs.get(key, 0) + 1

    viol = {name: int(np.count_nonzero(ok & f[a] & ~f[b])) for name, (a, b) in IMPLICATIONS.items()}
    viol["separable => N<=1+1e-10"] = int(np.count_nonzero(ok & ~ent & (v["n_value"] > 1 + 1e-10)))
    if rank == 1:
        viol["pure entangled => M>1"] = int(np.count_nonzero(ok & ent & ~f["bell_chsh_violating"]))

    s_lin = v["s_linear"]
    decided = {
        "M>1": f["bell_chsh_violating"],
        "Q>1": f["q_detected"],
        "N>1": f["teleportation_useful"],
        "0<S_L<2/3": f["paper_linear_entropy_flag"],
        "S_L<1/2": s_lin < SANTOS_BOUND,
        "oracle_entangled": ent,
    }
    hits = {name: int(np.count_nonzero(ok & m)) for name, m in decided.items()}
    hits_ent = {name: int(np.count_nonzero(ok & ent & m)) for name, m in decided.items()}
    unsound = {
        "0<S_L<2/3 but separable": int(np.count_nonzero(ok & ~ent & f["paper_linear_entropy_flag"])),
        "S_L>=2/3 but entangled": int(np.count_nonzero(ok & ent & (s_lin >= TWO_THIRDS))),
        "S_L>=2/3 but N>1": int(np.count_nonzero(ok & f["teleportation_useful"] & (s_lin >= TWO_THIRDS))),
    }

    found = {}
    for name in predicates:
        idx = np.flatnonzero(PREDICATES[name](v))[:k]
        found[name] = [(start + int(i), rhos[i]) for i in idx]
    return {
        "counts": sigs, "boundary": int(np.count_nonzero(edge)), "decided": int(np.count_nonzero(ok)),
        "violations": viol, "hits": hits, "hits_ent": hits_ent, "unsound": unsound, "found": found,
    }


def _merge_int(dicts):
    out = {}
    for d in dicts:
        for key, n in d.items():
            out[key] = out.get(key, 0) + n
    return out


def _chunks(samples, chunk):
    return [(s, min(chunk, samples - s)) for s in range(0, samples, chunk)]


def run_audit(samples, seed=0, rank=4, predicates=(), k=3, workers=None, chunk=CHUNK):
    """Sample ``samples`` random states and tabulate every criterion against the oracle.

    Parameters
    ----------
    samples : int
        Number of states, at least 1.
    seed : int
        Master seed; sample ``k`` uses the stream ``(seed, k)``.
    rank : int
        Rank of the Ginibre factor (4 gives the Hilbert-Schmidt measure).
    predicates : iterable of str
        Catalog predicates for which up to ``k`` example states are stored.
    workers : int, optional
        Thread count; defaults to ``QENT_THREADS`` or all cores.

    Raises
    ------
    OracleDisagreement
        If PPT and concurrence disagree on a sample outside the boundary band.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    predicates = list(predicates)
    for name in predicates:
        if name not in PREDICATES:
            raise ValueError(f"unknown predicate {name!r}; choose from {sorted(PREDICATES)}")
    workers = workers or worker_count()
    jobs = _chunks(samples, chunk)
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda j: _chunk_stats(seed, rank, j[0], j[1], predicates, k), jobs))
    else:
        parts = [_chunk_stats(seed, rank, s, n, predicates, k) for s, n in jobs]

    decided = sum(p["decided"] for p in parts)
    hits = _merge_int(p["hits"] for p in parts)
    hits_ent = _merge_int(p["hits_ent"] for p in parts)
    n_ent = hits["oracle_entangled"]
    fractions = {name: (hits[name] / decided if decided else 0.0) for name in hits}
    power = {name: (hits_ent[name] / n_ent if n_ent else 0.0) for name in hits_ent if name != "oracle_entangled"}

    examples = {}
    for name in predicates:
        found = sorted((i, m) for p in parts for i, m in p["found"][name])[:k]
        examples[name] = [
            {"index": i, "state": states.to_json_dict(states.DensityMatrix(m)),
             "report": classify(states.DensityMatrix(m)).to_dict()}
            for i, m in found
        ]

    return AuditReport(
        samples=samples,
        ensemble={"name": states.ENSEMBLE_NAME, "rank": rank},
        seed=seed,
        counts=_merge_int(p["counts"] for p in parts),
        boundary=sum(p["boundary"] for p in parts),
        violation_count=_merge_int(p["violations"] for p in parts),
        unsound_claims=_merge_int(p["unsound"] for p in parts),
        fractions=fractions,
        detection_power=power,
        entangled=n_ent,
        detected={name: n for name, n in hits_ent.items() if name != "oracle_entangled"},
        counterexamples=examples,
    )


def certify(predicate, report):
    """Re-check a predicate on a freshly computed :class:`CriteriaReport`."""
    return bool(PREDICATES[predicate](report.to_dict()))


def find_counterexample(predicate, seed=0, max_draws=10**6, use_families=True, batch=4096):
    """Return a certified state satisfying a catalog predicate.

    Search order: the predicate's preferred analytic state, a 0.05-step grid
    over both named families, then seeded random states (ranks cycling 1-4)
    up to ``max_draws``.

    Raises
    ------
    NotFound
        When the random budget is exhausted; ``searched`` holds the draw count.
    """
    if predicate not in PREDICATES:
        raise ValueError(f"unknown predicate {predicate!r}; choose from {sorted(PREDICATES)}")

    def accept(rho, source, searched):
        report = classify(rho)
        if certify(predicate, report):
            return Counterexample(predicate, rho, report, source, searched)
        return None

    if use_families:
        for source, make in PREFERRED.get(predicate, []):
            hit = accept(make(), source, 0)
            if hit:
                return hit
        for fam in sorted(states.FAMILIES):
            for x in np.round(np.arange(0, 1.0001, 0.05), 10):
                hit = accept(states.family_state(fam, float(x)), f"{fam}({fmt(x)})", 0)
                if hit:
                    return hit

    searched = 0
    b = 0
    while searched < max_draws:
        rank = b % 4 + 1
        count = min(batch, max_draws - searched)
        rhos = states.random_states(seed, rank, searched, count)
        v = evaluate_batch(rhos)
        for i in np.flatnonzero(PREDICATES[predicate](v)):
            rho = states.DensityMatrix(rhos[i])
            hit = accept(rho, f"random(seed={seed}, rank={rank}, index={searched + int(i)})", searched + int(i) + 1)
            if hit:
                return hit
        searched += count
        b += 1
    raise NotFound(f"no state satisfying {predicate} within {searched} random draws", searched)


def counterexample_suite(seed=0):
    return {name: find_counterexample(name, seed=seed) for name in PREDICATES}


def wilson_interval(hits, n, alpha=0.05):
    from statsmodels.stats.proportion import proportion_confint

    if n == 0:
        return (0.0, 1.0)
    lo, hi = proportion_confint(hits, n, alpha=alpha, method="wilson")
    return (float(lo), float(hi))


def werner_windows():
    """Werner parameter windows detected by each entropic or Bell criterion (lower endpoints)."""
    return {
        "S_L<1/2": find_threshold("werner", "S_L", SANTOS_BOUND, (0.5, 0.9)).parameter_star,
        "M>1": find_threshold("werner", "M", 1.0, (0.5, 0.9)).parameter_star,
        "Q>1": find_threshold("werner", "Q", 1.0, (0.4, 0.8)).parameter_star,
        "S_L<2/3": find_threshold("werner", "S_L", TWO_THIRDS, (0.4, 0.8)).parameter_star,
        "oracle_entangled": find_threshold("werner", "concurrence", 0.0, (0.1, 0.9)).parameter_star,
    }


def santos_comparison(samples, seed=0, rank=4):
    """Share of oracle-entangled random states caught by each entropic or Bell test.

    Compares the ``S_L < 1/2`` window with ``0 < S_L < 2/3``, ``Q > 1`` and
    ``M > 1``; each fraction carries a Wilson 95% interval.
    """
    rep = run_audit(samples, seed=seed, rank=rank)
    n_ent = rep.entangled
    rows = {}
    for name in ("S_L<1/2", "0<S_L<2/3", "Q>1", "M>1"):
        h = rep.detected[name]
        lo, hi = wilson_interval(h, n_ent)
        rows[name] = {"count": h, "fraction": h / n_ent if n_ent else 0.0, "wilson95": [lo, hi]}
    return {
        "samples": samples,
        "seed": seed,
        "ensemble": rep.ensemble,
        "oracle_entangled": n_ent,
        "criteria": rows,
        "werner_windows": werner_windows(),
    }


def santos_table_json(table):
    return dumps(table) + "\n"


__all__ = [
    "AuditReport", "Counterexample", "PREDICATES", "run_audit", "find_counterexample",
    "counterexample_suite", "certify", "santos_comparison", "werner_windows", "wilson_interval",
]
