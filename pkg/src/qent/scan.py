"""Parameter sweeps over the MEMS and Werner families, threshold bisection and
region tables."""

import warnings
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation

import numpy as np

from qent._fmt import fmt
from qent.criteria import evaluate_batch, flags_from_values, report_from_values
from qent.errors import NonMonotoneWarning, NoSignChange, ParamOutOfRange
from qent.states import FAMILIES, family_state

FAMILY_RANGE = (0.0, 1.0)
MAX_ITER = 200
PARAM_TOL = 1e-12
RESIDUAL_TOL = 1e-9
PRESCAN_POINTS = 100

CSV_HEADER = ("param,s_linear,q,m,n,concurrence,min_ppt_eig,"
              "bell_violating,q_detected,tele_useful,oracle_entangled")

FUNCTIONALS = {
    "M": "m_value",
    "N": "n_value",
    "Q": "q_value",
    "S_L": "s_linear",
    "concurrence": "concurrence",
}
_ALIASES = {k.lower(): k for k in FUNCTIONALS} | {"sl": "S_L", "s_linear": "S_L"}

# which flag each functional's threshold controls (S_L drives the linear-entropy flag)
FLAG_OF = {
    "M": "bell_chsh_violating",
    "Q": "q_detected",
    "N": "teleportation_useful",
    "concurrence": "oracle_entangled",
    "S_L": "paper_linear_entropy_flag",
}
REGION_FLAGS = ("bell_chsh_violating", "q_detected", "teleportation_useful",
                "oracle_entangled", "paper_linear_entropy_flag")


@dataclass(frozen=True)
class SweepRow:
    parameter: float
    report: object


@dataclass(frozen=True)
class ThresholdResult:
    functional: str
    target: float
    parameter_star: float
    bracket: tuple
    achieved_residual: float
    iterations: int
    non_monotone: bool = False

    def to_dict(self):
        return {
            "functional": self.functional,
            "target": self.target,
            "parameter_star": self.parameter_star,
            "bracket": list(self.bracket),
            "achieved_residual": self.achieved_residual,
            "iterations": self.iterations,
            "non_monotone": self.non_monotone,
        }


@dataclass
class RegionTable:
    family: str
    boundaries: list = field(default_factory=list)
    regions: list = field(default_factory=list)

    def to_dict(self):
        return {
            "family": self.family,
            "boundaries": [b.to_dict() for b in self.boundaries],
            "regions": self.regions,
        }


def _family(name):
    key = name.lower()
    if key not in FAMILIES:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}")
    return key


def _functional(name):
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown functional {name!r}; choose from {sorted(FUNCTIONALS)}") from None


def _values(family, params):
    mats = np.stack([family_state(family, float(x)).matrix for x in params])
    return evaluate_batch(mats)


def grid(start, stop, step):
    """Inclusive grid ``start, start+step, ..., stop`` using exact decimal steps."""
    try:
        d0, d1, ds = (Decimal(str(x)) for x in (start, stop, step))
    except InvalidOperation:
        raise ValueError(f"non-numeric grid {start}:{stop}:{step}") from None
    if ds <= 0:
        raise ValueError(f"step must be positive, got {step}")
    if d1 < d0:
        raise ValueError(f"stop {stop} is below start {start}")
    # a stop that is off the lattice ends the grid at the last point below it
    n = int((d1 - d0) / ds)
    return [float(d0 + k * ds) for k in range(n + 1)]


def sweep(family, start=0.0, stop=1.0, step=0.1):
    """Evaluate the full criteria report at each grid point of a family."""
    family = _family(family)
    pts = grid(start, stop, step)
    lo, hi = FAMILY_RANGE
    if pts[0] < lo or pts[-1] > hi:
        raise ParamOutOfRange(f"grid [{pts[0]}, {pts[-1]}] leaves the family range [{lo}, {hi}]")
    v = _values(family, pts)
    return [SweepRow(x, report_from_values(v, i)) for i, x in enumerate(pts)]


def _csv_row(row):
    r = row.report
    nums = (row.parameter, r.s_linear, r.q_value, r.m_value, r.n_value, r.concurrence,
            r.min_ppt_eigenvalue)
    bools = (r.bell_chsh_violating, r.q_detected, r.teleportation_useful, r.oracle_entangled)
    return ",".join([fmt(x) for x in nums] + [str(int(b)) for b in bools])


def rows_to_csv(rows):
    return "\n".join([CSV_HEADER] + [_csv_row(r) for r in rows]) + "\n"


def rows_to_json(rows):
    return [{"param": row.parameter, **row.report.to_dict()} for row in rows]


def plot_data(rows, functional):
    """Two-column ``parameter value`` text for one criterion."""
    key = FUNCTIONALS[_functional(functional)]
    return "".join(f"{fmt(row.parameter)} {fmt(getattr(row.report, key))}\n" for row in rows)


def functional_value(family, functional, x):
    family = _family(family)
    key = FUNCTIONALS[_functional(functional)]
    return float(_values(family, [x])[key][0])


def find_threshold(family, functional, target, bracket):
    """Bisect for the family parameter where ``functional`` crosses ``target``.

    The sides of the crossing are ``f > target`` versus ``f <= target``, which
    handles functionals that are flat on one side (the concurrence below the
    entanglement onset).  A 100-point pre-scan flags brackets holding more
    than one crossing with :class:`NonMonotoneWarning`.
    """
    family = _family(family)
    name = _functional(functional)
    key = FUNCTIONALS[name]
    lo, hi = (float(x) for x in bracket)
    if not (FAMILY_RANGE[0] <= lo < hi <= FAMILY_RANGE[1]):
        raise ParamOutOfRange(f"bracket ({lo}, {hi}) not inside {FAMILY_RANGE}")

    def g(x):
        return float(_values(family, [x])[key][0]) - target

    scan_x = np.linspace(lo, hi, PRESCAN_POINTS)
    scan_pos = _values(family, scan_x)[key] - target > 0
    crossings = int(np.count_nonzero(scan_pos[1:] != scan_pos[:-1]))
    non_monotone = crossings > 1
    if non_monotone:
        warnings.warn(f"{name} crosses {target} {crossings} times in ({lo}, {hi})", NonMonotoneWarning,
                      stacklevel=2)

    g_lo, g_hi = g(lo), g(hi)
    if (g_lo > 0) == (g_hi > 0):
        raise NoSignChange(f"{name} - {target} has the same sign at {lo} ({g_lo:.3e}) and {hi} ({g_hi:.3e})")
    pos_lo = g_lo > 0
    it = 0
    while it < MAX_ITER and hi - lo > PARAM_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        g_mid = g(mid)
        if (g_mid > 0) == pos_lo:
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
        it += 1
    x_star, res = (lo, g_lo) if abs(g_lo) <= abs(g_hi) else (hi, g_hi)
    return ThresholdResult(name, float(target), x_star, (float(bracket[0]), float(bracket[1])),
                           abs(res), it, non_monotone)


# named thresholds per family: (functional, target, bracket, description)
STANDARD_THRESHOLDS = {
    "werner": [
        ("M", 1.0, (0.5, 0.9), "CHSH violation onset"),
        ("Q", 1.0, (0.4, 0.8), "Q criterion onset"),
        ("S_L", 2.0 / 3.0, (0.4, 0.8), "linear entropy 2/3"),
        ("N", 1.0, (0.1, 0.9), "teleportation usefulness onset"),
        ("S_L", 8.0 / 9.0, (0.1, 0.5), "linear entropy 8/9"),
        ("concurrence", 0.0, (0.1, 0.9), "entanglement onset"),
    ],
    "mems": [
        ("M", 1.0, (0.5, 0.9), "CHSH violation onset"),
        ("Q", 1.0, (0.5, 0.9), "Q criterion onset"),
        ("N", 1.0, (0.3, 0.8), "teleportation usefulness onset"),
        ("concurrence", 0.0, (0.0, 0.5), "entanglement onset"),
    ],
}


def family_thresholds(family):
    family = _family(family)
    out = []
    for functional, target, bracket, label in STANDARD_THRESHOLDS[family]:
        res = find_threshold(family, functional, target, bracket)
        out.append((label, res))
    return out


def _flags_at(family, xs):
    f = flags_from_values(_values(family, xs))
    return [{k: bool(f[k][i]) for k in REGION_FLAGS} for i in range(len(xs))]


def _label(flags):
    on = [k for k in REGION_FLAGS if flags[k]]
    return ", ".join(on) if on else "none"


def region_table(family):
    """Split the family range into intervals with a constant verdict-flag signature.

    Boundaries are located by bisection from a pre-scan of every flag's
    functional (and of ``S_L = 8/9``).  Interior intervals are open; the
    family endpoints are closed when their flags match the neighbouring
    interval and listed as separate point regions otherwise.
    """
    family = _family(family)
    lo, hi = FAMILY_RANGE
    specs = [("M", 1.0), ("Q", 1.0), ("N", 1.0), ("concurrence", 0.0),
             ("S_L", 2.0 / 3.0), ("S_L", 8.0 / 9.0), ("S_L", 0.0)]
    xs = np.linspace(lo, hi, PRESCAN_POINTS + 1)
    v = _values(family, xs)
    boundaries = []
    for name, target in specs:
        pos = v[FUNCTIONALS[name]] - target > 0
        for k in np.flatnonzero(pos[1:] != pos[:-1]):
            res = find_threshold(family, name, target, (xs[k], xs[k + 1]))
            x = res.parameter_star
            if x - lo <= 1e-9:
                x = lo
            elif hi - x <= 1e-9:
                x = hi
            res = ThresholdResult(res.functional, res.target, x, res.bracket, res.achieved_residual,
                                  res.iterations, res.non_monotone)
            boundaries.append(res)
    boundaries.sort(key=lambda b: (b.parameter_star, b.functional, b.target))

    cuts = [lo]
    for b in boundaries:
        if b.parameter_star - cuts[-1] > 1e-9:
            cuts.append(b.parameter_star)
    if hi - cuts[-1] > 1e-9:
        cuts.append(hi)
    else:
        cuts[-1] = hi

    mids = [0.5 * (a + b) for a, b in zip(cuts[:-1], cuts[1:])]
    mid_flags = _flags_at(family, mids)
    end_flags = _flags_at(family, [lo, hi])

    regions = []
    for i, (a, b) in enumerate(zip(cuts[:-1], cuts[1:])):
        regions.append({"lo": a, "hi": b, "lo_closed": False, "hi_closed": False,
                        "flags": mid_flags[i], "label": _label(mid_flags[i])})
    # merge neighbours with equal flags (a boundary from a non-flag functional such as S_L = 8/9)
    merged = [regions[0]]
    for reg in regions[1:]:
        if reg["flags"] == merged[-1]["flags"]:
            merged[-1]["hi"] = reg["hi"]
        else:
            merged.append(reg)

    if end_flags[0] == merged[0]["flags"]:
        merged[0]["lo_closed"] = True
    else:
        merged.insert(0, {"lo": lo, "hi": lo, "lo_closed": True, "hi_closed": True,
                          "flags": end_flags[0], "label": _label(end_flags[0])})
    if end_flags[1] == merged[-1]["flags"]:
        merged[-1]["hi_closed"] = True
    else:
        merged.append({"lo": hi, "hi": hi, "lo_closed": True, "hi_closed": True,
                       "flags": end_flags[1], "label": _label(end_flags[1])})
    return RegionTable(family, boundaries, merged)


def region_containing(table, flag):
    """Lowest parameter from which ``flag`` stays on through the rest of the range, else None."""
    start = None
    for reg in table.regions:
        if reg["flags"][flag]:
            if start is None:
                start = reg["lo"]
        elif reg["hi"] > reg["lo"] or start is None:
            start = None
    return start
