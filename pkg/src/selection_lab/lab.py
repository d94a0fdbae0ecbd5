"""Scenario sweeps over n grids, finite-grid limit verdicts and flat-file output."""
import enum
import math
from dataclasses import dataclass, field, replace

from . import distance as dist
from .risk import exact_risk, mc_risk, scaled_risk_sup
from .selector import DEFAULT_DESIGN, DesignKind, DesignSpec, SelectorCalibration, accept_prob, power, threshold
from .sequences import AlternativeSequence, SequenceFamily, beta_at, is_contiguous

FIXED_COLUMNS = ("n", "beta_n", "d_n", "power", "accept_prob", "scaled_bias", "scaled_risk",
                 "sup_scaled_risk")
SIG_DIGITS = 12
MAX_ANALYTIC_N = 10**8
MAX_MC_N = 10**4
MAX_REPLICATES = 10**6


class Scenario(enum.Enum):
    YANG = "yang"
    BOUNDARY = "boundary"
    PERFECT = "perfect"
    CONTIGUOUS = "contiguous"
    AIC_BOUNDED = "aic_bounded"
    BIC_DIVERGES = "bic_diverges"
    DISTANCE_CHECK = "distance_check"
    LEMMA1_ATTAIN = "lemma1_attain"


SEQUENCE_SCENARIOS = {
    Scenario.YANG: SequenceFamily.YANG,
    Scenario.BOUNDARY: SequenceFamily.BOUNDARY,
    Scenario.PERFECT: SequenceFamily.PERFECT,
    Scenario.CONTIGUOUS: SequenceFamily.CONTIGUOUS,
}
SUP_SCENARIOS = (Scenario.AIC_BOUNDED, Scenario.BIC_DIVERGES)


class ConfigError(ValueError):
    pass


class LabIOError(OSError):
    pass


class Verdict(enum.Enum):
    TENDS_TO_ZERO = "tends_to_zero"
    BOUNDED = "bounded"
    DIVERGES = "diverges"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class LimitThresholds:
    """Finite-grid cut-offs for :func:`classify_limit`.

    zero:          last value below this counts as "-> 0"
    diverge_ratio: last/first above this counts as "-> inf"
    bounded_ratio: max/min below this counts as "-> constant"
    """
    zero: float = 1e-3
    diverge_ratio: float = 1e2
    bounded_ratio: float = 3.0


DEFAULT_THRESHOLDS = LimitThresholds()
# log-speed limits on 10^2..10^8 only move by a small factor
GRID_THRESHOLDS = LimitThresholds(zero=1e-3, diverge_ratio=3.0, bounded_ratio=3.0)
YANG_POWER_THRESHOLDS = LimitThresholds(zero=0.02, diverge_ratio=3.0, bounded_ratio=3.0)


@dataclass(frozen=True)
class LimitVerdict:
    tag: Verdict
    first: float
    last: float
    tail_increasing: bool
    tail_decreasing: bool
    last_over_first: float
    range_ratio: float


def _tail_len(k):
    return max(3, math.ceil(k / 2))


def classify_limit(series, thresholds=DEFAULT_THRESHOLDS):
    """Finite-grid verdict on whether a series tends to 0, stays bounded or diverges.

    "Eventually monotone" means monotone over the last ``max(3, ceil(k/2))``
    points.  Checks run in the order zero, diverges, bounded.
    """
    xs = [float(v) for v in series]
    if len(xs) < 3:
        raise ValueError("classify_limit needs at least 3 values")
    if any(math.isnan(v) for v in xs):
        raise ValueError("series contains NaN")
    tail = xs[-_tail_len(len(xs)):]
    inc = all(b > a for a, b in zip(tail, tail[1:]))
    dec = all(b < a for a, b in zip(tail, tail[1:]))
    first, last = xs[0], xs[-1]
    with_first = last / abs(first) if first != 0 else math.inf
    mags = [abs(v) for v in xs]
    rng = max(mags) / min(mags) if min(mags) > 0 else math.inf

    if dec and abs(last) < thresholds.zero:
        tag = Verdict.TENDS_TO_ZERO
    elif inc and last > 0 and with_first > thresholds.diverge_ratio:
        tag = Verdict.DIVERGES
    elif rng < thresholds.bounded_ratio:
        tag = Verdict.BOUNDED
    else:
        tag = Verdict.INCONCLUSIVE
    return LimitVerdict(tag=tag, first=first, last=last, tail_increasing=inc, tail_decreasing=dec,
                        last_over_first=with_first, range_ratio=rng)


@dataclass(frozen=True)
class MonteCarloSpec:
    replicates: int = 100_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if not 2 <= self.replicates <= MAX_REPLICATES:
            raise ConfigError(f"replicates must lie in [2, {MAX_REPLICATES}], got {self.replicates}")


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: Scenario
    calibration: SelectorCalibration
    n_grid: tuple
    sequence: AlternativeSequence | None = None
    design: DesignSpec = DEFAULT_DESIGN
    mc: MonteCarloSpec | None = None
    thresholds: LimitThresholds = DEFAULT_THRESHOLDS
    # series name -> expected verdict, checked by ``--assert``
    expect: tuple = ()

    def __post_init__(self):
        if not isinstance(self.scenario, Scenario):
            object.__setattr__(self, "scenario", Scenario(self.scenario))
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if any(n < 2 for n in grid):
            raise ConfigError("every grid n must be >= 2")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("n_grid must be strictly increasing")
        if grid and grid[-1] > MAX_ANALYTIC_N:
            raise ConfigError(f"n_grid is capped at {MAX_ANALYTIC_N:.0e}")
        fam = SEQUENCE_SCENARIOS.get(self.scenario)
        if fam is not None:
            if self.sequence is None:
                raise ConfigError(f"scenario {self.scenario.value} needs a sequence")
            if self.sequence.family is not fam:
                raise ConfigError(f"scenario {self.scenario.value} needs a {fam.value} sequence, "
                                  f"got {self.sequence.family.value}")
        if self.scenario in (Scenario.DISTANCE_CHECK, Scenario.LEMMA1_ATTAIN) and self.sequence is None:
            raise ConfigError(f"scenario {self.scenario.value} needs a sequence")


@dataclass
class SweepTable:
    columns: dict
    metadata: dict = field(default_factory=dict)

    @property
    def column_names(self):
        return list(self.columns)

    def __len__(self):
        return len(self.columns["n"])

    def series(self, name):
        return self.columns[name]

    def rows(self):
        names = self.column_names
        return [dict(zip(names, vals)) for vals in zip(*(self.columns[c] for c in names))]


def geometric_grid(n_min, n_max, per_decade=1):
    """Integers spaced evenly in log10 between n_min and n_max inclusive."""
    if n_min < 2 or n_max < n_min or per_decade < 1:
        raise ConfigError(f"bad grid {n_min}:{n_max}:{per_decade}")
    lo, hi = math.log10(n_min), math.log10(n_max)
    steps = int(math.floor((hi - lo) * per_decade + 1e-9))
    pts = [int(round(10 ** (lo + k / per_decade))) for k in range(steps + 1)]
    if pts[-1] != n_max:
        pts.append(int(n_max))
    out = []
    for p in pts:
        if not out or p > out[-1]:
            out.append(p)
    return tuple(out)


def parse_grid(text):
    """``"min:max:points-per-decade"``, e.g. ``"1e2:1e8:1"``."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ConfigError(f"grid must look like min:max[:points-per-decade], got {text!r}")
    try:
        n_min, n_max = int(float(parts[0])), int(float(parts[1]))
        ppd = int(parts[2]) if len(parts) == 3 else 1
    except ValueError as exc:
        raise ConfigError(f"unparseable grid {text!r}") from exc
    return geometric_grid(n_min, n_max, ppd)


def _sig(x):
    return format(x, f".{SIG_DIGITS}g")


def run_scenario(config):
    """Evaluate a scenario on its n grid.  Analytic columns always, MC columns when requested."""
    if len(config.n_grid) < 3:
        raise ConfigError("n_grid needs at least 3 points to say anything about a limit; "
                          "try --grid 1e2:1e8:1")
    cal, design, seq = config.calibration, config.design, config.sequence
    cols = {c: [] for c in FIXED_COLUMNS}
    extra = {}
    if config.scenario is Scenario.DISTANCE_CHECK:
        extra = {k: [] for k in ("shift", "affinity", "hellinger_sq", "l1", "chain_ok")}
    elif config.scenario is Scenario.LEMMA1_ATTAIN:
        extra = {k: [] for k in ("shift", "lemma1_gap", "half_l1", "gap_at_zero")}
    if config.mc is not None:
        extra.update({"mc_scaled_risk": [], "mc_scaled_risk_se": []})
    cols.update(extra)

    for n in config.n_grid:
        sup = None
        if config.scenario in SUP_SCENARIOS:
            scan = scaled_risk_sup(n, cal, design)
            beta, sup = scan.argmax_beta, scan.sup_scaled_risk
        else:
            beta = beta_at(seq, n, design, cal)
        report = exact_risk(beta, n, cal, design)
        acc = accept_prob(beta, n, cal, design)
        row = {
            "n": n,
            "beta_n": beta,
            "d_n": threshold(cal, n, design),
            "power": power(beta, n, cal, design),
            "accept_prob": acc,
            "scaled_bias": n * beta * beta * acc,
            "scaled_risk": report.scaled_risk,
            "sup_scaled_risk": sup,
        }
        if config.scenario in (Scenario.DISTANCE_CHECK, Scenario.LEMMA1_ATTAIN):
            pair = dist.GaussianShiftPair(beta, design.sxx(n))
            row["shift"] = pair.shift
            if config.scenario is Scenario.DISTANCE_CHECK:
                row["affinity"] = dist.hellinger_affinity(pair)
                row["hellinger_sq"] = dist.hellinger_distance_sq(pair)
                row["l1"] = dist.l1_distance(pair)
                row["chain_ok"] = int(dist.check_inequality_chain(pair))
            else:
                row["lemma1_gap"] = dist.lemma1_gap(pair, dist.likelihood_ratio_threshold(pair))
                row["half_l1"] = 0.5 * dist.l1_distance(pair)
                row["gap_at_zero"] = dist.lemma1_gap(pair, 0.0)
        if config.mc is not None:
            if n <= MAX_MC_N:
                mc = mc_risk(beta, n, cal, design, config.mc.replicates, config.mc.seed,
                             workers=config.mc.workers)
                row["mc_scaled_risk"] = mc.scaled_risk
                row["mc_scaled_risk_se"] = n * mc.mc_std_error
            else:
                row["mc_scaled_risk"] = row["mc_scaled_risk_se"] = None
        for k in cols:
            cols[k].append(row[k])

    meta = {
        "scenario": config.scenario.value,
        "calibration": cal.describe(),
        "sequence": seq.describe() if seq is not None else "sup over beta grid",
        "design": f"{design.kind.value}(kappa={design.kappa:g}, s*={design.prediction_factor:g})",
        "n_grid": " ".join(str(n) for n in config.n_grid),
        "thresholds": (f"zero={config.thresholds.zero:g} diverge_ratio={config.thresholds.diverge_ratio:g}"
                       f" bounded_ratio={config.thresholds.bounded_ratio:g}"),
    }
    if seq is not None:
        meta["separation"] = dist.classify_separation(seq, design, cal).value
        meta["contiguous"] = str(is_contiguous(seq, design, cal)).lower()
    if config.mc is not None:
        meta["mc"] = f"replicates={config.mc.replicates} seed={config.mc.seed}"
    for name in ("power", "scaled_bias", "sup_scaled_risk"):
        vals = cols[name]
        if all(v is not None for v in vals):
            meta[f"verdict_{name}"] = classify_limit(vals, config.thresholds).tag.value
    return SweepTable(columns=cols, metadata=meta)


def check_expectations(table, config):
    """(series, expected, observed, ok) for each expectation carried by the config."""
    out = []
    for series, expected in config.expect:
        if series == "chain_ok":
            observed = "all" if all(v == 1 for v in table.series("chain_ok")) else "violated"
            out.append((series, "all", observed, observed == "all"))
            continue
        if series == "lemma1_attained":
            ok = all(abs(g - h) <= 1e-9 for g, h in zip(table.series("lemma1_gap"),
                                                        table.series("half_l1")))
            out.append((series, "all", "all" if ok else "violated", ok))
            continue
        tag = classify_limit(table.series(series), config.thresholds).tag
        out.append((series, expected.value, tag.value, tag is expected))
    return out


# ----------------------------------------------------------------------------
# presets

BIC = SelectorCalibration.consistent_log(1.0)
AIC = SelectorCalibration.fixed_level(0.05)
WIDE_GRID = geometric_grid(100, 10**8, 1)


def preset(name):
    name = name.lower()
    if name == "yang":
        return ScenarioConfig(Scenario.YANG, BIC, WIDE_GRID, AlternativeSequence.yang(BIC, 0.5),
                              thresholds=YANG_POWER_THRESHOLDS,
                              expect=(("scaled_bias", Verdict.DIVERGES), ("power", Verdict.TENDS_TO_ZERO)))
    if name == "boundary":
        return ScenarioConfig(Scenario.BOUNDARY, BIC, WIDE_GRID, AlternativeSequence.boundary(BIC),
                              thresholds=GRID_THRESHOLDS,
                              expect=(("power", Verdict.BOUNDED), ("scaled_bias", Verdict.DIVERGES)))
    if name == "perfect":
        return ScenarioConfig(Scenario.PERFECT, BIC, WIDE_GRID, AlternativeSequence.perfect(BIC, 1.0),
                              thresholds=GRID_THRESHOLDS,
                              expect=(("scaled_bias", Verdict.TENDS_TO_ZERO), ("power", Verdict.BOUNDED)))
    if name == "contiguous":
        return ScenarioConfig(Scenario.CONTIGUOUS, BIC, WIDE_GRID, AlternativeSequence.contiguous(2.0),
                              thresholds=GRID_THRESHOLDS,
                              expect=(("scaled_bias", Verdict.BOUNDED),))
    if name == "aic_bounded":
        return ScenarioConfig(Scenario.AIC_BOUNDED, AIC, WIDE_GRID, thresholds=GRID_THRESHOLDS,
                              expect=(("sup_scaled_risk", Verdict.BOUNDED),))
    if name == "bic_diverges":
        return ScenarioConfig(Scenario.BIC_DIVERGES, BIC, WIDE_GRID, thresholds=GRID_THRESHOLDS,
                              expect=(("sup_scaled_risk", Verdict.DIVERGES),))
    if name == "distance_check":
        return ScenarioConfig(Scenario.DISTANCE_CHECK, BIC, WIDE_GRID, AlternativeSequence.contiguous(2.0),
                              thresholds=GRID_THRESHOLDS, expect=(("chain_ok", None),))
    if name == "lemma1_attain":
        return ScenarioConfig(Scenario.LEMMA1_ATTAIN, BIC, WIDE_GRID, AlternativeSequence.contiguous(2.0),
                              thresholds=GRID_THRESHOLDS, expect=(("lemma1_attained", None),))
    raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


PRESETS = tuple(s.value for s in Scenario)


# ----------------------------------------------------------------------------
# flat key=value configs

CONFIG_KEYS = ("scenario", "preset", "calibration", "tau", "alpha", "gamma", "sequence", "b", "bprime",
               "r", "coef", "exponent", "kappa", "prediction_factor", "grid", "replicates", "seed",
               "workers")


def load_config_file(path):
    """Read ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise LabIOError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def make_calibration(kind, tau=None, alpha=None, gamma=None):
    kind = (kind or "bic").lower()
    try:
        if kind in ("bic", "consistent_log"):
            return SelectorCalibration.consistent_log(1.0 if tau is None else float(tau))
        if kind in ("aic", "fixed_level"):
            return SelectorCalibration.fixed_level(0.05 if alpha is None else float(alpha))
        if kind in ("power", "custom_power"):
            return SelectorCalibration.custom_power(0.25 if gamma is None else float(gamma))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown calibration {kind!r}; choose bic, aic or power")


def make_sequence(kind, cal, b=None, bprime=None, r=None, coef=None, exponent=None):
    kind = (kind or "yang").lower()
    try:
        if kind == "yang":
            return AlternativeSequence.yang(cal, 0.5 if b is None else float(b))
        if kind == "boundary":
            return AlternativeSequence.boundary(cal)
        if kind == "perfect":
            return AlternativeSequence.perfect(cal, 1.0 if bprime is None else float(bprime))
        if kind == "contiguous":
            return AlternativeSequence.contiguous(1.0 if r is None else float(r))
        if kind == "generic":
            exp_ = None if exponent in (None, "", "none", "const") else float(exponent)
            return AlternativeSequence.generic(exp_, 1.0 if coef is None else float(coef))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown sequence {kind!r}")


def make_design(kappa=None, prediction_factor=None):
    try:
        kappa = 1.0 if kappa is None else float(kappa)
        s = 1.0 if prediction_factor is None else float(prediction_factor)
        if kappa == 1.0:
            return DesignSpec(DesignKind.CONSTANT_ONE, 1.0, s)
        return DesignSpec.scaled(kappa, s)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def config_from_mapping(values):
    """Build a ScenarioConfig from flat string values, starting from the named preset if any."""
    v = {k: val for k, val in values.items() if val is not None}
    name = v.get("preset") or v.get("scenario")
    if name is None:
        raise ConfigError("need a scenario (or preset) name")
    base = preset(name)
    cal = base.calibration
    if any(k in v for k in ("calibration", "tau", "alpha", "gamma")):
        kind = v.get("calibration", cal.kind.value)
        cal = make_calibration(kind, v.get("tau"), v.get("alpha"), v.get("gamma"))
    seq = base.sequence
    if seq is not None or "sequence" in v:
        old = seq or AlternativeSequence(SequenceFamily.CONTIGUOUS)
        kind = v.get("sequence", old.family.value)
        seq = make_sequence(kind, cal, v.get("b", old.b if old.b < 1 else None),
                            v.get("bprime", old.bprime), v.get("r", old.r),
                            v.get("coef", old.coef), v.get("exponent", old.exponent))
    design = make_design(v.get("kappa"), v.get("prediction_factor"))
    grid = parse_grid(v["grid"]) if "grid" in v else base.n_grid
    mc = None
    if "replicates" in v or "seed" in v:
        try:
            mc = MonteCarloSpec(int(float(v.get("replicates", 100_000))), int(v.get("seed", 0)),
                                int(v.get("workers", 1)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return replace(base, calibration=cal, sequence=seq, design=design, n_grid=grid, mc=mc)


# ----------------------------------------------------------------------------
# output


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return _sig(float(v))


def format_csv(table):
    lines = [f"# {k}: {val}" for k, val in table.metadata.items()]
    names = table.column_names
    lines.append(",".join(names))
    for vals in zip(*(table.columns[c] for c in names)):
        lines.append(",".join(_cell(v) for v in vals))
    return "\n".join(lines) + "\n"


def emit_csv(table, destination):
    """Write ``#`` metadata lines, a header and one row per n (12 significant digits)."""
    _write(destination, format_csv(table))


def _write(destination, text):
    try:
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise LabIOError(f"cannot write {destination}: {exc.strerror or exc}") from exc


def read_csv(source):
    """Parse a file written by :func:`emit_csv` back into a SweepTable."""
    try:
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise LabIOError(f"cannot read {source}: {exc.strerror or exc}") from exc
    meta = {}
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition(": ")
            meta[key] = val
        elif line:
            body.append(line)
    if not body:
        raise ConfigError(f"{source}: no header row")
    names = body[0].split(",")
    cols = {c: [] for c in names}
    for line in body[1:]:
        for c, cell in zip(names, line.split(",")):
            if cell == "":
                cols[c].append(None)
            elif c in ("n", "chain_ok"):
                cols[c].append(int(cell))
            else:
                cols[c].append(float(cell))
    return SweepTable(columns=cols, metadata=meta)


def format_plotdata(table, series=None):
    if series is None:
        series = [c for c in table.column_names
                  if c != "n" and all(v is not None for v in table.columns[c])]
    elif isinstance(series, str):
        series = [series]
    for s in series:
        if s not in table.columns:
            raise ConfigError(f"unknown series {s!r}")
    lines = [f"# {k}: {val}" for k, val in table.metadata.items()]
    lines.append("# " + " ".join(["log10_n", *series]))
    for i, n in enumerate(table.columns["n"]):
        cells = [repr(math.log10(n))]
        cells += [_cell(table.columns[s][i]) or "nan" for s in series]
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"


def emit_plotdata(table, destination, series=None):
    """Whitespace-separated ``log10_n`` plus one column per selected series."""
    _write(destination, format_plotdata(table, series))


def read_plotdata(source):
    with open(source, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    header = [ln for ln in lines if ln.startswith("#")][-1][1:].split()
    rows = [[float(c) for c in ln.split()] for ln in lines if ln and not ln.startswith("#")]
    return header, rows
