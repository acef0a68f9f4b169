"""Searches a solver parameter space for configurations that solve faster.

A tuning run holds the solver and instance set fixed and varies only the
solver's parameters. Trial 1 is always the solver-default configuration;
later trials come from a pluggable search strategy (default: seeded
uniform random). Every trial scores the tuning set by mean wall-clock
time with timeouts counted at the limit, so the argmin over trials can
never be worse than the default. Generalization of the winner is
measured separately on a held-out test set.
"""

import concurrent.futures
import dataclasses
import json
import os
import shutil
import tempfile
from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional, Tuple

import numpy as np

from .adapters import (
    STATUS_ERROR,
    STATUS_FEASIBLE_TIME_LIMIT,
    STATUS_TIME_LIMIT_NO_INCUMBENT,
    get_adapter,
)
from .errors import (
    EmptyTestSet,
    EmptyTuningSet,
    InvalidConfig,
    InvalidSpace,
    UnknownStrategy,
)
from .harness import run_solver
from .io import list_instance_files

KIND_CONTINUOUS = "continuous"
KIND_CATEGORICAL = "categorical"

DEFAULT_STRATEGY = "random"

# Timeouts (and solves the watchdog killed) contribute exactly the
# per-solve limit to a trial's mean; nothing is multiplied up.
TIMEOUT_RULE = "timeout-counts-as-limit"

RESULT_FILENAME = "tuning_result.json"


@dataclass(frozen=True)
class Dimension:
    """One tunable parameter: a continuous range or a finite value list.

    `default` is the solver's own default for the parameter. The first
    tuning trial is assembled from these, so the default must lie
    inside the dimension.
    """

    name: str
    kind: str
    lo: float = 0.0
    hi: float = 0.0
    values: Tuple = ()
    default: object = None

    def __post_init__(self):
        if self.kind == KIND_CONTINUOUS:
            if not self.lo < self.hi:
                raise InvalidSpace(f"dimension {self.name!r}: lo must be < hi")
        elif self.kind == KIND_CATEGORICAL:
            object.__setattr__(self, "values", tuple(self.values))
            if not self.values:
                raise InvalidSpace(f"dimension {self.name!r}: empty value list")
        else:
            raise InvalidSpace(f"dimension {self.name!r}: unknown kind {self.kind!r}")
        if self.default is None:
            raise InvalidSpace(f"dimension {self.name!r}: missing default value")
        if not self.contains(self.default):
            raise InvalidSpace(
                f"dimension {self.name!r}: default {self.default!r} lies outside it"
            )

    def contains(self, value):
        if self.kind == KIND_CONTINUOUS:
            return isinstance(value, (int, float)) and self.lo <= value <= self.hi
        return value in self.values

    def sample(self, rng):
        if self.kind == KIND_CONTINUOUS:
            return float(rng.uniform(self.lo, self.hi))
        return self.values[int(rng.integers(len(self.values)))]


@dataclass(frozen=True)
class ParameterSpace:
    """Ordered list of tunable dimensions for one solver."""

    dimensions: Tuple[Dimension, ...]

    def __post_init__(self):
        object.__setattr__(self, "dimensions", tuple(self.dimensions))
        if not self.dimensions:
            raise InvalidSpace("a parameter space needs at least one dimension")
        names = [d.name for d in self.dimensions]
        if len(set(names)) != len(names):
            raise InvalidSpace("duplicate dimension names")

    def default_configuration(self):
        return {d.name: d.default for d in self.dimensions}

    def contains(self, configuration):
        if set(configuration) != {d.name for d in self.dimensions}:
            return False
        return all(d.contains(configuration[d.name]) for d in self.dimensions)

    def sample(self, rng):
        return {d.name: d.sample(rng) for d in self.dimensions}


def _dim_from_entry(entry):
    if not isinstance(entry, dict):
        raise InvalidSpace("every dimension entry must be an object")
    try:
        name = entry["name"]
        kind = entry["type"]
        default = entry["default"]
    except KeyError as exc:
        raise InvalidSpace(f"dimension entry missing key {exc.args[0]!r}")
    if kind == KIND_CONTINUOUS:
        rng = entry.get("range")
        if not isinstance(rng, (list, tuple)) or len(rng) != 2:
            raise InvalidSpace(f"dimension {name!r}: continuous entries need a [lo, hi] range")
        return Dimension(name, kind, lo=float(rng[0]), hi=float(rng[1]), default=default)
    if kind == KIND_CATEGORICAL:
        values = entry.get("values")
        if not isinstance(values, (list, tuple)):
            raise InvalidSpace(f"dimension {name!r}: categorical entries need a value list")
        return Dimension(name, kind, values=tuple(values), default=default)
    raise InvalidSpace(f"dimension {name!r}: unknown type {kind!r}")


def load_space(path):
    """Read a parameter space file (JSON, one dimension per entry)."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidSpace(f"{path}: not valid JSON ({exc})")
    entries = doc.get("dimensions") if isinstance(doc, dict) else None
    if not isinstance(entries, list):
        raise InvalidSpace(f"{path}: needs a top-level 'dimensions' list")
    return ParameterSpace(tuple(_dim_from_entry(e) for e in entries))


def default_space(solver_id):
    """The tuning space shipped for a solver's adapter."""
    get_adapter(solver_id)
    ref = resources.files("milpeval").joinpath(f"data/space_{solver_id}.json")
    with ref.open() as fh:
        doc = json.load(fh)
    return ParameterSpace(tuple(_dim_from_entry(e) for e in doc["dimensions"]))


def load_presets(solver_id):
    """Named pre-tuned configurations shipped for a solver (may be empty)."""
    get_adapter(solver_id)
    ref = resources.files("milpeval").joinpath(f"data/tuned_presets_{solver_id}.json")
    if not ref.is_file():
        return {}
    with ref.open() as fh:
        return json.load(fh)


def _random_configuration(space, rng, trials):
    """Uniform draw per dimension; ignores the trial history."""
    return space.sample(rng)


STRATEGIES = {"random": _random_configuration}


def register_strategy(name, propose):
    """Plug in a search strategy: propose(space, rng, trials) -> configuration."""
    STRATEGIES[name] = propose


@dataclass
class Trial:
    """One evaluated configuration on the tuning set."""

    index: int
    configuration: Dict[str, object]
    mean_time: float
    times: Dict[str, float]
    statuses: Dict[str, str]
    crashed: bool = False


@dataclass
class TuningResult:
    """Outcome of a tuning run, plus optional held-out evaluation."""

    solver_id: str
    strategy: str
    seed: int
    budget: int
    time_limit: float
    threads: int
    timeout_rule: str
    trials: List[Trial]
    best_configuration: Dict[str, object]
    best_mean_time: float
    default_mean_time: float
    improvement_percent: float
    test_default_mean: Optional[float] = None
    test_best_mean: Optional[float] = None
    test_improvement_percent: Optional[float] = None

    def to_json(self):
        return json.dumps(dataclasses.asdict(self), sort_keys=True, indent=2) + "\n"

    @staticmethod
    def from_json(text):
        doc = json.loads(text)
        trials = [Trial(**t) for t in doc.pop("trials")]
        return TuningResult(trials=trials, **doc)


def save_result(result, path):
    with open(path, "w") as fh:
        fh.write(result.to_json())


def load_result(path):
    with open(path) as fh:
        return TuningResult.from_json(fh.read())


def improvement_percent(default_mean, best_mean):
    """Relative speedup of best over default, as a percentage.

    Positive means the tuned configuration is faster; the sign is kept
    as computed, so a regression on a held-out set comes out negative.
    """
    if default_mean <= 0.0:
        return 0.0
    return (default_mean - best_mean) / default_mean * 100.0


def _instance_files(instances):
    if isinstance(instances, (str, os.PathLike)):
        return list_instance_files(instances)
    return sorted(instances, key=lambda p: os.path.basename(p))


def _score_config(files, config, configuration, jobs):
    """Solve every file under `configuration`, scoring each at most the limit.

    Returns (mean, times, statuses, crashed); `crashed` is True when any
    solve ended in status=error. Error solves score at the limit here,
    escalation of a whole trial is the caller's decision.
    """
    adapter = get_adapter(config.solver_id)
    adapter.check_params(configuration)
    merged = dict(config.params)
    merged.update(configuration)
    base = dataclasses.replace(config, params=merged, log_path=None)

    scratch = tempfile.mkdtemp(prefix="milpeval-tune-")
    try:

        def one(path):
            name = os.path.splitext(os.path.basename(path))[0]
            cfg = dataclasses.replace(base, log_path=os.path.join(scratch, name + ".log"))
            return run_solver(path, cfg)

        if jobs > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
                records = list(pool.map(one, files))
        else:
            records = [one(p) for p in files]
    finally:
        shutil.rmtree(scratch, ignore_errors=True)

    timeout_like = (STATUS_FEASIBLE_TIME_LIMIT, STATUS_TIME_LIMIT_NO_INCUMBENT, STATUS_ERROR)
    times, statuses = {}, {}
    for rec in records:
        if rec.status in timeout_like:
            t = config.time_limit
        else:
            t = min(rec.wall_time, config.time_limit)
        times[rec.instance] = float(t)
        statuses[rec.instance] = rec.status
    crashed = any(s == STATUS_ERROR for s in statuses.values())
    mean = float(np.mean(list(times.values())))
    return mean, times, statuses, crashed


def tune(space, tuning_set, config, budget, strategy=DEFAULT_STRATEGY, seed=0, jobs=1):
    """Search `space` for the configuration with the lowest mean solve time.

    `tuning_set` is a directory or a list of instance files; `config`
    carries the solver, per-solve time limit, threads, and solver seed.
    Trial 1 is the space's default configuration and the remaining
    budget - 1 trials come from the named strategy, so with a fixed seed
    the proposed configuration sequence is reproducible. A trial with a
    crashed solve is scored all-timeout and flagged. Instance solves
    within a trial run on `jobs` workers; trials are sequential.
    """
    files = _instance_files(tuning_set)
    if not files:
        raise EmptyTuningSet("no tuning instances")
    if budget < 1:
        raise InvalidConfig("tuning budget must be at least 1")
    try:
        propose = STRATEGIES[strategy]
    except KeyError:
        raise UnknownStrategy(f"unknown search strategy {strategy!r}")

    rng = np.random.default_rng(np.random.PCG64(seed))
    trials = []
    for index in range(1, budget + 1):
        if index == 1:
            configuration = space.default_configuration()
        else:
            configuration = propose(space, rng, tuple(trials))
            if not space.contains(configuration):
                raise InvalidSpace(
                    f"strategy {strategy!r} proposed a configuration outside the space"
                )
        mean, times, statuses, crashed = _score_config(files, config, configuration, jobs)
        if crashed:
            times = {name: float(config.time_limit) for name in times}
            mean = float(config.time_limit)
        trials.append(Trial(index, configuration, mean, times, statuses, crashed))

    best = min(trials, key=lambda t: t.mean_time)  # ties keep the earliest trial
    default_mean = trials[0].mean_time
    return TuningResult(
        solver_id=config.solver_id,
        strategy=strategy,
        seed=seed,
        budget=budget,
        time_limit=config.time_limit,
        threads=config.threads,
        timeout_rule=TIMEOUT_RULE,
        trials=trials,
        best_configuration=dict(best.configuration),
        best_mean_time=best.mean_time,
        default_mean_time=default_mean,
        improvement_percent=improvement_percent(default_mean, best.mean_time),
    )


def evaluate_config(configuration, test_set, config, jobs=1):
    """Mean wall-clock time of one configuration on a held-out set.

    Timeouts and failed solves score at the time limit. Returns
    (mean_time, per-instance times keyed by instance name).
    """
    files = _instance_files(test_set)
    if not files:
        raise EmptyTestSet("no test instances")
    mean, times, _, _ = _score_config(files, config, configuration, jobs)
    return mean, times


def evaluate_generalization(result, test_set, config, jobs=1):
    """Score the default and best configurations on a held-out set.

    Returns a copy of `result` with the test-set fields filled in; the
    improvement sign is preserved, so tuning that hurts shows negative.
    """
    space_default = dict(result.trials[0].configuration)
    default_mean, _ = evaluate_config(space_default, test_set, config, jobs=jobs)
    best_mean, _ = evaluate_config(result.best_configuration, test_set, config, jobs=jobs)
    return dataclasses.replace(
        result,
        test_default_mean=default_mean,
        test_best_mean=best_mean,
        test_improvement_percent=improvement_percent(default_mean, best_mean),
    )
