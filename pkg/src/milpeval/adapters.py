"""Per-solver command building and exit-report reading.

Each adapter knows how to find its solver, turn a config into a child
process command line, and read the terminal summary out of the log.
Everything solver-specific lives here; the harness stays generic.
"""

import os
import re
import shutil
import subprocess
import sys
from dataclasses import dataclass
from typing import Optional

from .errors import InvalidSolverConfig, SolverNotFound, UnknownParameter

STATUS_OPTIMAL = "optimal"
STATUS_FEASIBLE_TIME_LIMIT = "feasible-time-limit"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"
STATUS_TIME_LIMIT_NO_INCUMBENT = "time-limit-no-incumbent"
STATUS_ERROR = "error"
STATUSES = (
    STATUS_OPTIMAL,
    STATUS_FEASIBLE_TIME_LIMIT,
    STATUS_INFEASIBLE,
    STATUS_UNBOUNDED,
    STATUS_TIME_LIMIT_NO_INCUMBENT,
    STATUS_ERROR,
)

# Sentinel executable value selecting the in-package child runner.
BUNDLED = "bundled"

ENV_PREFIX = "GENBENCH_SOLVER_"


@dataclass
class ExitReport:
    """What the solver's own final summary said."""

    status: str
    nodes: int = 0
    z_incumbent: Optional[float] = None
    z_bound: Optional[float] = None
    solve_time: Optional[float] = None
    version: Optional[str] = None


def _finite(x):
    return x is not None and abs(x) < 1e30


def _to_float(token):
    try:
        v = float(token)
    except (TypeError, ValueError):
        return None
    return v


class _Adapter:
    solver_id = ""
    binary_names = ()
    known_params = {}

    def check_params(self, overrides):
        for name in overrides:
            if name not in self.known_params:
                raise UnknownParameter(
                    f"solver {self.solver_id!r} does not accept parameter {name!r}"
                )

    def find_executable(self, explicit=None):
        """Resolve in order: explicit path, environment, PATH."""
        candidates = [explicit, os.environ.get(ENV_PREFIX + self.solver_id.upper())]
        for cand in candidates:
            if not cand:
                continue
            if cand == BUNDLED and self.solver_id == "highs":
                return BUNDLED
            path = shutil.which(cand) or (cand if os.path.isfile(cand) else None)
            if path is None:
                raise SolverNotFound(f"{self.solver_id} executable {cand!r} not found")
            return path
        for name in self.binary_names:
            path = shutil.which(name)
            if path:
                return path
        return self._fallback()

    def _fallback(self):
        raise SolverNotFound(f"no {self.solver_id} executable on PATH")

    def probe_version(self, exe):
        try:
            out = subprocess.run(
                self.version_command(exe),
                capture_output=True,
                text=True,
                timeout=60,
            )
            text = out.stdout + out.stderr
        except (OSError, subprocess.TimeoutExpired):
            return "unknown"
        m = re.search(r"\d+\.\d+(\.\d+)?", text)
        if m:
            return m.group(0)
        lines = text.splitlines()
        return lines[0].strip() if lines else "unknown"


class HighsAdapter(_Adapter):
    solver_id = "highs"
    binary_names = ("highs",)
    # Option-file entries the tuner and callers may override.
    known_params = {
        "presolve": str,
        "parallel": str,
        "mip_heuristic_effort": float,
        "mip_pool_age_limit": int,
        "simplex_strategy": int,
        "mip_rel_gap": float,
        "mip_abs_gap": float,
    }

    def _fallback(self):
        try:
            import scipy.optimize._highspy  # noqa: F401
        except ImportError:
            raise SolverNotFound("no highs executable and no bundled fallback available")
        return BUNDLED

    def write_aux(self, config, scratch_dir):
        lines = [
            "time_limit = %.17g" % float(config.time_limit),
            "threads = %d" % int(config.threads),
            "random_seed = %d" % int(config.seed),
        ]
        for name in sorted(config.params):
            lines.append("%s = %s" % (name, config.params[name]))
        path = os.path.join(scratch_dir, "highs_options.txt")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        return path

    def build_command(self, exe, instance_path, config, scratch_dir):
        self.check_params(config.params)
        options_path = self.write_aux(config, scratch_dir)
        if exe == BUNDLED:
            return [sys.executable, "-m", "milpeval._highs_runner", instance_path, options_path]
        return [exe, "--options_file", options_path, instance_path]

    def version_command(self, exe):
        if exe == BUNDLED:
            return [sys.executable, "-m", "milpeval._highs_runner", "--version"]
        return [exe, "--version"]

    def classify(self, log_text):
        version = None
        m = re.search(r"Running HiGHS (\S+)", log_text)
        if m:
            version = m.group(1)

        fields = {}
        in_report = False
        for line in log_text.splitlines():
            if line.startswith("Solving report"):
                in_report = True
                continue
            if in_report:
                m = re.match(r"  (\S[^\s].*?)\s{2,}(\S.*)$", line)
                if m is None:
                    continue
                key, value = m.group(1), m.group(2)
                if key not in fields:
                    fields[key] = value
        if "Status" in fields:
            return self._from_report(fields, version)

        # Pure-LP runs print a different closing block.
        m = re.search(r"^Model status\s*:\s*(.+)$", log_text, re.MULTILINE)
        if m:
            return self._from_lp_summary(m.group(1).strip(), log_text, version)
        return None

    def _from_report(self, fields, version):
        raw = fields["Status"]
        z_inc = _to_float(fields.get("Primal bound"))
        z_bound = _to_float(fields.get("Dual bound"))
        if not _finite(z_inc):
            z_inc = None
        if not _finite(z_bound):
            z_bound = None
        nodes = 0
        m = re.match(r"(\d+)", fields.get("Nodes", ""))
        if m:
            nodes = int(m.group(1))
        solve_time = None
        m = re.match(r"([0-9.eE+-]+)\s*\(total\)", fields.get("Timing", ""))
        if m:
            solve_time = _to_float(m.group(1))

        if raw == "Optimal":
            status = STATUS_OPTIMAL
        elif raw == "Infeasible":
            status = STATUS_INFEASIBLE
        elif raw in ("Unbounded", "Primal infeasible or unbounded"):
            status = STATUS_UNBOUNDED
        elif raw == "Time limit reached":
            status = STATUS_FEASIBLE_TIME_LIMIT if z_inc is not None else STATUS_TIME_LIMIT_NO_INCUMBENT
        else:
            status = STATUS_ERROR
        return ExitReport(status, nodes, z_inc, z_bound, solve_time, version)

    def _from_lp_summary(self, raw, log_text, version):
        obj = None
        m = re.search(r"^Objective value\s*:\s*(\S+)", log_text, re.MULTILINE)
        if m:
            obj = _to_float(m.group(1))
        solve_time = None
        m = re.search(r"^HiGHS run time\s*:\s*(\S+)", log_text, re.MULTILINE)
        if m:
            solve_time = _to_float(m.group(1))
        if raw == "Optimal":
            return ExitReport(STATUS_OPTIMAL, 0, obj, obj, solve_time, version)
        if raw == "Infeasible":
            return ExitReport(STATUS_INFEASIBLE, 0, None, None, solve_time, version)
        if raw in ("Unbounded", "Primal infeasible or unbounded"):
            return ExitReport(STATUS_UNBOUNDED, 0, None, None, solve_time, version)
        if raw == "Time limit reached":
            return ExitReport(STATUS_TIME_LIMIT_NO_INCUMBENT, 0, None, None, solve_time, version)
        return ExitReport(STATUS_ERROR, 0, None, None, solve_time, version)


class GurobiAdapter(_Adapter):
    solver_id = "gurobi"
    binary_names = ("gurobi_cl",)
    # The eight search-relevant knobs plus the gap tolerance.
    known_params = {
        "Heuristics": float,
        "MIPFocus": int,
        "VarBranch": int,
        "BranchDir": int,
        "Presolve": int,
        "PrePasses": int,
        "Cuts": int,
        "Method": int,
        "MIPGap": float,
    }

    def build_command(self, exe, instance_path, config, scratch_dir):
        self.check_params(config.params)
        argv = [
            exe,
            "Threads=%d" % int(config.threads),
            "TimeLimit=%.17g" % float(config.time_limit),
            "Seed=%d" % int(config.seed),
        ]
        for name in sorted(config.params):
            argv.append("%s=%s" % (name, config.params[name]))
        argv.append(instance_path)
        return argv

    def version_command(self, exe):
        return [exe, "--version"]

    def classify(self, log_text):
        version = None
        m = re.search(r"Gurobi Optimizer version (\S+)", log_text)
        if m:
            version = m.group(1)
        if version is None:
            return None

        nodes = 0
        solve_time = None
        m = None
        for m in re.finditer(
            r"Explored (\d+) nodes? \([0-9]+ simplex iterations\) in ([0-9.]+) seconds",
            log_text,
        ):
            pass
        if m:
            nodes = int(m.group(1))
            solve_time = float(m.group(2))

        z_inc = None
        z_bound = None
        m = None
        for m in re.finditer(
            r"Best objective (\S+), best bound (\S+), gap (\S+)", log_text
        ):
            pass
        if m:
            z_inc = _to_float(m.group(1))
            z_bound = _to_float(m.group(2))
            if not _finite(z_inc):
                z_inc = None
            if not _finite(z_bound):
                z_bound = None

        if re.search(r"^Optimal solution found", log_text, re.MULTILINE):
            status = STATUS_OPTIMAL
        elif re.search(r"^Model is infeasible or unbounded", log_text, re.MULTILINE):
            status = STATUS_UNBOUNDED
        elif re.search(r"^Model is infeasible", log_text, re.MULTILINE):
            status = STATUS_INFEASIBLE
        elif re.search(r"^Model is unbounded", log_text, re.MULTILINE):
            status = STATUS_UNBOUNDED
        elif re.search(r"^Time limit reached", log_text, re.MULTILINE):
            status = STATUS_FEASIBLE_TIME_LIMIT if z_inc is not None else STATUS_TIME_LIMIT_NO_INCUMBENT
        else:
            return None
        return ExitReport(status, nodes, z_inc, z_bound, solve_time, version)


class ScipAdapter(_Adapter):
    solver_id = "scip"
    binary_names = ("scip",)
    # Overrides use SCIP's slash-path names; each becomes a `set` command.
    known_params = {
        "limits/gap": float,
        "presolving/maxrounds": int,
        "separating/maxrounds": int,
        "separating/maxroundsroot": int,
        "heuristics/rins/freq": int,
        "branching/scorefunc": str,
    }

    def build_command(self, exe, instance_path, config, scratch_dir):
        self.check_params(config.params)
        argv = [exe]
        settings = [
            "set limits time %.17g" % float(config.time_limit),
            "set randomization randomseedshift %d" % int(config.seed),
            "set parallel maxnthreads %d" % int(config.threads),
        ]
        for name in sorted(config.params):
            settings.append("set %s %s" % (name.replace("/", " "), config.params[name]))
        for cmd in settings:
            argv += ["-c", cmd]
        argv += ["-c", "read %s" % instance_path, "-c", "optimize",
                 "-c", "display statistics", "-c", "quit"]
        return argv

    def version_command(self, exe):
        return [exe, "--version"]

    def classify(self, log_text):
        version = None
        m = re.search(r"SCIP version (\S+)", log_text)
        if m:
            version = m.group(1)
        if version is None:
            return None

        m = re.search(r"^SCIP Status\s*:\s*(.+)$", log_text, re.MULTILINE)
        if m is None:
            return None
        raw = m.group(1).strip()

        def grab(pattern, cast=float):
            g = re.search(pattern, log_text, re.MULTILINE)
            return cast(g.group(1)) if g else None

        nodes = grab(r"^Solving Nodes\s*:\s*(\d+)", int) or 0
        solve_time = grab(r"^Solving Time \(sec\)\s*:\s*([0-9.eE+-]+)")
        z_inc = grab(r"^Primal Bound\s*:\s*([0-9.eE+-]+)")
        z_bound = grab(r"^Dual Bound\s*:\s*([0-9.eE+-]+)")
        sol_count = grab(r"^Primal Bound\s*:\s*\S+\s*\((\d+) solutions?\)", int)
        if not _finite(z_inc) or sol_count == 0:
            z_inc = None
        if not _finite(z_bound):
            z_bound = None

        if "[optimal solution found]" in raw:
            status = STATUS_OPTIMAL
        elif "[infeasible or unbounded]" in raw:
            status = STATUS_UNBOUNDED
        elif "[infeasible]" in raw:
            status = STATUS_INFEASIBLE
        elif "[unbounded]" in raw:
            status = STATUS_UNBOUNDED
        elif "[time limit reached]" in raw:
            status = STATUS_FEASIBLE_TIME_LIMIT if z_inc is not None else STATUS_TIME_LIMIT_NO_INCUMBENT
        else:
            status = STATUS_ERROR
        return ExitReport(status, nodes, z_inc, z_bound, solve_time, version)


ADAPTERS = {
    "highs": HighsAdapter(),
    "gurobi": GurobiAdapter(),
    "scip": ScipAdapter(),
}


def get_adapter(solver_id):
    try:
        return ADAPTERS[solver_id]
    except KeyError:
        raise InvalidSolverConfig(f"unknown solver id {solver_id!r}")
