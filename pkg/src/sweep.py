# Parameter sweep: every stage of the verification for each admissible cell

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from tqdm import tqdm

from .calculus import Params, mk_params
from .config import Config
from .errors import SodCalcError
from .fault_injection import cell_seed, run_faults
from .theorem_driver import (
    enumerate_cover_sods, replay_main, verify_axe_windows, verify_ck, verify_phi_relabel, verify_weight_splitting,
)
from .trace_checker import check_objects
from .trace_format import trace_objects
from .windows import crosscheck

logger = logging.getLogger(__name__)

STAGES = ("replay", "check", "faults", "crosscheck", "verify_ck", "phi_relabel", "weight_splitting",
          "cover_sods", "axe_windows")

PASS = "pass"
SKIP = "skip"


class SweepOptions(NamedTuple):
    faults: int = 0
    crosscheck: bool = True
    seed: int = 0


@dataclass
class CellResult:
    n: int
    d: int
    m: int
    stages: Dict[str, str] = field(default_factory=dict)
    steps: int = 0
    phi_blocks: int = 0
    grid: Tuple[int, int] = (0, 0)

    @property
    def ok(self) -> bool:
        return all(v in (PASS, SKIP) for v in self.stages.values())

    @property
    def key(self) -> Tuple[int, int, int]:
        return (self.n, self.d, self.m)

    def failures(self) -> List[str]:
        return [f"{k}: {v}" for k, v in self.stages.items() if v not in (PASS, SKIP)]


def sweep_cells(n_range: Tuple[int, int], d_range: Tuple[int, int], m_range: Tuple[Optional[int], int]) -> List[Params]:
    """
    Admissible (n, d, m) triples with n*d <= m

    Args:
        n_range: Inclusive n bounds
        d_range: Inclusive d bounds
        m_range: Inclusive m bounds; a lower bound of None means n*d
    """
    cells = []
    m_lo, m_hi = m_range
    for n in range(max(2, n_range[0]), n_range[1] + 1):
        for d in range(max(1, d_range[0]), d_range[1] + 1):
            for m in range(max(n * d, m_lo or 0), m_hi + 1):
                cells.append(mk_params(n, d, m))
    return cells


def _stage(result: CellResult, name: str, fn):
    try:
        outcome = fn()
    except SodCalcError as e:
        result.stages[name] = f"{e.code}: {e}"
        return None
    if outcome is False:
        result.stages[name] = "failed"
    elif outcome is None:
        result.stages[name] = SKIP
    else:
        result.stages[name] = PASS if outcome is True else outcome
    return outcome


def run_cell(args: Tuple[Tuple[int, int, int], SweepOptions]) -> CellResult:
    """Run every stage for one cell; stage failures are recorded, never raised."""
    (n, d, m), options = args
    p = mk_params(n, d, m)
    result = CellResult(n, d, m)
    replay = {}

    def do_replay():
        replay["result"] = replay_main(p)
        return True

    _stage(result, "replay", do_replay)
    if "result" in replay:
        r = replay["result"]
        result.steps = len(r.trace)
        result.phi_blocks = len(r.phi_blocks)
        result.grid = (p.n, p.M)
        objects = trace_objects(r.trace)

        def do_check():
            checked = check_objects(objects)
            return True if checked.ok else f"step {checked.failed_step}: {checked.reason}"

        def do_faults():
            if options.faults <= 0:
                return None
            report = run_faults(objects, options.faults, cell_seed(n, d, m, options.seed))
            return True if report.ok else f"{len(report.missed)} of {report.injected} corruptions accepted"

        _stage(result, "check", do_check)
        _stage(result, "faults", do_faults)
        _stage(result, "phi_relabel", lambda: verify_phi_relabel(p, r.phi_blocks).ok)
    else:
        for name in ("check", "faults"):
            result.stages[name] = SKIP
        _stage(result, "phi_relabel", lambda: verify_phi_relabel(p).ok)

    def do_crosscheck():
        if not options.crosscheck:
            return None
        span = Config.crosscheck_span(m)
        report = crosscheck(p, (-span, 2 * span))
        return True if report.ok else f"{len(report.mismatches)} disagreements, first {tuple(report.mismatches[0])}"

    def do_ck():
        for k in range(p.n):
            verify_ck(p, k)
        return True

    def do_splitting():
        report = verify_weight_splitting(p)
        return True if report.ok else report.failures[0]

    def do_axe():
        report = verify_axe_windows(p)
        return True if report.ok else report.failures[0]

    _stage(result, "crosscheck", do_crosscheck)
    _stage(result, "verify_ck", do_ck)
    _stage(result, "weight_splitting", do_splitting)
    _stage(result, "cover_sods", lambda: len(enumerate_cover_sods(p)) == p.n)
    _stage(result, "axe_windows", do_axe)
    result.stages = {name: result.stages.get(name, SKIP) for name in STAGES}
    return result


@dataclass
class SweepReport:
    cells: List[CellResult]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.cells)

    @property
    def failed(self) -> List[CellResult]:
        return [c for c in self.cells if not c.ok]

    def rows(self) -> List[Dict]:
        return [
            {"n": c.n, "d": c.d, "m": c.m, "ok": c.ok, "steps": c.steps, "phi": c.phi_blocks,
             "grid": f"{c.grid[0]}x{c.grid[1]}", **c.stages}
            for c in self.cells
        ]


def run_sweep(cells: Sequence[Params], jobs: int = 1, options: Optional[SweepOptions] = None,
              progress: bool = True) -> SweepReport:
    """
    Run every cell, in parallel when jobs > 1

    Results are sorted by (n, d, m), so the report does not depend on the
    number of workers.
    """
    options = options or SweepOptions()
    jobs = Config.resolve_jobs(jobs)
    work = [((p.n, p.d, p.m), options) for p in cells]
    logger.info(f"sweeping {len(work)} cells with {jobs} worker(s)")
    if jobs <= 1:
        results = [run_cell(w) for w in tqdm(work, desc="sweep", disable=not progress)]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(tqdm(pool.map(run_cell, work), total=len(work), desc="sweep", disable=not progress))
    results.sort(key=lambda c: c.key)
    report = SweepReport(results)
    for cell in report.failed:
        logger.error(f"cell {cell.key} failed: {'; '.join(cell.failures())}")
    logger.info(f"sweep finished: {len(results) - len(report.failed)}/{len(results)} cells pass")
    return report
