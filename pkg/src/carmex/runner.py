"""Work-unit planning, process-pool execution, and checkpointed runs."""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable

from .carmichael import CarmichaelRecord
from .largeprime import ScanRange, scan, split_range
from .search import SearchConfig, default_units, search_unit
from .store import Checkpoint, checkpoint_resume, checkpoint_write, fingerprint

log = logging.getLogger(__name__)

SCAN_PARTS = 16


@dataclass(frozen=True)
class Job:
    uid: str
    cfg: SearchConfig
    unit: tuple[int, ...] | None = None
    scan: ScanRange | None = None


def unit_id(unit: tuple[int, ...]) -> str:
    return "s:" + ",".join(map(str, unit))


def parse_units(text: str) -> tuple[tuple[int, ...], ...]:
    """'3;5,7;11' -> ((3,), (5, 7), (11,))."""
    units = []
    for chunk in text.replace(" ", "").split(";"):
        if chunk:
            units.append(tuple(int(x) for x in chunk.split(",")))
    return tuple(units)


def plan(cfg: SearchConfig, scan_parts: int = SCAN_PARTS) -> list[Job]:
    """Tree units for primes up to the split, then scan units above it."""
    jobs = [Job(unit_id(u), cfg, unit=u) for u in (cfg.units if cfg.units is not None else default_units(cfg))]
    root = math.isqrt(cfg.limit)
    if cfg.bound < root and cfg.units is None:
        for r in split_range(ScanRange(cfg.bound, root, cfg.limit), scan_parts):
            jobs.append(Job(f"L:{r.p_lo}-{r.p_hi}", cfg, scan=r))
    return jobs


def _keep(cfg: SearchConfig, rec: CarmichaelRecord) -> bool:
    return cfg.admits(rec.d)


def run_job(job: Job) -> tuple[str, list[CarmichaelRecord]]:
    if job.scan is not None:
        recs = sorted(r for r in scan(job.scan) if _keep(job.cfg, r))
    else:
        recs = search_unit(job.cfg, job.unit)
    return job.uid, recs


def run_fingerprint(cfg: SearchConfig, scan_parts: int = SCAN_PARTS) -> str:
    return fingerprint({"config": asdict(cfg), "scan_parts": scan_parts})


def default_threads() -> int:
    return os.cpu_count() or 1


def run_enumeration(
    cfg: SearchConfig,
    threads: int = 1,
    checkpoint: str | os.PathLike | None = None,
    scan_parts: int = SCAN_PARTS,
    stop_after: int | None = None,
    progress: Callable[[str, int], None] | None = None,
) -> list[CarmichaelRecord]:
    """Run every unit of ``plan(cfg)`` and return the merged sorted records.

    Finished units are recorded in ``checkpoint`` (if given) in plan order,
    so a rerun skips them. ``stop_after`` ends the run after that many newly
    finished units, which is how tests simulate an interruption.
    """
    jobs = plan(cfg, scan_parts)
    ckpt = Checkpoint(run_fingerprint(cfg, scan_parts))
    if checkpoint is not None:
        ckpt = checkpoint_resume(checkpoint, ckpt.fingerprint)
    todo = [j for j in jobs if not ckpt.done(j.uid)]
    log.info("%d units planned, %d already done", len(jobs), len(jobs) - len(todo))
    if stop_after is not None:
        todo = todo[:stop_after]

    def finish(uid: str, recs: list[CarmichaelRecord]) -> None:
        ckpt.completed[uid] = recs
        if checkpoint is not None:
            checkpoint_write(checkpoint, ckpt)
        if progress is not None:
            progress(uid, len(recs))

    if threads > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for uid, recs in pool.map(run_job, todo, chunksize=1):
                finish(uid, recs)
    else:
        for job in todo:
            finish(*run_job(job))
    return ckpt.records()
