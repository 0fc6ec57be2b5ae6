"""Line-oriented result files, merging, and checkpoints.

A result file is ASCII::

    # carmichael-v1
    # limit 100000
    # strategy enumerate
    # unit all
    561 3 11 17
    1105 5 13 17

Header lines start with ``#``; each body line is N followed by its primes,
strictly ascending in N. Loading re-verifies every line unless told not to.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable

from .arith import is_prime
from .carmichael import CarmichaelRecord

FORMAT_VERSION = "carmichael-v1"
_HEADER_KEYS = ("limit", "strategy", "unit")


class StoreError(ValueError):
    pass


class CheckpointMismatch(StoreError):
    pass


@dataclass
class ResultFile:
    limit: int
    strategy: str = "enumerate"
    unit: str = "all"
    records: list[CarmichaelRecord] = field(default_factory=list)
    version: str = FORMAT_VERSION

    def numbers(self) -> list[int]:
        return [r.n for r in self.records]


def dumps(rf: ResultFile) -> str:
    lines = [f"# {rf.version}", f"# limit {rf.limit}", f"# strategy {rf.strategy}", f"# unit {rf.unit}"]
    prev = 0
    for r in rf.records:
        if r.n <= prev:
            raise StoreError(f"records not strictly ascending at {r.n}")
        prev = r.n
        lines.append(" ".join(map(str, (r.n,) + r.primes)))
    return "\n".join(lines) + "\n"


def write(records: Iterable[CarmichaelRecord], path: str | os.PathLike | None = None, *,
          limit: int, strategy: str = "enumerate", unit: str = "all") -> ResultFile:
    """Build a ResultFile and, when a path is given, write it atomically."""
    rf = ResultFile(limit, strategy, unit, list(records))
    if path is not None:
        _atomic_write(Path(path), dumps(rf))
    return rf


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _parse_line(line: str, lineno: int, verify: bool) -> CarmichaelRecord:
    try:
        nums = [int(tok) for tok in line.split()]
    except ValueError:
        raise StoreError(f"line {lineno}: malformed record {line!r}") from None
    if len(nums) < 2 or any(x < 2 for x in nums):
        raise StoreError(f"line {lineno}: malformed record {line!r}")
    n, primes = nums[0], tuple(nums[1:])
    if len(set(primes)) < len(primes):
        raise StoreError(f"line {lineno}: {n} is not squarefree")
    if any(a > b for a, b in zip(primes, primes[1:])):
        raise StoreError(f"line {lineno}: primes of {n} are not ascending")
    if len(primes) < 3:
        raise StoreError(f"line {lineno}: {n} has fewer than three prime factors")
    if math.prod(primes) != n:
        raise StoreError(f"line {lineno}: primes do not multiply to {n}")
    if verify and not all(is_prime(p) for p in primes):
        raise StoreError(f"line {lineno}: {n} lists a composite factor")
    try:
        return CarmichaelRecord(n, primes)
    except ValueError as exc:
        raise StoreError(f"line {lineno}: {exc}") from None


def loads(text: str, verify: bool = True) -> ResultFile:
    meta: dict[str, str] = {}
    version = None
    records: list[CarmichaelRecord] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if version is None:
                version = body
                if version != FORMAT_VERSION:
                    raise StoreError(f"line {lineno}: unknown format {body!r}")
                continue
            key, _, value = body.partition(" ")
            if key in _HEADER_KEYS:
                meta[key] = value
            continue
        if version is None:
            raise StoreError(f"line {lineno}: missing format header")
        rec = _parse_line(line, lineno, verify)
        if records and rec.n <= records[-1].n:
            raise StoreError(f"line {lineno}: {rec.n} out of order")
        records.append(rec)
    if version is None or "limit" not in meta:
        raise StoreError("missing header")
    limit = int(meta["limit"])
    if records and records[-1].n > limit:
        raise StoreError(f"record {records[-1].n} exceeds limit {limit}")
    return ResultFile(limit, meta.get("strategy", "enumerate"), meta.get("unit", "all"), records, version)


def read(path: str | os.PathLike, verify: bool = True) -> ResultFile:
    return loads(Path(path).read_text(), verify)


def merge(files: list[ResultFile]) -> ResultFile:
    """Sorted union; a number listed twice must carry the same primes."""
    if not files:
        raise StoreError("nothing to merge")
    limit = files[0].limit
    for f in files:
        if f.version != files[0].version or f.limit != limit:
            raise StoreError("cannot merge files with different limits or versions")
    seen: dict[int, CarmichaelRecord] = {}
    for f in files:
        for r in f.records:
            old = seen.setdefault(r.n, r)
            if old.primes != r.primes:
                raise StoreError(f"conflicting factorizations for {r.n}")
    strategies = {f.strategy for f in files}
    units = {f.unit for f in files}
    return ResultFile(
        limit,
        strategies.pop() if len(strategies) == 1 else "merge",
        units.pop() if len(units) == 1 else "merged",
        sorted(seen.values()),
    )


# ---------------------------------------------------------------- checkpoints

def fingerprint(config) -> str:
    """Stable hash of a dataclass config (or any JSON-able mapping)."""
    data = asdict(config) if hasattr(config, "__dataclass_fields__") else dict(config)
    blob = json.dumps(data, sort_keys=True, default=list).encode()
    return hashlib.sha256(blob).hexdigest()


@dataclass
class Checkpoint:
    fingerprint: str
    completed: dict[str, list[CarmichaelRecord]] = field(default_factory=dict)

    def done(self, unit_id: str) -> bool:
        return unit_id in self.completed

    def records(self) -> list[CarmichaelRecord]:
        return sorted({r for recs in self.completed.values() for r in recs})


def checkpoint_write(path: str | os.PathLike, ckpt: Checkpoint) -> None:
    doc = {
        "format": FORMAT_VERSION,
        "fingerprint": ckpt.fingerprint,
        "completed": {
            uid: [[r.n, *r.primes] for r in recs] for uid, recs in ckpt.completed.items()
        },
    }
    _atomic_write(Path(path), json.dumps(doc, indent=1) + "\n")


def checkpoint_resume(path: str | os.PathLike, fp: str) -> Checkpoint:
    """Load a checkpoint for config fingerprint ``fp``; a missing file is a fresh start."""
    path = Path(path)
    if not path.exists():
        return Checkpoint(fp)
    doc = json.loads(path.read_text())
    if doc.get("format") != FORMAT_VERSION:
        raise StoreError(f"{path}: unknown checkpoint format")
    if doc.get("fingerprint") != fp:
        raise CheckpointMismatch(
            f"{path} was written for a different configuration; "
            "delete it or rerun with the original flags"
        )
    completed = {
        uid: [CarmichaelRecord(row[0], tuple(row[1:])) for row in rows]
        for uid, rows in doc.get("completed", {}).items()
    }
    return Checkpoint(fp, completed)
