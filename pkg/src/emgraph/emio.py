"""Simulated external-memory substrate.

Everything in this package moves data through fixed-width record runs that
live on simulated block storage.  A run holds ``length`` records of
``arity`` unsigned 64-bit fields; records travel between "disk" and
"memory" one block of ``B`` records at a time, and every block transfer is
charged to an I/O counter.  ``D`` is an accounting divisor: a stream that
moves ``D`` blocks is charged one parallel I/O unit.

Memory discipline is tracked by a ledger.  Streams reserve one block of
capacity while open, sort chunks reserve their record count, and pipelines
that pin small structures (neighbor lists, representative trees) reserve
those too.  In debug mode the ledger raises as soon as simulated residency
would exceed the configured capacity ``M``.

Write buffers are attributed to the disk side of the interface, so a
multiway merge of ``M//B`` input streams fits exactly in memory.
"""

from __future__ import annotations

import heapq
import os
import shutil
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass
from operator import itemgetter

import numpy as np

RECORD_DTYPE = np.uint64

#: largest encodable field value, used as a sentinel by tree serialization
NIL = (1 << 64) - 1


class EmConfigError(ValueError):
    """Invalid substrate parameters."""


class SortSpecError(ValueError):
    """Sort key does not match the run it is applied to."""


class StorageError(RuntimeError):
    """A block transfer failed; carries the offending block index."""

    def __init__(self, message, block_index=None):
        super().__init__(message)
        self.block_index = block_index


class MemoryBudgetError(RuntimeError):
    """A pipeline tried to hold more than M records in simulated memory."""


@dataclass(frozen=True)
class EmConfig:
    """External-memory model parameters (records, not bytes)."""

    memory_capacity: int = 1 << 20  # M: records resident in memory
    block_size: int = 1 << 12      # B: records per block
    disk_count: int = 1            # D: parallel-disk accounting divisor

    def __post_init__(self):
        if self.block_size < 1:
            raise EmConfigError("block_size must be >= 1")
        if self.disk_count < 1:
            raise EmConfigError("disk_count must be >= 1")
        if self.memory_capacity < 2 * self.block_size:
            raise EmConfigError("memory_capacity must be at least 2 blocks")

    @property
    def merge_fan_in(self) -> int:
        # one block of memory per input stream; at least a binary merge
        return max(2, self.memory_capacity // self.block_size)


@dataclass
class IoStats:
    """Monotone counters of parallel block I/O units."""

    blocks_read: int = 0
    blocks_written: int = 0
    disk_count: int = 1
    block_size: int = 1

    @property
    def total_ios(self) -> int:
        return self.blocks_read + self.blocks_written

    @property
    def scan_units(self) -> int:
        """Record-transfer equivalent of the counters: (r+w) * D * B."""
        return self.total_ios * self.disk_count * self.block_size

    def snapshot(self) -> "IoStats":
        return IoStats(self.blocks_read, self.blocks_written,
                       self.disk_count, self.block_size)

    def reset(self) -> None:
        self.blocks_read = 0
        self.blocks_written = 0

    def delta(self, earlier: "IoStats") -> "IoStats":
        return IoStats(self.blocks_read - earlier.blocks_read,
                       self.blocks_written - earlier.blocks_written,
                       self.disk_count, self.block_size)


class MemoryLedger:
    """Watermark accounting of simulated-resident records."""

    def __init__(self, limit: int, debug: bool = True):
        self.limit = limit
        self.debug = debug
        self.current = 0
        self.peak = 0

    def acquire(self, n: int) -> None:
        if n < 0:
            raise ValueError("cannot acquire a negative amount")
        self.current += n
        if self.current > self.peak:
            self.peak = self.current
        if self.debug and self.current > self.limit:
            raise MemoryBudgetError(
                f"simulated memory exceeded: {self.current} > M={self.limit}")

    def release(self, n: int) -> None:
        self.current -= n
        if self.current < 0:
            raise RuntimeError("memory ledger released more than acquired")

    @contextmanager
    def reserve(self, n: int):
        self.acquire(n)
        try:
            yield
        finally:
            self.release(n)


class _Meter:
    """Groups physical block transfers of one stream into D-parallel units."""

    def __init__(self, stats: IoStats, field: str, disk_count: int):
        self._stats = stats
        self._field = field
        self._d = disk_count
        self._pending = 0

    def add(self, nblocks: int = 1) -> None:
        self._pending += nblocks
        units, self._pending = divmod(self._pending, self._d)
        if units:
            setattr(self._stats, self._field,
                    getattr(self._stats, self._field) + units)

    def flush(self) -> None:
        if self._pending:
            setattr(self._stats, self._field,
                    getattr(self._stats, self._field) + 1)
            self._pending = 0


class _MemoryStore:
    def __init__(self, arity: int):
        self.arity = arity
        self._blocks: list[np.ndarray] = []

    @property
    def n_blocks(self) -> int:
        return len(self._blocks)

    def append_block(self, arr: np.ndarray) -> None:
        self._blocks.append(arr)

    def read_block(self, i: int) -> np.ndarray:
        try:
            return self._blocks[i]
        except IndexError:
            raise StorageError(f"block {i} out of range", block_index=i)


class _FileStore:
    """One flat file of consecutive little-endian u64 records."""

    def __init__(self, path: str, arity: int, block_size: int):
        self.path = path
        self.arity = arity
        self._block = block_size
        self._lengths: list[int] = []  # records per block, append order
        self._fh = open(path, "wb+")

    @property
    def n_blocks(self) -> int:
        return len(self._lengths)

    def append_block(self, arr: np.ndarray) -> None:
        if self.arity:
            self._fh.seek(0, os.SEEK_END)
            self._fh.write(np.ascontiguousarray(arr, dtype="<u8").tobytes())
        self._lengths.append(len(arr))

    def read_block(self, i: int) -> np.ndarray:
        if i >= len(self._lengths):
            raise StorageError(f"block {i} out of range", block_index=i)
        nrec = self._lengths[i]
        if self.arity == 0:
            return np.empty((nrec, 0), dtype=RECORD_DTYPE)
        offset = i * self._block * self.arity * 8
        self._fh.seek(offset)
        raw = self._fh.read(nrec * self.arity * 8)
        if len(raw) != nrec * self.arity * 8:
            raise StorageError(f"short read at block {i}", block_index=i)
        return np.frombuffer(raw, dtype="<u8").reshape(nrec, self.arity)

    def close(self) -> None:
        self._fh.close()


class ExternalRun:
    """An immutable sequence of fixed-width records on block storage."""

    def __init__(self, substrate: "Substrate", arity: int, length: int, store):
        self.substrate = substrate
        self.arity = arity
        self.length = length
        self._store = store

    def __len__(self) -> int:
        return self.length

    def __repr__(self):
        return f"ExternalRun(arity={self.arity}, length={self.length})"

    @property
    def record_width(self) -> int:
        """Bytes per record."""
        return 8 * self.arity

    def n_blocks(self) -> int:
        b = self.substrate.config.block_size
        return -(-self.length // b) if self.length else 0

    def blocks(self, start: int = 0, stop: int | None = None):
        """Stream numpy blocks covering records [start, stop).

        Charges one read unit per D physical blocks touched and reserves one
        block of ledger capacity while the stream is open.
        """
        sub = self.substrate
        b = sub.config.block_size
        stop = self.length if stop is None else min(stop, self.length)
        if start >= stop:
            return
        first, last = start // b, (stop - 1) // b
        meter = sub._read_meter()
        with sub.ledger.reserve(b):
            try:
                for i in range(first, last + 1):
                    arr = self._store.read_block(i)
                    meter.add()
                    lo = start - i * b if i == first else 0
                    hi = stop - i * b if i == last else len(arr)
                    yield arr[lo:hi]
            finally:
                meter.flush()

    def stream(self, start: int = 0, stop: int | None = None):
        """Stream records as tuples of Python ints."""
        for arr in self.blocks(start, stop):
            yield from map(tuple, arr.tolist())

    def read_block(self, i: int) -> np.ndarray:
        """Random-access block read; charged one read unit (ungrouped)."""
        arr = self._store.read_block(i)
        self.substrate.charge_read_units(1)
        return arr

    def read_record(self, idx: int) -> tuple:
        b = self.substrate.config.block_size
        arr = self.read_block(idx // b)
        return tuple(int(x) for x in arr[idx % b])

    def to_list(self) -> list[tuple]:
        """Materialize every record; test/desk-scale convenience."""
        return list(self.stream())


class RunWriter:
    """Accumulates records and flushes exact B-record blocks to storage."""

    def __init__(self, substrate: "Substrate", arity: int):
        self.substrate = substrate
        self.arity = arity
        self._store = substrate._new_store(arity)
        self._buf: list[np.ndarray] = []
        self._buffered = 0
        self._length = 0
        self._meter = substrate._write_meter()
        self._closed = False

    def append(self, record) -> None:
        self.append_block(np.asarray([record], dtype=RECORD_DTYPE).reshape(1, self.arity))

    def append_records(self, records) -> None:
        recs = list(records)
        if recs:
            self.append_block(np.asarray(recs, dtype=RECORD_DTYPE).reshape(len(recs), self.arity))

    def append_block(self, arr: np.ndarray) -> None:
        if arr.ndim != 2 or arr.shape[1] != self.arity:
            raise SortSpecError(
                f"record width mismatch: writer arity {self.arity}, got {arr.shape}")
        b = self.substrate.config.block_size
        self._buf.append(arr)
        self._buffered += len(arr)
        while self._buffered >= b:
            joined = self._buf[0] if len(self._buf) == 1 else np.concatenate(self._buf)
            self._flush_block(joined[:b])
            rest = joined[b:]
            self._buf = [rest] if len(rest) else []
            self._buffered = len(rest)

    def _flush_block(self, arr: np.ndarray) -> None:
        self._store.append_block(np.array(arr, dtype=RECORD_DTYPE))
        self._meter.add()
        self._length += len(arr)

    def close(self) -> ExternalRun:
        if self._closed:
            raise RuntimeError("writer already closed")
        if self._buffered:
            joined = self._buf[0] if len(self._buf) == 1 else np.concatenate(self._buf)
            self._flush_block(joined)
            self._buf = []
            self._buffered = 0
        self._meter.flush()
        self._closed = True
        return ExternalRun(self.substrate, self.arity, self._length, self._store)


class Substrate:
    """One simulated external-memory environment: storage + counters."""

    def __init__(self, config: EmConfig | None = None,
                 scratch_dir: str | None = None, debug: bool = True):
        self.config = config or EmConfig()
        self.stats = IoStats(0, 0, self.config.disk_count, self.config.block_size)
        self.ledger = MemoryLedger(self.config.memory_capacity, debug=debug)
        self.debug = debug
        self._scratch = scratch_dir
        self._own_scratch = False
        self._stores: list[_FileStore] = []
        self._n_runs = 0

    # -- storage ----------------------------------------------------------

    def _new_store(self, arity: int):
        self._n_runs += 1
        if self._scratch is None or arity == 0:
            return _MemoryStore(arity)
        os.makedirs(self._scratch, exist_ok=True)
        path = os.path.join(self._scratch, f"run{self._n_runs:06d}.bin")
        store = _FileStore(path, arity, self.config.block_size)
        self._stores.append(store)
        return store

    def close(self) -> None:
        for store in self._stores:
            store.close()
        self._stores = []
        if self._own_scratch and self._scratch and os.path.isdir(self._scratch):
            shutil.rmtree(self._scratch, ignore_errors=True)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    @classmethod
    def with_temp_scratch(cls, config: EmConfig | None = None, debug: bool = True):
        sub = cls(config, scratch_dir=tempfile.mkdtemp(prefix="emgraph-"), debug=debug)
        sub._own_scratch = True
        return sub

    # -- accounting -------------------------------------------------------

    def _read_meter(self) -> _Meter:
        return _Meter(self.stats, "blocks_read", self.config.disk_count)

    def _write_meter(self) -> _Meter:
        return _Meter(self.stats, "blocks_written", self.config.disk_count)

    def charge_read_units(self, units: int) -> None:
        self.stats.blocks_read += units

    def charge_write_units(self, units: int) -> None:
        self.stats.blocks_written += units

    def charge_scan_of(self, n_records: int) -> None:
        """Charge the exact read cost of scanning n records."""
        self.charge_read_units(self.scan_cost(n_records))

    def io_stats(self) -> IoStats:
        return self.stats.snapshot()

    def reset_stats(self) -> None:
        self.stats.reset()

    def scan_cost(self, n: int) -> int:
        """Parallel I/O units of one read pass over n records."""
        if n <= 0:
            return 0
        cfg = self.config
        phys = -(-n // cfg.block_size)
        return -(-phys // cfg.disk_count)

    def sort_cost(self, n: int) -> int:
        """Model units for fitting: ceil(n/DB) * (1 + ceil(log_{M/B}(n/B)))."""
        if n <= 0:
            return 0
        cfg = self.config
        nb = -(-n // cfg.block_size)
        base = max(2, cfg.memory_capacity // cfg.block_size)
        passes, cap = 0, 1
        while cap < nb:
            cap *= base
            passes += 1
        return -(-nb // cfg.disk_count) * (1 + passes)

    # -- run construction --------------------------------------------------

    def new_run_writer(self, arity: int) -> RunWriter:
        return RunWriter(self, arity)

    def run_from_records(self, arity: int, records) -> ExternalRun:
        w = self.new_run_writer(arity)
        w.append_records(records)
        return w.close()

    def run_from_array(self, arr: np.ndarray) -> ExternalRun:
        arr = np.asarray(arr, dtype=RECORD_DTYPE)
        if arr.ndim != 2:
            raise SortSpecError("expected a 2-d record array")
        w = self.new_run_writer(arr.shape[1])
        w.append_block(arr)
        return w.close()

    def empty_run(self, arity: int) -> ExternalRun:
        return self.new_run_writer(arity).close()

    # -- the two primitives -------------------------------------------------

    def scan(self, run: ExternalRun, start: int = 0, stop: int | None = None):
        """Stream the records of a run in order; see ExternalRun.blocks."""
        return run.stream(start, stop)

    def external_sort(self, run: ExternalRun,
                      key_cols: tuple[int, ...] | None = None) -> ExternalRun:
        """Stable multiway external merge sort.

        ``key_cols`` names record fields in lexicographic priority order;
        the default sorts by the whole record.  Run formation fills M - B
        records per chunk, merge passes fan in M // B runs at a time.
        """
        cols = tuple(range(run.arity)) if key_cols is None else tuple(key_cols)
        for c in cols:
            if not 0 <= c < run.arity:
                raise SortSpecError(
                    f"key column {c} out of range for arity {run.arity}")
        if run.length == 0:
            return self.empty_run(run.arity)
        if not cols:
            # nothing to compare; a charged copy preserves order
            w = self.new_run_writer(run.arity)
            for block in run.blocks():
                w.append_block(block)
            return w.close()

        cfg = self.config
        chunk_cap = cfg.memory_capacity - cfg.block_size

        chunks: list[ExternalRun] = []
        buf: list[np.ndarray] = []
        held = 0

        def flush_chunk():
            nonlocal buf, held
            if not held:
                return
            arr = buf[0] if len(buf) == 1 else np.concatenate(buf)
            order = np.lexsort(tuple(arr[:, c] for c in reversed(cols)))
            w = self.new_run_writer(run.arity)
            w.append_block(arr[order])
            chunks.append(w.close())
            self.ledger.release(held)
            buf, held = [], 0

        for block in run.blocks():
            take = 0
            while take < len(block):
                room = chunk_cap - held
                part = block[take:take + room]
                self.ledger.acquire(len(part))
                buf.append(part)
                held += len(part)
                take += len(part)
                if held >= chunk_cap:
                    flush_chunk()
        flush_chunk()

        fan = cfg.merge_fan_in
        while len(chunks) > 1:
            chunks = [self._merge_group(chunks[i:i + fan], cols)
                      for i in range(0, len(chunks), fan)]
        return chunks[0]

    def _merge_group(self, group: list[ExternalRun],
                     cols: tuple[int, ...]) -> ExternalRun:
        if len(group) == 1:
            return group[0]
        keyf = itemgetter(*cols)

        def tagged(idx, r):
            for rec in r.stream():
                yield keyf(rec), idx, rec

        w = self.new_run_writer(group[0].arity)
        pending: list = []
        flush_at = self.config.block_size
        for _, _, rec in heapq.merge(*(tagged(i, r) for i, r in enumerate(group))):
            pending.append(rec)
            if len(pending) == flush_at:
                w.append_records(pending)
                pending = []
        if pending:
            w.append_records(pending)
        return w.close()


def records_equal_multiset(a: ExternalRun, b: ExternalRun) -> bool:
    """Test helper: multiset equality of two runs' records."""
    from collections import Counter
    return Counter(a.stream()) == Counter(b.stream())
