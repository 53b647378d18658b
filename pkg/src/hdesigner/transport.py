"""Reliable delivery of pattern and stop messages over UDP.

UDP keeps the device side trivial (one datagram in, one ACK out) but gives
no delivery guarantee, so the host side carries the reliability logic:
every PATTERN/STOP send waits for a matching ACK and retransmits on
timeout, up to MAX_ATTEMPTS transmissions total. Sends to one device are
serialized FIFO through a per-device queue; STOP jumps that queue, and
realtime preview plays coalesce so only the newest queued pattern is ever
transmitted.

Devices announce themselves with periodic HELLO beacons. The registry maps
device ids to addresses and tracks liveness from the last time anything
was heard.
"""

from __future__ import annotations

import logging
import random
import socket
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import wire

log = logging.getLogger(__name__)

ACK_TIMEOUT_MS = 200
MAX_ATTEMPTS = 4  # 1 initial transmission + 3 retries
HELLO_INTERVAL_MS = 2000
LIVENESS_FACTOR = 3

DELIVERED = "DELIVERED"
FAILED = "FAILED"
SUPERSEDED = "SUPERSEDED"


@dataclass(frozen=True)
class DeliveryResult:
    status: str
    attempts: int
    rtt_ms: float | None = None

    @property
    def ok(self) -> bool:
        return self.status == DELIVERED


@dataclass
class DeviceRecord:
    device_id: str
    addr: tuple[str, int]
    channel_count: int
    last_seen: float  # time.monotonic()

    def to_dict(self, now: float) -> dict:
        return {
            "id": self.device_id,
            "address": f"{self.addr[0]}:{self.addr[1]}",
            "channels": self.channel_count,
            "alive": self.alive(now),
            "last_seen_ms": round((now - self.last_seen) * 1000.0, 1),
        }

    def alive(self, now: float) -> bool:
        return (now - self.last_seen) * 1000.0 < LIVENESS_FACTOR * HELLO_INTERVAL_MS


class FaultInjector:
    """Deterministic fault hooks for testing the retry path.

    Applies only to outbound reliable sends (PATTERN/STOP); HELLO replies
    and ACK receipt are never faulted. drop_next(n) swallows the next n
    transmissions; a seeded drop_rate exercises randomized loss.
    """

    def __init__(self, drop_rate: float = 0.0, seed: int | None = None):
        self.drop_rate = drop_rate
        self._rng = random.Random(seed)
        self._drop_budget = 0
        self._dup_budget = 0
        self._lock = threading.Lock()
        self.dropped = 0
        self.duplicated = 0

    def drop_next(self, n: int) -> None:
        with self._lock:
            self._drop_budget += n

    def dup_next(self, n: int) -> None:
        """Transmit the next n reliable sends twice (tests dedup downstream)."""
        with self._lock:
            self._dup_budget += n

    def should_drop(self) -> bool:
        with self._lock:
            if self._drop_budget > 0:
                self._drop_budget -= 1
                self.dropped += 1
                return True
            if self.drop_rate > 0.0 and self._rng.random() < self.drop_rate:
                self.dropped += 1
                return True
            return False

    def should_dup(self) -> bool:
        with self._lock:
            if self._dup_budget > 0:
                self._dup_budget -= 1
                self.duplicated += 1
                return True
            return False


class DeviceRegistry:
    """Thread-safe map of device id -> DeviceRecord."""

    def __init__(self):
        self._lock = threading.Lock()
        self._by_id: dict[str, DeviceRecord] = {}

    def observe_hello(self, msg: wire.HelloMsg, addr: tuple[str, int]) -> DeviceRecord:
        now = time.monotonic()
        with self._lock:
            rec = self._by_id.get(msg.device_id)
            if rec is None:
                rec = DeviceRecord(msg.device_id, addr, msg.channel_count, now)
                self._by_id[msg.device_id] = rec
                log.info("device %s registered at %s:%d", msg.device_id, *addr)
            else:
                if rec.addr != addr:
                    log.info("device %s moved %s -> %s", msg.device_id, rec.addr, addr)
                rec.addr = addr
                rec.channel_count = msg.channel_count
                rec.last_seen = now
            return rec

    def touch(self, addr: tuple[str, int]) -> None:
        now = time.monotonic()
        with self._lock:
            for rec in self._by_id.values():
                if rec.addr == addr:
                    rec.last_seen = now
                    return

    def get(self, device_id: str) -> DeviceRecord | None:
        with self._lock:
            return self._by_id.get(device_id)

    def resolve(self, addr: tuple[str, int]) -> str | None:
        with self._lock:
            for rec in self._by_id.values():
                if rec.addr == addr:
                    return rec.device_id
            return None

    def snapshot(self) -> list[dict]:
        now = time.monotonic()
        with self._lock:
            return [rec.to_dict(now) for rec in
                    sorted(self._by_id.values(), key=lambda r: r.device_id)]


class PendingDelivery:
    """Handle for a queued send; wait() blocks until it resolves."""

    def __init__(self, build: Callable[[int], wire.WireMessage], coalesce_key: str | None):
        self.build = build
        self.coalesce_key = coalesce_key
        self._done = threading.Event()
        self._result: DeliveryResult | None = None

    def resolve(self, result: DeliveryResult) -> None:
        self._result = result
        self._done.set()

    def wait(self, timeout: float | None = None) -> DeliveryResult:
        if not self._done.wait(timeout):
            raise TimeoutError("delivery did not resolve in time")
        assert self._result is not None
        return self._result


class _DeviceWorker:
    """Serializes reliable sends to one device."""

    def __init__(self, transport: "UdpTransport", device_id: str):
        self.transport = transport
        self.device_id = device_id
        self.queue: deque[PendingDelivery] = deque()
        self.ready = threading.Condition()
        self.thread = threading.Thread(
            target=self._run, name=f"udp-send-{device_id}", daemon=True)
        self.thread.start()

    def submit(self, pending: PendingDelivery, urgent: bool = False) -> None:
        with self.ready:
            if pending.coalesce_key is not None:
                # Latest wins: anything still queued under the same key is
                # obsolete the moment a newer play arrives.
                stale = [p for p in self.queue if p.coalesce_key == pending.coalesce_key]
                for p in stale:
                    self.queue.remove(p)
                    p.resolve(DeliveryResult(SUPERSEDED, attempts=0))
            if urgent:
                self.queue.appendleft(pending)
            else:
                self.queue.append(pending)
            self.ready.notify()

    def _run(self) -> None:
        while True:
            with self.ready:
                while not self.queue:
                    if self.transport.closed:
                        return
                    self.ready.wait(timeout=0.5)
                pending = self.queue.popleft()
            if self.transport.closed:
                pending.resolve(DeliveryResult(FAILED, attempts=0))
                continue
            try:
                result = self.transport._deliver(self.device_id, pending.build)
            except Exception:
                log.exception("delivery to %s failed unexpectedly", self.device_id)
                result = DeliveryResult(FAILED, attempts=0)
            pending.resolve(result)

    def wake(self) -> None:
        with self.ready:
            self.ready.notify()


class UdpTransport:
    """Host-side UDP endpoint: reliable sends out, HELLO/ACK handling in."""

    def __init__(self, bind_host: str = "0.0.0.0", bind_port: int = 0,
                 ack_timeout_ms: int = ACK_TIMEOUT_MS,
                 faults: FaultInjector | None = None):
        self.registry = DeviceRegistry()
        self.ack_timeout_ms = ack_timeout_ms
        self.faults = faults or FaultInjector()
        self.closed = False
        self.stats = {"rx": 0, "malformed": 0, "stray_acks": 0, "unexpected": 0}

        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._sock.bind((bind_host, bind_port))
        self._sock.settimeout(0.25)

        self._lock = threading.Lock()
        self._next_seq = 1
        self._waiters: dict[tuple[str, int], threading.Event] = {}
        self._workers: dict[str, _DeviceWorker] = {}

        self._recv_thread = threading.Thread(
            target=self._recv_loop, name="udp-recv", daemon=True)
        self._recv_thread.start()

    @property
    def port(self) -> int:
        return self._sock.getsockname()[1]

    # -- sending ---------------------------------------------------------

    def submit(self, device_id: str, build: Callable[[int], wire.WireMessage],
               urgent: bool = False, coalesce_key: str | None = None) -> PendingDelivery:
        """Queue a reliable send. `build` gets the seq at transmit time."""
        pending = PendingDelivery(build, coalesce_key)
        with self._lock:
            worker = self._workers.get(device_id)
            if worker is None:
                worker = _DeviceWorker(self, device_id)
                self._workers[device_id] = worker
        worker.submit(pending, urgent=urgent)
        return pending

    def send_reliable(self, device_id: str, build: Callable[[int], wire.WireMessage],
                      urgent: bool = False, coalesce_key: str | None = None,
                      timeout: float | None = 30.0) -> DeliveryResult:
        return self.submit(device_id, build, urgent, coalesce_key).wait(timeout)

    def send_pattern(self, device_id: str, msg_fields: dict,
                     coalesce: bool = False, timeout: float | None = 30.0) -> DeliveryResult:
        build = lambda seq: wire.PatternMsg(seq=seq, **msg_fields)
        key = f"pattern:{device_id}" if coalesce else None
        return self.send_reliable(device_id, build, coalesce_key=key, timeout=timeout)

    def send_stop(self, device_id: str, timeout: float | None = 30.0) -> DeliveryResult:
        return self.send_reliable(
            device_id, lambda seq: wire.StopMsg(seq=seq), urgent=True, timeout=timeout)

    def _deliver(self, device_id: str,
                 build: Callable[[int], wire.WireMessage]) -> DeliveryResult:
        rec = self.registry.get(device_id)
        if rec is None:
            return DeliveryResult(FAILED, attempts=0)
        with self._lock:
            seq = self._next_seq
            self._next_seq += 1
        data = wire.encode(build(seq))
        ack = threading.Event()
        key = (device_id, seq)
        with self._lock:
            self._waiters[key] = ack
        started = time.monotonic()
        try:
            timeout_s = self.ack_timeout_ms / 1000.0
            for attempt in range(1, MAX_ATTEMPTS + 1):
                if not self.faults.should_drop():
                    try:
                        self._sock.sendto(data, rec.addr)
                        if self.faults.should_dup():
                            self._sock.sendto(data, rec.addr)
                    except OSError as e:
                        log.warning("sendto %s failed: %s", rec.addr, e)
                if ack.wait(timeout_s):
                    rtt = (time.monotonic() - started) * 1000.0
                    return DeliveryResult(DELIVERED, attempts=attempt, rtt_ms=rtt)
            return DeliveryResult(FAILED, attempts=MAX_ATTEMPTS)
        finally:
            with self._lock:
                self._waiters.pop(key, None)

    # -- receiving -------------------------------------------------------

    def _recv_loop(self) -> None:
        while not self.closed:
            try:
                data, addr = self._sock.recvfrom(wire.MAX_DATAGRAM_BYTES + 1)
            except socket.timeout:
                continue
            except OSError:
                return
            self.stats["rx"] += 1
            try:
                msg = wire.decode(data)
            except wire.WireError as e:
                self.stats["malformed"] += 1
                log.debug("bad datagram from %s: %s", addr, e)
                continue
            if isinstance(msg, wire.HelloMsg):
                self.registry.observe_hello(msg, addr)
            elif isinstance(msg, wire.AckMsg):
                self._on_ack(msg, addr)
            else:
                # Hosts never receive PATTERN/STOP.
                self.stats["unexpected"] += 1

    def _on_ack(self, msg: wire.AckMsg, addr: tuple[str, int]) -> None:
        device_id = self.registry.resolve(addr)
        if device_id is None:
            self.stats["stray_acks"] += 1
            return
        self.registry.touch(addr)
        with self._lock:
            ack = self._waiters.get((device_id, msg.seq))
        if ack is not None:
            ack.set()
        else:
            # Late ACK for an already-resolved or retransmitted send.
            self.stats["stray_acks"] += 1

    def close(self) -> None:
        self.closed = True
        with self._lock:
            workers = list(self._workers.values())
        for w in workers:
            w.wake()
        try:
            self._sock.close()
        except OSError:
            pass
