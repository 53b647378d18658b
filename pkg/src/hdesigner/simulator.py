"""Software stand-in for the wristband firmware.

Speaks the same UDP protocol as the hardware: HELLO beacons out, PATTERN
and STOP in, ACK for everything addressed to it. Playback is a tick loop
driven by a monotonic deadline (deadline += delta each tick) so long runs
do not drift. Every externally visible step is appended to a JSONL trace,
which is what the loopback tests read instead of a vibration motor.

Firmware-faithful behaviors worth knowing about:
 - ACK goes out before the message is applied.
 - A retransmitted (duplicate) message is ACKed again but applied once;
   duplicates are detected per sender by sequence number.
 - New PATTERN/STOP messages take effect at the next tick boundary, never
   mid-tick, and only the newest unapplied message survives.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import socket
import sys
import threading
import time
from typing import Optional, TextIO

from . import wire

log = logging.getLogger(__name__)

HELLO_INTERVAL_MS = 2000
TRACE_VERSION = 1


class TraceWriter:
    """Line-flushed JSONL event log with a shared monotonic clock."""

    def __init__(self, stream: TextIO | None, device_id: str, channel_count: int):
        self._fh = stream
        self._lock = threading.Lock()
        self._t0 = time.monotonic()
        self.write("HEADER", device_id=device_id, channels=channel_count,
                   version=TRACE_VERSION)

    def write(self, event: str, **fields) -> None:
        if self._fh is None:
            return
        with self._lock:
            t_ms = (time.monotonic() - self._t0) * 1000.0
            rec = {"t_ms": round(t_ms, 3), "event": event}
            rec.update(fields)
            self._fh.write(json.dumps(rec) + "\n")
            self._fh.flush()

    def close(self) -> None:
        # Stop writing; the stream belongs to whoever opened it.
        with self._lock:
            self._fh = None


class PatternPlayer:
    """Playback state machine. Caller provides the clock and the locking."""

    def __init__(self, channel_count: int = wire.NUM_CHANNELS):
        self.channel_count = channel_count
        self.active: wire.PatternMsg | None = None
        self._cycle_len = 0
        self._delay_ticks = 0
        self._cycle_index = 0
        self._tick_in_cycle = 0

    @property
    def playing(self) -> bool:
        return self.active is not None

    @property
    def delta_ms(self) -> int:
        assert self.active is not None
        return self.active.delta_ms

    def apply(self, msg: wire.PatternMsg) -> None:
        cycle_len = max((len(v) for v in msg.channels.values()), default=0)
        if cycle_len == 0:
            # Nothing to play; an all-empty pattern lands us idle.
            self.active = None
            return
        self.active = msg
        self._cycle_len = cycle_len
        self._delay_ticks = -(-msg.delay_ms // msg.delta_ms)
        self._cycle_index = 0
        self._tick_in_cycle = 0

    def stop(self) -> None:
        self.active = None

    def tick(self) -> list[int] | None:
        """Advance one tick and return its output levels, or None if idle.

        Ticks inside the inter-cycle delay report all zeros. The total
        tick count for a pattern is repeat*C + (repeat-1)*delay_ticks
        where C is the longest channel cycle.
        """
        if self.active is None:
            return None
        msg = self.active
        levels = [0] * self.channel_count
        if self._tick_in_cycle < self._cycle_len:
            for ch, samples in msg.channels.items():
                if ch < self.channel_count and self._tick_in_cycle < len(samples):
                    levels[ch] = samples[self._tick_in_cycle]
        self._tick_in_cycle += 1
        last_cycle = self._cycle_index >= msg.repeat - 1
        limit = self._cycle_len + (0 if last_cycle else self._delay_ticks)
        if self._tick_in_cycle >= limit:
            self._tick_in_cycle = 0
            self._cycle_index += 1
            if self._cycle_index >= msg.repeat:
                self.active = None
        return levels


class SimClient:
    """One simulated band: UDP endpoint, beacon, tick loop, trace."""

    def __init__(self, server_addr: tuple[str, int], device_id: str,
                 channel_count: int = 3, listen_port: int = 0,
                 trace_stream: TextIO | None = None,
                 hello_interval_ms: int = HELLO_INTERVAL_MS,
                 display: bool = False):
        self.server_addr = server_addr
        self.device_id = device_id
        self.channel_count = channel_count
        self.hello_interval_ms = hello_interval_ms
        self.display = display

        self.trace = TraceWriter(trace_stream, device_id, channel_count)
        self.player = PatternPlayer(channel_count)
        self.running = True

        self._cond = threading.Condition()
        self._pending: wire.PatternMsg | wire.StopMsg | None = None
        self._last_accepted: dict[tuple[str, int], int] = {}
        self._hello_seq = itertools.count(1)

        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._sock.bind(("0.0.0.0", listen_port))
        self._sock.settimeout(0.25)

        self._threads = [
            threading.Thread(target=self._recv_loop, name="sim-recv", daemon=True),
            threading.Thread(target=self._tick_loop, name="sim-tick", daemon=True),
            threading.Thread(target=self._hello_loop, name="sim-hello", daemon=True),
        ]

    @property
    def port(self) -> int:
        return self._sock.getsockname()[1]

    def start(self) -> None:
        for t in self._threads:
            t.start()

    def close(self) -> None:
        with self._cond:
            self.running = False
            self._cond.notify_all()
        try:
            self._sock.close()
        except OSError:
            pass
        for t in self._threads:
            t.join(timeout=2.0)
        self.trace.close()

    # -- network side ------------------------------------------------------

    def _hello_loop(self) -> None:
        hello_s = self.hello_interval_ms / 1000.0
        while self.running:
            msg = wire.HelloMsg(seq=next(self._hello_seq),
                                device_id=self.device_id,
                                channel_count=self.channel_count)
            try:
                self._sock.sendto(wire.encode(msg), self.server_addr)
            except OSError:
                pass
            deadline = time.monotonic() + hello_s
            while self.running and time.monotonic() < deadline:
                time.sleep(min(0.1, hello_s))

    def _recv_loop(self) -> None:
        while self.running:
            try:
                data, addr = self._sock.recvfrom(wire.MAX_DATAGRAM_BYTES + 1)
            except socket.timeout:
                continue
            except OSError:
                return
            try:
                msg = wire.decode(data)
            except wire.WireError as e:
                self.trace.write("RX_ERROR", error=str(e))
                continue
            if not isinstance(msg, (wire.PatternMsg, wire.StopMsg)):
                continue  # bands ignore stray ACK/HELLO traffic
            dup = msg.seq <= self._last_accepted.get(addr, 0)
            self.trace.write("MSG_RX", kind=msg.kind, seq=msg.seq, dup=dup)
            # ACK first, apply after; retransmits are re-ACKed so the host
            # converges even when the original ACK was lost.
            try:
                self._sock.sendto(wire.encode(wire.AckMsg(seq=msg.seq)), addr)
                self.trace.write("ACK_TX", seq=msg.seq)
            except OSError:
                pass
            if dup:
                continue
            self._last_accepted[addr] = msg.seq
            with self._cond:
                self._pending = msg  # latest wins
                self._cond.notify_all()

    # -- playback side -----------------------------------------------------

    def _apply_pending_locked(self) -> None:
        msg = self._pending
        self._pending = None
        if msg is None:
            return
        if isinstance(msg, wire.StopMsg):
            if self.player.playing:
                self.player.stop()
                self.trace.write("STOPPED", seq=msg.seq)
        else:
            if self.player.playing:
                self.trace.write("REPLACED", seq=msg.seq)
            self.player.apply(msg)
            self.trace.write("APPLIED", seq=msg.seq)

    def _emit_tick_locked(self) -> bool:
        levels = self.player.tick()
        if levels is None:
            return False
        self.trace.write("TICK", levels=levels)
        if self.display:
            bars = " ".join(f"{v:4d}" for v in levels)
            print(f"[{self.device_id}] {bars}", flush=True)
        if not self.player.playing:
            self.trace.write("FINISHED")
        return True

    def _tick_loop(self) -> None:
        while True:
            with self._cond:
                while self.running and self._pending is None and not self.player.playing:
                    self._cond.wait(timeout=0.25)
                if not self.running:
                    return
                self._apply_pending_locked()
                if not self.player.playing:
                    continue
                delta_s = self.player.delta_ms / 1000.0
                self._emit_tick_locked()
            deadline = time.monotonic() + delta_s
            while True:
                now = time.monotonic()
                if deadline > now:
                    time.sleep(deadline - now)
                with self._cond:
                    if not self.running:
                        return
                    self._apply_pending_locked()
                    if not self.player.playing:
                        break
                    delta_s = self.player.delta_ms / 1000.0
                    self._emit_tick_locked()
                deadline += delta_s


def _parse_addr(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise argparse.ArgumentTypeError(f"expected host:port, got {text!r}")
    return host or "127.0.0.1", int(port)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="hband-sim",
        description="Simulated haptic band: registers with a server and "
                    "logs playback to a JSONL trace.")
    parser.add_argument("--server", type=_parse_addr, required=True,
                        metavar="HOST:PORT", help="server UDP endpoint")
    parser.add_argument("--id", default="band-sim", help="device id to announce")
    parser.add_argument("--channels", type=int, default=3,
                        help="motor channel count, 1..%d (default: %%(default)s)"
                             % wire.NUM_CHANNELS)
    parser.add_argument("--trace", default=None,
                        help="JSONL trace path ('-' for stdout)")
    parser.add_argument("--listen-port", type=int, default=0)
    parser.add_argument("--hello-interval-ms", type=int, default=HELLO_INTERVAL_MS)
    parser.add_argument("--display", action="store_true",
                        help="print tick levels to stdout")
    parser.add_argument("--log-level", default="WARNING")
    args = parser.parse_args(argv)

    logging.basicConfig(level=args.log_level.upper())
    if not 1 <= args.channels <= wire.NUM_CHANNELS:
        parser.error(f"--channels must be in 1..{wire.NUM_CHANNELS}")

    stream: TextIO | None = None
    if args.trace == "-":
        stream = sys.stdout
    elif args.trace:
        stream = open(args.trace, "w", encoding="utf-8")

    client = SimClient(args.server, args.id, channel_count=args.channels,
                       listen_port=args.listen_port, trace_stream=stream,
                       hello_interval_ms=args.hello_interval_ms,
                       display=args.display)
    client.start()
    print(f"hband-sim {args.id}: udp port {client.port}, "
          f"server {args.server[0]}:{args.server[1]}", flush=True)
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        pass
    finally:
        client.close()
        if stream is not None and stream is not sys.stdout:
            stream.close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
