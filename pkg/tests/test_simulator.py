"""Device simulator: player state machine, protocol behavior, tick timing."""

import io
import json
import socket
import statistics
import subprocess
import sys
import time

import pytest

from hdesigner import wire
from hdesigner.simulator import PatternPlayer, SimClient


def msg(seq, channels, delta=10, repeat=1, delay=0):
    return wire.PatternMsg(seq=seq, delta_ms=delta, repeat=repeat,
                           delay_ms=delay, channels=channels)


# -- PatternPlayer (pure state machine) -----------------------------------------

def test_player_single_cycle():
    p = PatternPlayer(channel_count=3)
    p.apply(msg(1, {0: (10, 20, 30)}))
    ticks = []
    while (levels := p.tick()) is not None:
        ticks.append(levels)
    assert ticks == [[10, 0, 0], [20, 0, 0], [30, 0, 0]]


def test_player_repeat_and_delay_tick_budget():
    p = PatternPlayer(channel_count=1)
    p.apply(msg(1, {0: (7, 7)}, delta=10, repeat=3, delay=25))
    ticks = []
    while (levels := p.tick()) is not None:
        ticks.append(levels[0])
    # 3 cycles of 2 + 2 gaps of ceil(25/10)=3, no trailing gap
    assert ticks == [7, 7, 0, 0, 0, 7, 7, 0, 0, 0, 7, 7]


def test_player_short_channels_read_zero_to_cycle_end():
    p = PatternPlayer(channel_count=2)
    p.apply(msg(1, {0: (1, 2, 3), 1: (9,)}))
    ticks = [p.tick() for _ in range(3)]
    assert ticks == [[1, 9], [2, 0], [3, 0]]
    assert p.tick() is None


def test_player_empty_pattern_is_idle():
    p = PatternPlayer(channel_count=2)
    p.apply(msg(1, {0: ()}))
    assert not p.playing
    assert p.tick() is None


def test_player_apply_restarts_mid_cycle():
    p = PatternPlayer(channel_count=1)
    p.apply(msg(1, {0: (1, 2, 3, 4)}))
    p.tick(), p.tick()
    p.apply(msg(2, {0: (9, 8)}))
    assert p.tick() == [9]
    assert p.tick() == [8]
    assert p.tick() is None


def test_player_stop_clears_state():
    p = PatternPlayer(channel_count=1)
    p.apply(msg(1, {0: (1, 2, 3)}, repeat=100))
    p.tick()
    p.stop()
    assert not p.playing
    assert p.tick() is None


def test_player_ignores_channels_beyond_its_hardware():
    p = PatternPlayer(channel_count=2)
    p.apply(msg(1, {0: (5,), 7: (9,)}))
    assert p.tick() == [5, 0]


# -- SimClient over real sockets --------------------------------------------------

class HostRig:
    """Bare UDP socket playing the server role for one SimClient."""

    def __init__(self):
        self.sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self.sock.bind(("127.0.0.1", 0))
        self.sock.settimeout(2.0)
        self.buf = io.StringIO()
        self.sim = SimClient(("127.0.0.1", self.sock.getsockname()[1]),
                             "sim-t", channel_count=3, trace_stream=self.buf,
                             hello_interval_ms=100)
        self.sim.start()

    def send(self, message: wire.WireMessage) -> None:
        self.sock.sendto(wire.encode(message), ("127.0.0.1", self.sim.port))

    def wait_ack(self, seq: int, timeout: float = 2.0) -> None:
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            data, _ = self.sock.recvfrom(65536)
            got = wire.decode(data)
            if isinstance(got, wire.AckMsg) and got.seq == seq:
                return
        raise AssertionError(f"no ACK for seq {seq}")

    def events(self) -> list[dict]:
        return [json.loads(line) for line in self.buf.getvalue().splitlines()]

    def wait_event(self, name: str, timeout: float = 5.0, **match) -> dict:
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            for e in self.events():
                if e["event"] == name and all(e.get(k) == v for k, v in match.items()):
                    return e
            time.sleep(0.01)
        raise AssertionError(f"no {name} event matching {match}")

    def close(self):
        self.sim.close()
        self.sock.close()


@pytest.fixture
def rig():
    r = HostRig()
    yield r
    r.close()


def test_trace_header_is_first_line(rig):
    header = rig.events()[0]
    assert header["event"] == "HEADER"
    assert header["device_id"] == "sim-t"
    assert header["channels"] == 3
    assert header["t_ms"] < 5.0  # clock starts with the trace


def test_hello_beacons_arrive_on_interval(rig):
    hellos = 0
    deadline = time.monotonic() + 0.7
    while time.monotonic() < deadline:
        try:
            data, _ = rig.sock.recvfrom(65536)
        except socket.timeout:
            break
        got = wire.decode(data)
        if isinstance(got, wire.HelloMsg):
            hellos += 1
            assert got.device_id == "sim-t"
            assert got.channel_count == 3
    assert hellos >= 3  # 100ms interval, 700ms window


def test_pattern_plays_and_finishes(rig):
    rig.send(msg(10, {0: (100, 200), 2: (50,)}, repeat=2, delay=10))
    rig.wait_ack(10)
    rig.wait_event("FINISHED")
    ticks = [e["levels"] for e in rig.events() if e["event"] == "TICK"]
    assert ticks == [[100, 0, 50], [200, 0, 0], [0, 0, 0],
                     [100, 0, 50], [200, 0, 0]]


def test_ack_precedes_apply(rig):
    rig.send(msg(11, {0: (1, 2, 3)}))
    rig.wait_ack(11)
    rig.wait_event("APPLIED", seq=11)
    events = rig.events()
    ack_t = next(e["t_ms"] for e in events
                 if e["event"] == "ACK_TX" and e["seq"] == 11)
    applied_t = next(e["t_ms"] for e in events
                     if e["event"] == "APPLIED" and e["seq"] == 11)
    assert ack_t <= applied_t


def test_duplicate_pattern_is_acked_again_but_applied_once(rig):
    m = msg(12, {0: (10,) * 20}, delta=20)
    rig.send(m)
    rig.wait_ack(12)
    rig.send(m)  # retransmission of the same seq
    rig.wait_ack(12)
    rig.wait_event("MSG_RX", seq=12, dup=True)
    events = rig.events()
    assert len([e for e in events if e["event"] == "ACK_TX" and e["seq"] == 12]) == 2
    assert len([e for e in events if e["event"] == "APPLIED" and e["seq"] == 12]) == 1
    rx = [e for e in events if e["event"] == "MSG_RX" and e["seq"] == 12]
    assert [e["dup"] for e in rx] == [False, True]


def test_stale_seq_is_ignored(rig):
    rig.send(msg(20, {0: (5,) * 30}, delta=20))
    rig.wait_ack(20)
    rig.wait_event("APPLIED", seq=20)
    rig.send(msg(19, {0: (900,) * 30}, delta=20))  # older than last accepted
    rig.wait_ack(19)
    time.sleep(0.1)
    assert not [e for e in rig.events()
                if e["event"] == "APPLIED" and e["seq"] == 19]


def test_new_pattern_replaces_at_tick_boundary(rig):
    rig.send(msg(30, {0: (100,) * 50}, delta=20))
    rig.wait_ack(30)
    rig.wait_event("APPLIED", seq=30)
    rig.send(msg(31, {0: (700, 700)}, delta=20))
    rig.wait_event("REPLACED", seq=31)
    rig.wait_event("FINISHED")
    events = rig.events()
    replaced_t = next(e["t_ms"] for e in events if e["event"] == "REPLACED")
    # no tick of the old pattern after the swap
    late_old = [e for e in events if e["event"] == "TICK"
                and e["t_ms"] > replaced_t and e["levels"][0] == 100]
    assert late_old == []
    assert [e["levels"][0] for e in events if e["event"] == "TICK"][-2:] == [700, 700]


def test_stop_zeroes_output_within_one_tick(rig):
    delta = 50
    rig.send(msg(40, {0: (300,) * 100}, delta=delta))
    rig.wait_ack(40)
    rig.wait_event("TICK")
    rig.send(wire.StopMsg(seq=41))
    rig.wait_ack(41)
    stopped = rig.wait_event("STOPPED", seq=41)
    events = rig.events()
    ack_t = next(e["t_ms"] for e in events
                 if e["event"] == "ACK_TX" and e["seq"] == 41)
    # the device goes quiet at the next tick boundary after the STOP
    assert stopped["t_ms"] - ack_t <= delta + 20
    assert not [e for e in events
                if e["event"] == "TICK" and e["t_ms"] > stopped["t_ms"]]


def test_stop_while_idle_is_harmless(rig):
    rig.send(wire.StopMsg(seq=50))
    rig.wait_ack(50)
    time.sleep(0.05)
    assert not [e for e in rig.events() if e["event"] == "STOPPED"]


def test_malformed_datagram_logged_not_fatal(rig):
    rig.sock.sendto(b"MSG,1,??", ("127.0.0.1", rig.sim.port))
    rig.wait_event("RX_ERROR")
    rig.send(msg(60, {0: (5,)}))
    rig.wait_ack(60)


def test_tick_cadence_holds_over_seconds(rig):
    """Median tick interval must sit on delta with no cumulative drift."""
    delta = 20
    n = 100  # 2 seconds of playback
    rig.send(msg(70, {0: (123,) * n}, delta=delta))
    rig.wait_ack(70)
    rig.wait_event("FINISHED", timeout=10.0)
    ticks = [e["t_ms"] for e in rig.events() if e["event"] == "TICK"]
    assert len(ticks) == n
    intervals = [b - a for a, b in zip(ticks, ticks[1:])]
    assert abs(statistics.median(intervals) - delta) <= delta * 0.25
    span = ticks[-1] - ticks[0]
    assert abs(span - (n - 1) * delta) <= (n - 1) * delta * 0.10


# -- CLI ---------------------------------------------------------------------------

def test_cli_help_exits_zero():
    out = subprocess.run([sys.executable, "-m", "hdesigner.simulator", "--help"],
                         capture_output=True, text=True, timeout=30)
    assert out.returncode == 0
    assert "--server" in out.stdout


def test_cli_announces_itself():
    listener = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    listener.bind(("127.0.0.1", 0))
    listener.settimeout(5.0)
    port = listener.getsockname()[1]
    proc = subprocess.Popen(
        [sys.executable, "-m", "hdesigner.simulator",
         "--server", f"127.0.0.1:{port}", "--id", "cli-band",
         "--hello-interval-ms", "100"],
        stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
    try:
        data, _ = listener.recvfrom(65536)
        hello = wire.decode(data)
        assert isinstance(hello, wire.HelloMsg)
        assert hello.device_id == "cli-band"
    finally:
        proc.terminate()
        proc.wait(timeout=10)
        listener.close()
