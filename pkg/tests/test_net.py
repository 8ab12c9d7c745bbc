"""Transport layer: codec, envelope framing, simulator, TCP equivalence."""
import socket
import threading

import pytest
from hypothesis import given, settings, strategies as st

from obfw.net import (
    DROP,
    PASS,
    Deadlock,
    Delay,
    Endpoint,
    Envelope,
    FrameCorrupt,
    PartyTimeout,
    Replace,
    TcpNode,
    OutOfRange,
    TruncatedPayload,
    build_mesh,
    decode_elements,
    encode_elements,
    group_shift,
    group_z2,
    group_zn2,
    group_zn_compare,
    group_zp,
    recv,
    run_session,
    run_tcp_session,
    send,
)
from obfw.net.envelope import frame, read_frame, PROTO_SC_SEMI_HONEST


class TestCodec:
    def test_z2_vector_padding(self):
        # l = 8: nine Z2 bits -> 9 payload bits in 2 bytes, 7 zero pads.
        payload = encode_elements([(group_z2(), [1] * 9)])
        assert len(payload) == 2
        assert payload == b"\xff\x01"
        [bits] = decode_elements(payload, [(group_z2(), 9)])
        assert bits == [1] * 9

    def test_zn2_width(self):
        # l = 8, N2 = 17: nine elements at 2+3 bits each = 45 bits.
        g = group_zn2(17, 8)
        assert g.accounting_bits == 5
        payload = encode_elements([(g, list(range(9)))])
        assert len(payload) == (45 + 7) // 8

    def test_zn_accounting_vs_raw(self):
        g = group_zn_compare(257, 8)
        assert g.accounting_bits == 8 and g.raw_bits == 9

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            encode_elements([(group_z2(), [2])])
        with pytest.raises(TruncatedPayload):
            decode_elements(b"\x03", [(group_z2(), 1)])  # nonzero pad bit

    def test_truncated(self):
        with pytest.raises(TruncatedPayload):
            decode_elements(b"\x00", [(group_zp(251), 2)])

    @settings(max_examples=60)
    @given(st.data())
    def test_round_trip_mixed_groups(self, data):
        groups = [group_z2(), group_zn2(17, 8), group_zn_compare(257, 8),
                  group_shift(8), group_zp(251)]
        segs = []
        for g in groups:
            vals = data.draw(st.lists(st.integers(0, g.modulus - 1), max_size=6))
            segs.append((g, vals))
        payload = encode_elements(segs)
        decoded = decode_elements(payload, [(g, len(v)) for g, v in segs])
        assert decoded == [v for _, v in segs]


class TestEnvelope:
    def test_round_trip(self):
        env = Envelope(4, 7, 0x1122334455667788, 2, b"\x01\x02\x03")
        assert Envelope.decode(env.encode()) == env

    def test_exact_byte_layout(self):
        raw = Envelope(4, 7, 0x1122334455667788, 2, b"\x01\x02\x03").encode()
        assert raw[0] == 4 and raw[1] == 7
        assert raw[2:10] == (0x1122334455667788).to_bytes(8, "little")
        assert raw[10] == 2
        assert raw[11:15] == (3).to_bytes(4, "little")
        assert raw[15:] == b"\x01\x02\x03"

    def test_frame_round_trip(self):
        env = Envelope(9, 1, 5, 0, b"payload")
        buf = frame(env)
        pos = [0]

        def read_exact(n):
            out = buf[pos[0]:pos[0] + n]
            pos[0] += n
            return out

        assert read_frame(read_exact) == env

    def test_bad_magic(self):
        buf = b"XXXX" + bytes(8)
        pos = [0]

        def read_exact(n):
            out = buf[pos[0]:pos[0] + n]
            pos[0] += n
            return out

        with pytest.raises(FrameCorrupt):
            read_frame(read_exact)

    def test_bad_length(self):
        env = Envelope(9, 1, 5, 0, b"payload")
        raw = env.encode()
        with pytest.raises(FrameCorrupt):
            Envelope.decode(raw[:-1])


def _ping_pong(me, peer, payload):
    zp = group_zp(251)
    yield from send(peer, 1, [(zp, [payload])])
    (got,) = yield from recv(peer, 1, [(zp, 1)])
    return got[0]


class TestSimulator:
    def test_round_trip_two_parties(self):
        net = run_session({1: _ping_pong(1, 2, 10), 2: _ping_pong(2, 1, 20)})
        assert net.results == {1: 20, 2: 10}
        assert net.transcript.rounds() == 1

    def test_deterministic_replay(self):
        from obfw.compare import run_semi_honest
        a = run_semi_honest(99, 55, 8, seed=77)
        b = run_semi_honest(99, 55, 8, seed=77)
        assert a.f == b.f
        assert a.transcript.to_json() == b.transcript.to_json()
        c = run_semi_honest(99, 55, 8, seed=78)
        assert c.transcript.to_json() != a.transcript.to_json()

    def test_deadlock_detected(self):
        def stuck(me, peer):
            got = yield from recv(peer, 1, [(group_z2(), 1)])
            return got

        with pytest.raises(Deadlock):
            run_session({1: stuck(1, 2), 2: stuck(2, 1)})

    def test_drop_yields_timeout(self):
        def adversary(env):
            return DROP if env.sender == 1 else PASS

        net = run_session({1: _ping_pong(1, 2, 10), 2: _ping_pong(2, 1, 20)},
                          adversary=adversary, check_deadlock=False)
        assert 1 in net.results  # party 1 still got its reply
        assert isinstance(net.errors[2], PartyTimeout)

    def test_replace_payload(self):
        def adversary(env):
            if env.sender == 1:
                return Replace(encode_elements([(group_zp(251), [42])]))
            return PASS

        net = run_session({1: _ping_pong(1, 2, 10), 2: _ping_pong(2, 1, 20)},
                          adversary=adversary)
        assert net.results[2] == 42

    def test_delay_preserves_delivery(self):
        def adversary(env):
            return Delay(2) if env.sender == 1 else PASS

        net = run_session({1: _ping_pong(1, 2, 10), 2: _ping_pong(2, 1, 20)},
                          adversary=adversary, check_deadlock=False)
        assert net.results == {1: 20, 2: 10}

    def test_transcript_counts_send_side_once(self):
        net = run_session({1: _ping_pong(1, 2, 10), 2: _ping_pong(2, 1, 20)})
        assert net.transcript.accounting_total() == 16  # two 8-bit elements


class TestRoundPacking:
    def test_request_response_pairs(self):
        from obfw.net.transcript import Transcript
        tr = Transcript()
        tr.record_send(1, 2, 1, 8, 8, 1)
        tr.record_recv(1, 2, 2)
        tr.record_send(1, 2, 3, 8, 8, 1)
        tr.record_recv(1, 2, 4)
        assert tr.rounds() == 2

    def test_send_blocks_merge(self):
        from obfw.net.transcript import Transcript
        tr = Transcript()
        tr.record_send(1, 2, 1, 8, 8, 1)
        tr.record_send(1, 3, 1, 8, 8, 1)
        tr.record_recv(1, 2, 2)
        tr.record_recv(1, 3, 2)
        assert tr.rounds() == 1


class TestTcp:
    def test_loopback_matches_sim(self):
        from obfw.compare import ComparisonParams, build_programs, run_semi_honest
        params = ComparisonParams.for_bitwidth(8)
        sim = run_semi_honest(123, 45, 8, seed=5)
        nodes = build_mesh([1, 2, 3])
        try:
            progs = build_programs(123, 45, params, 5)
            results, errors, tr = run_tcp_session(
                nodes, progs, session_id=1, protocol_id=PROTO_SC_SEMI_HONEST)
            assert not errors
            assert (results[1] + results[2]) % params.N == sim.f
            assert tr.accounting_total() == sim.transcript.accounting_total()
            assert tr.rounds() == sim.transcript.rounds()
        finally:
            for n in nodes.values():
                n.close()

    def test_malformed_magic_closes_connection(self):
        node = TcpNode(1, Endpoint("127.0.0.1", 0))
        try:
            with socket.create_connection(("127.0.0.1", node.port)) as c:
                c.sendall((2).to_bytes(1, "little"))
                assert c.recv(1) == b"\x01"
                c.sendall(b"JUNKJUNKJUNKJUNK")
                # reader drops the connection on bad magic
                c.settimeout(2)
                try:
                    assert c.recv(1) == b""
                except ConnectionResetError:
                    pass  # abrupt close is an equally valid rejection
        finally:
            node.close()

    def test_two_sessions_interleave_on_one_connection(self):
        nodes = build_mesh([1, 2])
        try:
            barrier = threading.Barrier(2)

            def chat(me, peer, session, vals):
                def prog():
                    zp = group_zp(251)
                    for v in vals:
                        yield from send(peer, 1, [(zp, [v])])
                        (got,) = yield from recv(peer, 1, [(zp, 1)])
                        assert got[0] == v + 1 if me == 1 else True
                    return "done"
                return prog()

            def echo(me, peer, session, count):
                def prog():
                    zp = group_zp(251)
                    for _ in range(count):
                        (got,) = yield from recv(peer, 1, [(zp, 1)])
                        yield from send(peer, 1, [(zp, [(got[0] + 1) % 251])])
                    return "done"
                return prog()

            outs = {}

            def run(session):
                barrier.wait()
                r1, e1, _ = run_tcp_session(
                    nodes,
                    {1: chat(1, 2, session, [session * 10 + i for i in range(4)]),
                     2: echo(2, 1, session, 4)},
                    session_id=session, protocol_id=4)
                outs[session] = (r1, e1)

            t1 = threading.Thread(target=run, args=(1,))
            t2 = threading.Thread(target=run, args=(2,))
            t1.start(); t2.start(); t1.join(); t2.join()
            for session in (1, 2):
                results, errors = outs[session]
                assert not errors
                assert results == {1: "done", 2: "done"}
        finally:
            for n in nodes.values():
                n.close()
