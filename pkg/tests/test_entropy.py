import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wcec.entropy import (
    CONTEXT_RESET_N,
    ESCAPE_QUOTIENT,
    ESCAPE_RAW_BITS,
    BitSink,
    BitSource,
    RiceContext,
    decode_signed,
    encode_signed,
    rice_decode,
    rice_encode,
    zigzag_map,
    zigzag_unmap,
)


def sink_bits(sink: BitSink) -> str:
    """Bit string written so far, excluding alignment padding."""
    n = sink.bit_length
    return "".join(f"{b:08b}" for b in sink.getvalue())[:n]


def ref_rice_bits(u: int, k: int) -> str:
    # independent construction of the expected codeword
    q = u >> k
    if q >= ESCAPE_QUOTIENT:
        return "1" * ESCAPE_QUOTIENT + format(u, f"0{ESCAPE_RAW_BITS}b")
    rem = format(u & ((1 << k) - 1), f"0{k}b") if k else ""
    return "1" * q + "0" + rem


class TestBitIO:
    def test_msb_first_packing(self):
        sink = BitSink()
        sink.write_bits(0b101, 3)
        sink.write_bits(0, 5)
        assert sink.getvalue() == bytes([0b10100000])

    def test_align_pads_with_zeros(self):
        sink = BitSink()
        sink.write_bits(1, 1)
        sink.align_to_byte()
        assert sink.bit_length == 8
        assert sink.getvalue() == b"\x80"

    def test_read_past_end_raises(self):
        src = BitSource(b"\xff")
        src.read_bits(8)
        with pytest.raises(EOFError):
            src.read_bits(1)

    def test_unary_truncation_raises(self):
        with pytest.raises(EOFError):
            BitSource(b"\xff").read_unary(cap=24)

    def test_unary_cap_leaves_terminator_unread(self):
        src = BitSource(bytes([0b11101000]))
        assert src.read_unary(cap=3) == 3
        assert src.read_bits(1) == 0  # the fourth bit, not consumed by the cap

    @given(st.lists(st.tuples(st.integers(0, 2**24 - 1), st.integers(1, 24)), max_size=60))
    def test_chunked_round_trip(self, chunks):
        sink = BitSink()
        for value, nbits in chunks:
            sink.write_bits(value, nbits)
        src = BitSource(sink.getvalue())
        for value, nbits in chunks:
            assert src.read_bits(nbits) == value & ((1 << nbits) - 1)


class TestZigzag:
    def test_zero(self):
        assert zigzag_map(0) == 0
        assert zigzag_unmap(0) == 0

    def test_smallest_negative(self):
        assert zigzag_map(-1) == 1

    def test_minus_three(self):
        assert zigzag_map(-3) == 5
        assert zigzag_unmap(5) == -3

    def test_bijection_over_residual_range(self):
        # enumeration oracle: 0, -1, 1, -2, 2, ... ordered by magnitude
        ordered = [0]
        for m in range(1, 256):
            ordered += [-m, m]
        for u, v in enumerate(ordered):
            assert zigzag_map(v) == u
            assert zigzag_unmap(u) == v

    @given(st.integers(0, 510))
    def test_unmap_then_map_is_identity(self, u):
        assert zigzag_map(zigzag_unmap(u)) == u


class TestSelectK:
    def test_initial_state(self):
        assert RiceContext().select_k() == 0

    def test_examples(self):
        ctx = RiceContext()
        ctx.count, ctx.magnitude = 4, 17
        assert ctx.select_k() == 3  # 4*4=16 < 17 <= 4*8
        ctx.count, ctx.magnitude = 8, 8
        assert ctx.select_k() == 0

    def test_cap(self):
        ctx = RiceContext()
        ctx.count, ctx.magnitude = 1, 10**9
        assert ctx.select_k() == 15

    @given(st.integers(1, 63), st.integers(0, 10000), st.integers(0, 10000))
    def test_monotone_in_magnitude(self, n, a1, a2):
        lo, hi = sorted((a1, a2))
        ctx = RiceContext()
        ctx.count, ctx.magnitude = n, lo
        k_lo = ctx.select_k()
        ctx.magnitude = hi
        assert ctx.select_k() >= k_lo


class TestContextUpdate:
    def test_additive(self):
        ctx = RiceContext()
        ctx.update(4)
        assert (ctx.count, ctx.magnitude) == (2, 4)

    def test_halving_at_reset(self):
        ctx = RiceContext()
        ctx.count, ctx.magnitude = 63, 100
        ctx.update(0)
        assert (ctx.count, ctx.magnitude) == (32, 50)

    def test_count_stays_positive(self):
        ctx = RiceContext()
        for _ in range(CONTEXT_RESET_N * 5):
            ctx.update(0)
            assert ctx.count >= 1

    def test_k_stays_zero_on_zeros(self):
        ctx = RiceContext()
        for _ in range(500):
            ctx.update(0)
        assert ctx.select_k() == 0


class TestRice:
    def test_zero_at_k0(self):
        sink = BitSink()
        assert rice_encode(sink, 0, 0) == 1
        assert sink_bits(sink) == "0"

    def test_nine_at_k2(self):
        sink = BitSink()
        assert rice_encode(sink, 9, 2) == 5
        assert sink_bits(sink) == "11001"

    def test_five_at_k0(self):
        sink = BitSink()
        assert rice_encode(sink, 5, 0) == 6
        assert sink_bits(sink) == "111110"

    def test_decode_examples(self):
        assert rice_decode(BitSource(b"\x00"), 0) == 0
        assert rice_decode(BitSource(bytes([0b11001000])), 2) == 9

    def test_escape_layout(self):
        sink = BitSink()
        nbits = rice_encode(sink, 24, 0)  # quotient hits the escape threshold
        assert nbits == ESCAPE_QUOTIENT + ESCAPE_RAW_BITS
        assert sink_bits(sink) == ref_rice_bits(24, 0)
        assert rice_decode(BitSource(sink.getvalue()), 0) == 24

    def test_escape_maximum(self):
        sink = BitSink()
        rice_encode(sink, 0xFFFF, 0)
        assert rice_decode(BitSource(sink.getvalue()), 0) == 0xFFFF

    def test_escape_overflow_rejected(self):
        with pytest.raises(ValueError):
            rice_encode(BitSink(), 0x10000, 0)

    @given(st.integers(0, 4000), st.integers(0, 15))
    def test_matches_reference_bits(self, u, k):
        sink = BitSink()
        rice_encode(sink, u, k)
        assert sink_bits(sink) == ref_rice_bits(u, k)

    @given(st.lists(st.integers(-2048, 2048), max_size=200))
    @settings(deadline=None)
    def test_signed_stream_lockstep(self, values):
        sink = BitSink()
        enc_ctx = RiceContext()
        for v in values:
            encode_signed(sink, enc_ctx, v)
        src = BitSource(sink.getvalue())
        dec_ctx = RiceContext()
        assert [decode_signed(src, dec_ctx) for _ in values] == values
        assert (dec_ctx.count, dec_ctx.magnitude) == (enc_ctx.count, enc_ctx.magnitude)
