"""Bit-level I/O and adaptive Golomb-Rice coding of signed residuals.

Bit layout rules shared by encoder and decoder:

* bits are packed MSB-first within each byte;
* a Rice codeword for an unsigned value ``u`` at parameter ``k`` is
  ``u >> k`` one-bits, a zero terminator, then the ``k`` low bits of ``u``;
* quotients of 24 or more switch to an escape: 24 one-bits followed by
  the value as a raw 16-bit field (no terminator);
* signed values are folded to unsigned with the zigzag map before coding.

The Rice parameter is driven by a per-stream :class:`RiceContext` that both
sides update in lockstep, so ``k`` never has to be transmitted.
"""

ESCAPE_QUOTIENT = 24  # unary run length that switches to the raw escape
ESCAPE_RAW_BITS = 16
K_MAX = 15
CONTEXT_RESET_N = 64

# leading one-bits of each byte value, counted from the MSB
_LEADING_ONES = bytes(next((i for i in range(8) if not (b >> (7 - i)) & 1), 8) for b in range(256))


class BitSink:
    """Append-only MSB-first bit buffer backed by a bytearray."""

    __slots__ = ("_buf", "_acc", "_n")

    def __init__(self):
        self._buf = bytearray()
        self._acc = 0  # pending bits, right-aligned, always < 8 of them
        self._n = 0

    def write_bits(self, value: int, nbits: int) -> None:
        acc = (self._acc << nbits) | (value & ((1 << nbits) - 1))
        n = self._n + nbits
        buf = self._buf
        while n >= 8:
            n -= 8
            buf.append((acc >> n) & 0xFF)
        self._acc = acc & ((1 << n) - 1)
        self._n = n

    def align_to_byte(self) -> None:
        """Pad with zero bits up to the next byte boundary."""
        if self._n:
            self.write_bits(0, 8 - self._n)

    @property
    def bit_length(self) -> int:
        return len(self._buf) * 8 + self._n

    def getvalue(self) -> bytes:
        """Return the buffer contents, zero-padding to a whole byte first."""
        self.align_to_byte()
        return bytes(self._buf)


class BitSource:
    """MSB-first bit reader over a byte string.

    Reading past the end raises ``EOFError``; the codec layers translate
    that into a truncated-stream decode error.
    """

    __slots__ = ("_data", "_nbits", "_pos")

    def __init__(self, data: bytes):
        self._data = data
        self._nbits = len(data) * 8
        self._pos = 0

    @property
    def bits_remaining(self) -> int:
        return self._nbits - self._pos

    def read_bits(self, nbits: int) -> int:
        pos = self._pos
        end = pos + nbits
        if end > self._nbits:
            raise EOFError("bit stream exhausted")
        if nbits == 0:
            return 0
        first = pos >> 3
        last = (end + 7) >> 3
        chunk = int.from_bytes(self._data[first:last], "big")
        self._pos = end
        return (chunk >> ((last << 3) - end)) & ((1 << nbits) - 1)

    def read_unary(self, cap: int) -> int:
        """Count one-bits up to a terminating zero (consumed) or ``cap`` ones.

        When ``cap`` ones are seen the terminator is not consumed; the
        caller is expected to read an escape payload next.
        """
        data = self._data
        pos = self._pos
        q = 0
        while True:
            if pos >= self._nbits:
                raise EOFError("bit stream ended inside a unary run")
            chunk = (data[pos >> 3] << (pos & 7)) & 0xFF
            ones = _LEADING_ONES[chunk]
            avail = 8 - (pos & 7)
            if q + ones >= cap:
                self._pos = pos + (cap - q)
                return cap
            if ones < avail:
                self._pos = pos + ones + 1
                return q + ones
            q += ones
            pos += ones


def zigzag_map(v: int) -> int:
    """Fold a signed integer onto the non-negatives: 0,-1,1,-2,... -> 0,1,2,3,..."""
    return (v << 1) if v >= 0 else (-(v << 1)) - 1


def zigzag_unmap(u: int) -> int:
    return -((u + 1) >> 1) if (u & 1) else (u >> 1)


class RiceContext:
    """Adaptive Rice parameter state: value count and magnitude sum.

    ``select_k`` picks the smallest k with count * 2**k >= magnitude sum
    (capped at 15); ``update`` accumulates and halves both counters when
    the count reaches 64, keeping the count at least 1.
    """

    __slots__ = ("count", "magnitude")

    def __init__(self):
        self.count = 1
        self.magnitude = 0

    def select_k(self) -> int:
        k = 0
        scaled = self.count
        mag = self.magnitude
        while scaled < mag and k < K_MAX:
            scaled <<= 1
            k += 1
        return k

    def update(self, u: int) -> None:
        self.magnitude += u
        self.count += 1
        if self.count >= CONTEXT_RESET_N:
            self.count >>= 1
            self.magnitude >>= 1
            if self.count == 0:
                self.count = 1


def rice_encode(sink: BitSink, u: int, k: int) -> int:
    """Write one Golomb-Rice codeword; returns the number of bits emitted."""
    q = u >> k
    if q >= ESCAPE_QUOTIENT:
        if u >> ESCAPE_RAW_BITS:
            raise ValueError(f"value {u} too large for the 16-bit escape")
        sink.write_bits((1 << ESCAPE_QUOTIENT) - 1, ESCAPE_QUOTIENT)
        sink.write_bits(u, ESCAPE_RAW_BITS)
        return ESCAPE_QUOTIENT + ESCAPE_RAW_BITS
    sink.write_bits(((1 << q) - 1) << 1, q + 1)  # q ones then the terminator
    if k:
        sink.write_bits(u & ((1 << k) - 1), k)
    return q + 1 + k


def rice_decode(src: BitSource, k: int) -> int:
    q = src.read_unary(ESCAPE_QUOTIENT)
    if q == ESCAPE_QUOTIENT:
        return src.read_bits(ESCAPE_RAW_BITS)
    return (q << k) | src.read_bits(k) if k else q


def encode_signed(sink: BitSink, ctx: RiceContext, v: int) -> int:
    """Zigzag, Rice-encode with the context's current k, then update it."""
    u = zigzag_map(v)
    nbits = rice_encode(sink, u, ctx.select_k())
    ctx.update(u)
    return nbits


def decode_signed(src: BitSource, ctx: RiceContext) -> int:
    u = rice_decode(src, ctx.select_k())
    ctx.update(u)
    return zigzag_unmap(u)
