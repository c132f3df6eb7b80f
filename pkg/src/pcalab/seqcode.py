"""Cantor pairing and the finite-sequence coding shared by every model.

The coding is the recurrence ``base(()) = 0``, ``base(s + (x,)) = pair(base(s), x) + 1``
composed with the transposition that swaps the codes of ``()`` and ``(0, 0, 0)``.
So ``encode((0, 0, 0)) == 0`` and ``encode(()) == 4``.

Codes of long sequences grow doubly exponentially. Positions above
``BIG_BITS`` bits are therefore kept symbolically as :class:`SeqPos`, the
sequence they code.  Every position has exactly one canonical form (an ``int``
when small, a ``SeqPos`` otherwise), so ``==`` and hashing are exact.
"""
from __future__ import annotations

from math import isqrt
from typing import Iterable, Sequence, Tuple, Union

BIG_BITS = 512
# int(SeqPos) refuses beyond this many elements; such codes have > 2**40 bits
MAX_MATERIALIZE_LEN = 40

_EMPTY_BASE = 0
_TRIPLE_ZERO_BASE = 4


def pair(a: int, b: int) -> int:
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(z: int) -> Tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    b = z - w * (w + 1) // 2
    return w - b, b


def _swap(n: int) -> int:
    if n == _EMPTY_BASE:
        return _TRIPLE_ZERO_BASE
    if n == _TRIPLE_ZERO_BASE:
        return _EMPTY_BASE
    return n


def seq_encode(seq: Iterable[int]) -> int:
    """Exact integer code of a finite sequence of naturals."""
    c = 0
    for x in seq:
        if x < 0:
            raise ValueError("sequence entries must be natural numbers")
        c = pair(c, x) + 1
    return _swap(c)


def seq_decode(n: int) -> Tuple[int, ...]:
    """Inverse of :func:`seq_encode`."""
    if n < 0:
        raise ValueError("codes are natural numbers")
    b = _swap(n)
    out = []
    while b:
        b, x = unpair(b - 1)
        out.append(x)
    out.reverse()
    return tuple(out)


class SeqPos:
    """A position too large to hold as an int, stored as the sequence it codes.

    Built as a snoc list: ``init`` is the canonical code of all but the last
    element. Instances are only created through :func:`code_of` / :func:`extend`,
    which guarantees canonicity.
    """

    __slots__ = ("init", "last", "length", "_hash")

    def __init__(self, init: Position, last: Position, length: int):
        self.init = init
        self.last = last
        self.length = length
        self._hash = hash((init, last, "seqpos"))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        a, b = self, other
        while True:
            if a is b:
                return True
            if isinstance(a, SeqPos) != isinstance(b, SeqPos):
                return False  # canonical forms never mix
            if not isinstance(a, SeqPos):
                return a == b
            if a._hash != b._hash or a.length != b.length or a.last != b.last:
                return False
            a, b = a.init, b.init

    def items(self) -> Tuple[Position, ...]:
        out = []
        p: Position = self
        while isinstance(p, SeqPos):
            out.append(p.last)
            p = p.init
        out.extend(reversed(as_seq(p)))
        out.reverse()
        return tuple(out)

    def __int__(self) -> int:
        if self.length > MAX_MATERIALIZE_LEN:
            raise OverflowError("position code too large to materialize")
        return seq_encode(int(x) for x in self.items())

    __index__ = None  # never silently used as an int

    def __repr__(self) -> str:
        return f"SeqPos(len={self.length})"


Position = Union[int, SeqPos]


def _is_big_int(n: int) -> bool:
    return n.bit_length() > BIG_BITS


def canon(p: Position) -> Position:
    """Canonical form of a position."""
    if isinstance(p, SeqPos):
        return p
    if not _is_big_int(p):
        return p
    return code_of(tuple(canon(x) for x in seq_decode(p)))


def extend(code: Position, x: Position) -> Position:
    """Canonical code of ``seq + (x,)`` given the canonical code of ``seq``."""
    if not isinstance(x, SeqPos) and _is_big_int(x):
        x = canon(x)
    if isinstance(code, SeqPos):
        return SeqPos(code, x, code.length + 1)
    if isinstance(x, SeqPos):
        return SeqPos(code, x, len(as_seq(code)) + 1)
    c = pair(_swap(code), x) + 1
    if _is_big_int(c):
        return SeqPos(code, x, len(as_seq(code)) + 1)
    return _swap(c)


def code_of(seq: Sequence[Position]) -> Position:
    """Canonical code of a finite sequence of canonical positions."""
    c: Position = _swap(0)
    for x in seq:
        c = extend(c, x)
    return c


def as_seq(p: Position) -> Tuple[Position, ...]:
    """The sequence coded by a position (elements in canonical form)."""
    if isinstance(p, SeqPos):
        return p.items()
    seq = seq_decode(p)
    if _is_big_int(p):
        return tuple(canon(x) for x in seq)
    return seq


def position_mod(p: Position, k: int) -> int:
    """``p mod k`` without materializing the code.

    ``pair(a, b) mod k`` depends on ``a + b`` only modulo ``2k``, so each
    unfolding step doubles the modulus.
    """
    if not isinstance(p, SeqPos):
        return p % k
    if k == 1:
        return 0
    chain = []
    while isinstance(p, SeqPos):
        chain.append(p.last)
        p = p.init
    # p is now the int code of the innermost prefix; its base value is exact
    mods = [k << i for i in range(len(chain) + 1)]
    acc = _swap(p) % mods[-1]
    for depth, last in enumerate(reversed(chain)):
        m = mods[len(chain) - 1 - depth]
        x = position_mod(last, 2 * m)
        s = (acc + x) % (2 * m)
        acc = (s * (s + 1) // 2 + x + 1) % m
    return acc % k


def seq_length(p: Position) -> int:
    if isinstance(p, SeqPos):
        return p.length
    return len(seq_decode(p))


def is_big(p: Position) -> bool:
    return isinstance(p, SeqPos) or _is_big_int(p)


def to_int(p: Position) -> int:
    """Materialize a position as an int (may raise OverflowError)."""
    return p if isinstance(p, int) else int(p)
