"""Oracle programs and the machine coding of K2.

Application is ``a . b = Phi_{a(0)}^{a (+) b}``: run the program numbered
``a(0)`` with the join of ``a`` and ``b`` as its oracle.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

from .foundations import (
    Budget, Divergence, OutOfFuel, PartialReal, Real, Value, Verdict, FuelOut, Diverged,
    EventuallyConstant, join, to_int,
)
from .seqcode import pair, unpair

# -- syntax -----------------------------------------------------------------


class Node:
    __slots__ = ()


@dataclass(frozen=True)
class In(Node):
    pass


@dataclass(frozen=True)
class Lit(Node):
    value: int


@dataclass(frozen=True)
class Succ(Node):
    e: Node


@dataclass(frozen=True)
class Pred(Node):
    e: Node


@dataclass(frozen=True)
class Qry(Node):
    e: Node


@dataclass(frozen=True)
class If0(Node):
    cond: Node
    then: Node
    other: Node


@dataclass(frozen=True)
class Pair(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Fst(Node):
    e: Node


@dataclass(frozen=True)
class Snd(Node):
    e: Node


@dataclass(frozen=True)
class Mu(Node):
    body: Node


@dataclass(frozen=True)
class Idx(Node):
    pass


@dataclass(frozen=True)
class Run(Node):
    code: Node
    arg: Node


@dataclass(frozen=True)
class RunVia(Node):
    code: Node
    arg: Node
    oracle: Node


_TAGS = [In, Lit, Succ, Pred, Qry, If0, Pair, Fst, Snd, Mu, Idx, Run, RunVia]
_TAG_OF = {cls: i for i, cls in enumerate(_TAGS)}
_ARITY = {In: 0, Lit: 0, Succ: 1, Pred: 1, Qry: 1, If0: 3, Pair: 2, Fst: 1, Snd: 1,
          Mu: 1, Idx: 0, Run: 2, RunVia: 3}
_NAMES = {In: "in", Lit: "lit", Succ: "succ", Pred: "pred", Qry: "qry", If0: "if0",
          Pair: "pair", Fst: "fst", Snd: "snd", Mu: "mu", Idx: "idx", Run: "run",
          RunVia: "runvia"}
_BY_NAME = {v: k for k, v in _NAMES.items()}


def children(node: Node) -> Tuple[Node, ...]:
    if isinstance(node, Lit):
        return ()
    return tuple(getattr(node, f) for f in node.__dataclass_fields__)


# -- numbering --------------------------------------------------------------
#
# Prefix token stream (tag, [literal], children...), each token t written as
# the Elias delta code of t+1, behind a leading 1 bit.  Delta keeps nested
# literal program numbers close to additive in size.  Injective; numbers
# that do not parse decode to None (the everywhere-diverging program).

def _tokens(node: Node, out: List[int]) -> None:
    stack = [node]
    while stack:
        n = stack.pop()
        out.append(_TAG_OF[type(n)])
        if isinstance(n, Lit):
            out.append(n.value)
        else:
            stack.extend(reversed(children(n)))


def _gamma(x: int) -> str:
    b = bin(x)[2:]
    return "0" * (len(b) - 1) + b


def _delta(x: int) -> str:
    b = bin(x)[2:]
    return _gamma(len(b)) + b[1:]


def encode_program(node: Node) -> int:
    toks: List[int] = []
    _tokens(node, toks)
    return int("1" + "".join(_delta(t + 1) for t in toks), 2)


def _read_tokens(bits: str) -> Optional[List[int]]:
    toks, i, n = [], 0, len(bits)
    while i < n:
        z = i
        while z < n and bits[z] == "0":
            z += 1
        width = z - i
        if z + width + 1 > n:
            return None
        length = int(bits[z:z + width + 1], 2)
        i = z + width + 1
        if i + length - 1 > n:
            return None
        toks.append(int("1" + bits[i:i + length - 1], 2) - 1)
        i += length - 1
    return toks


@lru_cache(maxsize=8192)
def decode_program(code: int) -> Optional[Node]:
    """The program numbered ``code``, or None when the number is not well formed."""
    if code < 1:
        return None
    toks = _read_tokens(bin(code)[3:])
    if not toks:
        return None
    pos = 0

    # frames hold (class, children collected so far)
    def take() -> int:
        nonlocal pos
        if pos >= len(toks):
            raise ValueError
        pos += 1
        return toks[pos - 1]

    try:
        frames: list = []
        result: Optional[Node] = None
        while True:
            tag = take()
            if tag >= len(_TAGS):
                return None
            cls = _TAGS[tag]
            if cls is Lit:
                node: Optional[Node] = Lit(take())
            elif _ARITY[cls] == 0:
                node = cls()
            else:
                frames.append((cls, []))
                continue
            while True:
                if not frames:
                    result = node
                    break
                cls, kids = frames[-1]
                kids.append(node)
                if len(kids) < _ARITY[cls]:
                    break
                frames.pop()
                node = cls(*kids)
            if result is not None:
                break
    except ValueError:
        return None
    if pos != len(toks):
        return None
    return result


def to_sexpr(node: Node) -> str:
    if isinstance(node, Lit):
        return str(node.value)
    if isinstance(node, (In, Idx)):
        return _NAMES[type(node)]
    return "(" + " ".join([_NAMES[type(node)]] + [to_sexpr(c) for c in children(node)]) + ")"


_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")


def parse_program(text: str) -> Node:
    """Parse s-expression surface syntax, e.g. ``(qry (succ in))``."""
    toks = _TOKEN.findall(text)
    if not toks or "".join(toks) != re.sub(r"\s+", "", text):
        raise ValueError(f"cannot tokenize program {text!r}")
    pos = 0

    def expr() -> Node:
        nonlocal pos
        if pos >= len(toks):
            raise ValueError("unexpected end of program")
        t = toks[pos]
        pos += 1
        if t == "(":
            if pos >= len(toks):
                raise ValueError("unexpected end of program")
            head = toks[pos]
            pos += 1
            cls = _BY_NAME.get(head)
            if cls is None or cls in (In, Idx):
                raise ValueError(f"unknown operator {head!r}")
            if cls is Lit:
                if pos >= len(toks) or not toks[pos].isdigit():
                    raise ValueError("lit takes a natural number")
                node: Node = Lit(int(toks[pos]))
                pos += 1
            else:
                node = cls(*[expr() for _ in range(_ARITY[cls])])
            if pos >= len(toks) or toks[pos] != ")":
                raise ValueError(f"expected ')' after {head}")
            pos += 1
            return node
        if t == ")":
            raise ValueError("unexpected ')'")
        if t.isdigit():
            return Lit(int(t))
        if t in ("in", "idx"):
            return _BY_NAME[t]()
        raise ValueError(f"unknown atom {t!r}")

    node = expr()
    if pos != len(toks):
        raise ValueError("trailing input after program")
    return node


def asm(text: str) -> int:
    return encode_program(parse_program(text))


# -- evaluation -------------------------------------------------------------


class _Env:
    __slots__ = ("arg", "oracle", "idx")

    def __init__(self, arg: int, oracle, idx: Optional[int]):
        self.arg = arg
        self.oracle = oracle
        self.idx = idx


def _virtual(q_code: int, base) -> PartialReal:
    """Oracle answering position ``i`` with program ``q_code`` run on ``i`` over ``base``."""

    def rule(pos, budget):
        prog = decode_program(q_code)
        if prog is None:
            raise Divergence
        return execute(prog, to_int(pos), base, budget)

    return PartialReal(rule, cost=0, label=f"via {q_code}")


def execute(prog: Node, arg: int, oracle, budget: Budget) -> int:
    """Run ``prog`` on ``arg``; every node visit and every oracle query costs one step.

    Iterative, so deep ``Run`` recursion does not touch the Python stack.
    """
    stack: list = []
    env = _Env(arg, oracle, None)
    node = prog
    while True:
        budget.spend(1)
        t = type(node)
        if t is In:
            val = env.arg
        elif t is Lit:
            val = node.value
        elif t is Idx:
            if env.idx is None:
                raise Divergence
            val = env.idx
        elif t is If0:
            stack.append((If0, node, env))
            node = node.cond
            continue
        elif t is Pair:
            stack.append((Pair, node, env))
            node = node.left
            continue
        elif t is Mu:
            stack.append((Mu, node, env, 0))
            env = _Env(env.arg, env.oracle, 0)
            node = node.body
            continue
        elif t is Run or t is RunVia:
            stack.append((t, node, env, ()))
            node = node.code
            continue
        else:
            stack.append((t, env))
            node = node.e
            continue

        # return mode: feed ``val`` to continuation frames
        while True:
            if not stack:
                return val
            frame = stack.pop()
            k = frame[0]
            if k is Succ:
                val += 1
            elif k is Pred:
                val = val - 1 if val else 0
            elif k is Fst:
                val = unpair(val)[0]
            elif k is Snd:
                val = unpair(val)[1]
            elif k is Qry:
                budget.spend(1)
                val = frame[1].oracle.at(val, budget)
            elif k is If0:
                _, n, env = frame
                node = n.then if val == 0 else n.other
                break
            elif k is Pair:
                _, n, env = frame
                stack.append(("pair2", val))
                node = n.right
                break
            elif k == "pair2":
                val = pair(frame[1], val)
            elif k is Mu:
                _, n, fenv, j = frame
                if val == 0:
                    val = j
                    continue
                stack.append((Mu, n, fenv, j + 1))
                env = _Env(fenv.arg, fenv.oracle, j + 1)
                node = n.body
                break
            else:  # Run / RunVia: collect operands, then enter the callee
                _, n, fenv, got = frame
                got = got + (val,)
                if k is Run and len(got) == 2:
                    callee = decode_program(got[0])
                    if callee is None:
                        raise Divergence
                    env = _Env(got[1], fenv.oracle, None)
                    node = callee
                    break
                if k is RunVia and len(got) == 3:
                    callee = decode_program(got[0])
                    if callee is None:
                        raise Divergence
                    env = _Env(got[1], _virtual(got[2], fenv.oracle), None)
                    node = callee
                    break
                stack.append((k, n, fenv, got))
                env = fenv
                node = n.arg if len(got) == 1 else n.oracle
                break


def opl_eval(e: int, n: int, oracle, fuel: int) -> Verdict:
    """Evaluate program number ``e`` on input ``n`` against ``oracle``."""
    budget = Budget(fuel)
    try:
        budget.spend(1)
        prog = decode_program(e)
        if prog is None:
            raise Divergence
        return Value(execute(prog, n, oracle, budget))
    except OutOfFuel:
        return FuelOut()
    except Divergence:
        return Diverged()


def machine_apply(alpha: PartialReal, beta: PartialReal) -> PartialReal:
    """``alpha . beta``: position n runs program ``alpha(0)`` on n over ``alpha (+) beta``.

    Works unchanged over partial reals; on total inputs the result is a Real.
    """
    oracle = join(alpha, beta)

    def rule(pos, budget):
        prog = decode_program(alpha.at(0, budget))
        if prog is None:
            raise Divergence
        return execute(prog, to_int(pos), oracle, budget)

    cls = Real if (alpha.total and beta.total) else PartialReal
    return cls(rule, cost=1, label=f"({alpha.label} {beta.label})")


def k2m_apply(alpha: Real, beta: Real) -> Real:
    return machine_apply(alpha, beta)


# -- arithmetic library -----------------------------------------------------
#
# No multiplication in the instruction set: doubling, halving and parity are
# small recursive programs that receive their own number in the input,
# ``<self, n>``, and recurse through Run.

_SELF = Fst(In())
_N = Snd(In())


def _recurse(arg: Node) -> Node:
    return Run(_SELF, Pair(_SELF, arg))


DOUBLE = If0(_N, Lit(0), Succ(Succ(_recurse(Pred(_N)))))
HALF = If0(_N, Lit(0), If0(Pred(_N), Lit(0), Succ(_recurse(Pred(Pred(_N))))))
PARITY = If0(_N, Lit(0), If0(Pred(_N), Lit(1), _recurse(Pred(Pred(_N)))))


def call(lib: Node, arg: Node) -> Node:
    c = encode_program(lib)
    return Run(Lit(c), Pair(Lit(c), arg))


def double(e: Node) -> Node:
    return call(DOUBLE, e)


def half(e: Node) -> Node:
    return call(HALF, e)


def parity(e: Node) -> Node:
    return call(PARITY, e)


def succ_n(e: Node, k: int) -> Node:
    for _ in range(k):
        e = Succ(e)
    return e


def pad(node: Node) -> Node:
    """Semantic no-op wrapper, used to make stage programs' numbers distinct."""
    return If0(Lit(0), node, node)


# -- combinators ------------------------------------------------------------


class ExtractionError(ValueError):
    pass


class MachineK2:
    """The machine coding with pinned layouts for k and s.

    * ``k = e_k^0...``, ``k a = e_ka^a``, ``k a b = a``
    * ``s = e_s^0...``, ``s a = e_sa^a``, ``s a b = e_sab^(a (+) b)``
    * ``s a b c`` runs ``a c (b c)`` through virtual oracles.
    """

    name = "k2m"

    def __init__(self):
        # (k a) b: a(n) = (ka)(n+1) sits at oracle slot 2n+2
        p_ka = Qry(succ_n(double(In()), 2))
        # (s a b) c; with O = sab (+) c:  a(i) = O(4i+2), b(i) = O(4i+4), c(i) = O(2i+1)
        q_ac = If0(parity(In()), Qry(succ_n(double(In()), 2)), Qry(In()))
        q_bc = If0(parity(In()), Qry(succ_n(double(In()), 4)), Qry(In()))
        self.q_ac, self.q_bc = encode_program(q_ac), encode_program(q_bc)
        q_AC = RunVia(Qry(Lit(2)), In(), Lit(self.q_ac))
        q_BC = RunVia(Qry(Lit(4)), In(), Lit(self.q_bc))
        c_AC, c_BC = encode_program(q_AC), encode_program(q_BC)
        q_J = If0(parity(In()), Run(Lit(c_AC), half(In())), Run(Lit(c_BC), half(In())))
        p_sab = RunVia(Run(Lit(c_AC), Lit(0)), In(), Lit(encode_program(q_J)))

        taken: set = set()

        def fresh(node: Node) -> Tuple[Node, int]:
            code = encode_program(node)
            while code in taken:
                node = pad(node)
                code = encode_program(node)
            taken.add(code)
            return node, code

        self.p_ka, self.e_ka = fresh(p_ka)
        self.p_sab, self.e_sab = fresh(p_sab)
        # (s a) b: sab(2i+1) = a(i) = O(2i+2), sab(2i+2) = b(i) = O(2i+1)
        p_sa = If0(In(), Lit(self.e_sab), If0(parity(In()), Qry(Pred(In())), Qry(Succ(In()))))
        self.p_sa, self.e_sa = fresh(p_sa)
        # k a and s a: tag at 0, then a(n-1) = O(2n-1)
        p_k = If0(In(), Lit(self.e_ka), Qry(Pred(double(In()))))
        self.p_k, self.e_k = fresh(p_k)
        p_s = If0(In(), Lit(self.e_sa), Qry(Pred(double(In()))))
        self.p_s, self.e_s = fresh(p_s)

        self.k = EventuallyConstant((self.e_k,), 0)
        self.s = EventuallyConstant((self.e_s,), 0)
        self.k.label, self.s.label = "k", "s"

    @property
    def tags(self) -> dict:
        return {"K": self.e_k, "S": self.e_s, "KA": self.e_ka, "SA": self.e_sa, "SAB": self.e_sab}

    def apply(self, a: PartialReal, b: PartialReal) -> PartialReal:
        return machine_apply(a, b)

    def extract_sab(self, x: PartialReal, fuel: int = 10_000) -> Tuple[PartialReal, PartialReal]:
        """Read ``(a, b)`` back out of ``s a b``."""
        budget = Budget(fuel)
        try:
            tag = x.at(0, budget)
        except (OutOfFuel, Divergence):
            raise ExtractionError("position 0 of the argument has no value") from None
        if tag != self.e_sab:
            raise ExtractionError(f"tag {tag} is not e_sab")

        def slot(offset):
            return lambda pos, bud: x.at(2 * to_int(pos) + offset, bud)

        cls = Real if x.total else PartialReal
        return cls(slot(1), cost=0, label="a"), cls(slot(2), cost=0, label="b")


_DEFAULT: Optional[MachineK2] = None


def default_machine() -> MachineK2:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = MachineK2()
    return _DEFAULT


def k2m_combinators() -> Tuple[Real, Real]:
    m = default_machine()
    return m.k, m.s


def extract_sab(x: PartialReal) -> Tuple[PartialReal, PartialReal]:
    return default_machine().extract_sab(x)
