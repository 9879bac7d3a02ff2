"""
Finite free etale extensions S = R[s_1..s_r] of R = F_p[X1..Xn][1/P].

A presentation fixes the multiplication table of the basis s_1 = 1, s_2..s_r
with coefficients in R, optional Frobenius rows and integer lift data. Witt
vectors over S are stored over the "big" polynomial ring F_p[X, Pinv, s_2..s_r]
and normalised coordinatewise through the quotient map, which is a ring map and
so commutes with Witt arithmetic.

File format (one statement per line, '#' comments):

    # wdrw-format 1
    etale p=2 n=1 rank=2 P=1
    mul s2 s2 = X1*s1 + s2
    frob s2 = X1*s1^2 + s2^2
    lift X1 -> X1^2
    lift s2 -> s2^2 + 2*X1*s2
    precision 2
"""
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from modules import pseudoval
from modules.drwbasis import WeightFn, vp_fraction
from modules.errors import MalformedTable, NotRelativelyPerfect, PresentationError
from modules.lazard import FrobLift, t_F
from modules.logger import PerformanceTimer, get_logger
from modules.polyring import (
    change_ring, default_names, format_polynomial, fp_ring, parse_polynomial, reduce_coeffs,
    substitute, total_degree, zz_ring,
)
from modules.wittcore import (
    RingContext, WittVec, add as witt_add, mul as witt_mul, sub as witt_sub, teichmuller,
    verschiebung_power, vV, zero as witt_zero,
)

logger = get_logger('etale')

FORMAT_LINE = re.compile(r'^#\s*wdrw-format\s+(\d+)\s*$')
HEADER_LINE = re.compile(r'^etale\s+p\s*=\s*(\d+)\s+n\s*=\s*(\d+)\s+rank\s*=\s*(\d+)\s+P\s*=\s*(.+)$')
MUL_LINE = re.compile(r'^mul\s+s(\d+)\s+s(\d+)\s*=\s*(.+)$')
FROB_LINE = re.compile(r'^frob\s+s(\d+)\s*=\s*(.+)$')
LIFT_LINE = re.compile(r'^lift\s+([A-Za-z_]\w*)\s*->\s*(.+)$')
PRECISION_LINE = re.compile(r'^precision\s+(\d+)$')

PINV = 'Pinv'


@dataclass(frozen=True)
class LocalizedElem:
    num: object
    e: int = 0


class LocalizedRing:
    """F_p[X][1/P]; elements num / P^e, reduced so that P does not divide num when e > 0"""

    def __init__(self, p: int, names: Tuple[str, ...], P):
        self.p = p
        self.names = names
        self.R = fp_ring(p, names)
        self.trivial = not P or total_degree(P) <= 0
        self.P = self.R.one if self.trivial else P

    def make(self, num, e: int = 0) -> LocalizedElem:
        if not num:
            return LocalizedElem(self.R.zero, 0)
        if self.trivial:
            return LocalizedElem(num, 0)
        while e > 0:
            q, r = divmod(num, self.P)
            if r:
                break
            num, e = q, e - 1
        return LocalizedElem(num, e)

    def zero(self) -> LocalizedElem:
        return LocalizedElem(self.R.zero, 0)

    def one(self) -> LocalizedElem:
        return LocalizedElem(self.R.one, 0)

    def is_zero(self, a: LocalizedElem) -> bool:
        return not a.num

    def add(self, a: LocalizedElem, b: LocalizedElem) -> LocalizedElem:
        if not a.num:
            return b
        if not b.num:
            return a
        top = max(a.e, b.e)
        num = a.num * self.P ** (top - a.e) + b.num * self.P ** (top - b.e)
        return self.make(num, top)

    def neg(self, a: LocalizedElem) -> LocalizedElem:
        return LocalizedElem(-a.num, a.e)

    def sub(self, a: LocalizedElem, b: LocalizedElem) -> LocalizedElem:
        return self.add(a, self.neg(b))

    def mul(self, a: LocalizedElem, b: LocalizedElem) -> LocalizedElem:
        if not a.num or not b.num:
            return self.zero()
        return self.make(a.num * b.num, a.e + b.e)

    def frob(self, a: LocalizedElem, t: int = 1) -> LocalizedElem:
        q = self.p ** t
        num = self.R.from_dict({tuple(q * x for x in monom): c for monom, c in a.num.iterterms()})
        return self.make(num, a.e * q)

    def _strip_P(self, num):
        k = 0
        if self.trivial:
            return num, 0
        while True:
            q, r = divmod(num, self.P)
            if r:
                return num, k
            num, k = q, k + 1

    def is_unit(self, a: LocalizedElem) -> bool:
        if not a.num:
            return False
        rest, _ = self._strip_P(a.num)
        return total_degree(rest) == 0

    def inverse(self, a: LocalizedElem) -> LocalizedElem:
        rest, k = self._strip_P(a.num)
        if total_degree(rest) != 0:
            raise NotRelativelyPerfect(f"{self.text(a)} is not a unit")
        c = int(rest.LC) % self.p
        inv_c = pow(c, -1, self.p)
        return self.make(self.R(inv_c) * self.P ** a.e, k)

    def text(self, a: LocalizedElem) -> str:
        body = format_polynomial(a.num, self.p)
        if a.e == 0:
            return body
        return f"({body})/({format_polynomial(self.P, self.p)})^{a.e}"


Vector = Tuple[LocalizedElem, ...]
Matrix = List[List[LocalizedElem]]


@dataclass
class RelPerfectReport:
    ok: bool
    frobenius_matrix: Matrix
    det: LocalizedElem
    U0: Optional[Matrix]
    witness: str = ''


def variable_names(n: int, rank: int, P_text: str):
    """(coefficient names, big ring names, names allowed in table lines)"""
    base = default_names(n)
    try:
        P = parse_polynomial(P_text, zz_ring(base))
    except Exception as exc:
        raise PresentationError(f"cannot parse P={P_text!r}: {exc}")
    coeff = base + ((PINV,) if total_degree(P) > 0 else ())
    s_names = tuple(f"s{k + 1}" for k in range(rank))
    return coeff, coeff + s_names[1:], coeff + s_names


@dataclass
class EtalePresentation:
    p: int
    n: int
    rank: int
    P_text: str
    mul_lines: Dict[Tuple[int, int], object]
    frob_lines: Dict[int, object] = field(default_factory=dict)
    lift_lines: Dict[str, object] = field(default_factory=dict)
    precision: Optional[int] = None

    def __post_init__(self):
        self._power_cache: Dict[Tuple[int, ...], Vector] = {}
        self._int_power_cache: Dict[Tuple[int, ...], Tuple] = {}
        self.table = self._build_table()
        self._validate_table()

    @property
    def base_names(self) -> Tuple[str, ...]:
        return default_names(self.n)

    @property
    def s_names(self) -> Tuple[str, ...]:
        return tuple(f"s{k + 1}" for k in range(self.rank))

    @cached_property
    def P_int(self):
        return parse_polynomial(self.P_text, zz_ring(self.base_names))

    @cached_property
    def loc(self) -> LocalizedRing:
        P = change_ring(self.P_int, fp_ring(self.p, self.base_names))
        return LocalizedRing(self.p, self.base_names, P)

    @property
    def has_pinv(self) -> bool:
        return not self.loc.trivial

    @property
    def coeff_names(self) -> Tuple[str, ...]:
        return self.base_names + ((PINV,) if self.has_pinv else ())

    @property
    def big_names(self) -> Tuple[str, ...]:
        return self.coeff_names + self.s_names[1:]

    @property
    def s_offset(self) -> int:
        return len(self.coeff_names)

    def base_ctx(self, m: int) -> RingContext:
        return RingContext(self.p, self.n, m, self.base_names)

    def coeff_ctx(self, m: int) -> RingContext:
        return RingContext(self.p, len(self.coeff_names), m, self.coeff_names)

    def big_ctx(self, m: int) -> RingContext:
        return RingContext(self.p, len(self.big_names), m, self.big_names)

    @property
    def parse_names(self) -> Tuple[str, ...]:
        return self.coeff_names + self.s_names

    # -- table --------------------------------------------------------------

    def _split_linear(self, poly, power: int, lineno_hint: str) -> Tuple[object, ...]:
        """Coefficients (as integer polynomials in the coefficient ring) of s_k^power in poly"""
        Rc = zz_ring(self.coeff_names)
        k0 = len(self.coeff_names)
        parts: List[Dict] = [dict() for _ in range(self.rank)]
        for monom, c in poly.iterterms():
            s_exps = monom[k0:]
            hit = [k for k, e in enumerate(s_exps) if e]
            if not hit:
                k = 0
            elif len(hit) == 1 and s_exps[hit[0]] == power:
                k = hit[0]
            else:
                raise PresentationError(f"{lineno_hint}: term is not linear in s^{power}")
            key = monom[:k0]
            parts[k][key] = parts[k].get(key, 0) + int(c)
        return tuple(Rc.from_dict(part) for part in parts)

    def _to_loc(self, coeff_int) -> LocalizedElem:
        """Integer polynomial in X (and Pinv) to a localized element"""
        loc = self.loc
        out = loc.zero()
        for monom, c in coeff_int.iterterms():
            c = int(c) % self.p
            if not c:
                continue
            base = monom[:self.n]
            e = monom[self.n] if self.has_pinv else 0
            out = loc.add(out, loc.make(loc.R.from_dict({base: c}), e))
        return out

    def _build_table(self):
        r = self.rank
        Rc = zz_ring(self.coeff_names)
        int_table = [[None] * r for _ in range(r)]
        for k in range(r):
            unit = tuple(Rc.one if t == k else Rc.zero for t in range(r))
            int_table[0][k] = unit
            int_table[k][0] = unit
        given = {}
        for (i, j), rhs in self.mul_lines.items():
            if not (1 <= i <= r and 1 <= j <= r):
                raise MalformedTable(f"mul s{i} s{j}: index outside 1..{r}")
            vec = self._split_linear(rhs, 1, f"mul s{i} s{j}")
            given[(i - 1, j - 1)] = vec
        for (i, j), vec in given.items():
            if i == 0 or j == 0:
                other = j if i == 0 else i
                expected = int_table[0][other]
                if tuple(reduce_coeffs(v, self.p) for v in vec) != tuple(reduce_coeffs(v, self.p) for v in expected):
                    raise MalformedTable(f"s1 must act as the unit, got mul s{i + 1} s{j + 1}")
                continue
            if (j, i) in given and given[(j, i)] != vec:
                raise MalformedTable(f"table is not commutative at s{i + 1} s{j + 1}")
            int_table[i][j] = vec
            int_table[j][i] = vec
        for i in range(1, r):
            for j in range(1, r):
                if int_table[i][j] is None:
                    raise MalformedTable(f"missing product mul s{i + 1} s{j + 1}")
        self.int_table = int_table
        return [[tuple(self._to_loc(c) for c in int_table[i][j]) for j in range(r)] for i in range(r)]

    def basis(self, k: int) -> Vector:
        loc = self.loc
        return tuple(loc.one() if t == k else loc.zero() for t in range(self.rank))

    def zero_vec(self) -> Vector:
        return tuple(self.loc.zero() for _ in range(self.rank))

    def mul_vec(self, u: Vector, v: Vector) -> Vector:
        loc = self.loc
        out = list(self.zero_vec())
        for i, ui in enumerate(u):
            if loc.is_zero(ui):
                continue
            for j, vj in enumerate(v):
                if loc.is_zero(vj):
                    continue
                prod = loc.mul(ui, vj)
                for k, t in enumerate(self.table[i][j]):
                    if not loc.is_zero(t):
                        out[k] = loc.add(out[k], loc.mul(prod, t))
        return tuple(out)

    def add_vec(self, u: Vector, v: Vector) -> Vector:
        return tuple(self.loc.add(a, b) for a, b in zip(u, v))

    def scale_vec(self, c: LocalizedElem, u: Vector) -> Vector:
        return tuple(self.loc.mul(c, a) for a in u)

    def pow_vec(self, u: Vector, k: int) -> Vector:
        out = self.basis(0)
        base = u
        while k:
            if k & 1:
                out = self.mul_vec(out, base)
            k >>= 1
            if k:
                base = self.mul_vec(base, base)
        return out

    def _validate_table(self):
        r = self.rank
        for i in range(1, r):
            for j in range(1, r):
                for k in range(1, r):
                    left = self.mul_vec(self.mul_vec(self.basis(i), self.basis(j)), self.basis(k))
                    right = self.mul_vec(self.basis(i), self.mul_vec(self.basis(j), self.basis(k)))
                    if left != right:
                        raise MalformedTable(f"table is not associative at s{i + 1} s{j + 1} s{k + 1}")

    # -- big ring -------------------------------------------------------------

    def s_monomial(self, exps: Tuple[int, ...]) -> Vector:
        if exps not in self._power_cache:
            out = self.basis(0)
            for k, e in enumerate(exps):
                if e:
                    out = self.mul_vec(out, self.pow_vec(self.basis(k + 1), e))
            self._power_cache[exps] = out
        return self._power_cache[exps]

    def from_big(self, poly) -> Vector:
        loc = self.loc
        off = self.s_offset
        out = self.zero_vec()
        for monom, c in poly.iterterms():
            c = int(c) % self.p
            if not c:
                continue
            e = monom[self.n] if self.has_pinv else 0
            coeff = loc.make(loc.R.from_dict({monom[:self.n]: c}), e)
            out = self.add_vec(out, self.scale_vec(coeff, self.s_monomial(tuple(monom[off:]))))
        return out

    def loc_to_poly(self, a: LocalizedElem, names: Tuple[str, ...]):
        """num * Pinv^e as an F_p polynomial in a ring whose first variables are the coefficient names"""
        R = fp_ring(self.p, names)
        out = {}
        for monom, c in a.num.iterterms():
            key = list(monom) + [0] * (len(names) - self.n)
            if self.has_pinv:
                key[self.n] = a.e
            out[tuple(key)] = int(c) % self.p
        return R.from_dict(out)

    def to_big(self, vec: Vector):
        R = fp_ring(self.p, self.big_names)
        out = R.zero
        for k, a in enumerate(vec):
            if self.loc.is_zero(a):
                continue
            term = self.loc_to_poly(a, self.big_names)
            if k:
                term = term * R.gens[self.s_offset + k - 1]
            out += term
        return out

    def normalize(self, poly):
        return self.to_big(self.from_big(poly))

    def normalize_witt(self, w: WittVec) -> WittVec:
        return WittVec(w.ctx, tuple(self.normalize(c) for c in w.coords))

    def s_power_poly(self, k: int, e: int):
        """Normal form of s_k^e (0-based k) in the big ring"""
        return self.to_big(self.pow_vec(self.basis(k), e))

    # -- integer lifts ------------------------------------------------------------

    def _int_mul(self, u, v):
        Rc = zz_ring(self.coeff_names)
        out = [Rc.zero] * self.rank
        for i, ui in enumerate(u):
            if not ui:
                continue
            for j, vj in enumerate(v):
                if not vj:
                    continue
                prod = ui * vj
                for k, t in enumerate(self.int_table[i][j]):
                    if t:
                        out[k] += prod * t
        return tuple(out)

    def _int_s_monomial(self, exps):
        if exps not in self._int_power_cache:
            Rc = zz_ring(self.coeff_names)
            out = tuple(Rc.one if k == 0 else Rc.zero for k in range(self.rank))
            for k, e in enumerate(exps):
                basis = tuple(Rc.one if t == k + 1 else Rc.zero for t in range(self.rank))
                for _ in range(e):
                    out = self._int_mul(out, basis)
            self._int_power_cache[exps] = out
        return self._int_power_cache[exps]

    def lifted_relations(self) -> List:
        Rb = zz_ring(self.big_names)
        gens = dict(zip(self.big_names, Rb.gens))
        off = self.s_offset
        rels = []

        def lift_coeff(c):
            return change_ring(c, Rb, list(range(len(self.coeff_names))))

        for i in range(1, self.rank):
            for j in range(i, self.rank):
                rel = gens[self.s_names[i]] * gens[self.s_names[j]]
                for k, c in enumerate(self.int_table[i][j]):
                    basis = Rb.one if k == 0 else Rb.gens[off + k - 1]
                    rel -= lift_coeff(c) * basis
                rels.append(rel)
        if self.has_pinv:
            P_big = change_ring(self.P_int, Rb, list(range(self.n)))
            rels.append(P_big * gens[PINV] - 1)
        return rels

    def is_zero_lifted(self, poly, precision: int) -> bool:
        """poly vanishes in the lifted algebra modulo p^precision"""
        Rc = zz_ring(self.coeff_names)
        Rbase = zz_ring(self.base_names)
        off = self.s_offset
        vec = [Rc.zero] * self.rank
        for monom, c in poly.iterterms():
            coeff = Rc.from_dict({monom[:off]: int(c)})
            s_vec = self._int_s_monomial(tuple(monom[off:]))
            for k, t in enumerate(s_vec):
                if t:
                    vec[k] += coeff * t
        modulus = self.p ** precision
        for C in vec:
            if not C:
                continue
            top = max(monom[self.n] for monom in C.itermonoms()) if self.has_pinv else 0
            total = Rbase.zero
            for monom, c in C.iterterms():
                e = monom[self.n] if self.has_pinv else 0
                total += Rbase.from_dict({monom[:self.n]: int(c)}) * self.P_int ** (top - e)
            if reduce_coeffs(total, modulus):
                return False
        return True

    def big_lift(self, precision: Optional[int] = None) -> FrobLift:
        """Frobenius lift on the big ring: lift lines, canonical on unnamed generators, 1/F(P) on Pinv"""
        N = max(precision or 0, self.precision or 0, 1)
        Rb = zz_ring(self.big_names)
        images = []
        for name, gen in zip(self.big_names, Rb.gens):
            if name == PINV:
                continue
            if name in self.lift_lines:
                images.append(change_ring(self.lift_lines[name], Rb))
            else:
                images.append(gen ** self.p)
        if self.has_pinv:
            base_images = images[:self.n]
            P_big = change_ring(self.P_int, Rb, list(range(self.n)))
            F_P = substitute(P_big, base_images, Rb)
            delta = F_P - P_big ** self.p
            delta = Rb.from_dict({m_: int(c) // self.p for m_, c in delta.iterterms()})
            pinv = Rb.gens[self.n]
            series = Rb.zero
            for k in range(N):
                series += (-self.p * delta) ** k * pinv ** (self.p * (k + 1))
            images.insert(self.n, reduce_coeffs(series, self.p ** N))
        ctx = RingContext(self.p, len(self.big_names), N, self.big_names)
        return FrobLift(ctx, N, tuple(images))

    # -- text -------------------------------------------------------------------

    def text(self) -> str:
        lines = ['# wdrw-format 1', f"etale p={self.p} n={self.n} rank={self.rank} P={self.P_text}"]
        for (i, j), rhs in sorted(self.mul_lines.items()):
            lines.append(f"mul s{i} s{j} = {format_polynomial(rhs)}")
        for i, rhs in sorted(self.frob_lines.items()):
            lines.append(f"frob s{i} = {format_polynomial(rhs)}")
        for name, rhs in self.lift_lines.items():
            lines.append(f"lift {name} -> {format_polynomial(rhs)}")
        if self.precision is not None:
            lines.append(f"precision {self.precision}")
        return '\n'.join(lines) + '\n'


def parse_presentation(text: str) -> EtalePresentation:
    header = None
    mul_raw, frob_raw, lift_raw = [], [], []
    precision = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        version = FORMAT_LINE.match(line)
        if version:
            if version.group(1) != '1':
                raise PresentationError(f"unsupported wdrw-format {version.group(1)}")
            continue
        if line.startswith('#'):
            continue
        match = HEADER_LINE.match(line)
        if match:
            header = (int(match.group(1)), int(match.group(2)), int(match.group(3)), match.group(4).strip())
            continue
        if header is None:
            raise PresentationError(f"line {lineno}: expected the 'etale p=.. n=.. rank=.. P=..' header first")
        for pattern, bucket in ((MUL_LINE, mul_raw), (FROB_LINE, frob_raw), (LIFT_LINE, lift_raw)):
            match = pattern.match(line)
            if match:
                bucket.append((lineno, match.groups()))
                break
        else:
            match = PRECISION_LINE.match(line)
            if not match:
                raise PresentationError(f"line {lineno}: cannot parse {line!r}", {'line': lineno})
            precision = int(match.group(1))
    if header is None:
        raise PresentationError("missing 'etale' header line")
    p, n, rank, P_text = header
    if rank < 1:
        raise PresentationError("rank must be at least 1")
    coeff_names, big_names, parse_names = variable_names(n, rank, P_text)
    parse_ring = zz_ring(parse_names)
    big_ring = zz_ring(big_names)
    mul_lines, frob_lines, lift_lines = {}, {}, {}
    try:
        for lineno, (i, j, rhs) in mul_raw:
            mul_lines[(int(i), int(j))] = parse_polynomial(rhs, parse_ring)
        for lineno, (i, rhs) in frob_raw:
            frob_lines[int(i)] = parse_polynomial(rhs, parse_ring)
        for lineno, (name, rhs) in lift_raw:
            if name not in big_names or name == PINV:
                raise PresentationError(f"line {lineno}: no lift can be given for {name}")
            lift_lines[name] = parse_polynomial(rhs, big_ring)
    except PresentationError:
        raise
    except Exception as exc:
        raise PresentationError(f"cannot parse presentation: {exc}")
    return EtalePresentation(p, n, rank, P_text, mul_lines, frob_lines, lift_lines, precision)


def trivial_presentation(p: int, n: int) -> EtalePresentation:
    return EtalePresentation(p, n, 1, '1', {})


def artin_schreier_text(p: int = 2) -> str:
    """F_p[X1][Y]/(Y^p - Y - X1) on the basis s_k = Y^(k-1).

    For p = 2 a compatible lift is attached: G(X1) = 4X1^3 - 3X1^2 and
    G(Y) = Y^2 - 2X1*Y, which satisfy G(Y)^2 - G(Y) = G(X1) exactly.
    """
    lines = ['# wdrw-format 1', f"etale p={p} n=1 rank={p} P=1"]
    for i in range(1, p):
        for j in range(i, p):
            k = i + j
            if k < p:
                rhs = f"s{k + 1}"
            else:
                rhs = f"s{k - p + 2} + X1*s{k - p + 1}"
            lines.append(f"mul s{i + 1} s{j + 1} = {rhs}")
    if p == 2:
        lines.append('lift X1 -> 4*X1^3 - 3*X1^2')
        lines.append('lift s2 -> s2^2 - 2*X1*s2')
        lines.append('precision 4')
    return '\n'.join(lines) + '\n'


def artin_schreier_presentation(p: int = 2) -> EtalePresentation:
    return parse_presentation(artin_schreier_text(p))


def nilpotent_presentation(p: int = 2) -> EtalePresentation:
    """F_p[X1][s]/(s^2): finite free but not relatively perfect"""
    return parse_presentation(f"# wdrw-format 1\netale p={p} n=1 rank=2 P=1\nmul s2 s2 = 0\n")


# -- relative perfectness ---------------------------------------------------------

def _det(loc: LocalizedRing, M: Matrix) -> LocalizedElem:
    size = len(M)
    if size == 0:
        return loc.one()
    if size == 1:
        return M[0][0]
    total = loc.zero()
    for j in range(size):
        if loc.is_zero(M[0][j]):
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = loc.mul(M[0][j], _det(loc, minor))
        total = loc.add(total, term if j % 2 == 0 else loc.neg(term))
    return total


def _inverse(loc: LocalizedRing, M: Matrix, det: LocalizedElem) -> Matrix:
    size = len(M)
    inv_det = loc.inverse(det)
    out = [[loc.zero()] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            minor = [row[:i] + row[i + 1:] for k, row in enumerate(M) if k != j]
            cof = _det(loc, minor)
            if (i + j) % 2:
                cof = loc.neg(cof)
            out[i][j] = loc.mul(cof, inv_det)
    return out


def check_relatively_perfect(pres: EtalePresentation) -> RelPerfectReport:
    """Is (s_j^p) a basis? U0 expresses s_i = sum_j U0[i][j] s_j^p"""
    cached = getattr(pres, '_relperfect', None)
    if cached is not None:
        return cached
    loc = pres.loc
    rows = [list(pres.pow_vec(pres.basis(j), pres.p)) for j in range(pres.rank)]
    det = _det(loc, rows)
    if not loc.is_unit(det):
        witness = f"det of the s_j^{pres.p} matrix is {loc.text(det)}, not a unit"
        report = RelPerfectReport(False, rows, det, None, witness)
    else:
        U0 = _inverse(loc, rows, det)
        report = RelPerfectReport(True, rows, det, U0, '')
    for i, rhs in pres.frob_lines.items():
        coeffs = pres._split_linear(rhs, pres.p, f"frob s{i}")
        combo = pres.zero_vec()
        for j, c in enumerate(coeffs):
            combo = pres.add_vec(combo, pres.scale_vec(pres._to_loc(c), pres.pow_vec(pres.basis(j), pres.p)))
        if combo != pres.basis(i - 1):
            raise MalformedTable(f"frob line for s{i} does not reproduce s{i}")
    pres._relperfect = report
    return report


def _require_perfect(pres: EtalePresentation) -> RelPerfectReport:
    report = check_relatively_perfect(pres)
    if not report.ok:
        raise NotRelativelyPerfect(report.witness)
    return report


def frobenius_twist(loc: LocalizedRing, M: Matrix, t: int) -> Matrix:
    return [[loc.frob(a, t) for a in row] for row in M]


def matmul(loc: LocalizedRing, A: Matrix, B: Matrix) -> Matrix:
    size = len(A)
    out = []
    for i in range(size):
        row = []
        for j in range(size):
            acc = loc.zero()
            for k in range(size):
                acc = loc.add(acc, loc.mul(A[i][k], B[k][j]))
            row.append(acc)
        out.append(row)
    return out


def identity(loc: LocalizedRing, size: int) -> Matrix:
    return [[loc.one() if i == j else loc.zero() for j in range(size)] for i in range(size)]


def witt_basis_decompose(w: WittVec, pres: EtalePresentation, shift: int = 0) -> Tuple[WittVec, ...]:
    """Coefficients r(i) in W_m(R) with w = sum_i r(i) [s_i^(p^shift)]"""
    report = _require_perfect(pres)
    loc = pres.loc
    p, m, r = pres.p, w.ctx.m, pres.rank
    big = w.ctx
    current = pres.normalize_witt(w)
    prefix = identity(loc, r)
    for t in range(shift):
        prefix = matmul(loc, prefix, frobenius_twist(loc, report.U0, t))
    coeffs = [[None] * m for _ in range(r)]
    coeff_names = pres.coeff_names
    for l in range(m):
        rho = pres.from_big(current.coords[l])
        if any(not loc.is_zero(a) for a in rho):
            c = []
            for i in range(r):
                acc = loc.zero()
                for k in range(r):
                    acc = loc.add(acc, loc.mul(prefix[k][i], rho[k]))
                c.append(acc)
            correction = witt_zero(big)
            for i, ci in enumerate(c):
                coeffs[i][l] = ci
                if loc.is_zero(ci):
                    continue
                value = pres.to_big(pres.scale_vec(ci, pres.pow_vec(pres.basis(i), p ** (shift + l))))
                piece = verschiebung_power(teichmuller(value, big.with_length(m - l)), l)
                correction = witt_add(correction, piece)
            current = pres.normalize_witt(witt_sub(current, correction))
        prefix = matmul(loc, prefix, frobenius_twist(loc, report.U0, shift + l))
    if not current.is_zero():
        raise NotRelativelyPerfect("Witt basis decomposition left a nonzero remainder")
    target = pres.coeff_ctx(m)
    out = []
    for i in range(r):
        coords = tuple(
            pres.loc_to_poly(c, coeff_names) if c is not None else target.fp.zero for c in coeffs[i]
        )
        out.append(WittVec(target, coords))
    return tuple(out)


def coeff_to_big(x: WittVec, pres: EtalePresentation) -> WittVec:
    big = pres.big_ctx(x.ctx.m)
    index_map = list(range(len(pres.coeff_names)))
    return WittVec(big, tuple(change_ring(c, big.fp, index_map) for c in x.coords))


def witt_basis_recompose(parts: Sequence[WittVec], pres: EtalePresentation, shift: int = 0) -> WittVec:
    m = parts[0].ctx.m
    big = pres.big_ctx(m)
    total = witt_zero(big)
    for i, part in enumerate(parts):
        s_pow = pres.s_power_poly(i, pres.p ** shift)
        total = witt_add(total, witt_mul(coeff_to_big(part, pres), teichmuller(s_pow, big)))
    return pres.normalize_witt(total)


# -- constants -----------------------------------------------------------------------

@dataclass
class ConstantsReport:
    radii: Dict[str, Fraction]
    C: Fraction
    D: Fraction
    E: Fraction
    E_basis: Fraction
    delta: Optional[Fraction]

    def radii_vector(self, names: Sequence[str]) -> Tuple[Fraction, ...]:
        return tuple(self.radii[name] for name in names)


def compute_constants(pres: EtalePresentation, seed=None) -> ConstantsReport:
    """C, D, E and the threshold delta.

    Radii are 1 on X (or the seed) and the largest table degree d on s2..sr.
    C is -v_b of the preimage of 1, D = -min v_b(U0 entries) / (p - 1) and
    E_basis = d for rank at least two.
    """
    report = _require_perfect(pres)
    d = 1
    for i in range(pres.rank):
        for j in range(pres.rank):
            for c in pres.int_table[i][j]:
                d = max(d, total_degree(c))
    radii = {}
    for name in pres.base_names:
        radii[name] = Fraction(seed) if seed is not None else Fraction(1)
    if pres.has_pinv:
        radii[PINV] = Fraction(1)
    for name in pres.s_names[1:]:
        radii[name] = Fraction(d)
    b = tuple(radii[name] for name in pres.big_names)
    lowest = Fraction(0)
    for row in report.U0:
        for a in row:
            if pres.loc.is_zero(a):
                continue
            lowest = min(lowest, pseudoval.v_weighted(pres.loc_to_poly(a, pres.big_names), b))
    # preimage of 1 in the span of the lifted basis; s1 = 1 is the constant of the big ring
    unit = pres.to_big(pres.basis(0))
    C = max(Fraction(0), -pseudoval.v_weighted(unit, b))
    D = max(Fraction(0), -lowest / (pres.p - 1))
    E_basis = Fraction(d) if pres.rank >= 2 else Fraction(0)
    E = C + D
    candidates = []
    if C + D > 0:
        candidates.append(1 / (2 * (C + D)))
    if C + D + E_basis > 0:
        candidates.append(1 / (C + D + E_basis))
    delta = min(candidates) if candidates else None
    return ConstantsReport(radii, C, D, E, E_basis, delta)


def certify_witt_basis(w: WittVec, parts: Sequence[WittVec], pres: EtalePresentation,
                       constants: ConstantsReport, eps_grid: Sequence) -> Dict[Fraction, bool]:
    """gamma(r(i)) >= gamma(w) - eps*E on each grid eps up to delta (lower bounds from normal forms)"""
    big_b = constants.radii_vector(pres.big_names)
    coeff_b = constants.radii_vector(pres.coeff_names)
    out = {}
    for eps in eps_grid:
        eps = Fraction(eps)
        if constants.delta is not None and eps > constants.delta:
            continue
        rhs = pseudoval.gamma(pres.normalize_witt(w), eps, big_b, presentation=pres).value - eps * constants.E
        out[eps] = all(pseudoval.gamma(part, eps, coeff_b, presentation=pres).value >= rhs for part in parts)
    return out


# -- overconvergent Witt vectors ---------------------------------------------------------

@dataclass
class OverconvWittResult:
    p: int
    level: int
    h: Dict[Tuple[Fraction, ...], object]
    recomposes: bool
    divisibility_ok: bool
    eps_certified: Optional[Fraction]
    delta: Optional[Fraction]
    gamma_checks: Dict[Fraction, bool] = field(default_factory=dict)

    def sorted_items(self):
        return sorted(self.h.items(), key=lambda kv: (WeightFn(self.p, kv[0]).u, kv[0]))


def _e_weight_witt(a: Tuple[Fraction, ...], ctx: RingContext) -> WittVec:
    """Witt vector e(1, a, {}) = V^u [Z^(p^u a)] over a polynomial ring"""
    weight = WeightFn(ctx.p, a)
    u = weight.u
    if u >= ctx.m:
        return witt_zero(ctx)
    exps = weight.scaled(ctx.p ** u).as_ints()
    mono = ctx.fp.from_dict({tuple(exps): 1})
    return verschiebung_power(teichmuller(mono, ctx.with_length(ctx.m - u)), u)


def _summand(h_a, a, lift: FrobLift, ctx: RingContext) -> WittVec:
    return witt_mul(t_F(lift, h_a, ctx.m), _e_weight_witt(a, ctx))


def _required_power(a: Tuple[Fraction, ...], depth: int, p: int) -> int:
    if not any(a):
        return depth
    return max(depth + min(vp_fraction(x, p) for x in a if x), 0)


def overconv_witt_decompose(w: WittVec, pres: EtalePresentation, eta=Fraction(1, 4),
                            eps_grid: Sequence = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)),
                            lift: Optional[FrobLift] = None) -> OverconvWittResult:
    """h_a with w = W(phi)(sum_a t_F(h_a) e(1, a, {})), a in [0,1)^N over the big ring.

    The gamma bound is only checked for grid eps up to delta; eps_certified is
    None when no grid value qualifies or the smallest one fails.

    Level l contributes p^(l - u(a)) * c Z^floor(beta / p^l) to h_a for each term
    c Z^beta of the l-th normalised coordinate, with a = (beta mod p^l) / p^l.
    """
    _require_perfect(pres)
    ctx = w.ctx
    p, m = pres.p, ctx.m
    lift = lift or pres.big_lift(m)
    Rz = zz_ring(pres.big_names)
    target = pres.normalize_witt(w)
    current = target
    h: Dict[Tuple[Fraction, ...], object] = {}
    with PerformanceTimer('overconv_witt_decompose', logger, prime=p, level_m=m):
        for l in range(m):
            rho = current.coords[l]
            if not rho:
                continue
            correction = witt_zero(ctx)
            for monom, c in rho.iterterms():
                c = int(c) % p
                if not c:
                    continue
                a = tuple(Fraction(e % p ** l, p ** l) for e in monom)
                floor_exps = tuple(e // p ** l for e in monom)
                u = WeightFn(p, a).u
                piece = Rz.from_dict({floor_exps: c * p ** (l - u)})
                h[a] = h.get(a, Rz.zero) + piece
                correction = witt_add(correction, _summand(piece, a, lift, ctx))
            current = pres.normalize_witt(witt_sub(current, correction))
            logger.debug("witt level reduced", extra={'step': l, 'term_count': len(h)})
    h = {a: reduce_coeffs(v, p ** m) for a, v in h.items()}
    h = {a: v for a, v in h.items() if v}

    total = witt_zero(ctx)
    summands = {}
    for a, h_a in h.items():
        summands[a] = pres.normalize_witt(_summand(h_a, a, lift, ctx))
        total = witt_add(total, summands[a])
    recomposes = pres.normalize_witt(total) == target

    depth = vV(target)
    divisibility_ok = True
    if depth != float('inf'):
        for a, h_a in h.items():
            need = min(_required_power(a, depth, p), m)
            if any(int(c) % p ** need for c in h_a.coeffs()):
                divisibility_ok = False

    constants = compute_constants(pres)
    b = constants.radii_vector(pres.big_names)
    grid = sorted(Fraction(e) for e in eps_grid)
    if constants.delta is not None:
        grid = [eps for eps in grid if eps <= constants.delta]
    if not grid:
        logger.info("no grid eps at or below delta", extra={'prime': p, 'level_m': m})
    checks = {}
    for eps in grid:
        floor = pseudoval.gamma(target, eps, b, presentation=pres).value - Fraction(eta)
        checks[eps] = all(
            pseudoval.gamma(s, eps, b, presentation=pres).value >= floor for s in summands.values()
        )
    certified = None
    for eps in sorted(checks):
        if not checks[eps]:
            break
        certified = eps
    return OverconvWittResult(p, m, h, recomposes, divisibility_ok, certified, constants.delta, checks)
