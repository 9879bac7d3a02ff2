"""
Sparse polynomial rings over ZZ and F_p (sympy PolyRing) shared by the engines.

Rings are cached per (domain, variable names) so that elements created in
different modules compare and combine directly.
"""
from functools import lru_cache
from typing import Dict, Iterable, Tuple

from sympy import sympify
from sympy.polys.domains import ZZ, GF
from sympy.polys.rings import PolyRing

from modules.errors import ConfigError

Monom = Tuple[int, ...]


@lru_cache(maxsize=None)
def zz_ring(names: Tuple[str, ...]) -> PolyRing:
    return PolyRing(",".join(names), ZZ)


@lru_cache(maxsize=None)
def fp_ring(p: int, names: Tuple[str, ...]) -> PolyRing:
    return PolyRing(",".join(names), GF(p))


def default_names(n: int, prefix: str = 'X') -> Tuple[str, ...]:
    return tuple(f"{prefix}{i + 1}" for i in range(n))


def fp_coeff(c, p: int) -> int:
    """Least nonnegative residue of a GF(p) (or integer) coefficient"""
    return int(c) % p


def fp_items(P, p: int) -> Iterable[Tuple[Monom, int]]:
    for monom, c in P.iterterms():
        yield monom, fp_coeff(c, p)


def lift_to_zz(P, p: int, Rz: PolyRing):
    """Canonical integer lift of an F_p polynomial (coefficients in 0..p-1)"""
    return Rz.from_dict({monom: c for monom, c in fp_items(P, p)})


def reduce_to_fp(P, Rf: PolyRing):
    p = Rf.domain.characteristic()
    return Rf.from_dict({monom: int(c) % p for monom, c in P.iterterms() if int(c) % p})


def reduce_coeffs(P, modulus: int):
    """Reduce integer coefficients into 0..modulus-1, dropping zeros"""
    return P.ring.from_dict({monom: int(c) % modulus for monom, c in P.iterterms() if int(c) % modulus})


def monomial(R: PolyRing, exps: Monom, coeff: int = 1):
    return R.from_dict({tuple(exps): coeff})


def from_terms(R: PolyRing, terms: Dict[Monom, int]):
    return R.from_dict({tuple(m): c for m, c in terms.items()})


def exact_div_int(P, d: int):
    """Divide every integer coefficient by d, returning None when some division is not exact"""
    out = {}
    for monom, c in P.iterterms():
        q, r = divmod(int(c), d)
        if r:
            return None
        out[monom] = q
    return P.ring.from_dict(out)


def total_degree(P) -> int:
    if not P:
        return -1
    return max(sum(monom) for monom in P.itermonoms())


def change_ring(P, R: PolyRing, index_map=None):
    """Move P into R, sending variable j of P's ring to variable index_map[j] of R.

    Integer coefficients are converted through the target domain, so a ZZ
    polynomial moved into a GF(p) ring is reduced mod p.
    """
    src_n = P.ring.ngens
    index_map = index_map if index_map is not None else list(range(src_n))
    out = {}
    for monom, c in P.iterterms():
        target = [0] * R.ngens
        for j, e in enumerate(monom):
            if e:
                if index_map[j] is None:
                    raise ConfigError(f"variable {P.ring.symbols[j]} has no image in {R.symbols}")
                target[index_map[j]] += e
        key = tuple(target)
        out[key] = out.get(key, 0) + int(c)
    return R.from_dict(out)


def parse_polynomial(text: str, R: PolyRing):
    """Parse '3*X1^2 + X2' style text into R (^ and ** both accepted)"""
    text = (text or '').strip()
    if not text:
        raise ConfigError("empty polynomial")
    known = {str(s) for s in R.symbols}
    try:
        expr = sympify(text.replace('^', '**'), locals={str(s): s for s in R.symbols})
    except Exception as exc:
        raise ConfigError(f"cannot parse polynomial {text!r}: {exc}")
    unknown = {str(s) for s in expr.free_symbols} - known
    if unknown:
        raise ConfigError(f"unknown variables {sorted(unknown)} in {text!r}; ring has {sorted(known)}")
    try:
        return R.from_expr(expr)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{text!r} is not a polynomial over {R.domain}: {exc}")


def format_polynomial(P, p: int = 0) -> str:
    """Deterministic text form: terms by descending total degree then exponent, '^' powers, '*' products"""
    if not P:
        return '0'
    names = [str(s) for s in P.ring.symbols]
    items = []
    for monom, c in P.iterterms():
        c = int(c) % p if p else int(c)
        if c:
            items.append((monom, c))
    items.sort(key=lambda mc: (-sum(mc[0]), tuple(-e for e in mc[0])))
    parts = []
    for monom, c in items:
        factors = []
        for name, e in zip(names, monom):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        if not factors:
            parts.append(str(c))
        elif c == 1:
            parts.append('*'.join(factors))
        elif c == -1:
            parts.append('-' + '*'.join(factors))
        else:
            parts.append(f"{c}*" + '*'.join(factors))
    text = ' + '.join(parts)
    return text.replace('+ -', '- ') if parts else '0'


def substitute(P, images, R: PolyRing):
    """Image of P under the ring map sending variable j to images[j] (elements of R)"""
    out = R.zero
    for monom, c in P.iterterms():
        term = R(int(c))
        for img, e in zip(images, monom):
            if e:
                term *= img ** e
        out += term
    return out
