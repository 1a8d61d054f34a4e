"""Dirichlet characters with exact root-of-unity values.

The unit group mod q is decomposed into cyclic components (one per odd
prime power, the 2-part split as {-1} x <5> for 8 | q).  A character is an
exponent tuple against the component generators, and its value at n is the
exact rational angle  sum_i e_i * dlog_i(n) / d_i  (mod 1).  Keeping angles
as Fractions makes orthogonality and multiplicativity checks exact; floats
only appear when a value is rendered to complex.

Canonical order: characters are enumerated lexicographically by exponent
tuple, so the principal character is always index 0, and `char:q:index`
round-trips through mixed-radix encoding without enumerating.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
import itertools

import numpy as np

from .errors import PreconditionError

MAX_MODULUS = 10**4


def _factorize_small(q: int) -> list[tuple[int, int]]:
    out = []
    m = q
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1
    if m > 1:
        out.append((m, 1))
    return out


def _primitive_root_odd(p: int, e: int) -> int:
    """Primitive root mod p**e for odd p."""
    phi = p - 1
    fac = [f for f, _ in _factorize_small(phi)]
    g = 2
    while True:
        if all(pow(g, phi // f, p) != 1 for f in fac):
            break
        g += 1
    if e == 1:
        return g
    # g stays primitive mod p**e iff g^(p-1) != 1 mod p^2
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


def _crt_lift(residue: int, pe: int, q: int) -> int:
    """x == residue mod pe, x == 1 mod q/pe."""
    rest = q // pe
    if rest == 1:
        return residue % q
    inv = pow(pe, -1, rest)
    # x = residue + pe * k with k == (1 - residue) * pe^{-1} mod rest
    k = ((1 - residue) * inv) % rest
    return (residue + pe * k) % q


class UnitGroupStructure:
    """Cyclic decomposition of (Z/qZ)* with discrete-log tables."""

    def __init__(self, q: int):
        if not 1 <= q <= MAX_MODULUS:
            raise PreconditionError(f"modulus must be in [1, {MAX_MODULUS}], got {q}")
        self.q = q
        gens: list[int] = []
        orders: list[int] = []
        for p, e in _factorize_small(q):
            pe = p**e
            if p == 2:
                if e == 2:
                    gens.append(_crt_lift(3, 4, q))
                    orders.append(2)
                elif e >= 3:
                    gens.append(_crt_lift(pe - 1, pe, q))
                    orders.append(2)
                    gens.append(_crt_lift(5, pe, q))
                    orders.append(2 ** (e - 2))
                # e == 1: trivial 2-part
            else:
                g = _primitive_root_odd(p, e)
                gens.append(_crt_lift(g, pe, q))
                orders.append(pe // p * (p - 1))
        self.generators = tuple(gens)
        self.orders = tuple(orders)
        self.phi = 1
        for d in orders:
            self.phi *= d

        # dlog[a] = exponent tuple of unit a; built by walking the product.
        dlog: dict[int, tuple[int, ...]] = {1 % q: ()}
        for g, d in zip(gens, orders):
            nxt = {}
            gp = 1
            for j in range(d):
                for u, t in dlog.items():
                    nxt[(u * gp) % q] = t + (j,)
                gp = (gp * g) % q
            dlog = nxt
        assert len(dlog) == self.phi, f"unit group mod {q}: got {len(dlog)} of {self.phi}"
        self.dlog = dlog
        self.units = np.array(sorted(dlog), dtype=np.int64)
        # unit_index[a] = position of a in self.units, -1 for non-units
        idx = np.full(max(q, 1), -1, dtype=np.int64)
        idx[self.units] = np.arange(len(self.units))
        self.unit_index = idx
        # exponent matrix aligned with self.units, shape (phi, k)
        k = len(gens)
        self.exponents = np.array(
            [dlog[int(u)] for u in self.units], dtype=np.int64
        ).reshape(self.phi, k)

    def __repr__(self):
        return f"UnitGroupStructure(q={self.q}, orders={self.orders})"


@lru_cache(maxsize=None)
def unit_group(q: int) -> UnitGroupStructure:
    return UnitGroupStructure(q)


@dataclass(frozen=True)
class DirichletCharacter:
    """Character mod q given by exponents against unit_group(q).generators."""

    q: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        G = unit_group(self.q)
        if len(self.exponents) != len(G.orders) or any(
            not 0 <= e < d for e, d in zip(self.exponents, G.orders)
        ):
            raise PreconditionError(
                f"exponents {self.exponents} invalid for unit group orders {G.orders}"
            )

    @property
    def index(self) -> int:
        """Position in the canonical (lexicographic) enumeration."""
        i = 0
        for e, d in zip(self.exponents, unit_group(self.q).orders):
            i = i * d + e
        return i

    @property
    def serial(self) -> str:
        return f"char:{self.q}:{self.index}"

    def angle(self, n: int) -> Fraction | None:
        """Exact angle a/b with chi(n) = e^(2*pi*i*a/b); None when chi(n)=0."""
        if n < 0:
            raise PreconditionError("character argument must be >= 0")
        G = unit_group(self.q)
        a = n % self.q if self.q > 1 else 0
        t = G.dlog.get(a)
        if t is None:
            return None
        total = Fraction(0)
        for e, b, d in zip(self.exponents, t, G.orders):
            total += Fraction(e * b, d)
        return total % 1

    def __call__(self, n: int) -> complex:
        a = self.angle(n)
        if a is None:
            return 0j
        return _root_of_unity(a)

    def is_principal(self) -> bool:
        return all(e == 0 for e in self.exponents)

    def order(self) -> int:
        out = 1
        for e, d in zip(self.exponents, unit_group(self.q).orders):
            out = out * (d // gcd(d, e)) // gcd(out, d // gcd(d, e))
        return out

    def is_real(self) -> bool:
        return self.order() <= 2

    def conjugate(self) -> "DirichletCharacter":
        G = unit_group(self.q)
        return DirichletCharacter(
            self.q, tuple((-e) % d for e, d in zip(self.exponents, G.orders))
        )


@lru_cache(maxsize=4096)
def _root_of_unity(a: Fraction) -> complex:
    return cmath.exp(2j * cmath.pi * (a.numerator / a.denominator))


def enumerate_characters(q: int) -> list[DirichletCharacter]:
    """All phi(q) characters mod q, principal first, lexicographic exponents."""
    G = unit_group(q)
    return [
        DirichletCharacter(q, t)
        for t in itertools.product(*(range(d) for d in G.orders))
    ]


def character_by_index(q: int, index: int) -> DirichletCharacter:
    G = unit_group(q)
    if not 0 <= index < G.phi:
        raise PreconditionError(f"character index must be in [0, {G.phi}), got {index}")
    exps = []
    for d in reversed(G.orders):
        exps.append(index % d)
        index //= d
    return DirichletCharacter(q, tuple(reversed(exps)))


@lru_cache(maxsize=512)
def character_row(chi: DirichletCharacter) -> np.ndarray:
    """chi at residues 0..q-1 as complex128 (read-only)."""
    q = chi.q
    row = np.zeros(max(q, 1), dtype=np.complex128)
    G = unit_group(q)
    for u in G.units:
        row[int(u)] = chi(int(u))
    if q == 1:
        row[0] = 1.0
    row.flags.writeable = False
    return row


def divisors(q: int) -> list[int]:
    out = [1]
    for p, e in _factorize_small(q):
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


@lru_cache(maxsize=None)
def conductor(chi: DirichletCharacter) -> int:
    """Smallest d | q through which chi factors.

    Brute force over divisors: chi factors through d iff it kills every
    unit u == 1 (mod d).
    """
    q = chi.q
    G = unit_group(q)
    for d in divisors(q):
        ok = True
        for u in G.units:
            if (int(u) - 1) % d == 0 and chi.angle(int(u)) != 0:
                ok = False
                break
        if ok:
            return d
    return q  # unreachable: d = q always works


def is_primitive(chi: DirichletCharacter) -> bool:
    return conductor(chi) == chi.q


def induce(psi: DirichletCharacter, q: int) -> DirichletCharacter:
    """The character mod q agreeing with psi (mod r) on units; needs r | q."""
    r = psi.q
    if q % r != 0:
        raise PreconditionError(f"cannot induce mod {q}: {r} does not divide {q}")
    G = unit_group(q)
    exps = []
    for g, d in zip(G.generators, G.orders):
        a = psi.angle(g % r if r > 1 else 1)
        assert a is not None  # gcd(g, q) = 1 and r | q force gcd(g, r) = 1
        e = a * d
        assert e.denominator == 1, "induced exponent not integral"
        exps.append(int(e) % d)
    return DirichletCharacter(q, tuple(exps))


def primitive_part(chi: DirichletCharacter) -> DirichletCharacter:
    """The primitive character inducing chi."""
    q = chi.q
    d = conductor(chi)
    Gd = unit_group(d)
    exps = []
    for h, m in zip(Gd.generators, Gd.orders):
        # lift h to a unit mod q in the same class mod d
        n = h
        while gcd(n, q) != 1:
            n += d
        a = chi.angle(n)
        assert a is not None
        e = a * m
        assert e.denominator == 1, "primitive part exponent not integral"
        exps.append(int(e) % m)
    return DirichletCharacter(d, tuple(exps))


def orthogonality_row_sum(q: int, a: int, b: int) -> int:
    """sum over chi mod q of chi(a)*conj(chi(b)), exactly.

    Componentwise each factor is a full geometric sum of d-th roots of
    unity, which is d when the exponent difference vanishes and 0 else, so
    the whole sum is an integer computed without floats.
    """
    G = unit_group(q)
    ta = G.dlog.get(a % q if q > 1 else 0)
    tb = G.dlog.get(b % q if q > 1 else 0)
    if ta is None or tb is None:
        raise PreconditionError("orthogonality_row_sum needs units a, b")
    out = 1
    for x, y, d in zip(ta, tb, G.orders):
        if (x - y) % d != 0:
            return 0
        out *= d
    return out


def orthogonality_column_sum(chi: DirichletCharacter, rho: DirichletCharacter) -> int:
    """sum over units a mod q of chi(a)*conj(rho(a)), exactly."""
    if chi.q != rho.q:
        raise PreconditionError("column orthogonality needs a common modulus")
    G = unit_group(chi.q)
    out = 1
    for e, f, d in zip(chi.exponents, rho.exponents, G.orders):
        if (e - f) % d != 0:
            return 0
        out *= d
    return out


def real_characters(q: int) -> list[DirichletCharacter]:
    return [chi for chi in enumerate_characters(q) if chi.is_real()]
