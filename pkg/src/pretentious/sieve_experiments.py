"""Progression sums through the sieve lens.

The central object: for f on the class a mod q, the primitive-character
mass of a modulus r is

    M(r) = sum over primitive psi mod r of | sum_{n <= x/q} f(nq + a) psi(n) |.

Moduli with M(r) >= eta * x/q are "bad"; the large sieve forces
sum over bad r of 1/phi(r) <= 2/eta^2, which this module asserts as a
theorem check on every scan.  Good squarefree r coprime to q admit the
transfer identity F(x;q,a) ~ r f(r) F(x/r; q, a r^{-1}) up to a budget
(x/q)(eta d(r) + 1 - phi(r)/r).

Per-modulus masses are computed from residue-class partial sums (one
bincount per r) followed by a multidimensional DFT over the unit group in
exponent coordinates, so nothing ever loops over characters times terms.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import PrimeTable
from .characters import enumerate_characters, is_primitive, unit_group
from .errors import PreconditionError, TheoremViolation
from .funcspec import FunctionSpec, evaluate, values_upto
from .meanvalues import progression_sums

LARGE_SIEVE_SLACK = 1e-9


def _radical(r: int) -> list[int]:
    out = []
    m = r
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


@lru_cache(maxsize=4096)
def _index_tuples(r: int) -> np.ndarray:
    """Character exponent tuples in canonical-index order, shape (phi, ncomp)."""
    G = unit_group(r)
    if not G.orders:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*[np.arange(d) for d in G.orders], indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)


@lru_cache(maxsize=4096)
def _primitive_mask(r: int) -> np.ndarray:
    """Boolean array over canonical character indices: is chi primitive?

    chi factors through r/p iff it kills every unit u == 1 (mod r/p); chi
    is primitive iff that fails for every prime p | r.  Kernels of the
    reductions have at most p elements each, so this stays cheap.
    """
    G = unit_group(r)
    mask = np.ones(G.phi, dtype=bool)
    if r == 1:
        return mask
    tuples = _index_tuples(r)
    L = 1
    for d in G.orders:
        L = L * d // math.gcd(L, d)
    weights = np.array([L // d for d in G.orders], dtype=np.int64)
    weighted = tuples * weights  # chi(u) trivial <=> weighted . dlog(u) == 0 mod L
    for p in _radical(r):
        step = r // p
        kernel = [
            G.dlog[u]
            for u in ((1 + k * step) % r for k in range(1, p))
            if u in G.dlog
        ]
        if not kernel:
            # reduction mod r/p is injective on units (r == 2 mod 4 case):
            # every character factors through it, so none is primitive
            mask[:] = False
            return mask
        ker = np.array(kernel, dtype=np.int64).reshape(len(kernel), -1)
        dots = weighted @ ker.T % L
        mask &= ~(dots == 0).all(axis=1)
    return mask


@lru_cache(maxsize=4096)
def _ravel_indices(r: int) -> np.ndarray:
    """For each unit (sorted order) the ravel index of its exponent tuple
    in the character grid; ravel order equals canonical character index."""
    G = unit_group(r)
    if not G.orders:
        return np.zeros(G.phi, dtype=np.int64)
    radix = np.ones(len(G.orders), dtype=np.int64)
    for i in range(len(G.orders) - 2, -1, -1):
        radix[i] = radix[i + 1] * G.orders[i + 1]
    return G.exponents @ radix


def _class_values(f: FunctionSpec, x: int, q: int, a: int, table: PrimeTable) -> np.ndarray:
    """f(nq + a) for n = 1..floor(x/q); a is normalized into [0, q)."""
    a = a % q
    if math.gcd(a, q) != 1:
        raise PreconditionError(f"need gcd(a, q) = 1, got a={a}, q={q}")
    N = x // q
    if N < 1:
        raise PreconditionError(f"x/q < 1 for x={x}, q={q}")
    top = N * q + a
    if top > table.limit:
        raise PreconditionError(
            f"scan needs values up to {top}; table stops at {table.limit}"
        )
    vals = values_upto(f, top, table)
    if not np.iscomplexobj(vals):
        vals = vals.astype(np.float64)
    out = vals[a + q :: q][:N]
    assert len(out) == N
    return out


def _mass_from_classes(c: np.ndarray, r: int) -> float:
    """Total |S_psi| over primitive psi mod r given class sums c (len r)."""
    G = unit_group(r)
    if not G.orders:
        return float(abs(c[1 % r])) if r == 1 else 0.0
    grid = np.zeros(tuple(G.orders), dtype=np.complex128)
    grid.reshape(-1)[_ravel_indices(r)] = c[np.asarray(G.units)]
    F = np.fft.fftn(grid).reshape(-1)
    return float(np.sum(np.abs(F[_primitive_mask(r)])))


def primitive_mass(class_values: np.ndarray, r: int) -> float:
    """M(r) for the given sequence of f(nq+a), n = 1..N."""
    N = len(class_values)
    ns = np.arange(1, N + 1, dtype=np.int64) % r
    if np.iscomplexobj(class_values):
        c = (np.bincount(ns, weights=class_values.real, minlength=r)
             + 1j * np.bincount(ns, weights=class_values.imag, minlength=r))
    else:
        c = np.bincount(ns, weights=class_values, minlength=r).astype(np.complex128)
    return _mass_from_classes(c, r)


@dataclass(frozen=True)
class BadModuliReport:
    x: int
    q: int
    a: int
    eta: float
    n_terms: int
    modulus_bound: int
    bad: tuple[tuple[int, float], ...]  # (r, mass)
    sum_inverse_phi: float
    large_sieve_bound: float
    masses: tuple[tuple[int, float], ...] | None = None


def bad_moduli(
    f: FunctionSpec,
    x: int,
    q: int,
    a: int,
    eta: float,
    table: PrimeTable,
    keep_masses: bool = False,
) -> BadModuliReport:
    """Scan 1 < r <= sqrt(x/q) for moduli with primitive mass >= eta x/q.

    Raises TheoremViolation if the bad set breaks sum 1/phi(r) <= 2/eta^2;
    that inequality is a theorem, so failing it means a bug, not bad data.
    Small eta (<= 1/sqrt(log x)) only weakens what a "good" modulus buys
    downstream, so that range warns instead of refusing.
    """
    if not 0 < eta <= 1:
        raise PreconditionError(f"need 0 < eta <= 1, got {eta}")
    floor_eta = 1.0 / math.sqrt(math.log(x)) if x > 1 else 1.0
    if eta <= floor_eta:
        warnings.warn(
            f"eta={eta:g} is at or below 1/sqrt(log x) = {floor_eta:.4f}; the "
            f"mass bound still holds but good-moduli guarantees weaken",
            RuntimeWarning,
            stacklevel=2,
        )
    cv = _class_values(f, x, q, a, table)
    N = len(cv)
    R = math.isqrt(x // q)
    threshold = eta * (x / q)
    is_complex = np.iscomplexobj(cv)
    ns = np.arange(1, N + 1, dtype=np.int64)
    bad = []
    masses = []
    for r in range(2, R + 1):
        nr = ns % r
        if is_complex:
            c = (np.bincount(nr, weights=cv.real, minlength=r)
                 + 1j * np.bincount(nr, weights=cv.imag, minlength=r))
        else:
            c = np.bincount(nr, weights=cv, minlength=r).astype(np.complex128)
        m = _mass_from_classes(c, r)
        if keep_masses:
            masses.append((r, m))
        if m >= threshold:
            bad.append((r, m))
    s = sum(1.0 / unit_group(r).phi for r, _ in bad)
    bound = 2.0 / eta**2
    if s > bound + LARGE_SIEVE_SLACK:
        raise TheoremViolation(
            f"bad-moduli mass sum {s:.6f} exceeds large-sieve bound {bound:.6f} "
            f"(f={f}, x={x}, q={q}, a={a}, eta={eta})"
        )
    return BadModuliReport(
        x=x, q=q, a=a, eta=eta, n_terms=N, modulus_bound=R,
        bad=tuple(bad), sum_inverse_phi=s, large_sieve_bound=bound,
        masses=tuple(masses) if keep_masses else None,
    )


@dataclass(frozen=True)
class TransferCheck:
    x: int
    q: int
    a: int
    r: int
    eta: float
    lhs: complex
    rhs: complex
    difference: float
    budget: float


def transfer_check(
    f: FunctionSpec,
    x: int,
    q: int,
    a: int,
    r: int,
    eta: float,
    table: PrimeTable,
) -> TransferCheck:
    """Compare F(x;q,a) against r f(r) F(x/r; q, a r^{-1} mod q).

    Preconditions: r squarefree, coprime to q, and "good": no divisor
    ell > 1 of r reaches the eta mass threshold.
    """
    if math.gcd(r, q) != 1:
        raise PreconditionError(f"need gcd(r, q) = 1, got r={r}, q={q}")
    fr = table.factorize(r)
    if any(e > 1 for _, e in fr.factors):
        raise PreconditionError(f"transfer needs squarefree r, got {r}")
    if r < 1 or r > math.isqrt(x // q):
        raise PreconditionError(f"need 1 <= r <= sqrt(x/q), got r={r}")
    cv = _class_values(f, x, q, a, table)
    threshold = eta * (x / q)
    for ell in _divisors_of(r):
        if ell > 1 and primitive_mass(cv, ell) >= threshold:
            raise PreconditionError(
                f"r={r} is not good at eta={eta}: divisor {ell} is a bad modulus"
            )
    lhs = complex(progression_sums(f, x, q, table).sums[a % q])
    ainv = (a * pow(r, -1, q)) % q if q > 1 else 0
    sub = progression_sums(f, x // r, q, table)
    rhs = r * complex(evaluate(f, r, table)) * complex(sub.sums[ainv])
    phi_r = unit_group(r).phi
    budget = (x / q) * (eta * fr.divisor_count() + (1.0 - phi_r / r))
    return TransferCheck(x=x, q=q, a=a, r=r, eta=eta, lhs=lhs, rhs=rhs,
                         difference=abs(lhs - rhs), budget=budget)


def _divisors_of(r: int) -> list[int]:
    out = [1]
    m = r
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out = [d * p**k for d in out for k in range(e + 1)]
        p += 1
    if m > 1:
        out = [d * m**k for d in out for k in range(2)]
    return sorted(out)


def primitive_orthogonality_sum(r: int, b: int, n: int) -> complex:
    """sum over ell | r and primitive psi mod ell of conj(psi(b)) psi(n),
    by direct enumeration (float)."""
    total = 0j
    for ell in _divisors_of(r):
        for psi in enumerate_characters(ell):
            if is_primitive(psi):
                total += np.conj(psi(b)) * psi(n)
    return complex(total)


def primitive_orthogonality_reference(r: int, b: int, n: int) -> int:
    """Closed form for squarefree r, gcd(b, r) = 1: phi(r/d) when
    gcd(n, r) = d and n == b (mod r/d), else 0."""
    if math.gcd(b, r) != 1:
        raise PreconditionError("reference needs gcd(b, r) = 1")
    d = math.gcd(n, r)
    m = r // d
    if (n - b) % m == 0:
        return unit_group(m).phi
    return 0


@dataclass(frozen=True)
class DefectReport:
    x: int
    q: int
    max_defect: float
    normalized_max_defect: float
    scale: float
    pairs: tuple[tuple[int, int, float], ...]


def multiplicativity_defect(f: FunctionSpec, x: int, q: int, table: PrimeTable) -> DefectReport:
    """max over unit pairs (a, b) of |F(ab)F(1) - F(a)F(b)|, normalized by
    (x/q) max_c |F(c)|.  Near-multiplicativity of a -> F(x;q,a) is an
    asymptotic statement far beyond desk scale, so treat this as trend data."""
    pt = progression_sums(f, x, q, table)
    G = unit_group(q)
    units = [int(u) for u in G.units]
    Fv = {a: complex(pt.sums[a]) for a in units}
    F1 = Fv[1 % q]
    scale = (x / q) * max(abs(v) for v in Fv.values())
    pairs = []
    worst = 0.0
    for i, a in enumerate(units):
        for b in units[i:]:
            d = abs(Fv[(a * b) % q] * F1 - Fv[a] * Fv[b])
            worst = max(worst, d)
            pairs.append((a, b, d))
    return DefectReport(
        x=x, q=q, max_defect=worst,
        normalized_max_defect=worst / scale if scale > 0 else float("inf"),
        scale=scale, pairs=tuple(pairs),
    )


@dataclass(frozen=True)
class LegendreScanReport:
    x: int
    q: int
    a: int
    p_limit: int
    infimum: float
    argmin_p: int
    square_class: bool
    running: tuple[tuple[int, float], ...]


def legendre_progression_experiment(
    q: int, a: int, x: int, p_limit: int, table: PrimeTable
) -> LegendreScanReport:
    """inf over odd primes p <= p_limit, p not dividing q, of
    (q/x) sum_{n <= x, n == a (q)} (n|p).

    Classes containing squares have asymptotic floor delta1 = -0.656...;
    classes with no squares can reach -1.  Finite scale drifts below the
    floor, so callers compare with slack.
    """
    if math.gcd(a, q) != 1:
        raise PreconditionError(f"need gcd(a, q) = 1, got a={a}, q={q}")
    if x > table.limit:
        raise PreconditionError(f"x={x} exceeds table limit {table.limit}")
    start = a % q
    if start == 0:
        start = q
    ns = np.arange(start, x + 1, q, dtype=np.int64)
    best = math.inf
    best_p = 0
    running = []
    for p in table.primes_upto(p_limit):
        p = int(p)
        if p == 2 or q % p == 0:
            continue
        row = _legendre_row_int(p)
        s = float(np.sum(row[ns % p])) * q / x
        if s < best:
            best = s
            best_p = p
            running.append((p, s))
    sq = {(u * u) % q for u in range(1, q + 1) if math.gcd(u, q) == 1}
    return LegendreScanReport(
        x=x, q=q, a=a, p_limit=p_limit, infimum=best, argmin_p=best_p,
        square_class=(a % q) in sq,
        running=tuple(running),
    )


@lru_cache(maxsize=256)
def _legendre_row_int(p: int) -> np.ndarray:
    row = -np.ones(p, dtype=np.int64)
    row[0] = 0
    sq = np.unique(np.arange(1, p, dtype=np.int64) ** 2 % p)
    row[sq] = 1
    row.flags.writeable = False
    return row
