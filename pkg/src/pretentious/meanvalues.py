"""Mean values of multiplicative functions, raw and in progressions.

F(x; q, a) = sum of f(n) over n <= x, n == a (mod q).  The exact finite
identity F(x;q,a) = (1/phi(q)) sum over chi mod q of chi(a) * sum f(n)conj(chi(n))
holds for every x and gets tested to float accumulation error; everything
else here is an upper bound or a main-term prediction to compare against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import PrimeTable
from .characters import (
    DirichletCharacter,
    character_row,
    enumerate_characters,
    induce,
    unit_group,
)
from .errors import PreconditionError
from .funcspec import FunctionSpec, values_upto
from .pretension import (
    ExceptionalReport,
    TwistObjective,
    find_exceptional,
    minimize_twist,
)


@dataclass(frozen=True)
class ProgressionTable:
    """Sums and counts per residue class; sums[a] = F(x; q, a)."""

    x: int
    q: int
    sums: np.ndarray
    counts: np.ndarray

    def total(self) -> complex:
        return complex(np.sum(self.sums))


def progression_sums(f: FunctionSpec, x: int, q: int, table: PrimeTable) -> ProgressionTable:
    if not 1 <= q <= x:
        raise PreconditionError(f"need 1 <= q <= x, got q={q}, x={x}")
    if x > table.limit:
        raise PreconditionError(f"x={x} exceeds table limit {table.limit}")
    vals = values_upto(f, x, table)
    dtype = np.complex128 if np.iscomplexobj(vals) else np.float64
    sums = np.zeros(q, dtype=dtype)
    counts = np.zeros(q, dtype=np.int64)
    for a in range(q):
        sl = vals[a::q]
        sums[a] = sl.sum()  # vals[0] = 0, so the a=0 slice is already clean
        counts[a] = (x - a) // q + 1 if a >= 1 else x // q
    return ProgressionTable(x=x, q=q, sums=sums, counts=counts)


def twisted_sum(f: FunctionSpec, chi: DirichletCharacter, x: int, table: PrimeTable) -> complex:
    """sum over n <= x of f(n) conj(chi(n)).

    chi has period q, so the sum collapses onto residue-class partial sums;
    nothing is special-cased beyond that regrouping.
    """
    pt = progression_sums(f, x, chi.q, table)
    row = np.conj(character_row(chi))
    if chi.q == 1:
        return complex(pt.sums[0])
    return complex(np.dot(row, pt.sums.astype(np.complex128)))


def decompose_via_characters(
    f: FunctionSpec, x: int, q: int, a: int, table: PrimeTable
) -> tuple[complex, complex]:
    """(F(x;q,a), character-sum reconstruction); equal up to float error."""
    if math.gcd(a, q) != 1:
        raise PreconditionError(f"decomposition needs gcd(a, q) = 1, got a={a}, q={q}")
    pt = progression_sums(f, x, q, table)
    lhs = complex(pt.sums[a % q])
    phi = unit_group(q).phi
    sums = pt.sums.astype(np.complex128)
    rhs = 0j
    for chi in enumerate_characters(q):
        rhs += chi(a) * complex(np.dot(np.conj(character_row(chi)), sums))
    return lhs, rhs / phi


@dataclass(frozen=True)
class HalaszBound:
    x: int
    t_bound: float
    t_star: float
    squared_distance: float
    bound: float
    measured: float


def halasz_bound(f: FunctionSpec, x: int, T: float, table: PrimeTable) -> HalaszBound:
    """Upper bound (1 + D^2) e^(-D^2) + 1/sqrt(T) for |sum f(n)| / x,
    with D^2 the best unrestricted twist distance over |t| <= T."""
    if T < 1:
        raise PreconditionError(f"need T >= 1, got {T}")
    trivial = DirichletCharacter(1, ())
    obj = TwistObjective(f, trivial, x, table, r=1)
    t_star, d2 = minimize_twist(obj, T, x)
    bound = (1.0 + d2) * math.exp(-d2) + 1.0 / math.sqrt(T)
    vals = values_upto(f, x, table)
    measured = abs(complex(np.sum(vals.astype(np.complex128)))) / x
    return HalaszBound(x=x, t_bound=T, t_star=t_star,
                       squared_distance=d2, bound=bound, measured=measured)


@dataclass(frozen=True)
class CoprimeMeanBound:
    x: int
    r: int
    t_bound: float
    t_star: float
    squared_distance: float
    bound: float
    bound_quarter_log: float
    measured: float


def coprime_mean_bound(
    f: FunctionSpec, x: int, r: int, T: float, table: PrimeTable
) -> CoprimeMeanBound:
    """Coprime-restricted variant: bounds (r/(phi(r) x)) |sum_{(n,r)=1} f(n)|.

    bound uses 1/sqrt(T); bound_quarter_log swaps in (log x)^(-1/4), the
    form that appears when the twist comes from a character of modulus r.
    """
    if not 1 <= r <= math.isqrt(x):
        raise PreconditionError(f"need 1 <= r <= sqrt(x), got r={r}, x={x}")
    if not 1 <= T <= math.sqrt(math.log(x)):
        raise PreconditionError(f"need 1 <= T <= sqrt(log x), got T={T}")
    trivial = DirichletCharacter(1, ())
    obj = TwistObjective(f, trivial, x, table, r=r)
    t_star, d2 = minimize_twist(obj, T, x)
    bound = (1.0 + d2) * math.exp(-d2) + 1.0 / math.sqrt(T)
    bound_q = (1.0 + d2) * math.exp(-d2) + math.log(x) ** -0.25
    pt = progression_sums(f, x, r, table)
    G = unit_group(r)
    restricted = complex(np.sum(pt.sums[np.asarray(G.units)])) if r > 1 else complex(pt.sums[0])
    phi = G.phi
    measured = abs(restricted) / (phi / r * x)
    return CoprimeMeanBound(x=x, r=r, t_bound=T, t_star=t_star, squared_distance=d2,
                            bound=bound, bound_quarter_log=bound_q, measured=measured)


def _vanishes_on_higher_powers(f: FunctionSpec) -> bool:
    from .funcspec import Mobius, PrimeTableSpec, Product

    if isinstance(f, Mobius):
        return True
    if isinstance(f, PrimeTableSpec):
        return f.rule == "zero"
    if isinstance(f, Product):
        return any(_vanishes_on_higher_powers(g) for g in f.factors)
    return False


@dataclass(frozen=True)
class EulerProductValue:
    x: int
    q: int
    t: float
    truncation: int
    product: complex
    log_abs_product: float
    prediction: complex
    tail_log_bound: float


def euler_product_mean(
    f: FunctionSpec,
    x: int,
    table: PrimeTable,
    psi: DirichletCharacter | None = None,
    t: float = 0.0,
    q: int = 1,
    truncation: int | None = None,
) -> EulerProductValue:
    """Main-term prediction x^(1+it)/(q(1+it)) * prod over p <= P, p not
    dividing q, of (1-1/p)(1 + f(p)conj(psi(p))/p^(1+it) + ...).

    The prime-power series is summed for p^k <= x and closed with the exact
    geometric tail when the spec is completely multiplicative (or finitely
    supported on powers); only explicit tables are genuinely truncated.
    The caller multiplies the prediction by psi(a) for a target class a.
    """
    P = x if truncation is None else truncation
    if not 2 <= P <= x:
        raise PreconditionError(f"need 2 <= truncation <= x, got {P}")
    ps = table.primes_upto(P)
    if q > 1:
        ps = ps[q % ps != 0]
    psc = ps.astype(np.float64)
    if psi is not None:
        row = character_row(psi)
        psi_p = row[ps % psi.q] if psi.q > 1 else np.ones(len(ps), np.complex128)
    else:
        psi_p = np.ones(len(ps), np.complex128)

    from .funcspec import prime_values  # local import to avoid cycle at module load

    fp = prime_values(f, ps, table).astype(np.complex128)
    # z_p = f(p) conj(psi(p)) p^(-(1+it)); series = 1 + z + (f(p^2)/f(p)^2-ish terms)
    base = np.conj(psi_p) / psc * np.exp(-1j * t * np.log(psc))
    series = np.ones(len(ps), dtype=np.complex128)
    if f.completely_multiplicative:
        z = fp * base
        series = 1.0 / (1.0 - z)
    elif _vanishes_on_higher_powers(f):
        series = 1.0 + fp * base
    else:
        # explicit powers while p^k <= x, then the spec's own completion
        k = 1
        zk = fp * base
        active = np.ones(len(ps), dtype=bool)
        pk = psc.copy()
        while True:
            series = series + np.where(active, zk, 0.0)
            pk = pk * psc
            nxt = pk <= x
            if not nxt.any():
                break
            k += 1
            vals_k = np.array(
                [f.prime_power_value(int(p), k) if a else 0.0 for p, a in zip(ps, nxt)],
                dtype=np.complex128,
            )
            zk = vals_k * base**k
            active = nxt
    factors = (1.0 - 1.0 / psc) * series
    log_abs = float(np.sum(np.log(np.abs(factors))))
    product = complex(np.prod(factors))
    s = 1.0 + 1j * t
    prediction = x**s / (q * s) * product
    if P < x:
        tail_ps = table.primes_upto(x)
        tail_ps = tail_ps[tail_ps > P]
        tail = float(np.sum(2.0 / tail_ps))
    else:
        tail = 0.0
    return EulerProductValue(x=x, q=q, t=t, truncation=P, product=product,
                             log_abs_product=log_abs, prediction=prediction,
                             tail_log_bound=tail)


@dataclass(frozen=True)
class ProgressionRow:
    a: int
    value: complex
    residual: complex
    main_term: complex | None


@dataclass(frozen=True)
class ProgressionReport:
    x: int
    q: int
    conductor_bound: int
    t_bound: float
    exceptional: ExceptionalReport
    r_divides_q: bool
    chi: DirichletCharacter
    rows: tuple[ProgressionRow, ...]
    max_residual: float
    normalized_max_residual: float
    error_ref_power_window: float | None
    error_ref_log_window: float


def progression_report(
    f: FunctionSpec,
    x: int,
    q: int,
    Q: int,
    A: float,
    table: PrimeTable,
    workers: int = 1,
) -> ProgressionReport:
    """Structure of F(x;q,a) against the exceptional character.

    chi is the principal character unless the exceptional conductor r
    divides q, in which case chi is psi induced to modulus q.  Residuals
    F(x;q,a) - chi(a) F(x;q,1) should be small when f behaves; two
    reference error scales are reported:

      power window  (x/q)/sqrt(log A)          (conductor bound x^(1/A), needs log x >= A >= 20)
      log window    x/(q (log x)^(1/3)) + x/log x   (conductor bound log x, A = log^2 x)

    Both take the unknowable o(1) to be 0, so they are reference curves,
    not bounds to assert.
    """
    exc = find_exceptional(f, x, Q, A, table, workers=workers)
    r = exc.conductor
    r_div = q % r == 0
    G = unit_group(q)
    if r_div:
        chi = induce(exc.psi, q)
    else:
        chi = DirichletCharacter(q, tuple(0 for _ in G.orders))
    pt = progression_sums(f, x, q, table)
    base = complex(pt.sums[1 % q])
    main_scale = None
    if r_div:
        main_scale = twisted_sum(f, chi, x, table) / G.phi
    rows = []
    maxres = 0.0
    for a in (int(u) for u in G.units):
        v = complex(pt.sums[a])
        res = v - chi(a) * base
        maxres = max(maxres, abs(res))
        main = exc.psi(a) * main_scale if main_scale is not None else None
        rows.append(ProgressionRow(a=a, value=v, residual=res, main_term=main))
    logx = math.log(x)
    err_a = (x / q) / math.sqrt(math.log(A)) if A > 1 else None
    err_b = x / (q * logx ** (1.0 / 3.0)) + x / logx
    return ProgressionReport(
        x=x, q=q, conductor_bound=Q, t_bound=A,
        exceptional=exc, r_divides_q=r_div, chi=chi, rows=tuple(rows),
        max_residual=maxres,
        normalized_max_residual=maxres * q / x,
        error_ref_power_window=err_a,
        error_ref_log_window=err_b,
    )
