"""Character recovery from approximate homomorphisms.

The FFT spectrum is checked against per-character dot products; recovery
guarantees are exercised with planted characters under bounded phase noise.
Progression-sum fixtures were measured once and frozen.
"""

import cmath
import math
import random

import numpy as np
import pytest

from pretentious.arith import PrimeTable
from pretentious.characters import (
    character_by_index,
    character_row,
    enumerate_characters,
    unit_group,
)
from pretentious.errors import PreconditionError
from pretentious.funcspec import Mobius, parse_spec
from pretentious.meanvalues import progression_sums
from pretentious.nearchar import (
    ApproxHomomorphism,
    character_from_progression_sums,
    fourier_spectrum,
    fourier_transform,
    nearest_character,
    parseval_identity,
)

_CACHE = {}


def _table():
    if "t" not in _CACHE:
        _CACHE["t"] = PrimeTable(2 * 10**4)
    return _CACHE["t"]


def _char_units(q, index):
    chi = character_by_index(q, index)
    row = character_row(chi)[np.asarray(unit_group(q).units)] if q > 1 else np.ones(1)
    return chi, np.asarray(row, dtype=np.complex128)


def _noisy(q, index, deltas):
    # multiplicative phase noise, zero at a = 1; pair defect <= 3 max|delta|
    chi, row = _char_units(q, index)
    G = unit_group(q)
    one = int(np.searchsorted(G.units, 1 % q))
    d = np.array(deltas, dtype=np.float64)
    d[one] = 0.0
    return chi, row * np.exp(1j * d)


# ------------------------------------------------------------- validation


def test_rejects_wrong_base_value():
    with pytest.raises(PreconditionError):
        ApproxHomomorphism.from_values(5, [1.0001, 1, 1, 1])
    with pytest.raises(PreconditionError):
        ApproxHomomorphism.from_values(5, {1: 0.5, 2: 1, 3: 1, 4: 1})


def test_rejects_wrong_shape_and_missing_keys():
    with pytest.raises(PreconditionError):
        ApproxHomomorphism.from_values(5, [1, 1, 1])
    with pytest.raises(PreconditionError):
        ApproxHomomorphism.from_values(5, {1: 1, 2: 1, 3: 1})  # no value at 4


def test_dict_and_array_agree():
    _, row = _char_units(8, 3)
    ga = ApproxHomomorphism.from_values(8, row)
    gd = ApproxHomomorphism.from_values(8, {int(u): row[i] for i, u in
                                            enumerate(unit_group(8).units)})
    assert np.allclose(ga.values, gd.values)
    assert ga.epsilon == gd.epsilon


def test_value_at():
    _, row = _char_units(5, 2)
    g = ApproxHomomorphism.from_values(5, row)
    assert g.value_at(7) == pytest.approx(row[1])  # 7 == 2 mod 5
    with pytest.raises(PreconditionError):
        g.value_at(10)


def test_epsilon_zero_for_exact_characters():
    for q in (1, 2, 5, 8, 12, 24):
        for idx in range(unit_group(q).phi):
            _, row = _char_units(q, idx)
            g = ApproxHomomorphism.from_values(q, row)
            assert g.epsilon <= 1e-12, (q, idx)


# ---------------------------------------------------------------- fourier


def test_spectrum_matches_per_character_transform():
    rng = random.Random(11)
    for q in (3, 5, 8, 12, 15, 16, 24):
        G = unit_group(q)
        vals = np.exp(1j * np.array([rng.uniform(-0.08, 0.08) for _ in range(G.phi)]))
        one = int(np.searchsorted(G.units, 1 % q))
        vals[one] = 1.0
        g = ApproxHomomorphism.from_values(q, vals)
        spec = fourier_spectrum(g)
        assert spec.shape == (G.phi,)
        for idx in range(G.phi):
            direct = fourier_transform(g, character_by_index(q, idx))
            assert spec[idx] == pytest.approx(direct, abs=1e-9), (q, idx)


def test_transform_requires_matching_modulus():
    _, row = _char_units(5, 1)
    g = ApproxHomomorphism.from_values(5, row)
    with pytest.raises(PreconditionError):
        fourier_transform(g, character_by_index(7, 1))


def test_spectrum_of_character_is_delta():
    # ghat(chi) = phi(q) at the planted character, 0 elsewhere
    q = 12
    phi = unit_group(q).phi
    for idx in range(phi):
        _, row = _char_units(q, idx)
        g = ApproxHomomorphism.from_values(q, row)
        spec = fourier_spectrum(g)
        assert spec[idx] == pytest.approx(phi, abs=1e-9)
        others = np.delete(np.abs(spec), idx)
        assert others.max() < 1e-9


def test_parseval():
    rng = random.Random(12)
    for q in (5, 9, 16, 21, 40):
        G = unit_group(q)
        vals = np.exp(1j * np.array([rng.uniform(-0.09, 0.09) for _ in range(G.phi)]))
        vals[int(np.searchsorted(G.units, 1 % q))] = 1.0
        g = ApproxHomomorphism.from_values(q, vals)
        lhs, rhs = parseval_identity(g)
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_fourier_inversion():
    q = 15
    G = unit_group(q)
    rng = random.Random(13)
    vals = np.exp(1j * np.array([rng.uniform(-0.05, 0.05) for _ in range(G.phi)]))
    vals[int(np.searchsorted(G.units, 1 % q))] = 1.0
    g = ApproxHomomorphism.from_values(q, vals)
    spec = fourier_spectrum(g)
    rows = np.stack([character_row(character_by_index(q, i))[np.asarray(G.units)]
                     for i in range(G.phi)])
    recon = (spec[:, None] * rows).sum(axis=0) / G.phi
    assert np.allclose(recon, vals, atol=1e-9)


# --------------------------------------------------------------- recovery


def test_recover_exact():
    for q in (3, 8, 20):
        for idx in range(unit_group(q).phi):
            chi, row = _char_units(q, idx)
            res = nearest_character(ApproxHomomorphism.from_values(q, row))
            assert res.chi == chi
            assert res.max_deviation <= 1e-12
            assert res.fourier_mass == pytest.approx(unit_group(q).phi, abs=1e-9)


def test_recover_planted_under_noise():
    rng = random.Random(20240818)
    for _ in range(25):
        q = rng.randrange(3, 51)
        phi = unit_group(q).phi
        idx = rng.randrange(phi)
        deltas = [rng.uniform(-0.1, 0.1) for _ in range(phi)]
        chi, vals = _noisy(q, idx, deltas)
        g = ApproxHomomorphism.from_values(q, vals)
        assert g.epsilon <= 0.3 + 1e-12
        res = nearest_character(g)
        assert res.chi == chi, (q, idx, g.epsilon)
        assert res.max_deviation <= res.uniform_bound + 1e-9
        assert res.fourier_mass >= res.mass_floor - 1e-9
        assert res.uniform_bound == pytest.approx(g.epsilon / (1 - 2 * g.epsilon))


def test_refuses_midpoint_of_two_characters():
    # (chi0 + chi1)/2 mod 5 sits exactly between: defect reaches 1.0
    _, r0 = _char_units(5, 0)
    _, r1 = _char_units(5, 1)
    g = ApproxHomomorphism.from_values(5, (r0 + r1) / 2)
    assert g.epsilon == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(PreconditionError):
        nearest_character(g)


def test_refusal_threshold_is_half():
    # scale the phase noise on one unit until the defect crosses 1/2
    _, row = _char_units(5, 1)
    vals = row.copy()
    vals[3] *= cmath.exp(1.2j)  # |e^{i 1.2} - 1| = 2 sin 0.6 > 1/2
    g = ApproxHomomorphism.from_values(5, vals)
    assert g.epsilon >= 0.5
    with pytest.raises(PreconditionError):
        nearest_character(g)


def test_q_one_trivial_recovery():
    g = ApproxHomomorphism.from_values(1, [1.0])
    res = nearest_character(g)
    assert res.chi.q == 1
    assert res.epsilon == 0.0
    assert res.fourier_mass == pytest.approx(1.0)


# -------------------------------------------------- from progression sums


def test_progression_recovery_exact_character():
    pt = progression_sums(parse_spec("char:5:2"), 10**4, 5, _table())
    att = character_from_progression_sums(pt)
    assert att.reason is None
    assert att.epsilon <= 1e-12
    assert att.result.chi == character_by_index(5, 2)
    assert att.result.max_deviation == 0.0


def test_progression_recovery_zero_base():
    # mu(1) + mu(4) + mu(7) = 0: ratios undefined, attempt explains itself
    pt = progression_sums(Mobius(), 7, 3, _table())
    assert pt.sums[1] == 0.0
    att = character_from_progression_sums(pt)
    assert att.result is None and att.epsilon is None
    assert "ratios undefined" in att.reason


def test_progression_recovery_mobius_refuses(table_large):
    # progression ratios of mu are nowhere near a homomorphism at this scale
    pt = progression_sums(Mobius(), 10**7, 4, table_large)
    assert pt.sums.tolist() == [0.0, 459.0, 468.0, 110.0]
    att = character_from_progression_sums(pt)
    assert att.result is None
    assert att.epsilon == pytest.approx(0.9425671987507179, rel=1e-12)
    assert "no character is identifiable" in att.reason


def test_progression_recovery_twisted_character():
    # f = chi * small twist: ratios stay within the recoverable band
    pt = progression_sums(parse_spec("char:8:3"), 10**4, 8, _table())
    att = character_from_progression_sums(pt)
    assert att.result is not None
    assert att.result.chi == character_by_index(8, 3)
