"""State factories: coherent states, even/odd cats, squeezed vacuum.

Every factory returns a normalized state and refuses cutoffs that leave
more than ``tail_eps`` probability beyond the truncation, so the caller
stays in control of memory and accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import (
    DEFAULT_TAIL_EPS,
    CutoffError,
    DegenerateInputError,
    ModeLabel,
    ModeRegister,
    PureState,
    _finish,
    add,
    coherent_cutoff,
    normalized,
    scale,
    squeezed_cutoff,
)


@dataclass(frozen=True)
class CatParams:
    """Amplitude and parity of a coherent-state superposition |a> ± |-a>."""

    alpha: complex
    parity: str = "even"

    def __post_init__(self) -> None:
        if self.parity not in ("even", "odd"):
            raise ValueError("parity must be 'even' or 'odd'")
        if self.parity == "odd" and self.alpha == 0:
            raise DegenerateInputError("odd cat is undefined at alpha = 0")


@dataclass(frozen=True)
class SqueezeParams:
    """Single-axis squeezing strength (dimensionless)."""

    r: float

    def __post_init__(self) -> None:
        if self.r < 0:
            raise ValueError("generation requires r >= 0; anti-squeezing is an operation")


def _coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """c_n = e^{-|a|^2/2} a^n / sqrt(n!), n = 0..cutoff."""
    out = np.empty(cutoff + 1, dtype=complex)
    out[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, cutoff + 1):
        out[n] = out[n - 1] * alpha / math.sqrt(n)
    return out


def _require_cutoff(register: ModeRegister, m: ModeLabel, needed: int) -> None:
    have = register.cutoff_of(m)
    if have < needed:
        raise CutoffError(
            f"mode {m}: cutoff {have} below the tail rule ({needed} needed); "
            f"build the register with a larger cutoff")


def coherent(register: ModeRegister, m: ModeLabel, alpha: complex,
             tail_eps: float = DEFAULT_TAIL_EPS) -> PureState:
    """Coherent state |alpha> in mode ``m``, vacuum elsewhere."""
    _require_cutoff(register, m, coherent_cutoff(alpha, tail_eps))
    i = register.index(m)
    coeffs = _coherent_amplitudes(alpha, register.cutoff_of(m))
    base = register.vacuum_key()
    amps = {base[:i] + (n,) + base[i + 1:]: c for n, c in enumerate(coeffs)}
    tail = max(0.0, 1.0 - float(np.sum(np.abs(coeffs) ** 2)))
    return _finish(register, amps, tail)


def cat(register: ModeRegister, m: ModeLabel, params: CatParams,
        tail_eps: float = DEFAULT_TAIL_EPS) -> PureState:
    """Even or odd coherent-state superposition N(|a> ± |-a>).

    Even cats occupy only even Fock levels, odd cats only odd ones; the
    wrong-parity amplitudes are exactly zero by construction.
    """
    alpha = params.alpha
    _require_cutoff(register, m, coherent_cutoff(alpha, tail_eps))
    i = register.index(m)
    coeffs = _coherent_amplitudes(alpha, register.cutoff_of(m))
    overlap = math.exp(-2.0 * abs(alpha) ** 2)  # <a|-a> for any phase of a
    if params.parity == "even":
        norm_const = 1.0 / math.sqrt(2.0 * (1.0 + overlap))
        keep = 0
    else:
        norm_const = 1.0 / math.sqrt(2.0 * (1.0 - overlap))
        keep = 1
    base = register.vacuum_key()
    amps = {}
    retained = 0.0
    for n, c in enumerate(coeffs):
        if n % 2 != keep:
            continue
        amp = 2.0 * norm_const * c
        amps[base[:i] + (n,) + base[i + 1:]] = amp
        retained += abs(amp) ** 2
    return _finish(register, amps, max(0.0, 1.0 - retained))


def squeezed_vacuum(register: ModeRegister, m: ModeLabel, params: SqueezeParams,
                    tail_eps: float = DEFAULT_TAIL_EPS) -> PureState:
    """Squeezed vacuum S(r)|0> with S(r) = exp[(r/2)(a†² - a²)].

    Amplitudes c_{2m} = (tanh r)^m sqrt((2m)!) / (2^m m! sqrt(cosh r));
    support is on even Fock levels only and <n> = sinh² r.
    """
    r = params.r
    _require_cutoff(register, m, squeezed_cutoff(r, tail_eps))
    i = register.index(m)
    top = register.cutoff_of(m)
    t = math.tanh(r)
    base = register.vacuum_key()
    amps = {}
    c = 1.0 / math.sqrt(math.cosh(r))
    retained = 0.0
    k = 0
    while 2 * k <= top:
        amps[base[:i] + (2 * k,) + base[i + 1:]] = complex(c)
        retained += c * c
        # c_{2(k+1)} / c_{2k} = t * sqrt((2k+1)(2k+2)) / (2(k+1))
        c *= t * math.sqrt((2 * k + 1) * (2 * k + 2)) / (2 * (k + 1))
        k += 1
    return _finish(register, amps, max(0.0, 1.0 - retained))


def subtracted_sv(register: ModeRegister, m: ModeLabel, params: SqueezeParams,
                  tail_eps: float = DEFAULT_TAIL_EPS) -> PureState:
    """Normalized single-photon-subtracted squeezed vacuum a S(r)|0> / sinh r.

    Support is on odd Fock levels; for r -> 0+ the state approaches |1>.
    """
    if params.r == 0:
        raise DegenerateInputError("photon subtraction of r = 0 squeezed vacuum is the zero state")
    from .fock import apply_annihilation

    sv = squeezed_vacuum(register, m, params, tail_eps)
    return scale(apply_annihilation(sv, m), 1.0 / math.sinh(params.r))


def entangled_cat_pair(register: ModeRegister, mode_a: ModeLabel, mode_b: ModeLabel,
                       alpha: complex, sign: str = "-",
                       tail_eps: float = DEFAULT_TAIL_EPS) -> PureState:
    """Normalized |a>|-a> ∓ |-a>|a> ∝ |even>|odd> ∓ |odd>|even> on two modes."""
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    if alpha == 0:
        raise DegenerateInputError("entangled cat pair is undefined at alpha = 0")
    plus = _two_mode_coherent(register, mode_a, mode_b, alpha, -alpha, tail_eps)
    minus = _two_mode_coherent(register, mode_a, mode_b, -alpha, alpha, tail_eps)
    s = 1.0 if sign == "+" else -1.0
    return normalized(add(plus, scale(minus, s)))


def _two_mode_coherent(register: ModeRegister, mode_a: ModeLabel, mode_b: ModeLabel,
                       alpha: complex, beta: complex, tail_eps: float) -> PureState:
    _require_cutoff(register, mode_a, coherent_cutoff(alpha, tail_eps))
    _require_cutoff(register, mode_b, coherent_cutoff(beta, tail_eps))
    ia, ib = register.index(mode_a), register.index(mode_b)
    ca = _coherent_amplitudes(alpha, register.cutoff_of(mode_a))
    cb = _coherent_amplitudes(beta, register.cutoff_of(mode_b))
    base = register.vacuum_key()
    amps = {}
    retained = 0.0
    for na, a in enumerate(ca):
        for nb, b in enumerate(cb):
            amp = a * b
            if abs(amp) > 1e-18:
                key = list(base)
                key[ia], key[ib] = na, nb
                amps[tuple(key)] = amp
                retained += abs(amp) ** 2
    return _finish(register, amps, max(0.0, 1.0 - retained))
