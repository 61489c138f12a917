"""Composite circuits: generation, DOF access, bomb testing, squeezed route.

Every circuit returns a :class:`CircuitReport` whose ``branch_log`` records
the probability of each measurement branch that was kept; the product of
those probabilities is the reported post-selection probability.  States are
never renormalized behind the caller's back: conditioning is explicit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import elements, states
from .elements import PERFECT, Imperfection
from .fock import (
    DegenerateInputError,
    ModeLabel,
    ModeRegister,
    PureState,
    add,
    apply_annihilation,
    apply_creation,
    apply_two_mode_mixer,
    basis_state,
    coherent_cutoff,
    embed,
    mean_occupation,
    mode,
    normalized,
    polarized_register,
    plain_register,
    scale,
    squeezed_cutoff,
)
from .results import ExperimentResult

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class CircuitReport:
    """Conditioned circuit output plus post-selection bookkeeping."""

    output_state: PureState
    postselect_probability: float
    branch_log: tuple
    imperfection: Imperfection = PERFECT

    def branch_product(self) -> float:
        out = 1.0
        for _, p in self.branch_log:
            out *= p
        return out


# ---------------------------------------------------------------------------
# generation: odd cat -> 50:50 splitter -> polarizers -> PBS


def generate_entangled_cat(alpha: float, sign: str = "-",
                           tail_eps: float = 1e-12) -> CircuitReport:
    """Split an odd cat of amplitude sqrt(2)*alpha on a 50:50 beam splitter
    and fold the two arms onto one path as H/V rails.

    The output lives on path 1 and is the maximally entangled state
    (|even>_H |odd>_V -+ |odd>_H |even>_V)/sqrt2 of cat amplitude ``alpha``.
    """
    return _generate(alpha, "odd", sign, tail_eps)


def generate_even_cat_control(alpha: float, sign: str = "-",
                              tail_eps: float = 1e-12) -> CircuitReport:
    """Same interferometer fed with an even cat: the negative control.

    The output Schmidt weights are proportional to {Ne^-4, No^-4}, short of
    a full ebit at any finite amplitude.
    """
    return _generate(alpha, "even", sign, tail_eps)


def _generate(alpha: float, parity: str, sign: str, tail_eps: float) -> CircuitReport:
    if alpha == 0 and parity == "odd":
        raise DegenerateInputError("odd cat input is undefined at alpha = 0")
    cutoff = coherent_cutoff(SQRT2 * alpha, tail_eps)
    reg = polarized_register([1, 2], cutoff)
    src = states.cat(reg, mode(1, "H"), states.CatParams(SQRT2 * alpha, parity), tail_eps)
    # splitter phase 0 gives the "-" pair, phase pi the "+" pair
    phase = 0.0 if sign == "-" else math.pi
    split = apply_two_mode_mixer(src, mode(1, "H"), mode(2, "V"),
                                 theta=math.pi / 4.0, phase=phase)
    log = []
    out = split
    for path, kind in ((1, "H"), (2, "V")):
        branch = elements.polarizer(out, path, kind)
        out = branch.state("pass")
        log.append((f"path{path}_{kind}_polarizer_pass", branch.probability("pass")))
    out = elements.pbs(out, 1, 2)
    return CircuitReport(out, _product(log), tuple(log))


def _product(log) -> float:
    p = 1.0
    for _, q in log:
        p *= q
    return p


# ---------------------------------------------------------------------------
# analytic targets (built straight from the state factories)


def analytic_dual_rail_pair(register: ModeRegister, alpha: float, sign: str = "-",
                            path: int = 1, tail_eps: float = 1e-12) -> PureState:
    """(|even>_H |odd>_V -+ |odd>_H |even>_V)/sqrt2 on one path."""
    s = -1.0 if sign == "-" else 1.0
    eH = states.cat(register, mode(path, "H"), states.CatParams(alpha, "even"), tail_eps)
    oV = states.cat(register, mode(path, "V"), states.CatParams(alpha, "odd"), tail_eps)
    oH = states.cat(register, mode(path, "H"), states.CatParams(alpha, "odd"), tail_eps)
    eV = states.cat(register, mode(path, "V"), states.CatParams(alpha, "even"), tail_eps)
    return normalized(add(_mode_product(eH, oV), scale(_mode_product(oH, eV), s)))


def analytic_coherent_bell(register: ModeRegister, amplitude: complex,
                           sign: str = "-", tail_eps: float = 1e-12) -> PureState:
    """(|H>_A,1 |V>_A,2 -+ |V>_A,1 |H>_A,2)/sqrt2 with coherent envelopes."""
    s = -1.0 if sign == "-" else 1.0
    hv = _mode_product(states.coherent(register, mode(1, "H"), amplitude, tail_eps),
                       states.coherent(register, mode(2, "V"), amplitude, tail_eps))
    vh = _mode_product(states.coherent(register, mode(1, "V"), amplitude, tail_eps),
                       states.coherent(register, mode(2, "H"), amplitude, tail_eps))
    return normalized(add(hv, scale(vh, s)))


def analytic_subtracted_bell(register: ModeRegister, r: float,
                             sign: str = "+") -> PureState:
    """(|H>1|V>2 ± |V>1|H>2)/sqrt2 on identical subtracted-squeezed envelopes."""
    s = 1.0 if sign == "+" else -1.0
    p = states.SqueezeParams(r)
    hv = _mode_product(states.subtracted_sv(register, mode(1, "H"), p),
                       states.subtracted_sv(register, mode(2, "V"), p))
    vh = _mode_product(states.subtracted_sv(register, mode(1, "V"), p),
                       states.subtracted_sv(register, mode(2, "H"), p))
    return normalized(add(hv, scale(vh, s)))


# ---------------------------------------------------------------------------
# accessing the parity degree of freedom (PBS + HWP)


def access_parity(state: PureState) -> CircuitReport:
    """Send H and V rails of path 1 to separate paths with a common
    polarization: the parity-entangled two-path form."""
    reg = state.register
    if not (reg.has(mode(2, "H")) and reg.has(mode(2, "V"))):
        spec = {m: c for m, c in zip(reg.modes, reg.cutoffs)}
        for pol in ("H", "V"):
            spec.setdefault(mode(2, pol), max(reg.cutoffs))
        state = embed(state, ModeRegister.of(spec))
    out = elements.pbs(state, 1, 2)
    out = elements.hwp(out, 2)
    return CircuitReport(out, 1.0, ())


# ---------------------------------------------------------------------------
# accessing the polarization degree of freedom (tagged displacement scheme)


def _infer_cat_amplitude(state: PureState) -> float:
    """Cat amplitude of an H/V entangled cat pair on path 1.

    The total path photon number of (|e>|o> ± |o>|e>)/sqrt2 with cat
    amplitude a is 2 a^2 coth(2 a^2); invert that numerically.
    """
    from scipy.optimize import brentq

    n_tot = (mean_occupation(state, mode(1, "H"))
             + mean_occupation(state, mode(1, "V"))) / state.norm_sq()

    def gap(a: float) -> float:
        x = 2.0 * a * a
        return a * a / math.tanh(x) * 2.0 - n_tot

    if gap(1e-4) > 0:  # below any resolvable amplitude
        return math.sqrt(max(n_tot / 2.0, 1e-12))
    return float(brentq(gap, 1e-4, max(4.0 * math.sqrt(n_tot), 1.0), xtol=1e-14))


def access_polarization(state: PureState, imperfection: Imperfection | None = None,
                        tail_eps: float = 1e-12) -> CircuitReport:
    """Sort the polarization entanglement of the H/V cat pair onto a common
    coherent envelope of amplitude A = alpha/sqrt2.

    Pipeline: split the rails onto paths 1 (H) and 2 (V); mix each with a
    vacuum tag mode (paths 3, 4); displace the tags by A so one branch's tag
    light collects in 3H and the other's in 4V; recombine tags on a PBS so
    path 3 carries |2A> in H or V depending on the branch; flip the target
    polarizations and phases under that control; finally rotate path 3 to
    the diagonal basis, where the branch tags share a common vertical
    component and an equal-amplitude vacuum projection of the horizontal
    one erases which-branch information.  Conditioning keeps the dark
    horizontal port and a click on the vertical port.

    With perfect settings the conditioned output is exactly
    (|H>_A,1 |V>_A,2 - |V>_A,1 |H>_A,2)/sqrt2.
    """
    imp = imperfection or PERFECT
    reg = state.register
    alpha_est = _infer_cat_amplitude(state)
    A = alpha_est / SQRT2
    B = imp.actual_displacement(A)
    if abs(A) ** 2 < 1.0 - 1e-9:
        import warnings

        warnings.warn(
            f"envelope |A|^2 = {abs(A)**2:.3f} < 1: the logical qubit pair is "
            f"read out of the occupied-rail pattern regardless",
            stacklevel=2)

    tag_amp = abs(A) + abs(B) + 0.5
    cut_path = max(reg.cutoffs)
    cut_tag = coherent_cutoff(tag_amp, tail_eps)
    spec: dict[ModeLabel, int] = {}
    for p in (1, 2):
        for pol in ("H", "V"):
            spec[mode(p, pol)] = cut_path
    for p in (3, 4):
        for pol in ("H", "V"):
            spec[mode(p, pol)] = cut_tag
    big = ModeRegister.of(spec)
    psi = embed(state, big)

    psi = elements.pbs(psi, 1, 2)  # H stays on 1, V moves to 2
    psi = apply_two_mode_mixer(psi, mode(1, "H"), mode(3, "H"),
                               theta=math.pi / 4.0, phase=math.pi)
    psi = apply_two_mode_mixer(psi, mode(2, "V"), mode(4, "V"),
                               theta=math.pi / 4.0, phase=math.pi)
    psi = elements.displace(psi, mode(3, "H"), B)
    psi = elements.displace(psi, mode(4, "V"), B)
    psi = elements.pbs(psi, 3, 4)
    psi = elements.phase_shift(psi, mode(2, "V"), math.pi)

    # ambiguous tag light only exists when the displacement is off target
    ambiguous = "error" if B == A else "pass"
    for target in (1, 2):
        psi = elements.cnot_pol(psi, 3, target, imp.flip_angle, on_ambiguous=ambiguous)
    for target in (1, 2):
        psi = elements.cphase_pol(psi, 3, target, imp.cphase_angle, on_ambiguous=ambiguous)

    psi = elements.polarizer(psi, 3, "diag45").state("pass")
    log = []
    dark = elements.onoff_detect(psi, mode(3, "H"))
    p_dark = dark.probability("no_click") / max(psi.norm_sq(), 1e-300)
    if dark.probability("no_click") < 1e-12:
        # at flip_angle = 0 the erasure port interferes to zero: report the
        # unconditioned state (which carries no polarization entanglement)
        log.append(("tag_dark_port", 0.0))
        return CircuitReport(normalized(psi), 0.0, tuple(log), imp)
    log.append(("tag_dark_port", p_dark))
    psi = dark.state("no_click")
    click = elements.onoff_detect(psi, mode(3, "V"))
    log.append(("tag_click", click.probability("click") / max(psi.norm_sq(), 1e-300)))
    out = normalized(click.state("click"))
    return CircuitReport(out, _product(log), tuple(log), imp)


# ---------------------------------------------------------------------------
# interaction-free bomb test


#: beam-splitter angle for the asymptotic single-photon interferometer
SINGLE_PHOTON_THETA = 1e-5


def run_ifm(state_kind: str, bomb: bool, theta: float = math.pi / 6,
            sign: str = "+") -> ExperimentResult:
    """Bomb test in a polarizing Mach-Zehnder interferometer.

    ``state_kind`` is ``"entangled"`` (the Bell pair
    (|H>1|V>2 + |V>1|H>2)/sqrt2, sign configurable), ``"nonmaximal"``
    (cos(theta)|HV> + sin(theta)|VH>), or ``"single_photon"`` (the plain
    one-photon interferometer run at near-unit transmittance, where its
    efficiency approaches 1/2).

    Scalars: same_pol, diff_pol, explode, other, p_ifm, p_bomb and eta.
    The protocol efficiency eta = P_ifm/(P_bomb + P_ifm) is reported as 0
    whenever the bomb-free interferometer already produces the "detection"
    signature, because then nothing discriminates the two scenarios.
    """
    if state_kind == "single_photon":
        probs = _single_photon_events(bomb)
        probs_ref = _single_photon_events(False)
    elif state_kind in ("entangled", "nonmaximal"):
        th = math.pi / 4 if state_kind == "entangled" else theta
        probs = _polarization_events(th, bomb, sign)
        probs_ref = _polarization_events(th, False, sign)
    else:
        raise ValueError(f"unknown state kind {state_kind!r}")

    probs_bomb = probs if bomb else _events_with_bomb(state_kind, theta, sign)
    p_ifm_bomb = probs_bomb["diff_pol"]
    p_bomb = probs_bomb["explode"]
    discriminable = probs_ref["diff_pol"] <= 1e-12
    eta = p_ifm_bomb / (p_bomb + p_ifm_bomb) if discriminable and (p_bomb + p_ifm_bomb) > 0 else 0.0

    scalars = dict(probs)
    scalars["p_ifm"] = p_ifm_bomb
    scalars["p_bomb"] = p_bomb
    scalars["eta"] = eta
    scalars["discriminable"] = float(discriminable)
    return ExperimentResult(scalars=scalars,
                            convergence={"norm_deficit": 0.0})


def _events_with_bomb(state_kind: str, theta: float, sign: str) -> dict:
    if state_kind == "single_photon":
        return _single_photon_events(True)
    th = math.pi / 4 if state_kind == "entangled" else theta
    return _polarization_events(th, True, sign)


def _polarization_events(theta: float, bomb: bool, sign: str) -> dict:
    reg = polarized_register([1, 2], 2)
    hv = basis_state(reg, {mode(1, "H"): 1, mode(2, "V"): 1})
    vh = basis_state(reg, {mode(1, "V"): 1, mode(2, "H"): 1})
    s = 1.0 if sign == "+" else -1.0

    psi = add(scale(hv, math.cos(theta)), scale(vh, s * math.sin(theta)))

    explode = 0.0
    if bomb:
        branch = elements.absorb_arm(psi, mode(1, "V"))
        explode = branch.probability("explode")
        psi = branch.state("survive")
    for path in (1, 2):
        psi = elements.polarizer(psi, path, "diag45").state("pass")

    events = {"same_pol": 0.0, "diff_pol": 0.0, "other": 0.0}
    ih, iv = reg.index(mode(1, "H")), reg.index(mode(1, "V"))
    jh, jv = reg.index(mode(2, "H")), reg.index(mode(2, "V"))
    for occ, amp in psi.amps.items():
        w = abs(amp) ** 2
        a = _rail(occ[ih], occ[iv])
        b = _rail(occ[jh], occ[jv])
        if a is None or b is None:
            events["other"] += w
        elif a == b:
            events["same_pol"] += w
        else:
            events["diff_pol"] += w
    events["explode"] = explode
    return events


def _rail(nh: int, nv: int):
    if nh > 0 and nv == 0:
        return "H"
    if nv > 0 and nh == 0:
        return "V"
    return None


def _single_photon_events(bomb: bool, theta: float = SINGLE_PHOTON_THETA) -> dict:
    reg = plain_register([1, 2], 2)
    psi = basis_state(reg, {mode(1): 1})
    psi = apply_two_mode_mixer(psi, mode(1), mode(2), theta)
    explode = 0.0
    if bomb:
        branch = elements.absorb_arm(psi, mode(2))
        explode = branch.probability("explode")
        psi = branch.state("survive")
    psi = apply_two_mode_mixer(psi, mode(1), mode(2), -theta)
    bright = dark = 0.0
    for (n1, n2), amp in psi.amps.items():
        w = abs(amp) ** 2
        if n1 == 1 and n2 == 0:
            bright += w
        elif n2 == 1 and n1 == 0:
            dark += w
    other = psi.norm_sq() - bright - dark
    # the dark port plays the role of the diff-pol signature
    return {"same_pol": bright, "diff_pol": dark, "other": abs(other),
            "explode": explode}


# ---------------------------------------------------------------------------
# NOON-type coherent state


def noon_from_cat_pair(alpha: float, tail_eps: float = 1e-12,
                       extra_cutoff: int = 0) -> PureState:
    """Displace each mode of the two-path entangled cat pair by alpha,
    turning it into the normalized |2a,0> - |0,2a> superposition."""
    cutoff = coherent_cutoff(2.0 * alpha, tail_eps) + extra_cutoff
    reg = plain_register([1, 2], cutoff)
    pair = states.entangled_cat_pair(reg, mode(1), mode(2), alpha, "-", tail_eps)
    out = elements.displace(pair, mode(1), alpha)
    out = elements.displace(out, mode(2), alpha)
    return out


# ---------------------------------------------------------------------------
# squeezed-vacuum alternative


def sv_generate(r: float, transmittance: float = 0.5,
                tail_eps: float = 1e-12) -> CircuitReport:
    """Subtraction-superposition source on two squeezed vacua, folded onto
    one path as H/V rails.

    Applies sqrt(T) a_H + sqrt(1-T) a_V to |S>_H |S>_V and normalizes; at
    T = 1/2 this is the balanced pair with prefactor 1/(sqrt2 sinh r).
    """
    if not 0.0 <= transmittance <= 1.0:
        raise ValueError("transmittance must lie in [0, 1]")
    if r <= 0.0:
        raise DegenerateInputError("generation needs r > 0")
    cutoff = squeezed_cutoff(r, tail_eps)
    reg = polarized_register([1], cutoff)
    sv_h = states.squeezed_vacuum(reg, mode(1, "H"), states.SqueezeParams(r), tail_eps)
    sv_v = states.squeezed_vacuum(reg, mode(1, "V"), states.SqueezeParams(r), tail_eps)
    prod = _mode_product(sv_h, sv_v)  # |S>_H |S>_V

    t = math.sqrt(transmittance)
    u = math.sqrt(1.0 - transmittance)
    out = add(scale(apply_annihilation(prod, mode(1, "H")), t),
              scale(apply_annihilation(prod, mode(1, "V")), u))
    return CircuitReport(normalized(out), 1.0, ())


def _mode_product(a: PureState, b: PureState) -> PureState:
    """Product of two single-occupied-mode states on a common register."""
    reg = a.register
    amps = {}
    for ka, va in a.amps.items():
        for kb, vb in b.amps.items():
            key = tuple(x + y for x, y in zip(ka, kb))
            amps[key] = va * vb
    return PureState(reg, amps, 0.0)


def sv_antisqueeze_to_single_photon(r: float, tail_eps: float = 1e-12) -> CircuitReport:
    """Anti-squeeze each path of the two-path subtraction-superposition state,
    landing on the single-photon entangled state (|1,0> + |0,1>)/sqrt2."""
    if r <= 0.0:
        raise DegenerateInputError("needs r > 0")
    cutoff = squeezed_cutoff(r, tail_eps) + 4
    reg = plain_register([1, 2], cutoff)
    s1 = states.squeezed_vacuum(reg, mode(1), states.SqueezeParams(r), tail_eps)
    s2 = states.squeezed_vacuum(reg, mode(2), states.SqueezeParams(r), tail_eps)
    prod = _mode_product(s1, s2)
    out = add(apply_annihilation(prod, mode(1)), apply_annihilation(prod, mode(2)))
    out = normalized(out)
    out = elements.squeeze(out, mode(1), -r)
    out = elements.squeeze(out, mode(2), -r)
    return CircuitReport(out, 1.0, ())


def sv_access_polarization(report_or_state, skip_cswap: bool = False) -> CircuitReport:
    """Nondestructive parity sorting of the squeezed pair into a heralded
    polarization Bell state on identical photon-subtracted envelopes.

    Stages: split the H/V rails onto paths 1 and 2; attach an H single
    photon on path 3; flip path 3's polarization on odd photon number in
    mode (2,V); apply two polarization flips on paths 1 and 2 controlled by
    path 3; exchange the path contents under the same control; subtract one
    photon from path 2; rotate path 3 to the diagonal basis and condition
    on its vertical detector.  ``skip_cswap`` ablates the exchange stage
    (the envelopes then no longer match).
    """
    state = report_or_state.output_state if isinstance(report_or_state, CircuitReport) else report_or_state
    reg = state.register
    cut = max(reg.cutoffs)
    spec: dict[ModeLabel, int] = {}
    for p in (1, 2):
        for pol in ("H", "V"):
            spec[mode(p, pol)] = cut
    for pol in ("H", "V"):
        spec[mode(3, pol)] = 2
    big = ModeRegister.of(spec)
    psi = embed(state, big)

    psi = elements.pbs(psi, 1, 2)                       # V rail -> path 2
    psi = apply_creation(psi, mode(3, "H"))             # attach |H>_3
    psi = elements.parity_controlled_flip(psi, mode(2, "V"), 3)
    psi = elements.cnot_pol(psi, 3, 1)
    psi = elements.cnot_pol(psi, 3, 2)
    if not skip_cswap:
        psi = elements.cswap_pol(psi, 3, 1, 2)
    psi = normalized(add(apply_annihilation(psi, mode(2, "H")),
                         apply_annihilation(psi, mode(2, "V"))))
    psi = elements.polarizer(psi, 3, "diag45").state("pass")
    herald = elements.onoff_detect(psi, mode(3, "V"))
    p = herald.probability("click") / max(psi.norm_sq(), 1e-300)
    log = (("diag_herald_V", p),)
    out = normalized(herald.state("click"))
    return CircuitReport(out, p, log)
