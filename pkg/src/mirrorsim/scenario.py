"""Scenario configuration, validation, the preset library and analysis runners.

A scenario bundles one parameter set, one wavegroup, optional measurement
events, sampling grids and a list of named analyses. Configs are plain
JSON; times inside a config are absolute in the scenario's unit system.
The command-line layer converts user-facing times, which are offsets from
the collision time in units of the overlap time scale tau, into absolute
times before they reach this module.

Preset geometry (initial separations, snapshot offsets, carrier-to-width
ratios) frames the packets at a few widths; those choices are sampling
reconstructions, not quoted values.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .grids import AxisSpec, Curve, FieldGrid, GridSpec
from .harmonic import beat_frequency, fringe_period, fringe_spacing
from .kinematics import PhysicalParams, elastic_final_velocities, thermal_spread
from .measurement import (MeasurementEvent, UnresolvedSplittingError, collapse,
                          classify_regime, split_centroid_velocities)
from .observables import (coherence_transfer_metrics, doppler_beat,
                          extract_fringes, marginal_over_mirror,
                          marginal_over_particle, _support_hull)
from .conservation import continuity_residual, convergence_order
from .wavegroup import WavegroupSpec, joint_pdf

_KNOWN_ANALYSES = (
    "fringes", "beat", "regime", "split-velocities", "coherence-transfer",
    "marginal-visibility", "marginal-t2-independence", "node-depth",
    "continuity",
)


class ScenarioValidationError(ValueError):
    """Config violated one or more invariants; ``violations`` lists them all."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


@dataclass(frozen=True)
class RawEvent:
    """Config-level measurement event; x10 = None means the marginal mode."""

    t10: float
    x10: float | None = None
    dx1: float = 1e-3


@dataclass(frozen=True)
class Scenario:
    name: str
    units: str
    params: PhysicalParams
    wavegroup: WavegroupSpec
    events: tuple[RawEvent, ...] = ()
    snapshot_times: tuple[float, ...] = ()
    grids: tuple[GridSpec, ...] = ()
    analyses: tuple[str, ...] = ()
    description: str = ""

    @property
    def tau(self) -> float:
        return self.wavegroup.tau

    @property
    def collision_time(self) -> float:
        return self.wavegroup.collision_time


# ---------------------------------------------------------------------------
# config <-> scenario
# ---------------------------------------------------------------------------

def to_config(s: Scenario) -> dict:
    return {
        "name": s.name,
        "units": s.units,
        "description": s.description,
        "params": {"m": s.params.m, "M": s.params.M, "v": s.params.v, "V": s.params.V},
        "wavegroup": {"dk": s.wavegroup.dk, "dK": s.wavegroup.dK,
                      "x1c": s.wavegroup.x1c, "x2c": s.wavegroup.x2c,
                      "t0": s.wavegroup.t0},
        "events": [{"t10": e.t10, "x10": e.x10, "dx1": e.dx1} for e in s.events],
        "snapshot_times": list(s.snapshot_times),
        "grids": [
            {"axes": [{"role": a.role, "lo": a.lo, "hi": a.hi, "n": a.n}
                      for a in g.axes]}
            for g in s.grids
        ],
        "analyses": list(s.analyses),
    }


def serialize(s: Scenario) -> str:
    """Canonical JSON form of a scenario (sorted keys, no whitespace)."""
    return json.dumps(to_config(s), sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def scenario_hash(s: Scenario) -> str:
    return hashlib.sha256(serialize(s).encode()).hexdigest()[:16]


def _check_number(cfg: dict, path: str, key: str, out: list[str],
                  required: bool = True, allow_none: bool = False):
    if key not in cfg:
        if required:
            out.append(f"{path}.{key}: missing")
        return None
    val = cfg[key]
    if val is None and allow_none:
        return None
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        out.append(f"{path}.{key}: not a number")
        return None
    return float(val)


def validate_config(cfg: dict) -> list[str]:
    """Every invariant violation in a raw config dict, with field paths."""
    out: list[str] = []
    if not isinstance(cfg, dict):
        return ["config: not a JSON object"]
    if cfg.get("units") not in ("natural", "SI"):
        out.append("units: must be 'natural' or 'SI'")
    if not isinstance(cfg.get("name"), str) or not cfg.get("name"):
        out.append("name: must be a non-empty string")

    p = cfg.get("params")
    m = M = v = V = None
    if not isinstance(p, dict):
        out.append("params: missing object")
    else:
        m = _check_number(p, "params", "m", out)
        M = _check_number(p, "params", "M", out)
        v = _check_number(p, "params", "v", out)
        V = _check_number(p, "params", "V", out)
        if m is not None and m <= 0:
            out.append("params.m: must be positive")
        if M is not None and M <= 0:
            out.append("params.M: must be positive")
        if v is not None and V is not None and not v > V:
            out.append("params.v: must exceed params.V for reflection")

    w = cfg.get("wavegroup")
    dk = dK = x1c = x2c = t0 = None
    if not isinstance(w, dict):
        out.append("wavegroup: missing object")
    else:
        dk = _check_number(w, "wavegroup", "dk", out)
        dK = _check_number(w, "wavegroup", "dK", out)
        x1c = _check_number(w, "wavegroup", "x1c", out)
        x2c = _check_number(w, "wavegroup", "x2c", out)
        t0 = _check_number(w, "wavegroup", "t0", out, required=False) or 0.0
        if dk is not None and dk <= 0:
            out.append("wavegroup.dk: must be positive")
        if dK is not None and dK <= 0:
            out.append("wavegroup.dK: must be positive")
        if None not in (x1c, x2c) and not x1c < x2c:
            out.append("wavegroup.x1c: must lie left of wavegroup.x2c")
        if None not in (dk, dK, x1c, x2c) and dk > 0 and dK > 0:
            if not (x2c - x1c) > 5.0 * (1.0 / dk + 1.0 / dK):
                out.append("wavegroup: centre separation below five combined widths")

    for i, e in enumerate(cfg.get("events", [])):
        if not isinstance(e, dict):
            out.append(f"events[{i}]: not an object")
            continue
        t10 = _check_number(e, f"events[{i}]", "t10", out)
        _check_number(e, f"events[{i}]", "x10", out, required=False, allow_none=True)
        dx1 = _check_number(e, f"events[{i}]", "dx1", out, required=False)
        if dx1 is not None and dx1 <= 0:
            out.append(f"events[{i}].dx1: must be positive")
        if t10 is not None and t0 is not None and t10 < t0:
            out.append(f"events[{i}].t10: precedes wavegroup.t0")

    for i, g in enumerate(cfg.get("grids", [])):
        axes = g.get("axes") if isinstance(g, dict) else None
        if not isinstance(axes, list) or not axes:
            out.append(f"grids[{i}]: missing axes")
            continue
        for j, a in enumerate(axes):
            path = f"grids[{i}].axes[{j}]"
            if not isinstance(a, dict):
                out.append(f"{path}: not an object")
                continue
            if a.get("role") not in ("x1", "x2", "t1", "t2"):
                out.append(f"{path}.role: invalid")
            lo = _check_number(a, path, "lo", out)
            hi = _check_number(a, path, "hi", out)
            n = a.get("n")
            if not isinstance(n, int) or n < 16:
                out.append(f"{path}.n: must be an integer >= 16")
            if None not in (lo, hi) and not hi > lo:
                out.append(f"{path}: degenerate range")

    for i, a in enumerate(cfg.get("analyses", [])):
        if a not in _KNOWN_ANALYSES:
            out.append(f"analyses[{i}]: unknown analysis '{a}'")
    return out


def from_config(cfg: dict) -> Scenario:
    violations = validate_config(cfg)
    if violations:
        raise ScenarioValidationError(violations)
    if cfg["units"] == "natural":
        params = PhysicalParams.natural(M=cfg["params"]["M"], v=cfg["params"]["v"],
                                        V=cfg["params"]["V"], m=cfg["params"]["m"])
    else:
        params = PhysicalParams(m=cfg["params"]["m"], M=cfg["params"]["M"],
                                v=cfg["params"]["v"], V=cfg["params"]["V"])
    w = cfg["wavegroup"]
    spec = WavegroupSpec.from_params(params, dk=w["dk"], dK=w["dK"],
                                     x1c=w["x1c"], x2c=w["x2c"],
                                     t0=w.get("t0", 0.0))
    events = tuple(RawEvent(t10=e["t10"], x10=e.get("x10"), dx1=e.get("dx1", 1e-3))
                   for e in cfg.get("events", []))
    grids = tuple(
        GridSpec(axes=tuple(AxisSpec(role=a["role"], lo=a["lo"], hi=a["hi"], n=a["n"])
                            for a in g["axes"]))
        for g in cfg.get("grids", [])
    )
    return Scenario(
        name=cfg["name"],
        units=cfg["units"],
        params=params,
        wavegroup=spec,
        events=events,
        snapshot_times=tuple(cfg.get("snapshot_times", [])),
        grids=grids,
        analyses=tuple(cfg.get("analyses", [])),
        description=cfg.get("description", ""),
    )


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    return from_config(cfg)


# ---------------------------------------------------------------------------
# preset library
# ---------------------------------------------------------------------------

def _joint_grid(spec: WavegroupSpec, times, n: int = 256) -> GridSpec:
    """Joint-PDF grid framing both packets at every listed synchronous time."""
    lo1 = lo2 = math.inf
    hi1 = hi2 = -math.inf
    for t in times:
        a, b = _support_hull(spec, t, t, axis=0, pad=6.0)
        lo1, hi1 = min(lo1, a), max(hi1, b)
        a, b = _support_hull(spec, t, t, axis=1, pad=6.0)
        lo2, hi2 = min(lo2, a), max(hi2, b)
    return GridSpec(axes=(AxisSpec("x1", lo1, hi1, n), AxisSpec("x2", lo2, hi2, n)))


def _natural_scenario(name, *, M, v, V, dk, dK, x1c, description, analyses,
                      snapshot_offsets=(), event_offsets=(), m=1.0,
                      x2c=0.0) -> Scenario:
    params = PhysicalParams.natural(M=M, v=v, V=V, m=m)
    spec = WavegroupSpec.from_params(params, dk=dk, dK=dK, x1c=x1c, x2c=x2c)
    t_c, tau = spec.collision_time, spec.tau
    times = tuple(t_c + o * tau for o in snapshot_offsets)
    events = tuple(RawEvent(t10=t_c + o * tau) for o in event_offsets)
    grids = (_joint_grid(spec, times or (t_c,)),)
    return Scenario(name=name, units="natural", params=params, wavegroup=spec,
                    events=events, snapshot_times=times, grids=grids,
                    analyses=tuple(analyses), description=description)


def _fig8_scenario() -> Scenario:
    m, M = 1.4e-25, 1e-8
    dv_atom, _ = thermal_spread(m, 1e-7)
    dV_mirror, _ = thermal_spread(M, 1.0)
    params = PhysicalParams(m=m, M=M, v=0.03, V=0.01)
    dk = m * dv_atom / params.hbar
    dK = M * dV_mirror / params.hbar
    spec = WavegroupSpec.from_params(params, dk=dk, dK=dK, x1c=-1.0e-6, x2c=0.0)
    t_c = spec.collision_time
    return Scenario(
        name="fig8", units="SI", params=params, wavegroup=spec,
        events=(RawEvent(t10=t_c),),
        snapshot_times=(t_c,),
        grids=(_joint_grid(spec, (t_c,)),),
        analyses=("regime", "beat", "split-velocities", "node-depth"),
        description="rubidium atom on a 1e-8 kg thermal mirror, SI units",
    )


def _build_presets() -> dict[str, Scenario]:
    presets: dict[str, Scenario] = {}

    presets["fig2"] = _natural_scenario(
        "fig2", M=100.0, v=50.0, V=30.0, dk=1.0, dK=2.0, x1c=-10.0,
        snapshot_offsets=(-1.0, 0.0, 1.0),
        analyses=("fringes",),
        description="mass ratio 100 joint-PDF snapshots before, during, after reflection",
    )
    for label, scale in (("a", 1.0), ("b", 2.0), ("c", 4.0)):
        presets[f"fig3-{label}"] = _natural_scenario(
            f"fig3-{label}", M=100.0, v=50.0, V=30.0, dk=scale, dK=2.0 * scale,
            x1c=-10.0, snapshot_offsets=(0.0,), analyses=("fringes",),
            description="overlap slices at increasing spectral width",
        )
    presets["fig4"] = _natural_scenario(
        "fig4", M=3.0, v=50.0, V=30.0, dk=1.0, dK=2.0, x1c=-10.0,
        snapshot_offsets=(1.0, 2.0, 3.0), event_offsets=(1.0,),
        analyses=("regime",),
        description="particle measured after reflection; mirror drifts and disperses",
    )
    presets["fig5"] = _natural_scenario(
        "fig5", M=3.0, v=50.0, V=30.0, dk=1.0, dK=2.0, x1c=-10.0,
        snapshot_offsets=(0.0, 1.0, 2.0), event_offsets=(0.0,),
        analyses=("regime", "split-velocities", "beat"),
        description="particle measured in the overlap; mirror splits into two states",
    )
    presets["fig6-m1"] = _natural_scenario(
        "fig6-m1", M=1.0, v=400.0, V=80.0, dk=1.0, dK=10.0, x1c=-6.0,
        snapshot_offsets=(-1.0, 2.0), analyses=("coherence-transfer",),
        description="equal masses exchange wavegroup widths on reflection",
    )
    presets["fig6-m20"] = _natural_scenario(
        "fig6-m20", M=20.0, v=400.0, V=80.0, dk=1.0, dK=200.0, x1c=-6.0,
        snapshot_offsets=(-1.0, 2.0), analyses=("coherence-transfer",),
        description="mass ratio 20 control: widths are not exchanged",
    )
    for label, dK in (("a", 2.0), ("b", 1.0 / 0.12), ("c", 1.0 / 0.06), ("d", 500.0)):
        presets[f"fig7-{label}"] = _natural_scenario(
            f"fig7-{label}", M=400.0, v=20.0, V=15.0, dk=1.0, dK=dK, x1c=-8.0,
            snapshot_offsets=(0.0,), analyses=("marginal-visibility",),
            description="mirror velocity-spread ladder for one-body fringe washout",
        )
    presets["fig8"] = _fig8_scenario()
    presets["fig9"] = _natural_scenario(
        "fig9", M=1.0e8, v=40.0, V=8.0, dk=1.0, dK=25000.0, x1c=-5.2,
        snapshot_offsets=(0.0,), event_offsets=(0.0,),
        analyses=("marginal-visibility", "marginal-t2-independence",
                  "node-depth", "beat"),
        description="mesoscopic-mass mirror: one-body fringes survive the mirror trace",
    )
    presets["cont"] = _natural_scenario(
        "cont", M=100.0, v=49152.0, V=29491.2, dk=1.0, dK=2.0, x1c=-8.0,
        snapshot_offsets=(0.0,), event_offsets=(0.0,),
        analyses=("continuity",),
        description="narrowband configuration for continuity-residual validation",
    )
    return presets


PRESETS: dict[str, Scenario] = _build_presets()

PRESET_GROUPS: dict[str, tuple[str, ...]] = {
    "fig3": ("fig3-a", "fig3-b", "fig3-c"),
    "fig6": ("fig6-m1", "fig6-m20"),
    "fig7": ("fig7-a", "fig7-b", "fig7-c", "fig7-d"),
}


def resolve_preset(name: str) -> tuple[Scenario, ...]:
    if name in PRESET_GROUPS:
        return tuple(PRESETS[n] for n in PRESET_GROUPS[name])
    if name in PRESETS:
        return (PRESETS[name],)
    raise KeyError(f"unknown preset '{name}'")


# ---------------------------------------------------------------------------
# event resolution and analyses
# ---------------------------------------------------------------------------

def resolve_event(scenario: Scenario, raw: RawEvent) -> MeasurementEvent:
    """Fill in a concrete detection position: the particle-marginal mode."""
    if raw.x10 is not None:
        return MeasurementEvent(x10=raw.x10, t10=raw.t10, dx1=raw.dx1)
    spec = scenario.wavegroup
    lo, hi = _support_hull(spec, raw.t10, raw.t10, axis=0)
    axis = np.linspace(lo, hi, 4097)
    curve = marginal_over_mirror(spec, axis, raw.t10, raw.t10)
    x10 = float(axis[int(np.argmax(curve.y))])
    return MeasurementEvent(x10=x10, t10=raw.t10, dx1=raw.dx1)


def overlap_slice(scenario: Scenario, axis: str = "x2", t: float | None = None,
                  n: int = 8193) -> Curve:
    """Synchronous joint-PDF slice through the overlap centre along one axis."""
    spec = scenario.wavegroup
    t = scenario.collision_time if t is None else t
    x_c = spec.collision_point
    fringe = fringe_period(scenario.params)
    half = 12.0 * max(fringe, 0.5 / spec.dk)
    if axis == "x2":
        x2 = np.linspace(x_c - half, x_c + half, n)
        y = joint_pdf(spec, x_c - 2.0 * fringe, t, x2, t)
        return Curve(x=x2, y=np.asarray(y), meta={"axis": "x2", "t": t})
    x1 = np.linspace(x_c - half, x_c + half, n)
    y = joint_pdf(spec, x1, t, x_c + 2.0 * fringe, t)
    return Curve(x=x1, y=np.asarray(y), meta={"axis": "x1", "t": t})


def _beat_window(scenario: Scenario, event: MeasurementEvent,
                 periods: float = 6.0, samples: int = 900):
    spec = scenario.wavegroup
    span = periods * math.pi / spec.beat0
    return np.linspace(event.t10, event.t10 + span, samples)


def analysis_fringes(scenario: Scenario) -> dict:
    spec = scenario.wavegroup
    eq10 = fringe_spacing(scenario.params)
    out = {"expected_spacing": eq10}
    for axis in ("x1", "x2"):
        rep = extract_fringes(overlap_slice(scenario, axis))
        out[axis] = {"spacing": rep.spacing, "visibility": rep.visibility,
                     "n_fringes": rep.n_fringes,
                     "relative_error": abs(rep.spacing - eq10) / eq10}
    return out


def analysis_beat(scenario: Scenario) -> dict:
    from mirrorsim.observables import pattern_drift_beat, transit_beat_periods

    spec = scenario.wavegroup
    event = resolve_event(scenario, scenario.events[0])
    state = collapse(spec, event)
    t_axis = _beat_window(scenario, event)
    t_mid = float(t_axis[len(t_axis) // 2])
    expected = beat_frequency(scenario.params)
    if transit_beat_periods(state, t_mid) >= 3.0:
        profiles = state.branch_profiles(t_mid)
        x2 = max(profiles, key=lambda p: p[2])[0]
        fitted = doppler_beat(state, x2, t_axis)
        method = "time-series"
    else:
        # sub-fringe mirror packet: the pattern rides the envelope, so the
        # beat is the measured fringe-crossing rate of the drifting pattern
        x1 = _fringe_axis(scenario)
        spacing = extract_fringes(
            marginal_over_mirror(spec, x1, event.t10, event.t10,
                                 n_quad=2049)).spacing
        fitted = pattern_drift_beat(state, t_axis[::40], spacing)
        method = "pattern-drift"
    return {"fitted": fitted, "expected": expected, "method": method,
            "relative_error": abs(fitted - expected) / expected}


def analysis_regime(scenario: Scenario) -> dict:
    spec = scenario.wavegroup
    out = {}
    for i, raw in enumerate(scenario.events):
        event = resolve_event(scenario, raw)
        out[f"event{i}"] = {"x10": event.x10, "t10": event.t10,
                            "regime": classify_regime(spec, event)}
    return out


def analysis_split_velocities(scenario: Scenario) -> dict:
    spec = scenario.wavegroup
    event = resolve_event(scenario, scenario.events[0])
    state = collapse(spec, event)
    samples = event.t10 + spec.tau * np.linspace(1.5, 5.0, 8)
    v_f, V_f = elastic_final_velocities(scenario.params)
    try:
        slow, fast = split_centroid_velocities(state, samples)
    except UnresolvedSplittingError as err:
        return {"resolved": False, "reason": str(err),
                "expected_slow": scenario.params.V, "expected_fast": V_f}
    return {"resolved": True, "v_slow": slow, "v_fast": fast,
            "expected_slow": scenario.params.V, "expected_fast": V_f}


def analysis_coherence_transfer(scenario: Scenario) -> dict:
    spec = scenario.wavegroup
    rep = coherence_transfer_metrics(spec, pre_t=spec.t0,
                                     post_t=scenario.collision_time + 2.0 * spec.tau)
    return {"width_particle_in": rep.width_particle_in,
            "width_mirror_in": rep.width_mirror_in,
            "width_particle_out": rep.width_particle_out,
            "width_mirror_out": rep.width_mirror_out,
            "exchange_particle": rep.exchange_particle,
            "exchange_mirror": rep.exchange_mirror}


def _fringe_axis(scenario: Scenario, margin_sigmas=(2.5, 0.3), n=3001):
    spec = scenario.wavegroup
    x_c = spec.collision_point
    sigma1 = 1.0 / spec.dk
    return np.linspace(x_c - margin_sigmas[0] * sigma1,
                       x_c - margin_sigmas[1] * sigma1, n)


def analysis_marginal_visibility(scenario: Scenario) -> dict:
    spec = scenario.wavegroup
    t = scenario.collision_time
    x1 = _fringe_axis(scenario)
    particle_side = extract_fringes(marginal_over_mirror(spec, x1, t, t, n_quad=2049))
    lo, hi = _support_hull(spec, t, t, axis=1)
    mirror_side = extract_fringes(
        marginal_over_particle(spec, np.linspace(lo, hi, 4001), t, t, n_quad=2049))
    return {"particle_visibility": particle_side.visibility,
            "particle_spacing": particle_side.spacing,
            "mirror_visibility": mirror_side.visibility}


def analysis_marginal_t2_independence(scenario: Scenario) -> dict:
    spec = scenario.wavegroup
    t_c = scenario.collision_time
    x1 = _fringe_axis(scenario)
    offsets = np.linspace(0.0, 3.0 * math.pi / spec.beat0, 4)
    curves = [marginal_over_mirror(spec, x1, t_c, t_c + dt, n_quad=2049).y
              for dt in offsets]
    peak = max(c.max() for c in curves)
    linf = max(float(np.abs(c - curves[0]).max()) for c in curves[1:])
    return {"linf_over_peak": linf / peak, "t2_offsets": list(offsets)}


def analysis_node_depth(scenario: Scenario) -> dict:
    """Mirror PDF after detection at a fringe node versus at a peak."""
    spec = scenario.wavegroup
    t_c = scenario.collision_time
    x1 = _fringe_axis(scenario)
    curve = marginal_over_mirror(spec, x1, t_c, t_c, n_quad=2049)
    i_peak = int(np.argmax(curve.y))
    fringe = fringe_period(scenario.params)
    dx = x1[1] - x1[0]
    half = max(1, int(round(0.5 * fringe / dx)))
    seg = curve.y[i_peak:i_peak + 2 * half]
    i_node = i_peak + int(np.argmin(seg))
    out = {}
    for label, idx in (("peak", i_peak), ("node", i_node)):
        event = MeasurementEvent(x10=float(x1[idx]), t10=t_c)
        state = collapse(spec, event)
        lo, hi = state.support(t_c)
        xs = np.linspace(max(lo, event.x10), hi, 4097)
        out[label] = float(state.pdf(xs, t_c).max())
    out["ratio"] = out["node"] / out["peak"]
    return out


def analysis_continuity(scenario: Scenario) -> dict:
    spec = scenario.wavegroup
    t_c = scenario.collision_time
    x_c = spec.collision_point
    fringe = fringe_period(scenario.params)
    h = fringe / 40.0
    v_mean = 0.5 * (scenario.params.v + scenario.params.V)
    steps = (h, h, h / v_mean, h / v_mean)
    x1 = x_c - 0.2 / spec.dk + np.linspace(0, 6, 7) * h
    x2 = x_c + 0.2 / spec.dk + np.linspace(0, 6, 7) * h
    healthy = continuity_residual(spec, x1, x2, t_c, t_c, steps)
    broken = continuity_residual(spec, x1, x2, t_c, t_c, steps, detune=1.1)
    order = convergence_order(spec, x1, x2, t_c, t_c, steps)
    return {"max_over_scale": healthy.max_over_scale,
            "rms_residual": healthy.rms_residual,
            "scale": healthy.scale,
            "order": order,
            "negative_control_ratio": broken.max_residual / healthy.max_residual}


_ANALYSIS_FNS = {
    "fringes": analysis_fringes,
    "beat": analysis_beat,
    "regime": analysis_regime,
    "split-velocities": analysis_split_velocities,
    "coherence-transfer": analysis_coherence_transfer,
    "marginal-visibility": analysis_marginal_visibility,
    "marginal-t2-independence": analysis_marginal_t2_independence,
    "node-depth": analysis_node_depth,
    "continuity": analysis_continuity,
}


def run_analysis(scenario: Scenario, name: str) -> dict:
    return _ANALYSIS_FNS[name](scenario)


# ---------------------------------------------------------------------------
# grid production
# ---------------------------------------------------------------------------

def joint_pdf_grid(spec: WavegroupSpec, grid: GridSpec, t1: float,
                   t2: float) -> FieldGrid:
    """Joint PDF sampled on a (x1, x2) grid with coarse-sampling flagging."""
    ax1, ax2 = grid.axes
    x1 = ax1.values()
    x2 = ax2.values()
    flags = []
    fringe = math.pi / abs(spec.K_rel0)
    step = max(x1[1] - x1[0], x2[1] - x2[0])
    if step > 0.5 * fringe:
        flags.append("coarse-sampling")
    values = joint_pdf(spec, x1[:, None], t1, x2[None, :], t2)
    return FieldGrid(grid=grid, values=np.asarray(values), kind="pdf",
                     provenance={"operation": "joint_pdf", "t1": t1, "t2": t2,
                                 "flags": flags})


def conditional_pdf_grids(scenario: Scenario, raw: RawEvent, t2_list,
                          n: int = 256) -> list[FieldGrid]:
    """Conditional mirror PDF sampled along x2, one 1D grid per listed t2.

    All snapshots share one x2 range (the hull of the conditional supports)
    so the files can be overlaid directly.
    """
    spec = scenario.wavegroup
    event = resolve_event(scenario, raw)
    state = collapse(spec, event)
    lo, hi = math.inf, -math.inf
    for t2 in t2_list:
        a, b = state.support(t2, pad=6.0)
        lo, hi = min(lo, a), max(hi, b)
    lo = max(lo, event.x10)
    x2 = np.linspace(lo, hi, n)
    out = []
    for t2 in sorted(float(t) for t in t2_list):
        grid = GridSpec(axes=(AxisSpec("x2", lo, hi, n),))
        out.append(FieldGrid(
            grid=grid, values=np.asarray(state.pdf(x2, t2)), kind="pdf",
            provenance={"operation": "conditional_pdf", "x10": event.x10,
                        "t10": event.t10, "t2": t2, "flags": []}))
    return out


def conditional_evolution_grid(scenario: Scenario, raw: RawEvent,
                               t2_lo: float, t2_hi: float, nt: int = 64,
                               nx: int = 256) -> FieldGrid:
    """Conditional mirror PDF over a dense (t2, x2) grid for one event."""
    spec = scenario.wavegroup
    event = resolve_event(scenario, raw)
    state = collapse(spec, event)
    a0, b0 = state.support(t2_lo, pad=6.0)
    a1, b1 = state.support(t2_hi, pad=6.0)
    lo, hi = max(min(a0, a1), event.x10), max(b0, b1)
    t2 = np.linspace(t2_lo, t2_hi, nt)
    x2 = np.linspace(lo, hi, nx)
    values = state.pdf(x2[None, :], t2[:, None])
    grid = GridSpec(axes=(AxisSpec("t2", t2_lo, t2_hi, nt),
                          AxisSpec("x2", lo, hi, nx)))
    return FieldGrid(grid=grid, values=np.asarray(values), kind="pdf",
                     provenance={"operation": "conditional_pdf_evolution",
                                 "x10": event.x10, "t10": event.t10,
                                 "flags": []})
