"""Scenario files: YAML documents validated against dataclass schemas."""

from __future__ import annotations

import copy
import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from ..admittance import AdmittanceGains
from ..dcmctl import DcmGains
from ..errors import ScenarioInvalid
from ..estimator import NoiseConfig
from ..lipm import LipmParams
from ..pattern import Foot, Footstep, FootstepPlan
from ..plant import ContactParams, Disturbance, Patch, PlantParams, Terrain
from ..spatial import Transform
from ..wrenchdist import DistributionWeights

BUNDLED = ("standing", "flat_walk", "single_step_18p5cm", "airbus_stairs", "push_recovery")

_TOP_KEYS = {"name", "description", "duration", "dt", "seed", "terrain", "plan", "timing",
             "swing", "robot", "sole", "dcm", "admittance", "distribution", "mpc", "plant",
             "contact", "estimator", "disturbances", "fall_threshold"}


@dataclass(frozen=True)
class SoleParams:

    half_length: float = 0.112
    half_width: float = 0.065
    friction: float = 0.7
    p_min: float = 15.0


@dataclass(frozen=True)
class TimingParams:

    single_support: float = 1.4
    double_support: float = 0.2
    initial_standing: float = 1.0
    final_standing: float = 2.0


@dataclass(frozen=True)
class SwingParams:

    apex_height: float = 0.24
    window_start: float = 0.25
    window_end: float = 0.75
    # preview of the swing target compensating the actuator lag
    lead: float = 0.05


@dataclass(frozen=True)
class MpcConfig:

    horizon: int = 16
    sampling_period: float = 0.1
    zmp_weight: float = 1000.0
    velocity_weight: float = 10.0
    jerk_weight: float = 1.0
    zmp_margin: float = 0.02


@dataclass(frozen=True)
class EstimatorConfig:

    cutoff: float = 40.0
    pressure_deadband: float = 10.0


@dataclass(frozen=True)
class Scenario:

    name: str
    terrain: Terrain
    plan: FootstepPlan
    duration: float = None
    dt: float = 0.005
    seed: int = 0
    robot: LipmParams = LipmParams()
    sole: SoleParams = SoleParams()
    timing: TimingParams = TimingParams()
    swing: SwingParams = SwingParams()
    dcm: DcmGains = DcmGains()
    admittance: AdmittanceGains = AdmittanceGains()
    distribution: DistributionWeights = DistributionWeights()
    mpc: MpcConfig = MpcConfig()
    plant: PlantParams = PlantParams()
    estimator: EstimatorConfig = EstimatorConfig()
    noise: NoiseConfig = NoiseConfig()
    disturbances: tuple = ()
    fall_threshold: float = 0.3
    raw: dict = field(default=None, compare=False, repr=False)


def _block(cls, data, where):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ScenarioInvalid(f"{where}: expected a mapping")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ScenarioInvalid(f"{where}: unknown keys {sorted(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ScenarioInvalid(f"{where}: {exc}") from exc


def _vec(v, n, where):
    try:
        arr = np.asarray(v, dtype=float).reshape(n)
    except (TypeError, ValueError) as exc:
        raise ScenarioInvalid(f"{where}: expected {n} numbers") from exc
    if not np.isfinite(arr).all():
        raise ScenarioInvalid(f"{where}: values must be finite")
    return arr


def _terrain(data):
    if data is None:
        return Terrain.flat()
    if not isinstance(data, dict) or len(data) != 1:
        raise ScenarioInvalid("terrain: expected exactly one of flat, stairs, patches")
    (kind, spec), = data.items()
    try:
        if kind == "flat":
            return Terrain.flat(**(spec or {}))
        if kind == "stairs":
            return Terrain.stairs(**spec)
        if kind == "patches":
            return Terrain([Patch(**p) for p in spec])
    except (TypeError, ValueError) as exc:
        raise ScenarioInvalid(f"terrain.{kind}: {exc}") from exc
    raise ScenarioInvalid(f"terrain: unknown kind {kind!r}")


def _step(foot, position, yaw, sole):
    return Footstep(Transform.from_pose(position, yaw=yaw), foot, sole.half_length,
                    sole.half_width)


def _plan(data, timing: TimingParams, sole: SoleParams):
    data = dict(data or {})
    allowed = {"initial", "steps", "stairs", "walk"}
    if set(data) - allowed:
        raise ScenarioInvalid(f"plan: unknown keys {sorted(set(data) - allowed)}")
    init = data.get("initial", {}) or {}
    left = _step(Foot.LEFT, _vec(init.get("left", [0.0, 0.09, 0.0]), 3, "plan.initial.left"),
                 0.0, sole)
    right = _step(Foot.RIGHT, _vec(init.get("right", [0.0, -0.09, 0.0]), 3,
                                   "plan.initial.right"), 0.0, sole)
    steps = []
    if "stairs" in data:
        s = data["stairs"]
        n, length, height = int(s["n"]), float(s["length"]), float(s["height"])
        first = Foot(s.get("first", "right"))
        x0 = float(s.get("x0", 0.0))
        for k in range(1, n + 1):
            for foot in (first, first.other):
                y = left.position[1] if foot is Foot.LEFT else right.position[1]
                steps.append(_step(foot, [x0 + k * length, y, k * height], 0.0, sole))
    elif "walk" in data:
        s = data["walk"]
        n, length = int(s["n"]), float(s["length"])
        foot = Foot(s.get("first", "right"))
        for k in range(1, n + 1):
            y = left.position[1] if foot is Foot.LEFT else right.position[1]
            # the last step closes the stance beside the previous foot
            x = min(k, n - 1) * length
            steps.append(_step(foot, [x, y, 0.0], 0.0, sole))
            foot = foot.other
    for i, s in enumerate(data.get("steps", []) or []):
        try:
            foot = Foot(s["foot"])
            steps.append(_step(foot, _vec(s["position"], 3, f"plan.steps[{i}]"),
                               float(s.get("yaw", 0.0)), sole))
        except (KeyError, ValueError) as exc:
            raise ScenarioInvalid(f"plan.steps[{i}]: {exc}") from exc
    try:
        return FootstepPlan(left, right, tuple(steps), timing.single_support,
                            timing.double_support, timing.initial_standing,
                            timing.final_standing)
    except ValueError as exc:
        raise ScenarioInvalid(f"plan: {exc}") from exc


def _disturbance(d, i):
    where = f"disturbances[{i}]"
    if not isinstance(d, dict):
        raise ScenarioInvalid(f"{where}: expected a mapping")
    allowed = {"t_start", "duration", "force", "impulse", "foot", "ankle_offset"}
    if set(d) - allowed:
        raise ScenarioInvalid(f"{where}: unknown keys {sorted(set(d) - allowed)}")
    try:
        t0 = float(d["t_start"])
        dur = float(d.get("duration", 0.1))
        if "impulse" in d:
            return Disturbance.impulse(t0, _vec(d["impulse"], 3, where), dur)
        foot = Foot(d["foot"]) if "foot" in d else None
        return Disturbance(t0, dur, tuple(_vec(d.get("force", [0, 0, 0]), 3, where)), foot,
                           tuple(_vec(d.get("ankle_offset", [0, 0]), 2, where)))
    except (KeyError, ValueError) as exc:
        raise ScenarioInvalid(f"{where}: {exc}") from exc


def parse_scenario(data: dict) -> Scenario:
    """Build a validated scenario from a parsed YAML mapping."""
    if not isinstance(data, dict):
        raise ScenarioInvalid("scenario must be a mapping")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ScenarioInvalid(f"unknown top-level keys {sorted(unknown)}")
    raw = copy.deepcopy(data)
    sole = _block(SoleParams, data.get("sole"), "sole")
    timing = _block(TimingParams, data.get("timing"), "timing")
    est = dict(data.get("estimator") or {})
    noise = _block(NoiseConfig, est.pop("noise", None), "estimator.noise")
    estimator = _block(EstimatorConfig, est, "estimator")
    contact = _block(ContactParams, {"friction": sole.friction,
                                     "half_length": sole.half_length,
                                     "half_width": sole.half_width,
                                     **(data.get("contact") or {})}, "contact")
    plant_data = dict(data.get("plant") or {})
    robot = _block(LipmParams, data.get("robot"), "robot")
    plant_data.setdefault("mass", robot.mass)
    plant_data.setdefault("com_height", robot.com_height)
    plant_data.setdefault("gravity", robot.gravity)
    plant = _block(PlantParams, {**plant_data, "contact": contact}, "plant")
    dt = float(data.get("dt", 0.005))
    duration = data.get("duration")
    if not dt > 0:
        raise ScenarioInvalid("dt must be positive")
    if duration is not None and not float(duration) > 0:
        raise ScenarioInvalid("duration must be positive")
    disturbances = tuple(_disturbance(d, i)
                         for i, d in enumerate(data.get("disturbances") or []))
    threshold = float(data.get("fall_threshold", 0.3))
    if not threshold > 0:
        raise ScenarioInvalid("fall_threshold must be positive")
    return Scenario(
        name=str(data.get("name", "unnamed")),
        terrain=_terrain(data.get("terrain")),
        plan=_plan(data.get("plan"), timing, sole),
        duration=None if duration is None else float(duration),
        dt=dt, seed=int(data.get("seed", 0)), robot=robot, sole=sole, timing=timing,
        swing=_block(SwingParams, data.get("swing"), "swing"),
        dcm=_block(DcmGains, data.get("dcm"), "dcm"),
        admittance=_block(AdmittanceGains, data.get("admittance"), "admittance"),
        distribution=_block(DistributionWeights, data.get("distribution"), "distribution"),
        mpc=_block(MpcConfig, data.get("mpc"), "mpc"),
        plant=plant, estimator=estimator, noise=noise, disturbances=disturbances,
        fall_threshold=threshold, raw=raw)


def load_scenario(source) -> Scenario:
    """Load a scenario from a path or a bundled scenario name."""
    path = Path(source)
    if not path.exists() and str(source) in BUNDLED:
        text = resources.files("dcmwalk.scenarios").joinpath(f"{source}.yaml").read_text()
    else:
        try:
            text = path.read_text()
        except OSError as exc:
            raise ScenarioInvalid(f"cannot read scenario {source}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioInvalid(f"malformed scenario: {exc}") from exc
    return parse_scenario(data)


def with_override(scenario: Scenario, dotted: str, value) -> Scenario:
    """Copy of ``scenario`` with one raw key replaced, e.g. ``dcm.k_p``."""
    data = copy.deepcopy(scenario.raw)
    node = data
    keys = dotted.split(".")
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ScenarioInvalid(f"cannot override {dotted}: {key} is not a block")
    node[keys[-1]] = value
    return parse_scenario(data)
