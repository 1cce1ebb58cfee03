"""Experiment configuration: flat INI-style sections, one per module.

Any omitted environment parameter falls back to the benchmark defaults, so a
minimal config only names the environment. Values are validated at load time
with errors naming the offending section, field, and bound.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .envs import (
    BeachParams,
    CyberParams,
    HeteroCyberParams,
    make_beach_env,
    make_cyber_env,
    make_hetero_cyber_env,
)
from .graphon import make_graphon
from .graphs import PLACEMENTS

ENV_NAMES = ("cyber", "hetero_cyber", "beach")
GRAPHON_KINDS = ("constant", "power_law", "cutoff_power_law")
DEFAULT_NUM_CLASSES = {"cyber": 25, "hetero_cyber": 100, "beach": 10}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GraphonConfig:
    kind: str = "power_law"
    params: dict = field(default_factory=lambda: {"exponent": 0.7})
    clamp_max: float = 1e6

    def build(self):
        return make_graphon(self.kind, clamp_max=self.clamp_max, **self.params)


@dataclass(frozen=True)
class OmdConfig:
    gamma: float = 1.0
    iterations: int = 200
    eval_every: int = 1


@dataclass(frozen=True)
class SweepConfig:
    betas: tuple = (0.51,)
    ns: tuple = (8, 16, 32, 64, 128, 256)
    samples_per_cell: int = 50
    placement: str = "equispaced"
    policy: str = "equilibrium"


@dataclass(frozen=True)
class SimulateConfig:
    n: int = 100
    beta: float = 0.51
    placement: str = "equispaced"
    policy: str = "equilibrium"


@dataclass(frozen=True)
class GraphStatsConfig:
    n: int = 2000
    beta: float = 0.51
    placement: str = "iid_uniform"


@dataclass(frozen=True)
class CutnormConfig:
    grid: int = 32
    restarts: int = 16
    subdiv: int = 4
    other: GraphonConfig | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    env_name: str = "cyber"
    env_params: object = None            # CyberParams / HeteroCyberParams / BeachParams
    graphon: GraphonConfig = field(default_factory=GraphonConfig)
    num_classes: int = 25
    omd: OmdConfig = field(default_factory=OmdConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    simulate: SimulateConfig = field(default_factory=SimulateConfig)
    graph_stats: GraphStatsConfig = field(default_factory=GraphStatsConfig)
    cutnorm: CutnormConfig = field(default_factory=CutnormConfig)
    seed: int = 0
    output_dir: str = "out"
    threads: int = 0                     # 0 = machine parallelism

    def build_env(self):
        maker = {"cyber": make_cyber_env, "hetero_cyber": make_hetero_cyber_env,
                 "beach": make_beach_env}[self.env_name]
        return maker(self.env_params)

    def build_graphon(self):
        return self.graphon.build()


def _get(parser, section, key, cast, default, check=None):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        value = cast(raw)
    except (ValueError, TypeError):
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from None
    if check is not None:
        check(section, key, value)
    return value


def _require_positive(section, key, v):
    if v <= 0:
        raise ConfigError(f"[{section}] {key} must be > 0, got {v}")


def _require_at_least_one(section, key, v):
    if v < 1:
        raise ConfigError(f"[{section}] {key} must be >= 1, got {v}")


def _require_nonnegative(section, key, v):
    if v < 0:
        raise ConfigError(f"[{section}] {key} must be >= 0, got {v}")


def _require_at_least_two(section, key, v):
    if v < 2:
        raise ConfigError(f"[{section}] {key} must be >= 2, got {v}")


def _float_list(raw):
    return tuple(float(part) for part in raw.replace(",", " ").split())


def _int_list(raw):
    return tuple(int(part) for part in raw.replace(",", " ").split())


def _bool(raw):
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(raw)


def _check_known_keys(parser, section, known):
    for key in parser.options(section):
        if key not in known:
            raise ConfigError(f"[{section}] unknown field {key!r}; expected one of {sorted(known)}")


def _env_from_parser(parser):
    if not parser.has_section("environment"):
        return "cyber", CyberParams()
    name = parser.get("environment", "name", fallback="cyber")
    if name not in ENV_NAMES:
        raise ConfigError(f"[environment] unknown name {name!r}; valid names: {', '.join(ENV_NAMES)}")

    def params_from_keys(cls, prefix=""):
        kwargs = {}
        for f in fields(cls):
            key = prefix + f.name
            if not parser.has_option("environment", key):
                continue
            raw = parser.get("environment", key)
            try:
                if f.name == "mu0":
                    kwargs[f.name] = _float_list(raw)
                elif f.name in ("boundary",):
                    kwargs[f.name] = raw.strip()
                elif f.name == "reward_sign_as_printed":
                    kwargs[f.name] = _bool(raw)
                elif f.name in ("horizon", "num_positions"):
                    kwargs[f.name] = int(raw)
                else:
                    kwargs[f.name] = float(raw)
            except (ValueError, TypeError):
                raise ConfigError(f"[environment] {key}: cannot parse {raw!r}") from None
        return kwargs

    try:
        if name == "cyber":
            known = {"name"} | {f.name for f in fields(CyberParams)}
            _check_known_keys(parser, "environment", known)
            params = CyberParams(**params_from_keys(CyberParams))
        elif name == "hetero_cyber":
            block_fields = [f.name for f in fields(CyberParams) if f.name not in ("horizon", "mu0")]
            known = {"name", "horizon", "mu0"}
            known |= {f"pri_{n}" for n in block_fields} | {f"cor_{n}" for n in block_fields}
            _check_known_keys(parser, "environment", known)
            shared = {}
            if parser.has_option("environment", "horizon"):
                shared["horizon"] = int(parser.get("environment", "horizon"))
            if parser.has_option("environment", "mu0"):
                shared["mu0"] = _float_list(parser.get("environment", "mu0"))
            defaults = HeteroCyberParams()
            pri_kwargs = {k[len("pri_"):]: float(parser.get("environment", k))
                          for k in parser.options("environment") if k.startswith("pri_")}
            cor_kwargs = {k[len("cor_"):]: float(parser.get("environment", k))
                          for k in parser.options("environment") if k.startswith("cor_")}
            params = HeteroCyberParams(
                pri=replace(defaults.pri, **pri_kwargs),
                cor=replace(defaults.cor, **cor_kwargs),
                **shared,
            )
        else:
            known = {"name"} | {f.name for f in fields(BeachParams)}
            _check_known_keys(parser, "environment", known)
            params = BeachParams(**params_from_keys(BeachParams))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[environment] {exc}") from None
    return name, params


def _graphon_from_parser(parser, section="graphon", prefix=""):
    if not parser.has_section(section) and prefix == "":
        return GraphonConfig()
    kind_key, clamp_key = prefix + "kind", prefix + "clamp_max"
    if prefix and not parser.has_option(section, kind_key):
        return None
    kind = parser.get(section, kind_key, fallback="power_law")
    if kind not in GRAPHON_KINDS:
        raise ConfigError(f"[{section}] unknown graphon kind {kind!r}; valid kinds: {', '.join(GRAPHON_KINDS)}")
    clamp_max = _get(parser, section, clamp_key, float, 1e6, _require_positive)
    names = {"constant": ("value",), "power_law": ("exponent",),
             "cutoff_power_law": ("exponent", "cutoff")}[kind]
    params = {}
    for name in names:
        key = prefix + name
        if parser.has_option(section, key):
            params[name] = _get(parser, section, key, float, None)
        elif name == "exponent":
            params[name] = 0.7
        elif name == "cutoff":
            params[name] = 0.04
        elif name == "value":
            params[name] = 1.0
    cfg = GraphonConfig(kind=kind, params=params, clamp_max=clamp_max)
    try:
        cfg.build()
    except ValueError as exc:
        raise ConfigError(f"[{section}] {exc}") from None
    return cfg


def parse_config(source) -> ExperimentConfig:
    """Load and validate a config from a path or from raw text."""
    parser = configparser.ConfigParser(interpolation=None)
    text = source
    if "\n" not in str(source) and not str(source).lstrip().startswith("["):
        with open(source) as fh:
            text = fh.read()
    try:
        parser.read_string(str(text))
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from None

    known_sections = {"experiment", "environment", "graphon", "discretization", "omd",
                      "sweep", "simulate", "graph_stats", "cutnorm"}
    for section in parser.sections():
        if section not in known_sections:
            raise ConfigError(f"unknown section [{section}]; expected one of {sorted(known_sections)}")

    env_name, env_params = _env_from_parser(parser)
    graphon = _graphon_from_parser(parser)

    if parser.has_section("experiment"):
        _check_known_keys(parser, "experiment", {"seed", "output_dir", "threads"})
    seed = _get(parser, "experiment", "seed", int, 0) if parser.has_section("experiment") else 0
    output_dir = (parser.get("experiment", "output_dir", fallback="out")
                  if parser.has_section("experiment") else "out")
    threads = _get(parser, "experiment", "threads", int, 0) if parser.has_section("experiment") else 0
    if threads < 0:
        raise ConfigError(f"[experiment] threads must be >= 0, got {threads}")
    if seed < 0:
        raise ConfigError(f"[experiment] seed must be >= 0, got {seed}")

    num_classes = DEFAULT_NUM_CLASSES[env_name]
    if parser.has_section("discretization"):
        _check_known_keys(parser, "discretization", {"num_classes"})
        num_classes = _get(parser, "discretization", "num_classes", int,
                           num_classes, _require_at_least_one)

    if parser.has_section("omd"):
        _check_known_keys(parser, "omd", {"gamma", "iterations", "eval_every"})
    omd = OmdConfig()
    if parser.has_section("omd"):
        omd = OmdConfig(
            gamma=_get(parser, "omd", "gamma", float, omd.gamma, _require_positive),
            iterations=_get(parser, "omd", "iterations", int, omd.iterations, _require_nonnegative),
            eval_every=_get(parser, "omd", "eval_every", int, omd.eval_every, _require_at_least_one),
        )

    def check_betas(s, k, v):
        for b in v:
            if not 0.0 < b < 1.0:
                raise ConfigError(f"[{s}] {k}: beta {b} must lie in (0,1)")

    def _check_one_beta(s, k, v):
        check_betas(s, k, [v])

    def check_ns(s, k, v):
        if not v:
            raise ConfigError(f"[{s}] {k} must list at least one N")
        for n in v:
            if n < 1:
                raise ConfigError(f"[{s}] {k}: N {n} must be >= 1")

    def check_placement(s, k, v):
        if v not in PLACEMENTS:
            raise ConfigError(f"[{s}] {k} must be one of {PLACEMENTS}, got {v!r}")

    def check_policy(s, k, v):
        if v not in ("equilibrium", "uniform"):
            raise ConfigError(f"[{s}] {k} must be 'equilibrium' or 'uniform', got {v!r}")

    sweep = SweepConfig()
    if parser.has_section("sweep"):
        _check_known_keys(parser, "sweep", {"betas", "ns", "samples_per_cell", "placement", "policy"})
        sweep = SweepConfig(
            betas=_get(parser, "sweep", "betas", _float_list, sweep.betas, check_betas),
            ns=_get(parser, "sweep", "ns", _int_list, sweep.ns, check_ns),
            samples_per_cell=_get(parser, "sweep", "samples_per_cell", int,
                                  sweep.samples_per_cell, _require_at_least_two),
            placement=_get(parser, "sweep", "placement", str.strip, sweep.placement, check_placement),
            policy=_get(parser, "sweep", "policy", str.strip, sweep.policy, check_policy),
        )
        if not sweep.betas:
            raise ConfigError("[sweep] betas must list at least one value")

    simulate = SimulateConfig()
    if parser.has_section("simulate"):
        _check_known_keys(parser, "simulate", {"n", "beta", "placement", "policy"})
        simulate = SimulateConfig(
            n=_get(parser, "simulate", "n", int, simulate.n, _require_at_least_one),
            beta=_get(parser, "simulate", "beta", float, simulate.beta, _check_one_beta),
            placement=_get(parser, "simulate", "placement", str.strip, simulate.placement, check_placement),
            policy=_get(parser, "simulate", "policy", str.strip, simulate.policy, check_policy),
        )

    graph_stats = GraphStatsConfig()
    if parser.has_section("graph_stats"):
        _check_known_keys(parser, "graph_stats", {"n", "beta", "placement"})
        graph_stats = GraphStatsConfig(
            n=_get(parser, "graph_stats", "n", int, graph_stats.n, _require_at_least_one),
            beta=_get(parser, "graph_stats", "beta", float, graph_stats.beta, _check_one_beta),
            placement=_get(parser, "graph_stats", "placement", str.strip,
                           graph_stats.placement, check_placement),
        )

    cutnorm = CutnormConfig()
    if parser.has_section("cutnorm"):
        known = {"grid", "restarts", "subdiv", "b_kind", "b_value", "b_exponent", "b_cutoff", "b_clamp_max"}
        _check_known_keys(parser, "cutnorm", known)
        cutnorm = CutnormConfig(
            grid=_get(parser, "cutnorm", "grid", int, cutnorm.grid, _require_at_least_one),
            restarts=_get(parser, "cutnorm", "restarts", int, cutnorm.restarts, _require_at_least_one),
            subdiv=_get(parser, "cutnorm", "subdiv", int, cutnorm.subdiv, _require_at_least_one),
            other=_graphon_from_parser(parser, "cutnorm", prefix="b_"),
        )

    return ExperimentConfig(
        env_name=env_name, env_params=env_params, graphon=graphon, num_classes=num_classes,
        omd=omd, sweep=sweep, simulate=simulate, graph_stats=graph_stats, cutnorm=cutnorm,
        seed=seed, output_dir=output_dir, threads=threads,
    )


def canonical_text(cfg: ExperimentConfig) -> str:
    """Stable textual form of the resolved config, used for hashing."""

    def render(value):
        if isinstance(value, float):
            return repr(value)
        if isinstance(value, (tuple, list, np.ndarray)):
            return "(" + ",".join(render(v) for v in value) + ")"
        return repr(value)

    lines = []

    def walk(prefix, obj):
        if hasattr(obj, "__dataclass_fields__"):
            for f in sorted(obj.__dataclass_fields__):
                walk(f"{prefix}{f}.", getattr(obj, f))
        elif isinstance(obj, dict):
            for k in sorted(obj):
                walk(f"{prefix}{k}.", obj[k])
        else:
            lines.append(f"{prefix[:-1]}={render(obj)}")

    walk("", cfg)
    return "\n".join(lines)


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(canonical_text(cfg).encode()).hexdigest()[:16]
