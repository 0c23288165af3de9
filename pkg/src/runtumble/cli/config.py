"""Scenario files.

A scenario is a TOML file with a top-level `pipeline` and `seed` and the tables
`[model]`, `[run]`, `[initial]`, `[probe]` and `[particles]`, every key optional:

```toml
pipeline = "steady"
seed = 7

[model]
chi = 0.5
L = 30.0
n_x = 1200
velocity_set = "two_velocity"

[run]
T = 50.0
```

The resolved scenario serializes to a canonical JSON document whose SHA-256 is
the scenario hash recorded in every output.
"""

import dataclasses
import hashlib
import json
import sys
import types
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal, Union, get_args, get_origin, get_type_hints

import numpy as np

from runtumble.errors import ConfigError, DomainError
from runtumble.model import (
    DistributionField,
    KernelSpec,
    PhaseGrid,
    Regularized,
    Sharp,
    Surgical,
    TruncatedGainComplement,
)
from runtumble.semigroup import (
    OPERATOR_TAGS,
    DtPolicy,
    GeneratorMatrix,
    OperatorTag,
    Scheme,
    assemble_generator,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

PipelineName = Literal[
    'simulate',
    'steady',
    'spectrum',
    'drift-check',
    'disperse',
    'average-probe',
    'particles',
    'fit-decay',
]
PIPELINES: tuple[str, ...] = get_args(PipelineName)

KernelName = Literal['sharp', 'regularized', 'surgical', 'truncated_gain_complement']
ShapeName = Literal['gaussian_blob', 'indicator', 'two_velocity_exact', 'noise']
SteadyMethodName = Literal['long_time', 'power_iteration', 'direct']


def _domain_checked(section: str, build: Callable[[], object]) -> None:
    try:
        build()
    except DomainError as e:
        raise ConfigError(str(e), field=section) from e


@dataclass(frozen=True)
class ModelSection:
    """Phase grid, turning kernel and operator."""

    chi: float = 0.5
    dim: int = 1
    L: float = 30.0
    n_x: int = 1200
    n_v: int = 32
    n_r: int = 8
    n_theta: int = 16
    velocity_set: Literal['ball', 'two_velocity'] = 'ball'
    kernel: KernelName = 'sharp'
    R: float | None = None
    delta1: float = 0.1
    delta2: float = 0.1
    delta3: float = 0.1
    gamma: float = 0.1
    tag: OperatorTag = 'L'
    scheme: Scheme = 'upwind'

    def __post_init__(self) -> None:
        if not 0.0 < self.chi < 1.0:
            raise ConfigError(f'chi must lie in (0, 1), got {self.chi!r}', field='model.chi')
        if self.dim not in (1, 2):
            raise ConfigError(f'dim must be 1 or 2, got {self.dim!r}', field='model.dim')
        if not self.L > 0:
            raise ConfigError(f'L must be positive, got {self.L!r}', field='model.L')
        if self.n_x < 2:
            raise ConfigError(f'n_x must be at least 2, got {self.n_x!r}', field='model.n_x')
        if self.gamma < 0:
            raise ConfigError(f'gamma must be nonnegative, got {self.gamma!r}', field='model.gamma')
        if self.tag not in OPERATOR_TAGS:
            raise ConfigError(f'unknown operator tag {self.tag!r}', field='model.tag')
        if self.scheme not in ('upwind', 'muscl'):
            raise ConfigError(f'unknown scheme {self.scheme!r}', field='model.scheme')
        _domain_checked('model', self.grid)
        _domain_checked('model', self.kernel_spec)
        R = self.R
        if self.tag in ('B', 'A_surgical') and self.kernel != 'surgical':
            raise ConfigError(f'tag {self.tag} needs kernel = "surgical"', field='model.kernel')
        if self.tag in ('B1', 'A1', 'A0c') and R is None:
            raise ConfigError(f'tag {self.tag} needs a truncation radius', field='model.R')
        if R is not None and self.tag not in ('L', 'B0', 'B1') and 2.0 * R > self.L:
            raise ConfigError(
                f'2R = {2.0 * R:g} exceeds the box half width L = {self.L:g}', field='model.R'
            )

    def grid(self) -> PhaseGrid:
        return PhaseGrid(
            dim=self.dim,
            L=self.L,
            n_x=self.n_x,
            n_v=self.n_v,
            n_r=self.n_r,
            n_theta=self.n_theta,
            velocity_set=self.velocity_set,
        )

    def kernel_spec(self) -> KernelSpec:
        match self.kernel:
            case 'sharp':
                return KernelSpec(self.chi, Sharp())
            case 'regularized':
                return KernelSpec(self.chi, Regularized(self.delta3))
            case 'surgical' | 'truncated_gain_complement' if self.R is None:
                raise ConfigError(f'kernel {self.kernel!r} needs R', field='model.R')
            case 'surgical':
                return KernelSpec(
                    self.chi, Surgical(self.R, self.delta1, self.delta2, self.delta3)
                )
            case 'truncated_gain_complement':
                return KernelSpec(self.chi, TruncatedGainComplement(self.R))
            case _:
                raise ConfigError(f'unknown kernel {self.kernel!r}', field='model.kernel')

    def generator(self, tag: OperatorTag | None = None) -> GeneratorMatrix:
        """Assemble `tag` (by default the configured one) on the configured grid."""
        tag = tag or self.tag
        kernel = self.kernel_spec()
        if tag in ('L', 'B0', 'B1', 'A1', 'A0c') and self.kernel == 'surgical':
            kernel = KernelSpec(self.chi, Sharp())
        return assemble_generator(tag, self.grid(), kernel, self.R, scheme=self.scheme)


@dataclass(frozen=True)
class RunSection:
    """Time horizon and stepping.

    With `evolve = false` the `simulate` pipeline skips the evolution of the
    configured operator and runs only the probes that do not read its trace.
    """

    T: float = 50.0
    cfl: float = 0.5
    dt: float | None = None
    record_every: int = 1
    snapshot_every: int | None = None
    evolve: bool = True

    def __post_init__(self) -> None:
        if not self.T > 0:
            raise ConfigError(f'T must be positive, got {self.T!r}', field='run.T')
        self.dt_policy()

    def dt_policy(self) -> DtPolicy:
        try:
            return DtPolicy(
                cfl=self.cfl,
                dt=self.dt,
                record_every=self.record_every,
                snapshot_every=self.snapshot_every,
            )
        except ConfigError as e:
            raise ConfigError(str(e), field='run') from e


@dataclass(frozen=True)
class InitialCondition:
    """A named initial shape.

    `x0` is the center along the first axis; `sigma` the width of the blob or of
    the noise envelope; `r` the radius of the indicator; `skew` in `(-1, 1)`
    multiplies the shape by `1 + skew tanh((x1 - x0) / sigma)`. The noise draws
    from `seed`, or from the scenario seed when unset.
    """

    shape: ShapeName = 'gaussian_blob'
    x0: float = 0.0
    sigma: float = 1.0
    r: float = 0.5
    skew: float = 0.0
    seed: int | None = None

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ConfigError(f'sigma must be positive, got {self.sigma!r}', field='initial.sigma')
        if not self.r > 0:
            raise ConfigError(f'r must be positive, got {self.r!r}', field='initial.r')
        if not -1.0 < self.skew < 1.0:
            raise ConfigError(f'skew must lie in (-1, 1), got {self.skew!r}', field='initial.skew')

    def build(self, grid: PhaseGrid, chi: float, seed: int = 0) -> DistributionField:
        """The initial field; every shape but `two_velocity_exact` has mass 1."""
        x = grid.x_nodes
        center = np.zeros(grid.dim)
        center[0] = self.x0
        r2 = np.sum((x - center) ** 2, axis=-1)
        match self.shape:
            case 'gaussian_blob':
                values = np.exp(-r2 / (2.0 * self.sigma**2))[:, None] * np.ones(grid.n_velocities)
            case 'indicator':
                inside = r2 <= self.r**2
                if not inside.any():
                    inside[int(np.argmin(r2))] = True
                values = inside.astype(float)[:, None] * np.ones(grid.n_velocities)
            case 'two_velocity_exact':
                if grid.velocity_set != 'two_velocity':
                    raise ConfigError(
                        'two_velocity_exact needs velocity_set = "two_velocity"',
                        field='initial.shape',
                    )
                profile = 0.5 * chi * np.exp(-chi * np.abs(x[:, 0]))
                return DistributionField(grid, np.repeat(profile[:, None], 2, axis=1))
            case 'noise':
                rng = np.random.default_rng(self.seed if self.seed is not None else seed)
                envelope = np.exp(-r2 / (2.0 * self.sigma**2))[:, None]
                values = rng.random(grid.shape) * envelope
            case _:
                raise ConfigError(f'unknown shape {self.shape!r}', field='initial.shape')
        if self.skew:
            values = values * (1.0 + self.skew * np.tanh((x[:, 0] - self.x0) / self.sigma))[:, None]
        f = DistributionField(grid, values)
        total = f.integrate()
        if not total > 0:
            raise ConfigError('the initial shape has no mass on the grid', field='initial')
        return f * (1.0 / total)


@dataclass(frozen=True)
class ProbeSection:
    """Probes run after the pipeline and their parameters.

    `T_max` is the horizon of the hypocoercive norms, `20 / |a*|` if unset, and of
    the averaging functional, 10 if unset.
    """

    probes: tuple[str, ...] = ()
    method: SteadyMethodName = 'direct'
    tol: float = 1e-9
    max_iter: int = 200_000
    n_probes: int = 4
    gap_tolerance: float = 0.2
    steady_tolerance: float = 5e-3
    k: float = 2.0
    ell: float = 1.0
    R: float = 2.0
    blobs: tuple[float, ...] = (2.0, 1.0, 0.0)
    n_times: int = 24
    n_quadrature: int = 129
    T_max: float | None = None
    family_size: int = 20
    refinement_tolerance: float = 0.2
    eta1: float = 0.01
    eta2: float = 0.01
    fit_mode: Literal['exponential', 'polynomial'] = 'exponential'
    window: tuple[float, ...] | None = None
    r_squared: float = 0.99
    input: str | None = None

    def __post_init__(self) -> None:
        if self.window is not None and (len(self.window) != 2 or not self.window[0] < self.window[1]):
            raise ConfigError(f'window must be [t1, t2] with t1 < t2, got {self.window!r}', field='probe.window')
        if not 0 < self.ell < self.k:
            raise ConfigError(f'need 0 < ell < k, got ell={self.ell!r}, k={self.k!r}', field='probe.ell')
        if self.n_probes < 1:
            raise ConfigError(f'n_probes must be positive, got {self.n_probes!r}', field='probe.n_probes')
        if self.family_size < 1:
            raise ConfigError(f'family_size must be positive, got {self.family_size!r}', field='probe.family_size')
        if self.T_max is not None and not self.T_max > 0:
            raise ConfigError(f'T_max must be positive, got {self.T_max!r}', field='probe.T_max')

    def window_or_none(self) -> tuple[float, float] | None:
        return None if self.window is None else (self.window[0], self.window[1])


@dataclass(frozen=True)
class ParticleSection:
    """Monte Carlo ensemble settings."""

    n: int = 100_000
    times: tuple[float, ...] = (20.0,)
    tolerance: float = 0.02
    compare: bool = True

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigError(f'n must be positive, got {self.n!r}', field='particles.n')
        if not self.times or any(b <= a for a, b in zip(self.times, self.times[1:])) or self.times[0] <= 0:
            raise ConfigError(
                f'times must be positive and increasing, got {self.times!r}', field='particles.times'
            )


@dataclass(frozen=True)
class Scenario:
    """A resolved scenario.

    Examples
    --------
    >>> scenario = Scenario.from_dict({'pipeline': 'drift-check', 'model': {'gamma': 0.1}})
    >>> scenario.model.chi, scenario.model.gamma
    (0.5, 0.1)
    >>> len(scenario.scenario_hash())
    64
    >>> Scenario.from_dict({'model': {'chi': 'half'}})
    Traceback (most recent call last):
    ...
    runtumble.errors.ConfigError: model.chi: expected float, got 'half'
    """

    pipeline: PipelineName = 'simulate'
    seed: int = 0
    model: ModelSection = field(default_factory=ModelSection)
    run: RunSection = field(default_factory=RunSection)
    initial: InitialCondition = field(default_factory=InitialCondition)
    probe: ProbeSection = field(default_factory=ProbeSection)
    particles: ParticleSection = field(default_factory=ParticleSection)

    def __post_init__(self) -> None:
        if self.pipeline not in PIPELINES:
            raise ConfigError(f'unknown pipeline {self.pipeline!r}', field='pipeline')
        if self.seed < 0:
            raise ConfigError(f'seed must be nonnegative, got {self.seed!r}', field='seed')

    def to_dict(self) -> dict[str, Any]:
        return _plain(dataclasses.asdict(self))

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(',', ':'))

    def scenario_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode('utf-8')).hexdigest()

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> 'Scenario':
        """Validate a parsed document; raises `ConfigError` naming the field."""
        sections = {
            'model': ModelSection,
            'run': RunSection,
            'initial': InitialCondition,
            'probe': ProbeSection,
            'particles': ParticleSection,
        }
        kwargs: dict[str, Any] = {}
        hints = get_type_hints(cls)
        for key, value in data.items():
            if key in sections:
                if not isinstance(value, dict):
                    raise ConfigError(f'expected a table, got {value!r}', field=key)
                kwargs[key] = _build(key, sections[key], value)
            elif key in ('pipeline', 'seed'):
                kwargs[key] = _coerce(key, hints[key], value)
            else:
                raise ConfigError('unknown key', field=key)
        return cls(**kwargs)

    def with_overrides(self, **overrides: Any) -> 'Scenario':
        """Replace dotted fields (`'model.chi'`) or top-level ones; re-validates."""
        scenario = self
        for dotted, value in overrides.items():
            if value is None:
                continue
            section, _, name = dotted.rpartition('.')
            if not section:
                scenario = dataclasses.replace(scenario, **{name: value})
                continue
            current = getattr(scenario, section)
            scenario = dataclasses.replace(
                scenario, **{section: dataclasses.replace(current, **{name: value})}
            )
        return scenario


def _plain(obj: Any) -> Any:
    match obj:
        case dict():
            return {k: _plain(v) for k, v in obj.items()}
        case list() | tuple():
            return [_plain(v) for v in obj]
        case _:
            return obj


def _build(section: str, cls: type, table: dict[str, Any]) -> Any:
    hints = get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in table.items():
        if key not in names:
            raise ConfigError('unknown key', field=f'{section}.{key}')
        kwargs[key] = _coerce(f'{section}.{key}', hints[key], value)
    return cls(**kwargs)


def _coerce(name: str, hint: Any, value: Any) -> Any:
    """Check `value` against the annotation `hint`, converting ints to floats
    and lists to tuples."""
    origin = get_origin(hint)
    if hint is type(None):
        if value is None:
            return None
        raise ConfigError(f'expected nothing, got {value!r}', field=name)
    if origin is Literal:
        if value in get_args(hint):
            return value
        choices = ', '.join(repr(a) for a in get_args(hint))
        raise ConfigError(f'expected one of {choices}, got {value!r}', field=name)
    if origin in (Union, types.UnionType):
        errors = []
        for arg in get_args(hint):
            try:
                return _coerce(name, arg, value)
            except ConfigError as e:
                errors.append(e)
        raise errors[-1]
    if origin is tuple:
        if not isinstance(value, list | tuple):
            raise ConfigError(f'expected a list, got {value!r}', field=name)
        (item, _) = get_args(hint)
        return tuple(_coerce(name, item, v) for v in value)
    if hint is float and isinstance(value, int | float) and not isinstance(value, bool):
        return float(value)
    if hint is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if hint in (str, bool) and isinstance(value, hint):
        return value
    raise ConfigError(f'expected {getattr(hint, "__name__", hint)}, got {value!r}', field=name)


def load_scenario(path: Path | str) -> Scenario:
    """Read and validate a scenario file.

    Raises
    ------
    ConfigError
        If the file is missing, is not valid TOML or violates the schema.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError(f'cannot read {path}: {e.strerror}', field='config') from e
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f'{path}: {e}', field='config') from e
    return Scenario.from_dict(data)
