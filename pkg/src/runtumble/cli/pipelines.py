"""Pipelines: one per subcommand, from a resolved scenario to reports and series.

Pipelines do no I/O except reading the `fit-decay` input; `manifest.write_run()`
writes what they return.
"""

import dataclasses
import logging
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from runtumble.analysis import (
    AVERAGING_HORIZON,
    ProbeReport,
    averaging_leakage,
    averaging_refinement,
    b1_poly_decay_probe,
    convergence_probe,
    dispersion_probe,
    dissipativity_probe,
    fit_decay,
    hypo_norms,
    lyapunov_functional,
    lyapunov_monitor,
    norm_equivalence,
    read_series_csv,
    spectral_gap,
    steady_state,
    symmetry_defect,
    two_velocity_steady_profile,
    verdict_of,
    weighted_norm,
)
from runtumble.errors import CertificateError, ConfigError
from runtumble.model import (
    DistributionField,
    Exponential,
    KernelSpec,
    PhaseGrid,
    drift_alpha,
    drift_certificate,
    model_constants,
)
from runtumble.particles import (
    ParticleEnsemble,
    confinement_series,
    ensemble_histogram,
    particles_step,
)
from runtumble.semigroup import averaging_apply, b0_evolve_exact, evolve

from .config import InitialCondition, Scenario

logger = logging.getLogger(__name__)

Series = tuple[np.ndarray, np.ndarray]

# Probes that read the trace of the main evolution.
TRACE_PROBES = frozenset({'positivity', 'lyapunov', 'weighted-decay'})

# Largest reflection defect of a steady state on the velocity ball.
SYMMETRY_TOLERANCE = 1e-10


@dataclass
class PipelineResult:
    """Reports and `(t, value)` series of one pipeline run.

    Attributes
    ----------
    reports
        Probe reports, written as `<probe>.json`.
    series
        Name to `(t, value)`, written as `<name>.csv`.
    stochastic
        Report file name to the relative tolerance `reproduce` allows on its
        numbers; other files must match bit for bit.
    """

    reports: list[ProbeReport] = field(default_factory=list)
    series: dict[str, Series] = field(default_factory=dict)
    stochastic: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)


def simulate(scenario: Scenario, threads: int = 1) -> PipelineResult:
    """Evolve the configured operator and run the requested probes.

    Trace probes: `lyapunov` (tag `L`), `positivity` and `weighted-decay` (tag
    `B1`). Standalone probes: `lyapunov-shapes`, `poly-decay`, `hypo-norms`,
    `dissipativity` (tag `B`) and `norm-equivalence`. With `run.evolve = false`
    only the standalone probes run.
    """
    m, p = scenario.model, scenario.probe
    grid = m.grid()
    f0 = scenario.initial.build(grid, m.chi, scenario.seed)
    policy = scenario.run.dt_policy()
    probes = set(p.probes)
    result = PipelineResult()
    if scenario.run.evolve:
        _evolve_with_trace_probes(scenario, f0, result)
    elif probes & TRACE_PROBES:
        raise ConfigError(
            f'{", ".join(sorted(probes & TRACE_PROBES))} read the evolution trace',
            field='run.evolve',
        )
    if 'lyapunov-shapes' in probes:
        result.reports.append(_lyapunov_shapes(scenario))
    if 'poly-decay' in probes:
        poly = b1_poly_decay_probe(
            grid,
            m.chi,
            p.R,
            p.k,
            p.ell,
            scenario.run.T,
            window=p.window_or_none(),
            scheme=m.scheme,
            dt_policy=policy,
        )
        result.reports.append(
            ProbeReport(
                'poly-decay',
                {'k': p.k, 'ell': p.ell, 'R': p.R},
                poly.to_dict(),
                verdict_of(poly.passed),
            )
        )
    hypo = dataclasses.replace(m, R=m.R or p.R)
    b1 = dataclasses.replace(hypo, tag='B1', kernel='sharp')
    weight = Exponential(m.gamma)
    if 'hypo-norms' in probes:
        norms = hypo_norms(
            f0, b1.generator(), weight, p.T_max, eta1=p.eta1, eta2=p.eta2, dt_policy=policy
        )
        result.reports.append(
            ProbeReport(
                'hypo-norms',
                {'eta1': p.eta1, 'eta2': p.eta2, 'T_max': norms.T_max},
                dataclasses.asdict(norms),
            )
        )
    if 'dissipativity' in probes:
        if m.tag != 'B':
            raise ConfigError('the dissipativity probe needs tag B', field='model.tag')
        report = dissipativity_probe(
            hypo.generator(),
            b1.generator(),
            f0,
            weight,
            scenario.run.T,
            n_samples=p.n_times,
            T_max=p.T_max,
            eta1=p.eta1,
            eta2=p.eta2,
            dt_policy=policy,
        )
        result.reports.append(
            ProbeReport(
                'dissipativity',
                {'gamma': m.gamma, 'R': hypo.R, 'T_max': p.T_max},
                report.to_dict(),
                verdict_of(report.passed),
            )
        )
    if 'norm-equivalence' in probes:
        fields = white_noise_family(p.family_size, scenario.seed)(grid)
        equiv = norm_equivalence(
            fields,
            b1.generator(),
            weight,
            p.T_max,
            eta1=p.eta1,
            eta2=p.eta2,
            dt_policy=policy,
        )
        result.reports.append(
            ProbeReport(
                'norm-equivalence',
                {'family_size': p.family_size, 'gamma': m.gamma, 'R': hypo.R},
                equiv.to_dict(),
                verdict_of(equiv.c > 0 and bool(np.isfinite(equiv.C))),
            )
        )
    return result


def _evolve_with_trace_probes(
    scenario: Scenario, f0: DistributionField, result: PipelineResult
) -> None:
    m = scenario.model
    gen = m.generator()
    probes = set(scenario.probe.probes)
    functionals = {}
    if probes & {'lyapunov', 'weighted-decay'}:
        cert = drift_certificate(m.chi, m.gamma, m.dim)
        functionals['lyapunov'] = lyapunov_functional(cert, f0.grid)
    trace = evolve(gen, f0, scenario.run.T, scenario.run.dt_policy(), functionals=functionals)
    result.series.update({name: (trace.times, s) for name, s in trace.series.items()})

    mass0 = float(trace.mass[0])
    drift = abs(float(trace.mass[-1] + trace.leak[-1]) - mass0) / abs(mass0) if mass0 else 0.0
    positive = f0.is_nonnegative() and gen.gain_nonnegative
    min_value = float(trace.series['min'].min())
    passed: bool | None
    if gen.tag == 'L':
        passed = drift <= 1e-10 and (min_value >= 0 or not positive)
    elif positive:
        passed = min_value >= 0
    else:
        passed = None
    result.reports.append(
        ProbeReport(
            'simulate',
            {'model': dataclasses.asdict(m), 'run': dataclasses.asdict(scenario.run)},
            {
                'mass_0': mass0,
                'mass_T': float(trace.mass[-1]),
                'leak': float(trace.leak[-1]),
                'relative_mass_drift': drift,
                'min': min_value,
                'dt': trace.dt,
                'steps': trace.steps,
            },
            None if passed is None else verdict_of(passed),
        )
    )
    if 'positivity' in probes:
        result.reports.append(_positivity(f0.grid, trace.final, min_value))
    if 'lyapunov' in probes:
        if gen.tag != 'L':
            raise ConfigError('the lyapunov probe needs tag L', field='model.tag')
        report = lyapunov_monitor(trace, m.chi, m.gamma)
        result.reports.append(
            ProbeReport('lyapunov', {'gamma': m.gamma}, report.to_dict(), verdict_of(report.passed))
        )
    if 'weighted-decay' in probes:
        if gen.tag != 'B1':
            raise ConfigError('the weighted-decay probe needs tag B1', field='model.tag')
        W = trace.series['lyapunov']
        monotone = bool(np.all(np.diff(W) <= 1e-12 * W[:-1]))
        fit = fit_decay(trace.times, W, scenario.probe.window_or_none(), mode='exponential')
        ok = monotone and fit.slope < 0 and fit.r_squared >= scenario.probe.r_squared
        result.reports.append(
            ProbeReport(
                'weighted-decay',
                {'gamma': m.gamma, 'R': m.R},
                {'non_increasing': monotone, 'fit': fit.to_dict()},
                verdict_of(ok),
            )
        )


def _lyapunov_shapes(scenario: Scenario) -> ProbeReport:
    """The Lyapunov bound along `L` from each of the initial shapes."""
    m = scenario.model
    gen = m.generator('L')
    grid = gen.grid
    functional = lyapunov_functional(drift_certificate(m.chi, m.gamma, m.dim), grid)
    names, bounds, maxima, passed = [], [], [], []
    for shape in initial_shapes(grid, scenario.seed):
        f0 = shape.build(grid, m.chi, scenario.seed)
        trace = evolve(
            gen,
            f0,
            scenario.run.T,
            scenario.run.dt_policy(),
            functionals={'lyapunov': functional},
        )
        report = lyapunov_monitor(trace, m.chi, m.gamma)
        names.append(shape.shape)
        bounds.append(report.bound)
        maxima.append(float(report.W.max()))
        passed.append(report.passed)
    return ProbeReport(
        'lyapunov-shapes',
        {'gamma': m.gamma, 'T': scenario.run.T},
        {'shapes': names, 'bound': bounds, 'W_max': maxima, 'passed': passed},
        verdict_of(all(passed)),
    )


def _positivity(grid: PhaseGrid, final: DistributionField, min_value: float) -> ProbeReport:
    """Strict positivity away from the outflow boundary, and no negative record."""
    margin = 2.0 * grid.dx
    interior = np.all(np.abs(grid.x_nodes) <= grid.L - margin, axis=-1)
    interior_min = float(final.values[interior].min()) if interior.any() else float('nan')
    ok = interior_min > 0 and min_value >= 0
    return ProbeReport(
        'positivity',
        {'margin': margin},
        {'interior_min': interior_min, 'min_over_records': min_value},
        verdict_of(ok),
    )


def steady(scenario: Scenario, threads: int = 1) -> PipelineResult:
    """Stationary state of `L`; compared with the exact profile on two velocities."""
    m, p = scenario.model, scenario.probe
    gen = m.generator('L')
    state = steady_state(
        gen,
        p.method,
        tol=p.tol,
        max_iter=p.max_iter,
        dt_policy=scenario.run.dt_policy(),
    )
    grid = gen.grid
    defect = symmetry_defect(state.field)
    values: dict[str, object] = {
        'residual': state.residual,
        'mass': state.mass,
        'iterations': state.iterations,
        'symmetry_defect': defect,
        'min': float(state.field.values.min()),
    }
    if grid.velocity_set == 'two_velocity':
        exact = two_velocity_steady_profile(m.chi, grid.x_centers)[:, None]
        error = state.field.with_values(np.abs(state.field.values - exact)).integrate()
        values['l1_error'] = error
        passed = error <= p.steady_tolerance
    else:
        passed = defect <= SYMMETRY_TOLERANCE and state.field.is_nonnegative()
    result = PipelineResult()
    result.reports.append(
        ProbeReport('steady', {'method': p.method, 'tol': p.tol}, values, verdict_of(passed))
    )
    history = np.asarray(state.history)
    result.series['residual'] = (np.arange(1, history.size + 1, dtype=float), history)
    return result


def initial_shapes(grid: PhaseGrid, seed: int) -> list[InitialCondition]:
    """Five unskewed shapes scaled to the box: three blobs, an indicator and noise."""
    return [
        InitialCondition('gaussian_blob', x0=0.0, sigma=1.0),
        InitialCondition('gaussian_blob', x0=grid.L / 6.0, sigma=0.5),
        InitialCondition('indicator', x0=-grid.L / 10.0, r=grid.L / 10.0),
        InitialCondition('noise', x0=0.0, sigma=grid.L / 8.0, seed=seed),
        InitialCondition('gaussian_blob', x0=-grid.L / 6.0, sigma=2.0),
    ]


def regression_family(grid: PhaseGrid, chi: float, seed: int) -> list[DistributionField]:
    """The initial shapes, each with both signs of skew."""
    return [
        dataclasses.replace(shape, skew=skew).build(grid, chi, seed)
        for shape in initial_shapes(grid, seed)
        for skew in (0.5, -0.5)
    ]


def spectrum(scenario: Scenario, threads: int = 1) -> PipelineResult:
    """Spectral gap by decay fits and Krylov, and optionally the convergence probe."""
    m, p = scenario.model, scenario.probe
    gen = m.generator('L')
    policy = scenario.run.dt_policy()
    state = steady_state(gen, p.method, tol=p.tol, max_iter=p.max_iter, dt_policy=policy)
    report = spectral_gap(
        gen,
        state,
        p.n_probes,
        T=scenario.run.T,
        seed=scenario.seed,
        krylov=m.scheme == 'upwind',
        dt_policy=policy,
    )
    disagreement = report.relative_disagreement
    passed = not report.flagged and (disagreement is None or disagreement <= p.gap_tolerance)
    result = PipelineResult()
    result.reports.append(
        ProbeReport(
            'spectrum',
            {'n_probes': p.n_probes, 'T': scenario.run.T, 'a_star': model_constants(m.chi, m.dim).a_star(m.gamma)},
            report.to_dict(),
            verdict_of(passed),
        )
    )
    if 'convergence' in p.probes:
        fields = regression_family(gen.grid, m.chi, scenario.seed)
        conv = convergence_probe(gen, state, fields, scenario.run.T, dt_policy=policy)
        values = conv.to_dict()
        if report.krylov_gap is not None:
            values['krylov_relative_disagreement'] = abs(
                float(np.mean(conv.slopes)) - report.krylov_gap
            ) / abs(report.krylov_gap)
        result.reports.append(
            ProbeReport('convergence', {'n_fields': len(fields)}, values, verdict_of(conv.passed))
        )
    return result


def drift_check(scenario: Scenario, threads: int = 1) -> PipelineResult:
    """The drift certificate at `(chi, gamma)`."""
    m = scenario.model
    params = {'chi': m.chi, 'gamma': m.gamma, 'dim': m.dim}
    try:
        cert = drift_certificate(m.chi, m.gamma, m.dim)
    except CertificateError as e:
        logger.error('%s', e)
        report = ProbeReport('drift-check', params, {'gamma_max': e.gamma_max}, 'FAIL')
        return PipelineResult(reports=[report])
    values = cert.to_dict()
    values['alpha_closed_form'] = drift_alpha(m.chi, m.gamma, m.dim)
    report = ProbeReport('drift-check', params, values, verdict_of(cert.violations == 0))
    return PipelineResult(reports=[report])


def disperse(scenario: Scenario, threads: int = 1) -> PipelineResult:
    """Dispersion statistic of `B0` per blob, and the weighted contraction of `S_B0`."""
    m, p = scenario.model, scenario.probe
    grid = m.grid()
    report = dispersion_probe(
        grid, m.chi, m.gamma, centers=p.blobs, T=scenario.run.T, n_times=p.n_times
    )
    result = PipelineResult()
    result.reports.append(
        ProbeReport(
            'disperse',
            {'blobs': list(p.blobs), 'T': scenario.run.T, 'gamma': m.gamma},
            report.to_dict(),
            verdict_of(report.bounded),
        )
    )
    for i, Q in enumerate(report.Q):
        result.series[f'Q_blob{i}'] = (report.times, Q)

    # Linear interpolation moves mass by up to one cell.
    f0 = scenario.initial.build(grid, m.chi, scenario.seed)
    weight = Exponential(m.gamma)
    norm0 = weighted_norm(f0, 'L1', weight).value
    norms = np.asarray(
        [weighted_norm(b0_evolve_exact(f0, float(t), m.chi), 'L1', weight).value for t in report.times]
    )
    excess = float(np.max(np.log(norms / norm0) - report.a_star * report.times))
    tolerance = 1e-8 + m.gamma * grid.dx
    result.reports.append(
        ProbeReport(
            'b0-contraction',
            {'gamma': m.gamma, 'tolerance': tolerance},
            {'max_log_excess': excess, 'a_star': report.a_star},
            verdict_of(excess <= tolerance),
        )
    )
    result.series['b0_norm'] = (report.times, norms)
    return result


def white_noise_family(n: int, seed: int) -> Callable[[PhaseGrid], list[DistributionField]]:
    """`n` velocity-independent standard normal fields, seeded per member."""

    def build(grid: PhaseGrid) -> list[DistributionField]:
        return [
            DistributionField.from_spatial(
                grid, np.random.default_rng([seed, i]).standard_normal(grid.spatial_shape)
            )
            for i in range(n)
        ]

    return build


def average_probe(scenario: Scenario, threads: int = 1) -> PipelineResult:
    """Averaging ratio over a rough family, its refinement ratio and its box leakage."""
    p = scenario.probe
    grid = scenario.model.grid()
    T_max = AVERAGING_HORIZON if p.T_max is None else p.T_max
    family = white_noise_family(p.family_size, scenario.seed)
    coarse, fine = averaging_refinement(family, grid, 1.0, T_max, n_times=p.n_quadrature)
    leakage = averaging_leakage(family(grid), 1.0, T_max, n_times=p.n_quadrature)
    ratio = fine / coarse if coarse > 0 else float('inf')
    passed = bool(np.isfinite(fine)) and abs(ratio - 1.0) <= p.refinement_tolerance
    report = ProbeReport(
        'average-probe',
        {'family_size': p.family_size, 'T_max': T_max, 'n_x': grid.n_x},
        {'max_J': coarse, 'max_J_refined': fine, 'ratio': ratio, 'leakage': leakage},
        verdict_of(passed),
    )
    return PipelineResult(reports=[report])


def particles(scenario: Scenario, threads: int = 1) -> PipelineResult:
    """Monte Carlo ensemble against the deterministic solution of `L`."""
    m, ps = scenario.model, scenario.particles
    if m.velocity_set != 'ball' or m.kernel not in ('sharp', 'regularized'):
        raise ConfigError(
            'particles need the velocity ball and the sharp or regularized kernel',
            field='model',
        )
    grid = m.grid()
    kernel: KernelSpec = m.kernel_spec()
    f = scenario.initial.build(grid, m.chi, scenario.seed)
    e0 = ParticleEnsemble.from_density(f, ps.n, scenario.seed)
    gen = m.generator('L') if ps.compare else None
    policy = scenario.run.dt_policy()
    e = e0
    distances, overflow = [], []
    for t in ps.times:
        if gen is not None:
            f = evolve(gen, f, t - e.time, policy).final
        e = particles_step(e, t - e.time, kernel, threads=threads)
        hist = ensemble_histogram(e, grid, 'x')
        overflow.append(hist.overflow)
        if gen is not None:
            rho = averaging_apply(1.0, f)
            distances.append(float(np.sum(np.abs(hist.density - rho)) * grid.cell_volume))
    values: dict[str, object] = {'times': list(ps.times), 'overflow': overflow}
    verdict = None
    if distances:
        values['l1_distance'] = distances
        verdict = verdict_of(distances[-1] <= ps.tolerance)
    result = PipelineResult()
    result.reports.append(
        ProbeReport('particles', {'n': ps.n, 'seed': scenario.seed}, values, verdict)
    )
    result.stochastic['particles.json'] = 3.0 / np.sqrt(ps.n)
    if 'confinement' in scenario.probe.probes:
        series = confinement_series(e0, np.asarray(ps.times), kernel, m.gamma, threads=threads)
        result.reports.append(
            ProbeReport(
                'confinement',
                {'gamma': m.gamma},
                {'mean': series.mean, 'stderr': series.stderr, 'bounded': series.bounded(ps.times[0])},
            )
        )
        result.stochastic['confinement.json'] = 3.0 / np.sqrt(ps.n)
    return result


def fit_decay_pipeline(scenario: Scenario, threads: int = 1) -> PipelineResult:
    """Fit the decay of a `t,value` CSV."""
    p = scenario.probe
    if p.input is None:
        raise ConfigError('fit-decay needs an input CSV', field='probe.input')
    try:
        t, values, source_hash = read_series_csv(p.input)
    except OSError as e:
        raise ConfigError(f'cannot read {p.input}: {e.strerror}', field='probe.input') from e
    fit = fit_decay(t, values, p.window_or_none(), mode=p.fit_mode)
    passed = fit.slope < 0 and fit.r_squared >= p.r_squared
    report = ProbeReport(
        'fit-decay',
        {'input': p.input, 'input_scenario_hash': source_hash, 'mode': p.fit_mode},
        fit.to_dict(),
        verdict_of(passed),
    )
    return PipelineResult(reports=[report])


PIPELINE_RUNNERS: dict[str, Callable[[Scenario, int], PipelineResult]] = {
    'simulate': simulate,
    'steady': steady,
    'spectrum': spectrum,
    'drift-check': drift_check,
    'disperse': disperse,
    'average-probe': average_probe,
    'particles': particles,
    'fit-decay': fit_decay_pipeline,
}


def run_pipeline(scenario: Scenario, threads: int = 1) -> PipelineResult:
    logger.info('running %s (scenario %s)', scenario.pipeline, scenario.scenario_hash()[:12])
    return PIPELINE_RUNNERS[scenario.pipeline](scenario, threads)
