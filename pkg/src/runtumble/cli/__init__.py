"""Scenario files, pipelines, manifests and the `runtumble` console script."""

__all__ = [
    'PIPELINES',
    'PIPELINE_RUNNERS',
    'InitialCondition',
    'ModelSection',
    'ParticleSection',
    'PipelineName',
    'PipelineResult',
    'ProbeSection',
    'Reproduction',
    'RunSection',
    'Scenario',
    'build_parser',
    'load_scenario',
    'main',
    'read_manifest',
    'reproduce',
    'run_pipeline',
    'write_run',
]

from .config import (
    PIPELINES,
    InitialCondition,
    ModelSection,
    ParticleSection,
    PipelineName,
    ProbeSection,
    RunSection,
    Scenario,
    load_scenario,
)
from .main import build_parser, main
from .manifest import Reproduction, read_manifest, reproduce, write_run
from .pipelines import PIPELINE_RUNNERS, PipelineResult, run_pipeline
