"""GLRT change detectors for jamming and rogue base station attacks."""

import json as _json

from ._jamdet import (
    ConfigError,
    DegenerateWindowError,
    DetectionReport,
    Detector,
    Error,
    FormatError,
    InsufficientDataError,
    InvalidArgumentError,
    ParseError,
    SingularMatrixError,
    ThresholdEstimate,
    TraceRecord,
    apply_threshold,
    decimate,
    estimate_threshold,
    evaluate,
    gaussian_loglike,
    integrate_m_of_n,
    load_trace,
    logdet_pd,
    mncd_statistic,
    ncd_statistic,
    record_seed,
    save_trace,
    scatter,
    spd_statistic,
    threshold_from_statistics,
)
from ._jamdet import generate as _ext_generate

__version__ = "0.1.0"


def generate(config, seed, record_id="record"):
    """Simulate one trace from a scenario config given as a dict or JSON string."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _ext_generate(text, seed, record_id)


def scenario_of(record):
    """Scenario echo of a simulated record as a dict (None for recorded data)."""
    return _json.loads(record.scenario_json)

