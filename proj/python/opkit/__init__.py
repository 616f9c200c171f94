"""Accretive operators, pseudoinverses and quadratic operator pencils."""

import json

from ._core import (
    AccuracyError,
    DimensionError,
    HypothesisError,
    ModelError,
    NoPrincipalRootError,
    OpkitError,
    ParameterError,
    ParseError,
    PreconditionError,
    ResonanceError,
    accretive_sqrt,
    accretivity_report,
    demo_laplacian,
    factorize,
    fractional_power,
    numerical_radius,
    perturbation_certificate,
    perturbed_pinv,
    pseudoinverse,
    solve_bvp,
)
from ._core import conformance_json as _conformance_json


def conformance(seed=42, criteria=()):
    """Runs the property suites; returns the deterministic report body."""
    return json.loads(_conformance_json(seed, list(criteria)))
