"""Python interface to the mipt simulation and analysis core."""

import json

from ._mipt import (
    CartanCoeffs,
    CollapseFit,
    EntropyCurve,
    GateInvariants,
    MiptError,
    analytic_csv,
    cartan,
    cartan_from_invariants,
    cartan_gate,
    collapse_quality,
    collapsed_points_csv,
    crossing_estimate,
    default_p_grid,
    fit_collapse,
    invariants_from_cartan,
    invariants_from_gate,
    measurement_only_entropy,
    normalize_spec_json,
    operator_schmidt,
    page_entropy,
    read_curve_csv,
    run_trajectory,
    sweep,
    unmeasured_mean_asymptote,
    unmeasured_probability,
    write_curve_csv,
)
from . import _mipt


def gate_info(cartan=None, e_p=None, g_t=None):
    """Gate report as a dict: Cartan coefficients, invariants, Schmidt spectrum and flags."""
    if cartan is not None and not isinstance(cartan, CartanCoeffs):
        cartan = CartanCoeffs(*cartan)
    return json.loads(_mipt.gate_info_json(cartan, e_p, g_t))


def run_experiment(spec, out_dir, workers=1, reuse=False):
    """Run an experiment given as a dict or JSON text; returns one curve per size."""
    text = spec if isinstance(spec, str) else json.dumps(spec)
    return _mipt.run_experiment(text, str(out_dir), workers, reuse)


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
