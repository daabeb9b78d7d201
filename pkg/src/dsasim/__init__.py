"""Simulator and load-synthesis toolkit for reactively loaded dipole
scattering arrays: coupled thin-dipole impedance models, varactor load
networks, and per-(input, subcarrier) beam synthesis."""

__version__ = "0.1.0"

from .backend import backend_name, set_backend
from .emcore import (FrequencyGrid, assemble_impedance_matrix,
                     channel_transimpedance, dipole_self_impedance,
                     mutual_impedance_parallel)
from .exceptions import (ConfigError, DegenerateChannelError, DimensionError,
                         DomainError, DsaError, ModelConsistencyError,
                         SingularityError, SolverError)
from .geometry import (ArrayGeometry, TestPointSet, build_disk_geometry,
                       ring_test_points)
from .loads import (LoadConfig, VaractorParams, assemble_load_matrix,
                    capacitance_of, varactor_impedance)
from .network import (NetworkModel, aperture_baseline_gain, build_drive_matrix,
                      build_network_model, end_to_end_channel,
                      integrate_pattern_power, power_accounting,
                      radiated_power, radiation_pattern, solve_currents)
from .reporting import DesignReport, ReportEntry, format_report_table
from .special import cosine_integral, sine_integral
from .synth import (OptimizerConfig, TargetSpec, build_steering_targets,
                    evaluate_design, objective, objective_gradient, synthesize)

__all__ = [
    "ArrayGeometry", "ConfigError", "DegenerateChannelError", "DesignReport",
    "DimensionError", "DomainError", "DsaError", "FrequencyGrid",
    "LoadConfig", "ModelConsistencyError", "NetworkModel", "OptimizerConfig",
    "ReportEntry", "SingularityError", "SolverError", "TargetSpec",
    "TestPointSet", "aperture_baseline_gain", "assemble_impedance_matrix",
    "assemble_load_matrix", "backend_name", "build_disk_geometry",
    "build_drive_matrix", "build_network_model", "build_steering_targets",
    "capacitance_of", "channel_transimpedance", "cosine_integral",
    "dipole_self_impedance", "end_to_end_channel", "evaluate_design",
    "format_report_table", "integrate_pattern_power",
    "mutual_impedance_parallel", "objective", "objective_gradient",
    "power_accounting", "radiated_power", "radiation_pattern",
    "ring_test_points", "set_backend", "sine_integral", "solve_currents",
    "synthesize", "varactor_impedance",
]
