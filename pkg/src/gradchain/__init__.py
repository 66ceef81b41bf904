"""Simulator and statistics toolkit for driven Ising qubit chains in a
gradient magnetic field: exact diagonalization, spectral and eigenstate
chaos diagnostics, the delocalization border, and single-pulse
superposition-preparation errors."""

__version__ = "0.1.0"

from .spins import (ChainSpec, MAX_QUBITS, apply_single_spin, basis_spin,
                    basis_state, inner_product, normalize, total_spin_z,
                    uniform_state)
from .hamiltonian import (CouplingMatrix, CouplingSpec, PulseSpec, build_lab,
                          build_rotating, diagonal_energies, diagonal_energy,
                          detunings, predicted_border, sample_couplings,
                          single_pulse, site_detuning, trace_h2_rotating)
from .spectral import (BandPartition, SpacingHistogram, Spectrum,
                       band_overlap_fraction, band_partition, diagonalize,
                       ks_distance, reference_cdf, reference_density, spacings,
                       unfold)
from .localization import (BorderScanResult, ComponentMoments, component_moments,
                           delocalization_scan, participation_ratio,
                           principal_components)
from .dynamics import (FRAME_SIGN, EvolutionConfig, PulseErrorMetrics,
                       PulseScanResult, SteppedEvolution, error_metrics,
                       evolve_lab_stepper, evolve_spectral, frame_transform,
                       pulse_error_scan, run_pulse, uniform_pulse_duration)
from .sweep import (SweepResult, SweepTask, derive_stream_seed, map_cells,
                    run_sweep)
from .config import RunConfig, parse_config
from .tables import Table, read_json_table, write_table
from .errors import (ConfigConstraintError, ConfigError, ConfigSyntaxError,
                     NumericError, StatisticsError, UnknownConfigKeyError)
