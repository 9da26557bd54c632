"""Simulation and analysis of a Malus-law local hidden variable Bell experiment."""

from .chsh import (AmplitudeFit, BoundReport, ChshResult, ChshSettings, chsh_statistic,
                   empirical_chsh, fit_cosine_amplitude, max_abs_chsh, verify_lhv_bound)
from .model import (JointDistribution, lhv_correlation, lhv_detect_prob_a, lhv_detect_prob_b,
                    lhv_joint_distribution, normalize_angle, qm_correlation, qm_joint_distribution,
                    quadrature_p_pp)
from .montecarlo import (CorrelationCurve, EstimatedCorrelation, ExperimentConfig, Mode,
                         OutcomePair, PairSample, PairSamples, Sweep, draw_samples,
                         estimate_correlation, run_sweep, simulate_pair)

__version__ = "0.1.0"
