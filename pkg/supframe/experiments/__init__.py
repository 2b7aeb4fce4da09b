from supframe.experiments.denoise import (
    NoiseModel,
    add_noise,
    coefficient_noise_power,
    snr_gain_db,
    wiener_oracle,
    wiener_two_stage,
)
from supframe.experiments.models import ExperimentConfig, ExperimentReport, MethodSpec, SyntheticSpec, WindowSpec
from supframe.experiments.runner import Enhancement, enhance, run_experiment
from supframe.experiments.synthetic import synthetic_signal
