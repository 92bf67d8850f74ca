from .datacollector import DataCollector
from .spectral_io import (parse_spectral_json, emit_spectral_json, parse_tsequence_json, parse_plan_json,
                          read_potential_csv, emit_csv, write_json)
from .batch_functions import asyncSpectrum_Linux, runSpectrum_Linux, collector_to_spectrum, workers_from_env
from .checks import CHECKS, run_checks
from .cli import RunConfig, run, main
