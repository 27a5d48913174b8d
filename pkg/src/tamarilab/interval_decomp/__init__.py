"""Contact-count tables, the first-return decomposition and the sampler."""

from .counts import CountTable, build_counts, scaled_tables, RHO
from .decomp import DecompStep, decompose, compose, all_steps
from .sampler import (SampledInterval, SamplerError, sample_uniform, sample_batch,
                      sample_from_uniforms, height_profile_moments, chi_square_uniform)
