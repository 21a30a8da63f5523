"""Monte Carlo lab for log-correlated Gaussian fields: BRW, MBRW and the 2D DGFF."""

__version__ = "0.1.0"

from .lattice import Lattice, ball, interior, torus_distance  # noqa: E402
from .rng import RngStream  # noqa: E402
from .covariance import (CovarianceKernel, build_aux_covariance, build_packing,  # noqa: E402
                         check_assumptions, check_domination, cov_brw, cov_dgff, cov_mbrw,
                         explicit_kernel, kernel)
from .samplers import FieldSample, sample_brw, sample_dgff, sample_mbrw, sample_mvn, sampler_for  # noqa: E402
from .extremes import field_max, level_set, local_extrema, m_N, top_sum  # noqa: E402
from .gibbs import (OrderedWeightVector, cluster_weights, f_t_transform, gibbs,  # noqa: E402
                    sample_pd, sample_pd_stick)
from .bridge import BarrierSpec, barrier_probability, sample_bridge  # noqa: E402
from .kernels import BACKEND  # noqa: E402
from .report import McReport  # noqa: E402
