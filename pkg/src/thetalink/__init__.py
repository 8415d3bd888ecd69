"""Random patterned matrices with link (i + j) mod floor(n/theta)."""
from thetalink._backend import BACKEND
from thetalink.errors import BudgetExceeded, ConfigError, ConvergenceError, ThetaLinkError
from thetalink.laws import (beta4_closed_form, integer_theta_cdf, integer_theta_sample,
                            moment_bounds, moment_integer_theta, rayleigh_cdf, rayleigh_density,
                            rayleigh_sample)
from thetalink.limits import (closure_type, count_pi_star_exact, linear_representation,
                              lsd_moment, word_limit_catalan, word_limit_closed_form,
                              word_limit_finite, word_limit_mc)
from thetalink.matrix import LinkSpec, build_matrix, link_value, modulus
from thetalink.spectra import (eigenvalues_symmetric, empirical_moment, ensemble_eigenvalues,
                               ensemble_moments, histogram, ks_distance, zero_proportion)
from thetalink.words import Word, classify, enumerate_pair_matched, is_catalan, is_symmetric, parse_word

__version__ = "0.1.0"
