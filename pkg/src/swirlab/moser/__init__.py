"""Constants of the level-set chain, level-set measures and the lemma harness."""

from .constants import (Beta0Bound, HatBeta2Bound, Log2Beta, MoserConstants, MoserInputs,
                        Threshold, const_beta0_log, const_beta2_log2, const_c1,
                        const_c1_prime, const_hatbeta2_bound, const_kappa0_delta0,
                        const_mu_star, const_s, const_theta0, const_thresholds,
                        gauge_from_lnln, lnln_of, moser_constants, radius_of, scale_lnln)
from .harness import (LemmaInputs, LemmaLedger, LemmaResult, moser_trace, pi_from_swirl,
                      verify_growth_lemmas)
from .levelsets import LevelSetReport, boundary_layer_fraction, level_sets
