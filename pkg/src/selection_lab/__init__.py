"""Power, distance and predictive-risk laboratory for threshold model selectors."""
from ._accel import BACKEND
from .distance import (GaussianShiftPair, SeparationClass, check_inequality_chain,
                       classify_separation, hellinger_affinity, hellinger_distance_sq,
                       l1_distance, lemma1_gap)
from .gauss import (std_normal_cdf, std_normal_pdf, std_normal_quantile,
                    upper_truncated_second_moment)
from .risk import RiskReport, SupScanResult, exact_risk, lse, mc_risk, scaled_risk_sup
from .selector import (DesignKind, DesignSpec, SelectionOutcome, SelectorCalibration,
                       is_consistent, power, select, simulate_selection_prob, threshold)
from .sequences import (AlternativeSequence, LLRParams, NotApplicableError, SequenceFamily,
                        UnclassifiableError, beta_at, confusion_margin_holds,
                        confusion_margin_min_n, is_contiguous, llr_params, mc_llr_check,
                        power_along, scaled_bias_along)

__version__ = "0.1.0"
