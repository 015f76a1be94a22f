from .shared_info import (
    SiResult,
    dual_total_correlation,
    partition_score,
    sandwich_check,
    si_brute_force,
    si_mct,
    total_correlation,
)
