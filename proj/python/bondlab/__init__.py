"""Corporate bond factor backtesting toolkit."""

from ._core import (
    BondlabError,
    ConfigError,
    DomainError,
    bh_fdr,
    bounce_back_flag,
    capmb_alpha,
    data_grid_size,
    decimal_shift_correct,
    footnote_economy,
    kappa,
    method_grid_size,
    nse,
    nse_ratio,
    nw_lags,
    nw_mean,
    quantile,
    run_cli,
    run_experiment,
    theoretical_bias,
)

__all__ = [
    "BondlabError",
    "ConfigError",
    "DomainError",
    "bh_fdr",
    "bounce_back_flag",
    "capmb_alpha",
    "data_grid_size",
    "decimal_shift_correct",
    "footnote_economy",
    "kappa",
    "method_grid_size",
    "nse",
    "nse_ratio",
    "nw_lags",
    "nw_mean",
    "quantile",
    "run_cli",
    "run_experiment",
    "theoretical_bias",
]
