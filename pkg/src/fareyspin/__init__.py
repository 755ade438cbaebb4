"""Exact counts of Farey-fraction spin-chain states and the lattice counts behind them."""

from .arith import (
    DiscDecomp,
    divisor_count,
    divisor_count_below_halfsum,
    fund_disc_decompose,
    isqrt,
    kronecker,
    modinv,
    mobius,
)
from .asympt import (
    DEFAULT_C3,
    EtaValue,
    MainTermReport,
    L_log_deriv,
    L_value,
    const_c1,
    const_c2,
    eta_pair,
    fit_c3,
    main_term,
    psi_main,
)
from .monoid import Mat2, phi_oracle, psi_oracle, right_multiply
from .spinchain import (
    LatticeTriple,
    PhiStarSample,
    key_lemma_delta,
    partition_census,
    phi,
    phi_boca,
    phi_divisor_sum,
    phi_star_histogram,
    psi_batch,
    rho,
    upsilon,
    upsilon_cut,
)

__version__ = "0.1.0"
