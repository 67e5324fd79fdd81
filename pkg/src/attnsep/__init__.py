"""Numerical lab for separating softmax from linear attention on planted datasets."""

from .attention import (
    AttentionInstance,
    attention_rows,
    c_matrix,
    forward,
    network_output,
    scores,
    tensor_trick_residual,
)
from .datasets import (
    CrossAttnConfig,
    SelfAttnConfig,
    build_cross_pair,
    build_self_matrix,
    sample_cross,
    sample_self,
)
from .experiment import (
    SweepRecord,
    SweepSpec,
    TrialRecord,
    read_csv,
    run_cross_trial,
    run_self_trial,
    run_sweep,
    run_toy_trial,
    write_csv,
)
from .linalg import hoeffding_tail, normalize_exp, normalize_lin, stream_rng
from .oracles import ColumnCase, EntryCase, c_bound_oracle, f_bound_oracle, run_verification, u_oracle

__version__ = "0.1.0"
