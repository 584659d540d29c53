from .group import (
    TINY_GROUP,
    GroupParams,
    InvalidGroupParams,
    default_group,
    group_exp,
    group_inv,
    group_mul,
    in_subgroup,
    load_group_params,
)
from .ring import (
    InvalidRingParams,
    NotInvertible,
    RingParams,
    canon,
    inf_norm,
    is_invertible,
    ring_add,
    ring_invert,
    ring_mul,
    ring_mul_schoolbook,
    ring_sub,
    ring_sum,
)
from .sampling import (
    in_C,
    sample_gaussian,
    sample_uniform_C,
    sample_uniform_Rq,
    sample_uniform_Y,
    sample_uniform_Z,
)
