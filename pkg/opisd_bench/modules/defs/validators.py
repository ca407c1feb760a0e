def require(condition, message):
    if not condition:
        raise ValueError(message)


def is_probability(value, open_interval=False):
    if open_interval:
        return 0.0 < value < 1.0
    return 0.0 <= value <= 1.0


def validate_stop(params):
    require(params.n_s >= 1, "n_s must be at least 1")
    require(params.threshold >= 0.0, "stop threshold must be non-negative")


def validate_sa_params(params):
    require(0.0 < params.alpha < 1.0, "alpha must lie in (0, 1)")
    require(is_probability(params.p_0, open_interval=True), "p_0 must lie in (0, 1)")
    require(params.n_w >= 1, "n_w must be at least 1")
    require(params.m_a >= 1 and params.m_c >= 1, "m_a and m_c must be at least 1")
    require(params.m_c <= params.m_a, "m_c cannot exceed m_a")
    validate_stop(params)


def validate_ga_params(params):
    require(params.c_ga >= 2, "c_ga must be at least 2")
    require(is_probability(params.p_c), "p_c must lie in [0, 1]")
    require(is_probability(params.p_m), "p_m must lie in [0, 1]")
    validate_stop(params)


def validate_pso_params(params):
    require(params.c_pso >= 2, "c_pso must be at least 2")
    require(0.0 < params.w_final <= params.w_init, "inertia must satisfy 0 < w_final <= w_init")
    require(params.m_est >= 1, "m_est must be at least 1")
    validate_stop(params)
