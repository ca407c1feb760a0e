# Default parameter matrix: each solver varies one or two parameters over ten (SA: one hundred)
# regular steps and runs every combination; everything else is fixed.
DEFAULT_GRIDS = {
    "SA": {
        "fixed": {"n_w": 10, "p_0": 0.5, "m_a": 200, "m_c": 50},
        "grid": {
            "alpha": {"start": 0.900, "stop": 0.999, "step": 0.001},
        },
    },
    "GA": {
        "fixed": {"p_m": 0.001},
        "grid": {
            "c_ga": {"start": 100, "stop": 190, "step": 10},
            "p_c": {"start": 0.35, "stop": 0.44, "step": 0.01},
        },
    },
    "PSO": {
        "fixed": {"w_final": 0.4},
        "grid": {
            "c_pso": {"start": 100, "stop": 190, "step": 10},
            "w_init": {"start": 0.81, "stop": 0.90, "step": 0.01},
        },
    },
}

DEFAULT_RUNS = 100
