"""Second-order linear constant-coefficient dynamic equations with polynomial
forcing on time scales."""

from .errors import (
    AnchorNotOnScale,
    DegenerateRoots,
    DegreeTooSmall,
    InadmissibleProblem,
    IndexOutOfRange,
    NonIncreasing,
    NotRegressive,
    ScaleTooShort,
    SingularBeta,
    TimeScaleError,
    TooShort,
    UnsupportedScale,
)
from .solver import (
    AdmissibilityReport,
    ProblemSpec,
    Solution,
    check_admissibility,
    characteristic_roots,
    evaluate_solution,
    omega_vector,
    solve_ivp,
    terminal_coefficients,
    xi_backward_recursion,
    xi_closed_form,
)
from .special_functions import circle_plus, exp_lambda, hk_table
from .timescale import (
    SampledFunction,
    TimeScale,
    delta_derivative,
    delta_integral,
    graininess,
    make_grid,
    q_scale,
    real_interval,
    scale_from_json,
    uniform,
)
from .verify import (
    VerificationReport,
    forward_step_oracle,
    full_report,
    residual,
    wronskian_check,
)

__version__ = "0.1.0"
