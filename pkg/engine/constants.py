SIGNATURE_POSITIVE_DEFINITE = 'pd'
SIGNATURE_TIME_SPACE = 'sr'

SIGNATURES = {
    SIGNATURE_POSITIVE_DEFINITE: 'positive-definite',
    SIGNATURE_TIME_SPACE: 'time-space (+,-,...,-)',
}

# |g| below this is the Riemannian case, the Cartan tensor vanishes exactly
ZERO_CHARGE = 1e-14
# |g| below this makes the A_iA_jA_k/(A_hA^h) form ill conditioned
SMALL_CHARGE = 1e-4
# |g| below this skips identities which carry an explicit 1/g
LITERAL_CHARGE = 0.1
# |b| <= AXIS_PLANE * S counts as the plane b = 0
AXIS_PLANE = 1e-3
# identities carrying 1/b are only checked for |b| > Z_FORM_PLANE * S
Z_FORM_PLANE = 0.05
# eigenvalues must exceed this multiple of |trace|
EIGENVALUE_FLOOR = 1e-12
# |det| below this is a singular metric
SINGULAR_DETERMINANT = 1e-300

# finite difference oracle defaults
GRADIENT_STEP = 1e-5
HESSIAN_STEP = 1e-3
PARAMETER_STEP = 1e-5
EXTRAPOLATION_LEVELS = 2
CERTIFICATE_RTOL = 1e-4
# generating function V(w) steps, relative to the distance to its complex singularities
GENERATING_FIRST_STEP = 1e-3
GENERATING_SECOND_STEP = 1e-2
GENERATING_LEVELS = 3

# relative floor of |G^i| in spray comparisons, in units of K^2
SPRAY_FLOOR = 1e-4

# pseudo-Finsleroid sampling margins, relative to |y|^2
PSEUDO_MARGIN = 0.05
# base step of the numeric pseudo metric, the Hessian of F^2/2
PSEUDO_HESSIAN_STEP = 1e-4

# berwald check
BERWALD_MIN_SAMPLES = 10
PARALLEL_FLOOR = 1e-10

HOMOGENEITY_FACTORS = (0.5, 2.0, 3.7)

DEFAULT_TOLERANCES = {
    # algebraic identities of the closed forms
    'algebraic': 1e-9,
    # identities checked against certified numeric differentiation
    'derivative': 1e-6,
    # generating function V(w) identities
    'generating': 1e-9,
    # z-, v- and u-representations agreeing with each other
    'representation': 1e-10,
    # closed-form determinant against LU determinant
    'determinant': 1e-10,
    # closed-form g_ij against the Hessian of K^2/2
    'hessian': 1e-6,
    # closed-form y_i against the gradient of K^2/2
    'gradient': 1e-7,
    # trace g^jk A_ijk against A_i
    'cartan_trace': 1e-8,
    # semi-C-reducible form against the e-form
    'cartan_forms': 1e-10,
    # e-form against (K/2) dg_ij/dy^k
    'cartan_oracle': 1e-6,
    # K, g_ij and G^i homogeneity
    'homogeneity': 1e-10,
    # g = 0 reductions
    'reduction': 1e-10,
    # K = S at g = 0
    'riemann_norm': 1e-12,
    # analytic M against the numeric g-derivative
    'charge_response': 1e-7,
    # cancellation-safe middle E term against the literal one
    'charge_middle': 1e-10,
    # closed-form spray against the Christoffel oracle
    'spray_oracle': 1e-5,
    # |G^i - a^i_nm y^n y^m| relative to 1 + |a-term| on Berwald scenarios
    'berwald': 1e-6,
    # least witness residual on non-Berwald scenarios
    'berwald_witness': 1e-3,
    # pseudo kernel identities and the two forms of F
    'pseudo_forms': 1e-12,
    # numeric pseudo metric at g = 0 against a_ij
    'pseudo_reduction': 1e-7,
    # numeric pseudo metric Euler identity
    'pseudo_euler': 1e-8,
    # substituted metric and inverse against the numeric Hessian of F^2/2
    'duality_metric': 1e-5,
    # substituted y_i against the numeric gradient of F^2/2
    'duality_covector': 1e-6,
    # geodesic K drift over the integration interval
    'geodesic_drift': 1e-6,
}

msg_code = {
    'NORM_OUT_OF_RANGE': 'sample %d: the norm c = %.6g of b violates 0 < c < 1',
    'CHARGE_OUT_OF_RANGE': 'sample %d: the charge g = %.6g violates -2 < g < 2',
    'NORM_SR_WARNING': 'sample %d: c = %.6g >= 1 in a time-space scenario',
    'UNKNOWN_TOLERANCE': 'unknown tolerance key %s',
    'BAD_OVERRIDE': 'tolerance override must read key=value, got %s',
    'CHECKS_FAILED': '%d of %d checks failed',
    'MALFORMED_REPORT': 'report %s is malformed: %s',
}
