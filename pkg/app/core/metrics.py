"""
Prometheus metrics definitions.

Defines the counters and histograms recorded by the solver, samplers,
derandomization loops and verification suite.
"""
from prometheus_client import Counter, Histogram, Info, CollectorRegistry, write_to_textfile

REGISTRY = CollectorRegistry()

# Application info
APP_INFO = Info('doptround', 'D-optimal design rounding application information', registry=REGISTRY)

# Relaxation solver metrics
RELAXATION_SOLVES_TOTAL = Counter(
    'relaxation_solves_total',
    'Total number of relaxation solves',
    ['mode', 'converged'],
    registry=REGISTRY
)

RELAXATION_ITERATIONS = Histogram(
    'relaxation_iterations',
    'Frank-Wolfe iterations used per relaxation solve',
    buckets=[1, 10, 50, 100, 250, 500, 1000, 2000, 5000],
    registry=REGISTRY
)

RELAXATION_DURATION_SECONDS = Histogram(
    'relaxation_duration_seconds',
    'Relaxation solve duration in seconds',
    buckets=[0.001, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 30.0],
    registry=REGISTRY
)

# Rounding metrics
SAMPLES_DRAWN_TOTAL = Counter(
    'samples_drawn_total',
    'Total number of randomized rounding samples drawn',
    ['scheme'],
    registry=REGISTRY
)

REJECTION_ROUNDS_TOTAL = Counter(
    'rejection_rounds_total',
    'Rejected Bernoulli draws in the inflated sampler',
    registry=REGISTRY
)

CONDITIONAL_EXPECTATIONS_TOTAL = Counter(
    'conditional_expectations_total',
    'Conditional expectation evaluations in greedy derandomization',
    ['scheme'],
    registry=REGISTRY
)

# Verification metrics
VERIFICATION_CHECKS_TOTAL = Counter(
    'verification_checks_total',
    'Verification checks executed',
    ['check', 'status'],
    registry=REGISTRY
)


def init_app_info(version: str, environment: str):
    """
    Initialize application info metric.

    Args:
        version: Application version
        environment: Current environment (development, production, testing)
    """
    APP_INFO.info({
        'version': version,
        'environment': environment
    })


def dump_metrics(path: str):
    """
    Write the registry in the text exposition format.

    Args:
        path: Destination file
    """
    write_to_textfile(path, REGISTRY)
