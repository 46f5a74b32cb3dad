"""
Settings module for application configuration.

Loads environment variables and provides centralized configuration management
using Pydantic settings for type validation and environment variable parsing.
Supports different configurations for development, production, and testing.
"""
from pydantic_settings import BaseSettings
from functools import lru_cache


class BaseConfig(BaseSettings):
    """
    Base configuration shared across all environments.
    """
    # Application
    APP_ENV: str = "development"
    LOG_LEVEL: str = "INFO"
    APP_NAME: str = "D-optimal Design Rounding"
    APP_VERSION: str = "1.0.0"

    # Relaxation solver (Frank-Wolfe on log det)
    SOLVER_MAX_ITERS: int = 2000
    SOLVER_REL_TOL: float = 1e-7
    SOLVER_RIDGE: float = 1e-8
    SOLVER_LINE_SEARCH: bool = True
    SOLVER_PAIRWISE: bool = True
    SOLVER_BISECTION_STEPS: int = 60

    # Linear algebra kernel
    MATRIX_ORDER_CAP: int = 512
    PIVOT_REL_TOL: float = 1e-12
    RANK_REL_TOL: float = 1e-10
    LEVERAGE_RIDGE: float = 1e-8

    # Sampling and enumeration limits
    REJECTION_CAP: int = 1_000_000
    ENUMERATION_CAP: int = 1_000_000
    EXACT_LAW_MAX_N: int = 12

    # Greedy loops: candidates within this relative window of the best tie
    TIE_REL_TOL: float = 1e-12

    # CLI defaults
    DEFAULT_SEED: int = 0
    DEFAULT_TRIALS: int = 1
    DEFAULT_EPS: float = 0.5

    # Monitoring
    METRICS_ENABLED: bool = True

    class Config:
        env_file = ".env"
        case_sensitive = True


class DevelopmentConfig(BaseConfig):
    """
    Development environment configuration.

    Verbose logging for working on the algorithms interactively.
    """
    APP_ENV: str = "development"
    LOG_LEVEL: str = "DEBUG"

    class Config:
        env_file = ".env.development"
        case_sensitive = True


class ProductionConfig(BaseConfig):
    """
    Production environment configuration.

    Quiet logging for batch runs driven from scripts.
    """
    APP_ENV: str = "production"
    LOG_LEVEL: str = "WARNING"

    class Config:
        env_file = ".env.production"
        case_sensitive = True


class TestingConfig(BaseConfig):
    """
    Testing environment configuration.

    Keeps the test output free of solver chatter and skips metric recording.
    """
    APP_ENV: str = "testing"
    LOG_LEVEL: str = "ERROR"

    # Disable metrics in tests
    METRICS_ENABLED: bool = False

    class Config:
        env_file = ".env.test"
        case_sensitive = True


def get_config() -> BaseConfig:
    """
    Get configuration based on APP_ENV environment variable.

    Returns:
        Configuration instance for the current environment
    """
    import os
    env = os.getenv("APP_ENV", "development").lower()

    config_map = {
        "development": DevelopmentConfig,
        "production": ProductionConfig,
        "testing": TestingConfig,
    }

    config_class = config_map.get(env, DevelopmentConfig)
    return config_class()


@lru_cache()
def get_settings() -> BaseConfig:
    """
    Get cached settings instance.

    Settings are loaded once and reused for the lifetime of the process.

    Returns:
        Cached configuration instance
    """
    return get_config()


settings = get_settings()
