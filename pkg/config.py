import os
from dotenv import load_dotenv

# Load environment variables from .env if present
load_dotenv()


def _int_env(name, default):
    value = os.environ.get(name)
    return int(value) if value else default


class Config:
    # Size limits
    MAX_DIMENSION = _int_env('HETEROPERM_MAX_DIMENSION', 2 ** 31)
    DENSE_LIMIT = _int_env('HETEROPERM_DENSE_LIMIT', 212)

    # Search budgets
    SEARCH_BUDGET = _int_env('HETEROPERM_SEARCH_BUDGET', 518400)
    PROJECTOR_MAX_K = _int_env('HETEROPERM_PROJECTOR_MAX_K', 6)

    # Sampling
    DEFAULT_SEED = _int_env('HETEROPERM_SEED', 20240601)
    DEFAULT_SAMPLES = _int_env('HETEROPERM_SAMPLES', 10000)

    # Logging
    LOG_FILE = os.environ.get('HETEROPERM_LOG_FILE', 'heteroperm.log')
    DEBUG = False


class DevelopmentConfig(Config):
    DEBUG = True


class TestingConfig(Config):
    LOG_FILE = ''
    DEFAULT_SAMPLES = 2000


config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'default': Config
}


def get_config(name=None):
    """
    Return the configuration class selected by name or HETEROPERM_ENV.

    Args:
        name (str, optional): Key into the config mapping

    Returns:
        type: A Config subclass
    """
    name = name or os.environ.get('HETEROPERM_ENV') or 'default'
    return config.get(name, config['default'])
