# Django settings for the finsleroid verifier.
import os
import sys

from engine.constants import (
    DEFAULT_TOLERANCES, EXTRAPOLATION_LEVELS, GRADIENT_STEP, HESSIAN_STEP,
    PARAMETER_STEP)

BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

DEBUG = os.getenv('FINSLEROID_DEBUG', 'false').lower() == 'true'

SECRET_KEY = os.getenv('FINSLEROID_SECRET_KEY', 'finsleroid-verifier-has-no-sessions')

ALLOWED_HOSTS = []

# no database, the verifier only runs management commands
DATABASES = {}

INSTALLED_APPS = (
    'engine',
    'schema',
    'verifier',
)

USE_TZ = True
TIME_ZONE = 'UTC'

# tolerances of every check family, overridden per scenario and per run
FINSLEROID_TOLERANCES = dict(DEFAULT_TOLERANCES)

# base steps and Richardson levels of the numeric oracles
FINSLEROID_ORACLE = {
    'gradient_step': GRADIENT_STEP,
    'hessian_step': HESSIAN_STEP,
    'parameter_step': PARAMETER_STEP,
    'levels': EXTRAPOLATION_LEVELS,
}

# replaces the seed of every random sample block when set
FINSLEROID_SEED = int(os.environ['FINSLEROID_SEED']) if os.getenv('FINSLEROID_SEED') else None

# directory of the bundled scenario files
FINSLEROID_SCENARIO_DIR = os.path.join(BASE_DIR, 'scenarios')

FINSLEROID_LOG_FILE = os.getenv('FINSLEROID_LOG_FILE')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    # custom formatters used to describe the logs
    'formatters': {
        # this formatter just includes the message
        'custom.brief': {
            'format': '%(message)s'
        },
        # this formatter includes the time, log level, logger name, and message
        'custom.precise': {
            'format': '%(asctime)s %(levelname)-8s %(name)-18s %(message)s',
            'datefmt': '%Y-%m-%d %H:%M:%S'
        },
        # this formatter includes file name and line number info
        'custom.debug': {
            'format': '%(asctime)s %(levelname)-8s [%(filename)s:%(lineno)d] %(message)s',
            'datefmt': '%Y-%m-%d %H:%M:%S'
        }
    },
    'handlers': {
        # this handler logs to the console, stdout is kept for reports
        'custom.console': {
            'level': 'DEBUG' if DEBUG else 'WARNING',
            'class': 'logging.StreamHandler',
            'stream': sys.stderr,
            'formatter': 'custom.precise'
        },
        # check outcomes, one line each
        'custom.check': {
            'level': 'INFO' if DEBUG else 'WARNING',
            'class': 'logging.StreamHandler',
            'stream': sys.stderr,
            'formatter': 'custom.brief'
        },
    },
    'loggers': {
        'finsleroid': {
            'handlers': ['custom.console'],
            'level': 'DEBUG',
            'propagate': False
        },
        'finsleroid.check': {
            'handlers': ['custom.check'],
            'level': 'DEBUG',
            'propagate': False
        },
    }
}

if FINSLEROID_LOG_FILE:
    # this handler logs to a file
    LOGGING['handlers']['custom.file'] = {
        'level': 'DEBUG',
        'class': 'logging.FileHandler',
        'filename': FINSLEROID_LOG_FILE,
        'formatter': 'custom.debug'
    }
    for name in ('finsleroid', 'finsleroid.check'):
        LOGGING['loggers'][name]['handlers'].append('custom.file')

# local Settings - overriden by local_settings.py
try:
    from local_settings import *  # noqa: F401,F403
except ImportError:
    pass
