"""
Django settings for the kdvdet project.

The project has no web surface. Django provides the management commands,
the cache framework used for scattering data, the forms used to validate
run configurations and the test runner.

For the full list of Django settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

import os

# Build paths inside the project like this: os.path.join(BASE_DIR, ...)
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# Suppress warning in Django 3.2 version.
DEFAULT_AUTO_FIELD = 'django.db.models.AutoField'

# Only required by Django itself; nothing is signed.
SECRET_KEY = os.environ.get("KDVDET_SECRET_KEY", "kdvdet-local")

DEBUG = os.environ.get("KDVDET_DEBUG", "") == "1"

# Application definition

INSTALLED_APPS = ['solver', 'import_export']

# Nothing is stored in a database.
DATABASES = {}

# Default cache for in-process reuse. The commands open a file based cache
# under <out>/cache on their own (see solver.cache).
CACHES = {
    'default': {
        'BACKEND': 'django.core.cache.backends.locmem.LocMemCache',
        'LOCATION': 'kdvdet',
    }
}

# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

# Logging

LOG_LEVEL = os.environ.get("KDVDET_LOG_LEVEL", "INFO")

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '[{asctime}] {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'solver': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}

# Numerical defaults of the solver. Every entry can be overridden per call
# and, for the commands, per run configuration.

SOLVER = {
    # k-grid
    'K_MIN': 1e-3,
    'K_MAX': 40.0,
    'K_NODES': 2048,
    'K_SCALE': 4.0,
    # Jost integration
    'ODE_RTOL': 1e-11,
    'ODE_ATOL': 1e-12,
    'ODE_BATCH': 128,
    'TAIL_TOL': 1e-12,
    'TAIL_SEARCH_MAX': 1e3,
    # scattering invariants
    'COEFF_TOL': 1e-8,
    'WRONSKIAN_FLOOR': 1e-12,
    'PROFILE_SHIFT': 1.4142135623730951e-3,
    'SPLIT_TOL': 1e-6,
    'DENOMINATOR_FLOOR': 1e-10,
    'REP_TOL': 1e-6,
    # bound states
    'KAPPA_TOL': 1e-12,
    'KAPPA_SCAN': 400,
    'EIG_MARGIN': 20.0,
    'EIG_GRID': 2048,
    # Volterra kernel
    'VOLTERRA_STEP': 0.01,
    'VOLTERRA_MAX_ITER': 200,
    'VOLTERRA_TOL': 1e-14,
    # m-function
    'RICCATI_BLOWUP': 1e8,
    'WEYL_DEPTH': 40.0,
    # Hankel symbol and kernels
    'N_QUAD': 96,
    'PHI_TOL': 1e-12,
    'KERNEL_TOL': 1e-6,
    'KERNEL_IMAG_TOL': 1e-9,
    'TAIL_CUT': 1e-12,
    'REFLECTION_FLOOR': 1e-9,
    'PANEL_ORDER': 16,
    'PANEL_SPAN': 12.0,
    'HOTSPOT_REFINE': 8,
    'CONTOUR_OFFSET': 1.0,
    'CONTOUR_STEP': 0.01,
    'CONTOUR_MAX_LENGTH': 400.0,
    # determinants
    'CROSS_TOL': 1e-6,
    'BLOCK_TOL': 1e-8,
    'PSD_TOL': 1e-12,
    'FD_STEP': 1e-3,
    # oracles
    'BLOWUP_GROWTH': 1e3,
}
