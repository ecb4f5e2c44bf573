"""
Configuration settings for Parameter-Free SCO
"""

import os
import logging
from pathlib import Path
from typing import Any, Dict

# Environment detection
ENVIRONMENT = os.getenv('ENVIRONMENT', 'development')
DEBUG = ENVIRONMENT == 'development'

# Numerical defaults
DEFAULT_SEED = int(os.getenv('PFSCO_SEED', 0))
DEFAULT_WORKERS = int(os.getenv('PFSCO_WORKERS', 4))
ERM_MAX_ITER = int(os.getenv('PFSCO_ERM_MAX_ITER', 4000))
ERM_TOL_SCALE = float(os.getenv('PFSCO_ERM_TOL_SCALE', 1e-6))

# Logging configuration
LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO' if not DEBUG else 'DEBUG')
LOG_FILE = os.getenv('LOG_FILE', 'paramfree_sco.log')
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# File paths
BASE_DIR = Path(__file__).parent
LOG_DIR = Path(os.getenv('LOG_DIR', Path.cwd() / 'logs'))


def setup_logging() -> None:
    """Configure application logging"""

    level = getattr(logging, LOG_LEVEL.upper(), logging.INFO)

    handlers: list[logging.Handler] = []

    # Console handler for development; stderr so CSV written to stdout stays clean
    if DEBUG:
        console_handler = logging.StreamHandler()
        console_handler.setLevel(level)
        console_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handlers.append(console_handler)

    # File handler for production runs
    if not DEBUG or os.getenv('LOG_TO_FILE'):
        LOG_DIR.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(LOG_DIR / LOG_FILE)
        file_handler.setLevel(level)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handlers.append(file_handler)

    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        handlers=handlers,
        force=True
    )

    # Quiet third-party loggers
    for noisy in ('asyncio', 'numpy', 'scipy'):
        logging.getLogger(noisy).setLevel(logging.WARNING)


def get_runtime_status() -> Dict[str, Any]:
    """Get resolved runtime settings"""
    return {
        "environment": ENVIRONMENT,
        "seed": DEFAULT_SEED,
        "workers": DEFAULT_WORKERS,
        "erm_max_iter": ERM_MAX_ITER,
        "erm_tol_scale": ERM_TOL_SCALE,
    }


# Application metadata
APP_INFO = {
    "name": "Parameter-Free SCO",
    "version": "1.0.0",
    "description": "Parameter-free stochastic convex optimization toolkit and verification harness",
}
