"""
Utility modules for the bootstrap testing toolkit
"""
__version__ = "1.0.0"

from utils.logger import logger
from utils.env_loader import env_loader
from utils.rng import RngStream, derive_seed

__all__ = ['__version__', 'logger', 'env_loader', 'RngStream', 'derive_seed']
