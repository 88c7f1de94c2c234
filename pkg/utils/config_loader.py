"""
YAML configuration loading
Tool defaults live in config/config.yaml; study documents in config/studies/
"""
from pathlib import Path

import yaml

from utils.exceptions import ConfigError
from utils.logger import logger

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / 'config' / 'config.yaml'


def load_yaml_document(path):
    """
    Parse a YAML file into a dict

    Raises:
        ConfigError: missing file, invalid YAML, or a non-mapping document
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            doc = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {path}: {e}") from e
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError(f"{path} must contain a mapping at the top level")
    return doc


def load_config(config_path=None):
    """Load tool defaults from config.yaml"""
    path = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
    try:
        config = load_yaml_document(path)
        logger.debug(f"Configuration loaded from {path}")
        return config
    except Exception as e:
        logger.error(f"Error loading config: {str(e)}")
        raise
