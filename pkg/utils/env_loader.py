"""
Environment variable loader
Loads worker-count and logging overrides from a .env file
"""
import os
from pathlib import Path
from dotenv import load_dotenv
from utils.logger import logger

WORKERS_ENV_VAR = 'BOOTTEST_WORKERS'


class EnvLoader:
    """Load and manage environment variables"""

    def __init__(self):
        # Load .env file from project root
        env_path = Path(__file__).parent.parent / '.env'

        if env_path.exists():
            load_dotenv(env_path)
            logger.debug(f"Loaded environment variables from: {env_path}")

    @staticmethod
    def get_worker_count(cli_value=None, config_value=1, env_var_name=WORKERS_ENV_VAR):
        """
        Resolve the number of parallel workers

        Precedence: command-line flag, then environment, then config.

        Args:
            cli_value: Value from --workers (None when not given)
            config_value: Value from config.yaml
            env_var_name: Name of environment variable

        Returns:
            Positive worker count
        """
        if cli_value is not None:
            workers = int(cli_value)
        else:
            raw = os.getenv(env_var_name)
            if raw:
                try:
                    workers = int(raw)
                except ValueError:
                    logger.warning(f"Ignoring non-integer {env_var_name}={raw!r}")
                    workers = int(config_value)
            else:
                workers = int(config_value)

        if workers < 1:
            raise ValueError(f"Worker count must be >= 1, got {workers}")
        return workers


# Global instance
env_loader = EnvLoader()
