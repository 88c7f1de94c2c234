"""
Logging utility for the bootstrap testing toolkit
"""
import logging
import os
from datetime import datetime
from pathlib import Path


class Logger:
    def __init__(self, name="BootTest", level=None):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(logging.DEBUG)
        self.formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

        # Console handler
        if not self.logger.handlers:
            console_handler = logging.StreamHandler()
            console_handler.setLevel(level or os.getenv('BOOTTEST_LOG_LEVEL', 'INFO').upper())
            console_handler.setFormatter(self.formatter)
            self.logger.addHandler(console_handler)

    def add_file_handler(self, log_dir="logs"):
        """
        Attach a timestamped DEBUG file handler.

        Args:
            log_dir: Directory for log files

        Returns:
            Path to the log file
        """
        Path(log_dir).mkdir(parents=True, exist_ok=True)
        log_file = os.path.join(
            log_dir,
            f"boottest_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log"
        )
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(self.formatter)
        self.logger.addHandler(file_handler)
        return Path(log_file)

    def set_console_level(self, level):
        """Change the level of the console handler(s)"""
        for handler in self.logger.handlers:
            if not isinstance(handler, logging.FileHandler):
                handler.setLevel(level)

    def get_logger(self):
        return self.logger


# Global logger instance
_logger_wrapper = Logger()
logger = _logger_wrapper.get_logger()


def add_file_handler(log_dir="logs"):
    return _logger_wrapper.add_file_handler(log_dir)


def set_console_level(level):
    _logger_wrapper.set_console_level(level)
