import logging
import os
from logging.handlers import RotatingFileHandler
from typing import Optional, Dict, Any
import json
from datetime import datetime
import pytz

LEVELS = {
    'debug': logging.DEBUG,
    'info': logging.INFO,
    'warning': logging.WARNING,
    'error': logging.ERROR,
}


class Logger:
    """JSON-per-entry logger writing to a rotating file."""

    def __init__(self, name: str = __name__, log_file: Optional[str] = None):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False

        # LORASIM_LOG_TZ, default UTC
        self.tz = pytz.timezone(os.getenv('LORASIM_LOG_TZ', 'UTC'))

        log_file = log_file or os.getenv('LORASIM_LOG_FILE', 'lorasim.log')
        log_path = os.path.abspath(log_file)

        # Loggers are process-wide; attach the file handler once per path
        already_attached = any(
            isinstance(h, RotatingFileHandler) and h.baseFilename == log_path
            for h in self.logger.handlers
        )
        if not already_attached:
            file_handler = RotatingFileHandler(
                log_path,
                maxBytes=1024*1024*5,  # 5MB
                backupCount=3,
                delay=True
            )
            # Entries are already JSON
            file_handler.setFormatter(logging.Formatter('%(message)s'))
            self.logger.addHandler(file_handler)

    def log(self,
            log_level: str = 'info',
            message: str = '',
            json_data: Optional[Dict[str, Any]] = None) -> None:

        level = LEVELS.get(log_level.lower())
        if level is None:
            raise ValueError(f"Invalid log level: {log_level}")

        log_entry = {
            "date": datetime.now(self.tz).strftime('%Y-%m-%d %H:%M:%S:%f')[:-3],
            "log_level": log_level.upper(),
            "msg": message,
            "data": json_data if json_data else None
        }

        # default=str covers enums, numpy scalars and paths in context dicts
        json_log = json.dumps(log_entry, ensure_ascii=False, indent=2, sort_keys=True, default=str)

        self.logger.log(level, json_log)
