import json

import pytest

from src.logging.logger import Logger


def test_entries_are_json(tmp_path):
    path = tmp_path / "run.log"
    logger = Logger('tests.logger.json', log_file=str(path))
    logger.log('warning', 'Bin finished', {'sf': 9, 'path': tmp_path})
    for handler in logger.logger.handlers:
        handler.flush()

    entry = json.loads(path.read_text(encoding='utf-8'))
    assert entry['log_level'] == 'WARNING'
    assert entry['msg'] == 'Bin finished'
    assert entry['data'] == {'sf': 9, 'path': str(tmp_path)}


def test_handler_attached_once(tmp_path):
    path = str(tmp_path / "once.log")
    first = Logger('tests.logger.once', log_file=path)
    second = Logger('tests.logger.once', log_file=path)
    assert first.logger is second.logger
    assert len(second.logger.handlers) == 1


def test_invalid_level(tmp_path):
    logger = Logger('tests.logger.invalid', log_file=str(tmp_path / "x.log"))
    with pytest.raises(ValueError):
        logger.log('verbose', 'nope')
