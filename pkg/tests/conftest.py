from pathlib import Path

import pytest
from loguru import logger

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS = Path(__file__).parent.parent / "corpus"


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def corpus_dir():
    return CORPUS


@pytest.fixture
def log_messages():
    """ Messages loguru emits at WARNING and above while the test runs """
    messages = []
    sink_id = logger.add(lambda message: messages.append(message.record["message"]), level="WARNING")

    yield messages

    logger.remove(sink_id)
