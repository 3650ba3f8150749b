import pytest


@pytest.fixture(autouse=True)
def testing_config(monkeypatch):
    # No log file and smaller sample counts while testing
    monkeypatch.setenv('HETEROPERM_ENV', 'testing')
