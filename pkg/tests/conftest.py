import pytest
from hypothesis import HealthCheck, settings

from rgdom.events import set_verbose

settings.register_profile("rgdom", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("rgdom")


@pytest.fixture(autouse=True)
def quiet_events():
    set_verbose(False)
    yield
    set_verbose(False)


@pytest.fixture
def dimacs_file(tmp_path):
    """Writes DIMACS text to a temporary file and returns its path."""
    def write(text, name="graph.col"):
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return str(path)
    return write
