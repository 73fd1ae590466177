import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'ell_calogero'))


@pytest.fixture(autouse=True)
def output_dir(tmp_path, monkeypatch):
    """Keep logs and relative outputs inside the test's temporary directory."""
    monkeypatch.setenv('ELL_CALOGERO_OUTPUT_DIR', str(tmp_path))
    return tmp_path
