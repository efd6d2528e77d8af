# tests/test_config.py
import os
import subprocess
import sys
from pathlib import Path

import pytest

APP_DIR = Path(__file__).resolve().parents[1]


def _settings_seen_from(cwd, module):
    env = {k: v for k, v in os.environ.items() if not k.startswith("GLUE_")}
    env["PYTHONPATH"] = str(APP_DIR)
    code = (
        f"import {module}\n"
        "import services.spaces as s, services.coarse as c, services.harness as h\n"
        "print(s.ORACLE_CAP, c.SATURATION_CAP, h.EXHAUSTIVE_POINTS)\n"
    )
    out = subprocess.run([sys.executable, "-c", code], cwd=cwd, env=env, capture_output=True, text=True, check=True)
    return out.stdout.split()

# ---------- .env ----------

@pytest.mark.parametrize("module", ["cli", "glue_server"])
def test_dotenv_reaches_import_time_settings(tmp_path, module):
    (tmp_path / ".env").write_text("GLUE_ORACLE_CAP=2\nGLUE_SATURATION_CAP=7\nGLUE_EXHAUSTIVE_POINTS=1\n")
    assert _settings_seen_from(tmp_path, module) == ["2", "7", "1"]

def test_defaults_without_dotenv(tmp_path):
    assert _settings_seen_from(tmp_path, "cli") == ["16", "10000", "3"]
