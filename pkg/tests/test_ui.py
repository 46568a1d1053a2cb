from pathlib import Path

import pytest
from streamlit.testing.v1 import AppTest

from core.spin_system import SpinChainParams

APP = str(Path(__file__).resolve().parent.parent / "app.py")


@pytest.fixture
def app(isolated_env):
    at = AppTest.from_file(APP, default_timeout=60)
    at.run()
    return at


class TestDashboard:
    def test_renders_without_errors(self, app):
        assert not app.exception
        assert not app.error
        assert app.title[0].value.endswith("SoftPulse")

    def test_shows_soft_pulse_metrics(self, app):
        metrics = {m.label: m.value for m in app.metric}
        assert float(metrics["J23 (Hz)"]) == pytest.approx(53.8)
        assert float(metrics["Soft pulse ω1 (Hz)"]) == pytest.approx(106.18, abs=0.01)
        assert metrics["Cancellation"] == "✅ ok"

    def test_qec_button(self, app):
        button = next(b for b in app.button if b.label == "Run QEC check")
        button.click().run()
        assert not app.exception
        metrics = {m.label: m.value for m in app.metric}
        assert float(metrics["Recovery fidelity (min)"]) == pytest.approx(1.0, abs=1e-6)

    def test_results_follow_the_molecule(self, app):
        next(b for b in app.button if b.label == "Run QEC check").click().run()
        app.run()
        assert "Recovery fidelity (min)" in {m.label for m in app.metric}

        app.session_state["results_params"] = SpinChainParams.from_hz(10.0, 20.0, -100.0, -200.0, label="other")
        app.run()
        assert not app.exception
        assert "Recovery fidelity (min)" not in {m.label for m in app.metric}
        assert app.session_state["qec_report"] is None


def test_unopenable_archive_still_renders(isolated_env, monkeypatch):
    monkeypatch.setenv("SOFTPULSE_DB_PATH", str(isolated_env / "missing" / "dir" / "runs.db"))
    at = AppTest.from_file(APP, default_timeout=60)
    at.run()
    assert not at.exception
    assert any("could not be opened" in w.value for w in at.warning)
