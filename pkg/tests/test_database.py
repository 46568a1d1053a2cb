import sqlite3

import pytest

from analysis.gate_design import OptimizationResult
from core.exceptions import InvalidParametersError
from database.db_manager import DatabaseManager


def make_result(fidelity: float) -> OptimizationResult:
    return OptimizationResult(
        tau_tilde=0.947,
        omega_tilde=0.987,
        fidelity=fidelity,
        tau_s=4.4e-3,
        omega1=2 * 3.141592653589793 * 112.0,
        grid_best=(0.95, 0.99, fidelity - 1e-4),
        evaluations=10250,
    )


@pytest.fixture
def db(tmp_path):
    return DatabaseManager(str(tmp_path / "runs.db"))


class TestDatabaseManager:
    def test_optimization_runs_newest_first(self, db):
        first = db.save_optimization("L-alanine", make_result(0.998))
        second = db.save_optimization("L-alanine", make_result(0.999))
        assert second > first > 0

        runs = db.get_recent_runs("optimize")
        assert [run["id"] for run in runs] == [second, first]
        assert runs[0]["omega1_hz"] == pytest.approx(112.0)
        assert runs[0]["evaluations"] == 10250

    def test_qec_runs(self, db):
        report = {
            "identities": [{"index": i, "holds": True} for i in range(4)],
            "recovery_min": 0.97,
            "recovery_mean": 0.99,
            "mode": "full",
            "probabilities": (0.25, 0.25, 0.25, 0.25),
            "trials": 50,
            "seed": 1,
        }
        assert db.save_qec_run("L-alanine", report) > 0
        (run,) = db.get_recent_runs("qec", limit=5)
        assert run["probabilities"] == [0.25, 0.25, 0.25, 0.25]
        assert run["identities_hold"] is True
        assert run["mode"] == "full"

    def test_stats(self, db):
        db.save_optimization("a", make_result(0.99))
        db.save_optimization("b", make_result(0.995))
        stats = db.get_database_stats()
        assert stats["total_optimizations"] == 2
        assert stats["total_qec_runs"] == 0
        assert stats["best_fidelity"] == pytest.approx(0.995)

    def test_unknown_kind(self, db):
        with pytest.raises(InvalidParametersError):
            db.get_recent_runs("landscape")

    def test_sqlite_errors_are_reported_not_raised(self, db):
        conn = sqlite3.connect(db.db_path)
        conn.execute("DROP TABLE optimization_runs")
        conn.commit()
        conn.close()
        assert db.save_optimization("a", make_result(0.99)) == -1
        assert db.get_recent_runs("optimize") == []
        assert db.get_database_stats() == {}

    def test_unopenable_archive_is_reported_not_raised(self, tmp_path):
        db = DatabaseManager(str(tmp_path / "missing" / "dir" / "runs.db"))
        assert db.available is False
        assert db.save_optimization("a", make_result(0.99)) == -1
        assert db.save_qec_run("a", {"mode": "ideal", "identities": []}) == -1
        assert db.get_recent_runs("qec") == []
        assert db.get_database_stats() == {}

    def test_open_archive_is_available(self, db):
        assert db.available is True
