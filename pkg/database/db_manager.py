import json
import logging
import sqlite3
from contextlib import closing
from typing import Any, Dict, List

from core.exceptions import InvalidParametersError
from core.spin_system import TWO_PI

logger = logging.getLogger(__name__)

RUN_TABLES = {
    'optimize': 'optimization_runs',
    'qec': 'qec_runs',
}


class DatabaseManager:
    """Manages the SQLite archive of optimization and QEC runs"""

    def __init__(self, db_path: str = 'softpulse_runs.db'):
        self.db_path = db_path
        self.available = self.init_database()

    def _connect(self):
        return closing(sqlite3.connect(self.db_path))

    def init_database(self) -> bool:
        """Create the run tables if they do not exist; False if the archive cannot be opened"""
        try:
            with self._connect() as conn:
                cursor = conn.cursor()

                cursor.execute('''
                    CREATE TABLE IF NOT EXISTS optimization_runs (
                        id INTEGER PRIMARY KEY AUTOINCREMENT,
                        label TEXT,
                        tau_tilde REAL,
                        omega_tilde REAL,
                        fidelity REAL,
                        tau_s REAL,
                        omega1_hz REAL,
                        grid_fidelity REAL,
                        evaluations INTEGER,
                        created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
                    )
                ''')

                cursor.execute('''
                    CREATE TABLE IF NOT EXISTS qec_runs (
                        id INTEGER PRIMARY KEY AUTOINCREMENT,
                        label TEXT,
                        mode TEXT,
                        probabilities TEXT,
                        trials INTEGER,
                        seed INTEGER,
                        recovery_min REAL,
                        recovery_mean REAL,
                        identities_hold INTEGER,
                        created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
                    )
                ''')

                conn.commit()
            return True
        except sqlite3.Error as e:
            logger.error("Error initializing run archive %s: %s", self.db_path, e)
            return False

    def save_optimization(self, label: str, result) -> int:
        """Archive an OptimizationResult; returns the row id or -1"""
        try:
            with self._connect() as conn:
                cursor = conn.cursor()

                cursor.execute('''
                    INSERT INTO optimization_runs
                        (label, tau_tilde, omega_tilde, fidelity, tau_s, omega1_hz, grid_fidelity, evaluations)
                    VALUES (?, ?, ?, ?, ?, ?, ?, ?)
                ''', (
                    label,
                    result.tau_tilde,
                    result.omega_tilde,
                    result.fidelity,
                    result.tau_s,
                    result.omega1 / TWO_PI,
                    result.grid_best[2],
                    result.evaluations,
                ))

                conn.commit()
                return cursor.lastrowid
        except sqlite3.Error as e:
            logger.error("Error saving optimization run: %s", e)
            return -1

    def save_qec_run(self, label: str, report: Dict[str, Any]) -> int:
        """Archive a qec report as emitted by the CLI; returns the row id or -1"""
        try:
            with self._connect() as conn:
                cursor = conn.cursor()

                identities = report.get('identities', [])
                cursor.execute('''
                    INSERT INTO qec_runs
                        (label, mode, probabilities, trials, seed, recovery_min, recovery_mean, identities_hold)
                    VALUES (?, ?, ?, ?, ?, ?, ?, ?)
                ''', (
                    label,
                    report.get('mode', ''),
                    json.dumps(list(report.get('probabilities', []))),
                    report.get('trials'),
                    report.get('seed'),
                    report.get('recovery_min'),
                    report.get('recovery_mean'),
                    int(bool(identities) and all(item['holds'] for item in identities)),
                ))

                conn.commit()
                return cursor.lastrowid
        except sqlite3.Error as e:
            logger.error("Error saving QEC run: %s", e)
            return -1

    def get_recent_runs(self, kind: str, limit: int = 20) -> List[Dict[str, Any]]:
        """Newest archived runs of one kind ('optimize' or 'qec')"""
        if kind not in RUN_TABLES:
            raise InvalidParametersError(f"unknown run kind {kind!r}")
        try:
            with self._connect() as conn:
                conn.row_factory = sqlite3.Row
                cursor = conn.cursor()

                cursor.execute(f'''
                    SELECT * FROM {RUN_TABLES[kind]}
                    ORDER BY created_at DESC, id DESC
                    LIMIT ?
                ''', (limit,))
                rows = cursor.fetchall()

            runs = []
            for row in rows:
                record = dict(row)
                if 'probabilities' in record:
                    record['probabilities'] = json.loads(record['probabilities'] or '[]')
                if 'identities_hold' in record:
                    record['identities_hold'] = bool(record['identities_hold'])
                runs.append(record)
            return runs
        except sqlite3.Error as e:
            logger.error("Error retrieving %s runs: %s", kind, e)
            return []

    def get_database_stats(self) -> Dict[str, Any]:
        """Run counts per table and the best archived fidelity"""
        try:
            with self._connect() as conn:
                cursor = conn.cursor()

                cursor.execute('SELECT COUNT(*), MAX(fidelity) FROM optimization_runs')
                total_optimizations, best_fidelity = cursor.fetchone()

                cursor.execute('SELECT COUNT(*) FROM qec_runs')
                total_qec_runs = cursor.fetchone()[0]

                cursor.execute('SELECT mode, COUNT(*) FROM qec_runs GROUP BY mode')
                qec_by_mode = dict(cursor.fetchall())

            return {
                'total_optimizations': total_optimizations,
                'total_qec_runs': total_qec_runs,
                'best_fidelity': best_fidelity,
                'qec_by_mode': qec_by_mode,
            }
        except sqlite3.Error as e:
            logger.error("Error getting database stats: %s", e)
            return {}
