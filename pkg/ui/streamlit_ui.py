import json
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
import streamlit as st

from analysis.gate_design import landscape_scan, optimize_fidelity
from analysis.qec import (
    DEFAULT_SEED,
    CorrelatedChannel,
    identity_records,
    operator_identity_check,
    soft_pulse_recovery_fidelity,
)
from cli.config import (
    MOLECULE_DIR,
    Settings,
    config_from_params,
    parse_config,
    parse_config_text,
)
from core.exceptions import BadChannelError, SoftPulseError
from core.spin_system import TWO_PI, SpinChainParams
from database.db_manager import DatabaseManager
from workflow import SoftPulseWorkflow

RESULT_KEYS = ('landscape', 'optimum', 'qec_report')


class StreamlitUI:
    """Dashboard over the soft-pulse analysis workflow"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings.from_env()
        self.db_manager = DatabaseManager(self.settings.db_path)
        self.setup_page_config()
        self.init_session_state()

    def setup_page_config(self):
        """Configure Streamlit page settings"""
        st.set_page_config(
            page_title="SoftPulse",
            page_icon="🧲",
            layout="wide",
            initial_sidebar_state="expanded"
        )

    def init_session_state(self):
        """Initialize Streamlit session state variables"""
        defaults = {
            'report': None,
            'landscape': None,
            'optimum': None,
            'qec_report': None,
            'results_params': None,
        }
        for key, value in defaults.items():
            if key not in st.session_state:
                st.session_state[key] = value

    def sync_results(self, p: SpinChainParams):
        """Drop landscape, optimum and QEC results computed for another molecule"""
        if st.session_state.results_params != p:
            for key in RESULT_KEYS:
                st.session_state[key] = None
            st.session_state.results_params = p

    def render_header(self):
        st.title("🧲 SoftPulse")
        st.caption("Selective entangling gates in a three-spin chain: soft pulses, "
                   "Bloch-Siegert shifts, fidelity optima and correlated-noise QEC")

    def load_molecule(self) -> Optional[SpinChainParams]:
        """Sidebar molecule selection: bundled file or uploaded JSON"""
        st.sidebar.header("Molecule")
        bundled = sorted(path.name for path in MOLECULE_DIR.glob("*.json"))
        choice = st.sidebar.selectbox("Bundled molecule", bundled, key="molecule_choice")
        upload = st.sidebar.file_uploader("...or upload a molecule JSON", type=["json"])

        try:
            if upload is not None:
                config = parse_config_text(upload.getvalue().decode("utf-8"), upload.name)
            else:
                config = parse_config(MOLECULE_DIR / choice)
        except SoftPulseError as e:
            st.sidebar.error(f"Invalid molecule file: {e}")
            return None
        return config.to_params()

    def render_parameters(self, p: SpinChainParams):
        values = p.to_hz()
        st.subheader(f"Parameters: {values['label'] or 'molecule'}")
        col1, col2, col3, col4 = st.columns(4)
        col1.metric("J12 (Hz)", f"{values['j12_hz']:.6g}")
        col2.metric("J23 (Hz)", f"{values['j23_hz']:.6g}")
        col3.metric("δ12 (Hz)", f"{values['delta12_hz']:.6g}")
        col4.metric("δ13 (Hz)", f"{values['delta13_hz']:.6g}")

    def run_quick_report(self, p: SpinChainParams) -> Dict[str, Any]:
        """BS tables, soft-pulse solution and spot fidelities (fast steps only)"""
        status = st.empty()
        workflow = SoftPulseWorkflow(p, on_step=lambda name: status.text(f"Running {name}..."))
        report = workflow.run_analysis(optimize=False, qec_trials=0)
        status.empty()
        for step, message in report['errors'].items():
            st.error(f"Step {step} failed: {message}")
        return report

    def render_design(self, report: Dict[str, Any]):
        """Bloch-Siegert tables and soft-pulse solution"""
        hard = report.get('bs_hard')
        soft = report.get('soft_pulse')
        fidelity = report.get('fidelity')

        if soft:
            col1, col2, col3, col4 = st.columns(4)
            col1.metric("Soft pulse ω1 (Hz)", f"{soft['omega1_hz']:.6g}", help=f"branch n={soft['n']}")
            col2.metric("Soft pulse τ (ms)", f"{soft['tau_ms']:.6g}")
            col3.metric("Cancellation", "✅ ok" if soft['cancellation_ok'] else "❌ failed")
            col4.metric("Residual phase φ (rad)", f"{soft['phi_rad']:.6g}")

        if fidelity:
            col1, col2, col3 = st.columns(3)
            col1.metric("Hard refocusing F", f"{fidelity['hard_refocusing']:.6g}",
                        help=f"τ̃ = {fidelity['hard_tau_tilde']:.3g}, ω̃1 = 1")
            col2.metric("Merged pulses F", f"{fidelity['merged_pulses']:.6g}", help="τ̃ = 1, ω̃1 = 1")
            col3.metric("Soft pulse F", f"{fidelity['soft_pulse']:.6g}",
                        help=f"τ̃ = 1, ω̃1 = {fidelity['soft_omega_tilde']:.4g}")

        col1, col2 = st.columns(2)
        with col1:
            if hard:
                st.markdown(f"**Hard pulse** ({hard['omega1_hz']:.4g} Hz, {hard['tau_ms']:.3g} ms)")
                st.dataframe(pd.DataFrame(hard['rows']), hide_index=True)
                totals = hard['pair_totals_rad']
                st.caption(f"Pair totals: q2 {totals['q2']:.4g} rad, q3 {totals['q3']:.4g} rad")
        with col2:
            if soft:
                st.markdown(f"**Soft pulse** ({soft['omega1_hz']:.4g} Hz, {soft['tau_ms']:.4g} ms)")
                st.dataframe(pd.DataFrame(soft['rows']), hide_index=True)

    def render_landscape(self, p: SpinChainParams):
        """On-demand landscape scan and optimization"""
        col1, col2, col3 = st.columns(3)
        nx = col1.number_input("τ̃ samples", min_value=2, max_value=201, value=21, step=1)
        ny = col2.number_input("ω̃1 samples", min_value=2, max_value=201, value=21, step=1)
        workers = col3.number_input("Threads", min_value=1, max_value=16, value=1, step=1)

        col_scan, col_opt = st.columns(2)
        if col_scan.button("Scan landscape", use_container_width=True):
            try:
                with st.spinner(f"Scanning {nx}x{ny} grid..."):
                    st.session_state.landscape = landscape_scan(p, int(nx), int(ny), workers=int(workers))
            except SoftPulseError as e:
                st.error(f"Landscape scan failed: {e}")

        if col_opt.button("Optimize (101x101 + simplex)", use_container_width=True):
            try:
                with st.spinner("Optimizing refocusing fidelity..."):
                    result = optimize_fidelity(p, workers=int(workers))
                st.session_state.optimum = result
                run_id = self.db_manager.save_optimization(p.label, result)
                if run_id > 0:
                    st.success(f"Archived optimization run #{run_id}")
            except SoftPulseError as e:
                st.error(f"Optimization failed: {e}")

        result = st.session_state.optimum
        if result is not None:
            col1, col2, col3, col4 = st.columns(4)
            col1.metric("τ̃*", f"{result.tau_tilde:.6g}")
            col2.metric("ω̃1*", f"{result.omega_tilde:.6g}")
            col3.metric("F*", f"{result.fidelity:.6g}")
            col4.metric("τ (ms) / ω1 (Hz)", f"{result.tau_s * 1e3:.4g} / {result.omega1 / TWO_PI:.4g}")

        landscape = st.session_state.landscape
        if landscape is not None:
            frame = landscape.to_frame()
            grid = pd.DataFrame(
                landscape.fidelity,
                index=pd.Index(np.round(landscape.tau_tilde, 4), name="τ̃"),
                columns=np.round(landscape.omega_tilde, 4),
            )
            best = landscape.best()
            st.caption(f"Grid best: F = {best[2]:.6g} at τ̃ = {best[0]:.4g}, ω̃1 = {best[1]:.4g}")
            st.dataframe(grid.style.format("{:.4f}"))
            st.download_button(
                label="📥 Download landscape CSV",
                data=frame.to_csv(index=False, float_format="%.6g"),
                file_name="landscape.csv",
                mime="text/csv"
            )

    def render_qec(self, p: SpinChainParams):
        """Encode/decode checks under correlated Pauli noise"""
        col1, col2 = st.columns(2)
        full = col1.toggle("Soft-pulse gates (full model)", value=False)
        trials = col2.number_input("Trials", min_value=1, max_value=500, value=20, step=1)
        probs_text = st.text_input("Error probabilities I, X, Y, Z", value="0.25, 0.25, 0.25, 0.25")

        if st.button("Run QEC check", use_container_width=True):
            try:
                channel = CorrelatedChannel(tuple(float(x) for x in probs_text.split(",")))
            except (ValueError, BadChannelError) as e:
                st.error(f"Invalid probabilities: {e}")
                channel = None
            if channel is not None:
                try:
                    with st.spinner("Simulating encode, noise and decode..."):
                        checks = operator_identity_check(ideal=not full, p=p)
                        stats = soft_pulse_recovery_fidelity(p, channel, int(trials), ideal=not full)
                    report = {
                        'identities': identity_records(checks),
                        'recovery_min': stats.min,
                        'recovery_mean': stats.mean,
                    }
                    st.session_state.qec_report = report
                    self.db_manager.save_qec_run(p.label, dict(
                        report, mode='full' if full else 'ideal',
                        probabilities=channel.p, trials=int(trials), seed=DEFAULT_SEED,
                    ))
                except SoftPulseError as e:
                    st.error(f"QEC run failed: {e}")

        report = st.session_state.qec_report
        if report:
            col1, col2 = st.columns(2)
            col1.metric("Recovery fidelity (min)", f"{report['recovery_min']:.6g}")
            col2.metric("Recovery fidelity (mean)", f"{report['recovery_mean']:.6g}")
            st.dataframe(pd.DataFrame(report['identities']), hide_index=True)

    def render_export_options(self, p: SpinChainParams, report: Dict[str, Any]):
        col1, col2 = st.columns(2)
        with col1:
            st.download_button(
                label="📥 Download report JSON",
                data=json.dumps(report, indent=2, default=float),
                file_name="softpulse_report.json",
                mime="application/json"
            )
        with col2:
            st.download_button(
                label="📥 Download molecule JSON",
                data=config_from_params(p).model_dump_json(indent=2),
                file_name="molecule.json",
                mime="application/json"
            )

    def render_recent_runs(self):
        """Archived runs from the sqlite store"""
        if not self.db_manager.available:
            st.warning(f"Run archive {self.settings.db_path} could not be opened; runs are not saved.")
            return
        stats = self.db_manager.get_database_stats()
        if stats:
            col1, col2, col3 = st.columns(3)
            col1.metric("Optimization runs", stats['total_optimizations'])
            col2.metric("QEC runs", stats['total_qec_runs'])
            best = stats['best_fidelity']
            col3.metric("Best archived F", f"{best:.6g}" if best is not None else "n/a")

        for kind, title in (('optimize', "Recent optimizations"), ('qec', "Recent QEC runs")):
            runs = self.db_manager.get_recent_runs(kind, limit=10)
            if runs:
                st.markdown(f"**{title}**")
                st.dataframe(pd.DataFrame(runs), hide_index=True)
        if not stats.get('total_optimizations') and not stats.get('total_qec_runs'):
            st.info("No archived runs yet.")

    def run(self):
        """Main application runner"""
        self.render_header()

        p = self.load_molecule()
        if p is None:
            st.info("Select a bundled molecule or upload a valid JSON file to continue.")
            return

        self.sync_results(p)
        self.render_parameters(p)
        report = self.run_quick_report(p)

        tab1, tab2, tab3, tab4 = st.tabs(["📐 Design", "🗺️ Landscape", "🛡️ QEC", "💾 Runs & Export"])
        with tab1:
            self.render_design(report)
        with tab2:
            self.render_landscape(p)
        with tab3:
            self.render_qec(p)
        with tab4:
            self.render_export_options(p, report)
            self.render_recent_runs()
