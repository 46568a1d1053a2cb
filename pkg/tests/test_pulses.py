import numpy as np
import pytest

from analysis.gate_design import propagator_fidelity
from core.exceptions import BadTimingError, InvalidParametersError
from core.linalg import identity
from core.pulses import (
    Model,
    PulseSegment,
    PulseSequence,
    hard_limit_propagator,
    propagate,
    refocusing_sequence,
    sequence_from_records,
    sequence_records,
    soft_pulse_sequence,
    total_duration,
)
from core.spin_system import target_entangler


class TestPulseSegments:
    def test_negative_duration(self):
        with pytest.raises(BadTimingError):
            PulseSegment(duration=-1e-3)

    def test_instantaneous_needs_zero_duration(self):
        with pytest.raises(BadTimingError):
            PulseSegment(duration=1e-3, angle=np.pi)

    def test_single_model_per_sequence(self):
        with pytest.raises(InvalidParametersError):
            PulseSequence((PulseSegment(1e-3), PulseSegment(1e-3, model=Model.FULL)))

    def test_model_coerced_from_string(self):
        assert PulseSegment(1e-3, model="full").model is Model.FULL


class TestPropagate:
    def test_empty_sequence(self, alanine):
        np.testing.assert_array_equal(propagate(PulseSequence(), alanine), identity(8))

    def test_time_order(self, alanine):
        a = PulseSequence((PulseSegment(1e-3, 2 * np.pi * 300, 0.0, Model.FULL),))
        b = PulseSequence((PulseSegment(2e-3, 2 * np.pi * 150, np.pi / 2, Model.FULL),))
        np.testing.assert_allclose(
            propagate(a.then(b), alanine), propagate(b, alanine) @ propagate(a, alanine), atol=1e-10
        )

    def test_split_segment(self, alanine):
        whole = PulseSequence((PulseSegment(4e-3, 2 * np.pi * 200),))
        halves = PulseSequence((PulseSegment(2e-3, 2 * np.pi * 200),) * 2)
        np.testing.assert_allclose(propagate(whole, alanine), propagate(halves, alanine), atol=1e-10)
        assert total_duration(halves) == pytest.approx(4e-3)


class TestRefocusing:
    @pytest.mark.parametrize("alpha", [np.pi / 2, np.pi, 2 * np.pi])
    def test_hard_limit_identity(self, alanine, alpha):
        u = hard_limit_propagator(alpha / alanine.j23, alanine)
        np.testing.assert_allclose(u, -target_entangler(alpha), atol=1e-10)

    def test_short_pulses_approach_hard_limit(self, alanine):
        t_star = np.pi / alanine.j23
        tau = 1e-7
        seq = refocusing_sequence(t_star, tau, np.pi / tau, Model.REDUCED)
        diff = propagate(seq, alanine) - hard_limit_propagator(t_star, alanine)
        assert np.max(np.abs(diff)) < 1e-4

    def test_pulses_must_fit(self, alanine):
        with pytest.raises(BadTimingError):
            refocusing_sequence(1e-3, 0.6e-3, 1e3)

    def test_layout(self):
        seq = refocusing_sequence(10e-3, 1e-3, 1e3, Model.FULL)
        assert [s.amplitude for s in seq.segments] == [0.0, 1e3, 0.0, 1e3]
        assert total_duration(seq) == pytest.approx(10e-3)
        assert seq.model is Model.FULL


class TestSoftPulseSequence:
    @pytest.mark.parametrize("alpha", [np.pi / 2, np.pi, 3 * np.pi / 2])
    def test_reduced_model_is_exact(self, alanine, alpha):
        u = propagate(soft_pulse_sequence(alpha, alanine), alanine)
        assert propagator_fidelity(target_entangler(alpha), u) > 1 - 1e-9

    def test_alanine_timing(self, alanine):
        seq = soft_pulse_sequence(np.pi, alanine)
        assert len(seq) == 1
        assert total_duration(seq) == pytest.approx(9.2937e-3, abs=1e-6)


class TestRecords:
    def test_dump_and_load(self):
        seq = refocusing_sequence(10e-3, 1e-3, 2 * np.pi * 500, Model.FULL, phase=0.25)
        records = sequence_records(seq)
        assert records[1]["amplitude_hz"] == pytest.approx(500)
        loaded = sequence_from_records(records)
        assert len(loaded) == len(seq)
        for original, restored in zip(seq.segments, loaded.segments):
            assert restored.duration == original.duration
            assert restored.amplitude == pytest.approx(original.amplitude)
            assert restored.phase == original.phase
            assert restored.model is original.model

    def test_instantaneous_segments_have_no_record(self):
        with pytest.raises(InvalidParametersError):
            sequence_records(PulseSequence((PulseSegment(0.0, angle=np.pi),)))
