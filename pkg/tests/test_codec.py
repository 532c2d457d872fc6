"""Dense coding and the one-bit phase-flip code."""
import numpy as np
import pytest


class TestMessagePair:
    def test_parse_and_format(self):
        from superdense_pingpong.codec import MessagePair
        m = MessagePair.parse('10')
        assert m == MessagePair(1, 0)
        assert str(m) == '10'
        assert m.to_int() == 2
        assert MessagePair.from_int(3) == MessagePair(1, 1)

    @pytest.mark.parametrize("text", ['2', '012', 'ab', ''])
    def test_parse_rejects_garbage(self, text):
        from superdense_pingpong.codec import MessagePair
        with pytest.raises(ValueError):
            MessagePair.parse(text)

    def test_bits_must_be_binary(self):
        from superdense_pingpong.codec import MessagePair
        with pytest.raises(ValueError):
            MessagePair(2, 0)


class TestDenseCoding:
    def test_decode_table_for_singlet(self):
        from superdense_pingpong.codec import MessagePair, decode_table
        assert decode_table('psi_minus') == {
            'psi_minus': MessagePair(0, 0),
            'psi_plus': MessagePair(0, 1),
            'phi_minus': MessagePair(1, 0),
            'phi_plus': MessagePair(1, 1),
        }

    @pytest.mark.parametrize("initial", ['psi_minus', 'psi_plus', 'phi_plus', 'phi_minus'])
    def test_round_trip_every_message(self, initial):
        """Encoding then Bell-measuring recovers the pair with certainty."""
        from superdense_pingpong.codec import ENCODING_OPS, decode, encode
        from superdense_pingpong.qstate import bell_measure, bell_state
        for m in ENCODING_OPS:
            encoded = encode(m, bell_state(initial))
            for rand in (0.0, 0.37, 0.999999):
                label, _ = bell_measure(encoded, rand)
                assert decode(label, initial) == m

    def test_encoding_ops_are_the_documented_matrices(self):
        from superdense_pingpong.codec import ENCODING_OPS, MessagePair
        expected = {
            '00': [[1, 0], [0, 1]],
            '01': [[1, 0], [0, -1]],
            '10': [[0, 1], [1, 0]],
            '11': [[0, 1], [-1, 0]],
        }
        for bits, matrix in expected.items():
            np.testing.assert_array_equal(ENCODING_OPS[MessagePair.parse(bits)].matrix, matrix)

    def test_encoding_leaves_travel_marginal_mixed(self, singlet):
        from superdense_pingpong.codec import ENCODING_OPS, encode
        from superdense_pingpong.qstate import TRAVEL, partial_trace
        for m in ENCODING_OPS:
            np.testing.assert_allclose(partial_trace(encode(m, singlet), TRAVEL).entries,
                                       np.eye(2) / 2, atol=1e-12)

    def test_pauli_closure(self):
        from superdense_pingpong.codec import pauli_closure_ok
        assert pauli_closure_ok()


class TestLegacyCode:
    def test_round_trip(self, singlet):
        from superdense_pingpong.codec import legacy_decode, legacy_encode
        from superdense_pingpong.qstate import bell_measure
        for j in (0, 1):
            label, _ = bell_measure(legacy_encode(j, singlet), 0.5)
            assert legacy_decode(label) == j

    def test_labels_outside_the_code(self):
        from superdense_pingpong.codec import legacy_decode
        with pytest.raises(KeyError):
            legacy_decode('phi_plus')
