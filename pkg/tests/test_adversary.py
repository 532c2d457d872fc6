"""Attack strategies, their channels and the attack registry."""
import numpy as np
import pytest


def _run_legs(attack, state, message, seed):
    """B→A hook, Alice's encoding, A→B hook; returns the attack outcome."""
    from superdense_pingpong.adversary.strategies import AttackOutcome
    from superdense_pingpong.codec import encode
    rng = np.random.default_rng(seed)
    outcome = AttackOutcome()
    delivered = attack.on_b_to_a(state, outcome, rng)
    attack.on_a_to_b(encode(message, delivered), outcome, rng)
    return outcome


class TestChannels:
    def test_identity_choi_is_psd(self):
        from superdense_pingpong.adversary.channels import choi_is_completely_positive, choi_matrix
        choi = choi_matrix([np.eye(2)])
        assert choi_is_completely_positive(choi)
        assert np.trace(choi).real == pytest.approx(2.0)

    def test_transpose_is_not_completely_positive(self):
        """The swap matrix is the Choi matrix of the transpose map."""
        from superdense_pingpong.adversary.channels import choi_is_completely_positive
        swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
        assert not choi_is_completely_positive(swap)

    @pytest.mark.parametrize("name,params", [
        ('none', {}),
        ('intercept_resend', {'basis': 'X'}),
        ('bell_diagonal', {'gamma': 0.6}),
        ('loss_hiding', {'loss_rate': 0.3, 'inner': {'name': 'intercept_resend'}}),
    ])
    def test_attack_channels_are_valid(self, name, params):
        from superdense_pingpong.adversary.channels import channel_is_valid
        from superdense_pingpong.adversary.registry import build_attack
        assert channel_is_valid(build_attack(name, params).kraus_b_to_a())

    def test_loss_is_trace_decreasing(self):
        from superdense_pingpong.adversary.channels import is_trace_nonincreasing, is_trace_preserving
        from superdense_pingpong.adversary.strategies import loss_hiding
        kraus = loss_hiding(0.25).kraus_b_to_a()
        assert is_trace_nonincreasing(kraus)
        assert not is_trace_preserving(kraus)

    def test_total_loss_raises(self, singlet):
        from superdense_pingpong.adversary.strategies import loss_hiding
        from superdense_pingpong.errors import ChannelLoss
        with pytest.raises(ChannelLoss):
            loss_hiding(1.0).post_attack_state()


class TestInterceptResend:
    def test_post_attack_state(self):
        from superdense_pingpong.adversary.strategies import intercept_resend
        from superdense_pingpong.qstate import DensityMatrix
        rho = intercept_resend('Z').post_attack_state()
        assert rho.allclose(DensityMatrix(np.diag([0, 0.5, 0.5, 0]).astype(complex)), atol=1e-12)

    def test_z_basis_reads_first_bit(self, singlet):
        from superdense_pingpong.adversary.strategies import intercept_resend
        from superdense_pingpong.codec import ENCODING_OPS
        attack = intercept_resend('Z')
        for seed in range(10):
            for m in ENCODING_OPS:
                assert _run_legs(attack, singlet, m, seed).eve_guess.i == m.i

    def test_x_basis_reads_second_bit(self, singlet):
        from superdense_pingpong.adversary.strategies import intercept_resend
        from superdense_pingpong.codec import ENCODING_OPS
        attack = intercept_resend('X')
        for seed in range(10):
            for m in ENCODING_OPS:
                assert _run_legs(attack, singlet, m, seed).eve_guess.j == m.j


class TestBellDiagonal:
    def test_from_gamma(self):
        from superdense_pingpong.adversary.strategies import BellDiagonalAttack
        from superdense_pingpong.analysis import detection_probability
        from superdense_pingpong.qstate import DensityMatrix
        attack = BellDiagonalAttack.from_gamma(0.75)
        assert attack.nominal_gamma == pytest.approx(0.75)
        rho = attack.post_attack_state()
        assert rho.allclose(DensityMatrix.maximally_mixed(), atol=1e-12)
        assert detection_probability(rho) == pytest.approx(0.5, abs=1e-12)

    def test_weights_reproduce_bell_diagonal_state(self):
        from superdense_pingpong.adversary.strategies import bell_diagonal_attack
        from superdense_pingpong.qstate import bell_diagonal
        weights = [0.1, 0.2, 0.3, 0.4]
        rho = bell_diagonal_attack(weights).post_attack_state()
        assert rho.allclose(bell_diagonal(weights), atol=1e-12)

    def test_dilation_traces_back_to_channel(self, singlet):
        from superdense_pingpong.adversary.channels import trace_out_ancilla
        from superdense_pingpong.adversary.strategies import bell_diagonal_attack
        attack = bell_diagonal_attack([0.05, 0.15, 0.3, 0.5])
        joint = attack.dilation(singlet)
        assert joint.shape == (16,)
        assert np.linalg.norm(joint) == pytest.approx(1.0, abs=1e-12)
        assert trace_out_ancilla(joint, 4).allclose(attack.post_attack_state(), atol=1e-12)

    def test_rejects_non_distribution(self):
        from superdense_pingpong.adversary.strategies import bell_diagonal_attack
        from superdense_pingpong.errors import InvalidDistribution
        with pytest.raises(InvalidDistribution):
            bell_diagonal_attack([0.5, 0.5, 0.5, 0.5])


class TestMitmAndLoss:
    def test_forge_public_only_touches_announcements(self, rng):
        from superdense_pingpong.adversary.strategies import AttackOutcome, mitm_tamper
        from superdense_pingpong.protocol.auth import make_authenticator
        from superdense_pingpong.protocol.messages import ALICE, ANNOUNCE, BOB, VERDICT, PublicMessage
        auth = make_authenticator('poly', b'k', 32)
        attack = mitm_tamper('forge_public', forge_tag='keep')
        announce = PublicMessage.signed(auth, ALICE, ANNOUNCE, 0, basis='Z', outcome=0)
        verdict = PublicMessage.signed(auth, BOB, VERDICT, 0, detected=False)
        forged = attack.on_public(announce, AttackOutcome(), rng)
        assert forged.body['outcome'] == 1
        assert not forged.verify(auth)
        assert attack.on_public(verdict, AttackOutcome(), rng) is verdict

    def test_unitary_tamper_is_deterministic_corruption(self, singlet, rng):
        """σx on the way back turns every message m into m ⊕ 10."""
        from superdense_pingpong.adversary.strategies import AttackOutcome, mitm_tamper
        from superdense_pingpong.codec import ENCODING_OPS, MessagePair, decode, encode
        from superdense_pingpong.qstate import bell_measure
        attack = mitm_tamper('unitary', unitary=np.array([[0, 1], [1, 0]]))
        for m in ENCODING_OPS:
            returned = attack.on_a_to_b(encode(m, singlet), AttackOutcome(), rng)
            assert decode(bell_measure(returned, 0.5)[0]) == MessagePair(1 - m.i, m.j)

    def test_bad_mode(self):
        from superdense_pingpong.adversary.strategies import mitm_tamper
        with pytest.raises(ValueError):
            mitm_tamper('jam')

    def test_total_loss_withholds(self, singlet, rng):
        from superdense_pingpong.adversary.strategies import AttackOutcome, loss_hiding
        outcome = AttackOutcome()
        assert loss_hiding(1.0).on_b_to_a(singlet, outcome, rng) is None
        assert outcome.caused_loss


class TestRegistry:
    def test_unknown_attack(self):
        from superdense_pingpong.adversary.registry import build_attack
        from superdense_pingpong.errors import ConfigError
        with pytest.raises(ConfigError) as excinfo:
            build_attack('photon_number_splitting')
        assert excinfo.value.code == ConfigError.UNKNOWN_ATTACK

    @pytest.mark.parametrize("name,params", [
        ('bell_diagonal', {'gamma': 1.5}),
        ('intercept_resend', {'basis': 'Y'}),
        ('mitm_tamper', {'mode': 'unitary', 'unitary': [[1, 0], [0, 2]]}),
        ('loss_hiding', {'loss_rate': -0.1}),
    ])
    def test_out_of_domain(self, name, params):
        from superdense_pingpong.adversary.registry import build_attack
        from superdense_pingpong.errors import ConfigError
        with pytest.raises(ConfigError) as excinfo:
            build_attack(name, params)
        assert excinfo.value.code == ConfigError.OUT_OF_DOMAIN

    def test_weights_by_label(self):
        from superdense_pingpong.adversary.registry import build_attack
        attack = build_attack('bell_diagonal', {'weights': {'psi_minus': 0.7, 'phi_plus': 0.3}})
        assert attack.weights == (0.3, 0.0, 0.0, 0.7)

    @pytest.mark.parametrize("value", ['H', 'y', 'U_11', [[0, 1], [1, 0]]])
    def test_parse_unitary(self, value):
        from superdense_pingpong.adversary.registry import parse_unitary
        from superdense_pingpong.qstate import is_unitary
        assert is_unitary(parse_unitary(value))

    def test_nested_loss_hiding(self):
        from superdense_pingpong.adversary.registry import build_attack
        attack = build_attack('loss_hiding', {'loss_rate': 0.1, 'inner': {'name': 'bell_diagonal',
                                                                          'params': {'gamma': 0.3}}})
        assert attack.nominal_gamma == pytest.approx(0.3)
        assert attack.describe()['inner']['name'] == 'bell_diagonal'
