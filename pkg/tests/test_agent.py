import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from leias import agent
from leias.agent import (
    AlertDecision,
    Annealing,
    BoltzmannFixed,
    NotImplicatedError,
    boltzmann_probabilities,
    decide,
    greedy_action,
    policy_summary,
    reward_from_alignment,
    select_boltzmann,
    update_q,
)
from leias.model import (
    AlertAction,
    AlertLevel,
    DecisionLevel,
    ErrorRange,
    PilotResponse,
    QTable,
    SensorAssessment,
    SensorKind,
)
from leias.rng import Rng


def softmax_oracle(q_warn, q_no_warn, tau):
    # Independent two-term softmax, written the naive way on purpose.
    return math.exp(q_warn / tau) / (math.exp(q_warn / tau) + math.exp(q_no_warn / tau))


def implicated(sensor, error, rng_band):
    return SensorAssessment(sensor, error, rng_band, implicated=True, reliable=False)


class TestBoltzmann:
    def test_against_oracle(self):
        p_warn, _ = boltzmann_probabilities(1.0, -1.0, 1.0)
        assert p_warn == pytest.approx(softmax_oracle(1.0, -1.0, 1.0), abs=1e-12)
        assert p_warn == pytest.approx(0.8807970779723, abs=1e-9)

    def test_equal_values_are_even(self):
        for c in (-3.0, 0.0, 7.5):
            p_warn, p_no = boltzmann_probabilities(c, c, 0.7)
            assert p_warn == 0.5 and p_no == 0.5

    def test_low_temperature_is_greedy(self):
        p_warn, _ = boltzmann_probabilities(1.0, -1.0, 0.05)
        assert p_warn > 1 - 1e-15

    @given(
        qw=st.floats(min_value=-10, max_value=10),
        qn=st.floats(min_value=-10, max_value=10),
        tau=st.floats(min_value=0.01, max_value=10),
    )
    def test_normalization(self, qw, qn, tau):
        p_warn, p_no = boltzmann_probabilities(qw, qn, tau)
        assert abs(p_warn + p_no - 1.0) < 1e-12

    @given(
        qw=st.floats(min_value=-10, max_value=10),
        qn=st.floats(min_value=-10, max_value=10),
        tau=st.floats(min_value=0.01, max_value=10),
        shift=st.floats(min_value=-50, max_value=50),
    )
    def test_shift_invariance(self, qw, qn, tau, shift):
        p1, _ = boltzmann_probabilities(qw, qn, tau)
        p2, _ = boltzmann_probabilities(qw + shift, qn + shift, tau)
        assert abs(p1 - p2) < 1e-12

    def test_selection_reports_chosen_probability(self):
        rng = Rng(5)
        action, prob = select_boltzmann(1.0, -1.0, 1.0, rng)
        expected = softmax_oracle(1.0, -1.0, 1.0)
        assert prob == pytest.approx(expected if action is AlertAction.WARN else 1 - expected)


class TestDecide:
    def test_safety_always_warns(self):
        rng = Rng(0)
        q = QTable().with_value(SensorKind.GPS, AlertLevel.HIGH, AlertAction.WARN, -1.0)
        d = decide(implicated(SensorKind.GPS, 20.0, ErrorRange.SAFETY), q, BoltzmannFixed(1.0), 0, rng)
        assert d.level is DecisionLevel.MANDATORY
        assert d.action is AlertAction.WARN
        assert d.probability == 1.0

    def test_normal_always_suppressed(self):
        d = decide(
            implicated(SensorKind.IMU, 0.5, ErrorRange.NORMAL), QTable(), BoltzmannFixed(1.0), 0, Rng(0)
        )
        assert d.level is DecisionLevel.SUPPRESSED
        assert d.action is AlertAction.DO_NOT_WARN

    def test_equal_values_split_evenly(self):
        rng = Rng(123)
        warns = sum(
            decide(
                implicated(SensorKind.GPS, 10.0, ErrorRange.LEVEL2),
                QTable(),
                BoltzmannFixed(1.0),
                0,
                rng,
            ).action
            is AlertAction.WARN
            for _ in range(4000)
        )
        assert 0.45 < warns / 4000 < 0.55

    def test_requires_implication(self):
        a = SensorAssessment(SensorKind.GPS, 10.0, ErrorRange.LEVEL2, False, True)
        with pytest.raises(NotImplicatedError):
            decide(a, QTable(), BoltzmannFixed(1.0), 0, Rng(0))


class TestRewardAndUpdate:
    def decision(self, action=AlertAction.WARN):
        return AlertDecision(SensorKind.GPS, DecisionLevel.LOW, action, 1.0, 0.5)

    def test_agree_rewards(self):
        assert reward_from_alignment(self.decision(), PilotResponse.AGREE) == 1

    def test_disagree_punishes(self):
        assert reward_from_alignment(self.decision(), PilotResponse.DISAGREE) == -1

    def test_neutral_no_update(self):
        assert reward_from_alignment(self.decision(AlertAction.DO_NOT_WARN), PilotResponse.NEUTRAL) is None

    def test_mandatory_never_rewarded(self):
        d = AlertDecision(SensorKind.GPS, DecisionLevel.MANDATORY, AlertAction.WARN, 1.0, 1.0)
        with pytest.raises(ValueError):
            reward_from_alignment(d, PilotResponse.AGREE)

    def test_single_step(self):
        key = (SensorKind.GPS, AlertLevel.LOW, AlertAction.WARN)
        q = update_q(QTable(), key, 1, alpha=0.1)
        assert q.value(*key) == pytest.approx(0.1)

    def test_fixed_point(self):
        key = (SensorKind.GPS, AlertLevel.LOW, AlertAction.WARN)
        q = QTable().with_value(*key, 1.0)
        assert update_q(q, key, 1, alpha=0.37).value(*key) == pytest.approx(1.0)

    def test_geometric_convergence(self):
        key = (SensorKind.LIDAR, AlertLevel.HIGH, AlertAction.WARN)
        q = QTable()
        expected = 0.0
        for _ in range(50):
            q = update_q(q, key, 1, alpha=0.1)
            expected = expected + 0.1 * (1 - expected)  # iterative oracle
        assert q.value(*key) == pytest.approx(expected, abs=1e-12)
        assert q.value(*key) == pytest.approx(1 - 0.9**50, abs=1e-12)

    @given(rewards=st.lists(st.sampled_from([-1, 1]), max_size=200))
    def test_boundedness(self, rewards):
        key = (SensorKind.IMU, AlertLevel.LOW, AlertAction.DO_NOT_WARN)
        q = QTable()
        for r in rewards:
            q = update_q(q, key, r, alpha=0.1)
            assert -1.0 <= q.value(*key) <= 1.0


class TestAnnealing:
    def test_schedule_monotone_and_floored(self):
        policy = Annealing(2.0, 0.98, 0.05).validate()
        temps = [policy.temperature_at(i) for i in range(500)]
        assert all(a >= b for a, b in zip(temps, temps[1:]))
        assert all(t >= 0.05 for t in temps)
        assert temps[0] == 2.0
        assert temps[-1] == 0.05

    def test_bad_parameters_rejected(self):
        with pytest.raises(ValueError):
            Annealing(2.0, 1.5, 0.05).validate()
        with pytest.raises(ValueError):
            BoltzmannFixed(0.0).validate()


class TestPolicySummary:
    def test_initial_table_is_undecided(self):
        summary = policy_summary(QTable())
        assert all(cell.color == "White" for cell in summary.values())

    def test_warn_preference_shows_red(self):
        q = (
            QTable()
            .with_value(SensorKind.GPS, AlertLevel.LOW, AlertAction.WARN, 0.9)
            .with_value(SensorKind.GPS, AlertLevel.LOW, AlertAction.DO_NOT_WARN, -0.9)
        )
        assert policy_summary(q)[(SensorKind.GPS, AlertLevel.LOW)].color == "Red"

    def test_silence_preference_shows_green(self):
        q = (
            QTable()
            .with_value(SensorKind.IMU, AlertLevel.HIGH, AlertAction.WARN, -0.95)
            .with_value(SensorKind.IMU, AlertLevel.HIGH, AlertAction.DO_NOT_WARN, 0.9)
        )
        assert policy_summary(q)[(SensorKind.IMU, AlertLevel.HIGH)].color == "Green"

    def test_margin_boundary_is_white(self):
        q = QTable().with_value(SensorKind.GPS, AlertLevel.LOW, AlertAction.WARN, agent.UNDECIDED_EPSILON)
        assert policy_summary(q)[(SensorKind.GPS, AlertLevel.LOW)].color == "White"

    def test_greedy_tie_stays_silent(self):
        assert greedy_action(QTable(), SensorKind.GPS, AlertLevel.LOW) is AlertAction.DO_NOT_WARN
