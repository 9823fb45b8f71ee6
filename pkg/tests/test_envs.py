import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from abq import (
    ActionGrid,
    ConfigError,
    DimensionError,
    FactoredEnv,
    FactoredMdp,
    NumericError,
    PendulumEnv,
    ProtocolError,
    ReacherEnv,
    ResourceError,
    ValidationError,
    action_decode,
    factored_mdp_step,
    make_env,
    pendulum_step,
    reacher_step,
    value_iteration,
)
from abq._env.factored import branch_greedy_actions, greedy_policy
from abq._env.pendulum import PendulumState, reward_bounds, wrap_angle
from abq._env.reacher import ReacherState


@pytest.mark.parametrize('index, expected', ((0, -1.0), (24, 1.0), (12, 0.0)))
def test_decode_endpoints_and_midpoint(index, expected):
    grid = ActionGrid.uniform(1, -1.0, 1.0, 25)
    assert action_decode([index], grid)[0] == expected


def test_decode_uniform_grid():
    grid = ActionGrid.uniform(1, -2.0, 2.0, 5)
    assert_array_equal(grid.values(0), [-2.0, -1.0, 0.0, 1.0, 2.0])


@pytest.mark.parametrize('low, high, bins', ((-1.0, 1.0, 25), (0.0, 3.7, 7), (-0.3, 0.1, 2)))
def test_grid_monotone_and_exact(low, high, bins):
    values = ActionGrid.uniform(1, low, high, bins).values(0)
    assert values[0] == low and values[-1] == high
    assert np.all(np.diff(values) > 0)


@pytest.mark.parametrize('indices', ([25], [-1]))
def test_decode_out_of_range(indices):
    with pytest.raises(ValidationError):
        action_decode(indices, ActionGrid.uniform(1, -1.0, 1.0, 25))


def test_decode_wrong_length():
    with pytest.raises(DimensionError):
        action_decode([0, 1], ActionGrid.uniform(1, -1.0, 1.0, 25))


@pytest.mark.parametrize('low, high, bins', ((1.0, 1.0, 5), (2.0, 1.0, 5), (-1.0, 1.0, 1)))
def test_invalid_grids(low, high, bins):
    with pytest.raises(ConfigError):
        ActionGrid.uniform(1, low, high, bins)


def test_pendulum_upright_fixed_point():
    state, reward = pendulum_step(PendulumState(0.0, 0.0), 0.0)
    assert state == PendulumState(0.0, 0.0)
    assert reward == 0.0


def test_pendulum_hanging():
    state, reward = pendulum_step(PendulumState(np.pi, 0.0), 0.0)
    assert reward == pytest.approx(-np.pi**2)
    assert abs(state.theta) == pytest.approx(np.pi)


def test_pendulum_one_step_integration():
    state, _ = pendulum_step(PendulumState(0.1, 0.0), 0.0)
    theta_dot = 0.05 * 15.0 * np.sin(0.1)
    assert state.theta_dot == pytest.approx(theta_dot, rel=1e-12)
    assert state.theta == pytest.approx(0.1 + 0.05 * theta_dot, rel=1e-12)
    assert state.theta_dot == pytest.approx(0.074875, abs=1e-6)
    assert state.theta == pytest.approx(0.103744, abs=1e-6)


def test_pendulum_clips_torque():
    _, clipped = pendulum_step(PendulumState(0.0, 0.0), 100.0)
    assert clipped == pytest.approx(-0.001 * 4.0)


def test_pendulum_rejects_non_finite():
    with pytest.raises(NumericError):
        pendulum_step(PendulumState(float('nan'), 0.0), 0.0)


def test_wrap_angle_convention():
    assert wrap_angle(np.pi) == pytest.approx(np.pi)
    assert wrap_angle(-np.pi) == pytest.approx(np.pi)
    assert wrap_angle(3 * np.pi / 2) == pytest.approx(-np.pi / 2)


def test_pendulum_rewards_stay_in_bounds(rng):
    low, high = reward_bounds()
    env = PendulumEnv()
    env.initialize(rng)
    while not env.is_terminated():
        reward = env.execute(rng.integers(0, 25, size=1))
        assert low <= reward <= high
        theta_dot = env.state()[2]
        assert abs(theta_dot) <= 8.0
    assert env.steps == 200


def test_pendulum_observation():
    env = PendulumEnv()
    env.initialize(np.random.default_rng(0))
    cos, sin, _ = env.state()
    assert cos**2 + sin**2 == pytest.approx(1.0)
    assert env.state_dim == 3
    assert env.grid.shape == (1, 25)


def test_environment_determinism():
    def trajectory(env):
        env.initialize(np.random.default_rng(3))
        policy = np.random.default_rng(4)
        rewards = []
        while not env.is_terminated():
            rewards.append(env.execute(policy.integers(0, 25, size=env.grid.dims)))
        return rewards

    assert trajectory(PendulumEnv()) == trajectory(PendulumEnv())
    assert trajectory(ReacherEnv(dims=3)) == trajectory(ReacherEnv(dims=3))


def test_execute_protocol():
    env = PendulumEnv(max_steps=1)
    with pytest.raises(ProtocolError):
        env.execute(np.array([0]))
    env.initialize(np.random.default_rng(0))
    env.execute(np.array([0]))
    assert env.is_terminated()
    assert not env.is_terminal()
    with pytest.raises(ProtocolError):
        env.execute(np.array([0]))


def test_reacher_goal_fixed_point():
    state = ReacherState(np.array([0.3, -0.2]), np.zeros(2), np.array([0.3, -0.2]))
    new_state, reward = reacher_step(state, np.zeros(2))
    assert reward == 0.0
    assert_array_equal(new_state.positions, state.positions)


def test_reacher_one_step():
    state = ReacherState(np.zeros(1), np.zeros(1), np.ones(1))
    new_state, reward = reacher_step(state, np.ones(1))
    assert new_state.velocities[0] == pytest.approx(0.2)
    assert new_state.positions[0] == pytest.approx(0.01)
    assert reward == pytest.approx(-0.99 - 0.001)


def test_reacher_frozen_without_force():
    state = ReacherState(np.array([0.5]), np.zeros(1), np.array([-0.5]))
    rewards = []
    for _ in range(10):
        state, reward = reacher_step(state, np.zeros(1))
        rewards.append(reward)
    assert state.positions[0] == 0.5
    assert len(set(rewards)) == 1


def test_reacher_rejects_wrong_force_length():
    state = ReacherState(np.zeros(2), np.zeros(2), np.zeros(2))
    with pytest.raises(DimensionError):
        reacher_step(state, np.zeros(3))


def test_reacher_env_shape():
    env = ReacherEnv(dims=6)
    env.initialize(np.random.default_rng(0))
    assert env.state().shape == (18,)
    assert env.grid.shape == (6, 25)
    assert env.max_steps == 300


def test_factored_stay_keeps_state():
    mdp = FactoredMdp.create(dims=2, positions=5)
    next_state, _ = factored_mdp_step(mdp, (2, 3), (1, 1))
    assert next_state == (2, 3)


def test_factored_clips_at_boundary():
    mdp = FactoredMdp.create(dims=2, positions=5)
    next_state, _ = factored_mdp_step(mdp, (0, 4), (0, 2))
    assert next_state == (0, 4)


@pytest.mark.parametrize('state, action', (((0, 0), (3, 0)), ((5, 0), (1, 1)), ((0,), (1,))))
def test_factored_rejects_invalid_indices(state, action):
    with pytest.raises(ValidationError):
        factored_mdp_step(FactoredMdp.create(dims=2, positions=5), state, action)


def test_coupling_bonus_at_goal():
    mdp = FactoredMdp.create(dims=2, positions=5, coupling=1.0)
    goal = tuple(int(g) for g in mdp.goals)
    _, reward = factored_mdp_step(mdp, goal, (1, 1))
    assert reward == pytest.approx(1.0)


def test_single_state_geometric_series():
    mdp = FactoredMdp(1, 1, np.array([[2.0]]), gamma=0.9)
    q = value_iteration(mdp).q
    assert_allclose(q, np.full((1, 3), 2.0 / (1 - 0.9)), rtol=1e-9)


def test_myopic_value_iteration():
    mdp = FactoredMdp.create(dims=2, positions=4, seed=3)
    q = value_iteration(mdp, gamma=0.0).q
    for s in range(mdp.state_count):
        for a in range(mdp.action_count):
            _, reward = factored_mdp_step(mdp, mdp.state_of(s), mdp.action_of(a))
            assert q[s, a] == reward


def test_residuals_contract():
    mdp = FactoredMdp.create(dims=2, positions=5, coupling=0.5, gamma=0.9)
    residuals = np.array(value_iteration(mdp).residuals)
    assert residuals[-1] < 1e-10
    assert np.all(residuals[1:] <= 0.9 * residuals[:-1] + 1e-12)


def test_greedy_policy_is_optimal_by_exhaustive_evaluation():
    mdp = FactoredMdp.create(dims=2, positions=5, coupling=0.5, gamma=0.9, seed=2)
    q = value_iteration(mdp).q
    policy = [min(actions) for actions in greedy_policy(q)]

    transition = np.zeros((mdp.state_count, mdp.state_count))
    rewards = np.zeros(mdp.state_count)
    for s, a in enumerate(policy):
        next_state, rewards[s] = factored_mdp_step(mdp, mdp.state_of(s), mdp.action_of(a))
        transition[s, mdp.state_index(next_state)] = 1.0
    values = np.linalg.solve(np.eye(mdp.state_count) - 0.9 * transition, rewards)

    # no single deviation from the greedy policy improves any state
    for s in range(mdp.state_count):
        for a in range(mdp.action_count):
            next_state, reward = factored_mdp_step(mdp, mdp.state_of(s), mdp.action_of(a))
            assert reward + 0.9 * values[mdp.state_index(next_state)] <= values[s] + 1e-8
    assert_allclose(values, q.max(axis=1), atol=1e-8)


def test_uncoupled_policy_factorizes():
    mdp = FactoredMdp.create(dims=2, positions=5, coupling=0.0, gamma=0.9)
    joint = greedy_policy(value_iteration(mdp).q)
    assert branch_greedy_actions(mdp) == joint


def test_value_iteration_budget():
    with pytest.raises(ResourceError):
        value_iteration(FactoredMdp.create(dims=5, positions=5))


def test_factored_env_observation():
    env = FactoredEnv(dims=2, positions=5)
    env.initialize(np.random.default_rng(0))
    assert env.state().shape == (10,)
    assert env.state().sum() == 2.0
    assert env.grid.shape == (2, 3)
    assert env.all_observations().shape == (25, 10)


@pytest.mark.parametrize('name', ('pendulum', 'reacher', 'factored'))
def test_registry_round_trip(name):
    env = make_env(name)
    assert env.name == name
    assert make_env(name, **env.params()).params() == env.params()


def test_registry_errors():
    with pytest.raises(ConfigError):
        make_env('cartpole')
    with pytest.raises(ConfigError):
        make_env('pendulum', wings=2)
