import numpy as np

from .._env.factored import FactoredEnv, greedy_policy, value_iteration
from .._net.baseline import BaselineMode
from .._net.qnet import BranchingNetParams
from .agent import greedy_actions


def policy_agreement(
    net: BranchingNetParams,
    env: FactoredEnv,
    mode: BaselineMode = BaselineMode.ABQ_MAX_MEAN,
    tol: float = 1e-9,
) -> float:
    """Share of joint states whose branching greedy action is optimal under value iteration."""
    mdp = env.mdp
    optimal = greedy_policy(value_iteration(mdp).q, tol)
    actions = greedy_actions(net, env.all_observations(), mode)
    hits = [mdp.action_index(action) in optimal[s] for s, action in enumerate(actions)]
    return float(np.mean(hits))
