from ._errors import (
    AbqError,
    DimensionError,
    ProtocolError,
    ConfigError,
    ValidationError,
    NumericError,
    InsufficientDataError,
    ResourceError,
    IntegrityError,
    ParseError,
    TrainingAborted,
    EvaluationAborted,
)

from ._numeric.mlp import Activation, MlpParams, init_mlp, mlp_forward, mlp_backward
from ._numeric.adam import AdamState, adam_step
from ._numeric.gradcheck import finite_diff_check

from ._net.baseline import BaselineMode, baseline, compose_q, greedy_action
from ._net.qnet import (
    BranchingNetParams,
    NetworkOutput,
    init_network,
    zeros_network,
    evaluate,
    network_backward,
    joint_action_count,
    params_digest,
)

from ._replay import Transition, Batch, ReplayBuffer

from ._env.abc import AbstractEnvironment
from ._env.grid import ActionGrid, action_decode
from ._env.pendulum import PendulumEnv, pendulum_step
from ._env.reacher import ReacherEnv, reacher_step
from ._env.factored import FactoredEnv, FactoredMdp, factored_mdp_step, value_iteration
from ._env.registry import make_env

from ._agent.config import AgentConfig, epsilon_at
from ._agent.agent import (
    RunRecord,
    TrainResult,
    PolicySummary,
    Trainer,
    select_action,
    td_targets,
    loss_and_grads,
    train,
    evaluate_policy,
    random_policy_returns,
)
from ._agent.oracle import policy_agreement

from ._harness.config import ExperimentConfig, load_config
from ._harness.checkpoint import CheckpointMeta, save_checkpoint, load_checkpoint
from ._harness.curves import moving_average, render_curves, plot_runs
from ._harness.compare import compare_runs
from ._harness.runner import run_experiment, run_sweep

__version__ = '0.1.0'

__all__ = (
    'AbqError',
    'DimensionError',
    'ProtocolError',
    'ConfigError',
    'ValidationError',
    'NumericError',
    'InsufficientDataError',
    'ResourceError',
    'IntegrityError',
    'ParseError',
    'TrainingAborted',
    'EvaluationAborted',
    'Activation',
    'MlpParams',
    'init_mlp',
    'mlp_forward',
    'mlp_backward',
    'AdamState',
    'adam_step',
    'finite_diff_check',
    'BaselineMode',
    'baseline',
    'compose_q',
    'greedy_action',
    'BranchingNetParams',
    'NetworkOutput',
    'init_network',
    'zeros_network',
    'evaluate',
    'network_backward',
    'joint_action_count',
    'params_digest',
    'Transition',
    'Batch',
    'ReplayBuffer',
    'AbstractEnvironment',
    'ActionGrid',
    'action_decode',
    'PendulumEnv',
    'pendulum_step',
    'ReacherEnv',
    'reacher_step',
    'FactoredEnv',
    'FactoredMdp',
    'factored_mdp_step',
    'value_iteration',
    'make_env',
    'AgentConfig',
    'epsilon_at',
    'RunRecord',
    'TrainResult',
    'PolicySummary',
    'Trainer',
    'select_action',
    'td_targets',
    'loss_and_grads',
    'train',
    'evaluate_policy',
    'random_policy_returns',
    'policy_agreement',
    'ExperimentConfig',
    'load_config',
    'CheckpointMeta',
    'save_checkpoint',
    'load_checkpoint',
    'moving_average',
    'render_curves',
    'plot_runs',
    'compare_runs',
    'run_experiment',
    'run_sweep',
)
