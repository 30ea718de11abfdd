from dataclasses import dataclass
from typing import Union

import numpy as np

from config import NETWORK_OUTPUTS
from exceptions import CodecError
from models import NetworkSpec, RobotSpec
from vision.utils import CameraImage


@dataclass(frozen=True, eq=False)
class NetworkParams:
    """Decoded weights; every array may carry leading batch axes (one row per genome)."""
    w_in: np.ndarray       # (..., H, N)
    w_rec: np.ndarray      # (..., H, H)
    b_hidden: np.ndarray   # (..., H)
    w_out: np.ndarray      # (..., 2, H)
    b_out: np.ndarray      # (..., 2)


@dataclass(frozen=True, eq=False)
class ControllerState:
    hidden: np.ndarray     # (..., H), zeros at trial start


def genome_length(spec: NetworkSpec) -> int:
    if spec.n_hidden < 1 or spec.n_inputs < 1:
        raise CodecError(f'network needs n_inputs >= 1 and n_hidden >= 1, got {spec.n_inputs}/{spec.n_hidden}')
    if spec.n_outputs != NETWORK_OUTPUTS:
        raise CodecError(f'network must have {NETWORK_OUTPUTS} outputs, got {spec.n_outputs}')
    h = spec.n_hidden
    return h * (spec.n_inputs + h + 1) + NETWORK_OUTPUTS * (h + 1)


def decode_genome(genome: np.ndarray, spec: NetworkSpec) -> NetworkParams:
    """Slice a flat genome (or a (P, L) stack of them) into network matrices.

    Order: input->hidden rows, hidden->hidden rows, hidden biases,
    hidden->output rows, output biases.
    """
    genome = np.asarray(genome, dtype=float)
    expected = genome_length(spec)
    if genome.shape[-1:] != (expected,):
        raise CodecError(f'genome length {genome.shape[-1] if genome.ndim else 0} does not match spec ({expected})')

    n, h, o = spec.n_inputs, spec.n_hidden, NETWORK_OUTPUTS
    batch = genome.shape[:-1]
    sizes = [h * n, h * h, h, o * h, o]
    w_in, w_rec, b_hidden, w_out, b_out = np.split(genome, np.cumsum(sizes)[:-1], axis=-1)
    return NetworkParams(
        w_in=w_in.reshape(batch + (h, n)),
        w_rec=w_rec.reshape(batch + (h, h)),
        b_hidden=b_hidden,
        w_out=w_out.reshape(batch + (o, h)),
        b_out=b_out,
    )


def encode_genome(params: NetworkParams) -> np.ndarray:
    batch = params.b_out.shape[:-1]
    parts = [params.w_in, params.w_rec, params.b_hidden, params.w_out, params.b_out]
    return np.concatenate([part.reshape(batch + (-1,)) for part in parts], axis=-1)


def initial_state(spec: NetworkSpec, batch: tuple[int, ...] = ()) -> ControllerState:
    return ControllerState(hidden=np.zeros(batch + (spec.n_hidden,)))


def logistic(z):
    # tanh form of 1 / (1 + exp(-z)); no overflow for large |z|
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _matvec(matrix: np.ndarray, vector: np.ndarray) -> np.ndarray:
    # row-wise product-sum; each batch row reduces on its own
    return (matrix * vector[..., None, :]).sum(axis=-1)


def network_step(
    params: NetworkParams,
    state: ControllerState,
    image: Union[CameraImage, np.ndarray],
) -> tuple[np.ndarray, ControllerState]:
    """h' = tanh(W_in x + W_rec h + b_h), y = logistic(W_out h' + b_out)."""
    x = image.readings if isinstance(image, CameraImage) else np.asarray(image, dtype=float)
    n_hidden, n_inputs = params.w_in.shape[-2:]
    if x.shape[-1:] != (n_inputs,):
        raise CodecError(f'image has {x.shape[-1] if x.ndim else 0} pixels, network expects {n_inputs}')
    if state.hidden.shape[-1:] != (n_hidden,):
        raise CodecError(f'state has {state.hidden.shape[-1]} units, network expects {n_hidden}')

    hidden = np.tanh(_matvec(params.w_in, x) + _matvec(params.w_rec, state.hidden) + params.b_hidden)
    outputs = logistic(_matvec(params.w_out, hidden) + params.b_out)
    return outputs, ControllerState(hidden=hidden)


def outputs_to_wheel_speeds(outputs: np.ndarray, spec: RobotSpec) -> tuple[np.ndarray, np.ndarray]:
    """Map (0, 1) activations to [-max, +max] wheel speeds; 0.5 is rest."""
    outputs = np.asarray(outputs, dtype=float)
    speeds = (2.0 * outputs - 1.0) * spec.max_wheel_speed
    return speeds[..., 0], speeds[..., 1]
