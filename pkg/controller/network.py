import numpy as np

from controller.utils import decode_genome, initial_state, network_step, outputs_to_wheel_speeds
from models import NetworkSpec, RobotSpec


class RecurrentController:
    """Drives one robot per genome row; hidden state lives here between steps."""

    def __init__(self, genomes: np.ndarray, spec: NetworkSpec, robot: RobotSpec):
        self.spec = spec
        self.robot = robot
        self.params = decode_genome(genomes, spec)
        self.batch = self.params.b_out.shape[:-1]
        self.state = initial_state(spec, self.batch)

    def reset(self):
        self.state = initial_state(self.spec, self.batch)

    def act(self, readings: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        outputs, self.state = network_step(self.params, self.state, readings)
        return outputs_to_wheel_speeds(outputs, self.robot)
