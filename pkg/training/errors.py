from diffcore.errors import AbsaError


class ConfigError(AbsaError):
    pass


class MissingLabelsError(AbsaError):
    """A sentence that must carry gold tags has none."""


class NonFiniteLossError(AbsaError):
    def __init__(self, loss_name: str, op: str, node_id: int, step: int):
        self.loss_name = loss_name
        self.op = op
        self.node_id = node_id
        self.step = step
        super().__init__(f"{loss_name} became non-finite at step {step}; first bad node #{node_id} ({op})")
