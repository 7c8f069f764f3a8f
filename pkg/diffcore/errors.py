class AbsaError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(AbsaError):
    def __init__(self, op: str, left, right):
        self.op = op
        self.left = tuple(left)
        self.right = tuple(right)
        super().__init__(f"{op}: incompatible shapes {self.left} and {self.right}")


class GraphError(AbsaError):
    """Raised for malformed graphs: non-scalar roots, missing gradients, duplicate parameters."""


class CheckpointError(AbsaError):
    pass
