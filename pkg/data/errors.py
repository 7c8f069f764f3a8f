from diffcore.errors import AbsaError


class ConllFormatError(AbsaError):
    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class EmbeddingFormatError(AbsaError):
    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class SegmentError(AbsaError):
    """Overlapping or out-of-range segments handed to the tag encoder."""


class LexiconError(AbsaError):
    pass


class SynthSpecError(AbsaError):
    pass


class CorpusError(AbsaError):
    """Empty or unusable corpora."""
