"""Exception hierarchy shared by the core, the service layer, and the CLI.

Exit codes: 1 check/fixture failure, 2 parse, 3 domain, 4 I/O.
"""


class TepuiError(Exception):
    exit_code = 1
    kind = "check"


class ParseError(TepuiError):
    exit_code = 2
    kind = "parse"


class DomainError(TepuiError):
    exit_code = 3
    kind = "domain"


class PartitionError(DomainError):
    """Cellwise pieces fail the pairwise-disjoint / covering sample check."""


class InvolutivityError(TepuiError):
    """Anchor module not closed under the vector-field bracket."""

    def __init__(self, pair, field_text):
        self.pair = pair
        self.field_text = field_text
        super().__init__(
            "anchor columns %s are not involutive: [%d, %d] produced %s"
            % (pair, pair[0], pair[1], field_text)
        )


class RankDropError(TepuiError):
    """Fiber rank is not constant along a path where constancy is required."""


class FileAccessError(TepuiError):
    exit_code = 4
    kind = "io"
