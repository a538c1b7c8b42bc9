"""Exception hierarchy shared across the engine."""


class RadAgentError(Exception):
    """Base class for every error raised by this package."""


# -- volume / NIfTI ----------------------------------------------------------

class NiftiError(RadAgentError):
    """Base class for NIfTI parse/write failures."""


class NiftiMagicError(NiftiError):
    """Magic bytes at offset 344 are not 'n+1\\0'."""


class NiftiHeaderError(NiftiError):
    """sizeof_hdr is not 348, or the dim block is unusable."""


class NiftiDatatypeError(NiftiError):
    """Datatype code outside the supported {uint8, int16, float32} set."""


class NiftiTruncatedError(NiftiError):
    """Voxel payload shorter than the header promises."""


class EmptyLabelError(RadAgentError):
    """A mask operation was asked about a label with no voxels."""


# -- gateway -----------------------------------------------------------------

class GatewayError(RadAgentError):
    """Base class for backend access failures."""


class GatewayTimeoutError(GatewayError):
    """A backend call exceeded the policy's request timeout."""


class TransportError(GatewayError):
    """Connection-level failure talking to a backend."""


class MalformedResponseError(GatewayError):
    """Backend replied, but not in the expected shape."""


class ScriptExhaustedError(GatewayError):
    """A scripted mock received a request no transcript record matches."""


class UnknownCaseError(GatewayError):
    """Segmentation store has no entry for the requested case id."""


class UnknownTargetError(GatewayError):
    """Segmentation backend does not cover the requested organ."""


# -- agent / tools -----------------------------------------------------------

class CaseAbortedError(RadAgentError):
    """The case could not start (query analysis failed)."""


class ToolError(RadAgentError):
    """A tool rejected its inputs or failed internally."""


class StructuredOutputError(RadAgentError):
    """A model reply could not be parsed into the required structure."""


# -- pipelines / config ------------------------------------------------------

class ConfigError(RadAgentError):
    """Engine configuration is malformed or references missing paths."""


class CorpusError(RadAgentError):
    """Template derivation input is unusable (too small, unreadable)."""


class EvaluationError(RadAgentError):
    """Metric evaluation inputs are misaligned or malformed."""
