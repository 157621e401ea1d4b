"""Exception hierarchy shared across the gateway.

Every error carries a short machine-readable ``code`` so the HTTP layer
can emit stable ``{code, message}`` bodies without string matching.
"""


class GatewayError(Exception):
    """Base class for all gateway errors."""

    code = "gateway_error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.__doc__ or self.code)
        self.message = message or (self.__doc__ or self.code)


class DuplicateSourceId(GatewayError):
    """A source with this id is already registered."""

    code = "duplicate_source_id"


class InvalidDescriptor(GatewayError):
    """Source descriptor violates an invariant."""

    code = "invalid_descriptor"


class UnknownSource(GatewayError):
    """No registered source with this id."""

    code = "unknown_source"


class EmptyQuery(GatewayError):
    """Search query is empty after trimming."""

    code = "empty_query"


class NoSourcesEnabled(GatewayError):
    """No enabled source to search."""

    code = "no_sources_enabled"


class MappingFailure(GatewayError):
    """A required canonical field could not be populated."""

    code = "mapping_failure"


class MixedFacetCluster(GatewayError):
    """Cluster members do not share a single facet."""

    code = "mixed_facet_cluster"


class EmptyCorpus(GatewayError):
    """Corpus statistics need at least one document."""

    code = "empty_corpus"


class ProviderFailure(GatewayError):
    """A remote embedding or LLM provider call failed."""

    code = "provider_failure"


class PromptTooLarge(GatewayError):
    """The LLM provider rejected the prompt for its length."""

    code = "prompt_too_large"


class EmptyQuestion(GatewayError):
    """Chat question is empty."""

    code = "empty_question"


class SessionNotFound(GatewayError):
    """No live session with this id."""

    code = "session_not_found"


class KTooLarge(GatewayError):
    """Requested more clusters than there are points."""

    code = "k_too_large"


class EmptyLog(GatewayError):
    """Performance statistics need at least one log entry."""

    code = "empty_log"


class MalformedGeneration(GatewayError):
    """Provider reply could not be parsed as exactly two questions."""

    code = "malformed_generation"
