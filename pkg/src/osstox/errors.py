"""Exception types shared across the toolkit."""


class OsstoxError(Exception):
    """Base class for all toolkit errors."""


class ParseError(OsstoxError):
    """An input file is malformed. Carries enough context to locate the record."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class CorpusError(OsstoxError):
    """A corpus violates a structural invariant (duplicate ids, bad counts, ...)."""


class EmptyMinorityError(OsstoxError):
    """Undersampling requires at least one minority-class document."""


class EmptyDictionaryError(OsstoxError):
    """No dictionary word is present in the embedding vocabulary."""


class MissingBaselineError(OsstoxError):
    """No configured provider could produce a baseline score for a document."""

    def __init__(self, document_id, detail=""):
        msg = f"no baseline provider available for document '{document_id}'"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.document_id = document_id


class ConfigurationError(OsstoxError):
    """A required resource or setting is absent or inconsistent."""


class ProtocolError(OsstoxError):
    """A provider returned a response that does not match the documented schema."""


class ProviderError(OsstoxError):
    """A provider failed (network, quota) after bounded retries."""


class FeaturizeError(OsstoxError):
    """One or more documents could not be featurized."""

    def __init__(self, document_ids, detail=""):
        ids = list(document_ids)
        msg = f"featurization failed for {len(ids)} document(s): {', '.join(ids[:10])}"
        if len(ids) > 10:
            msg += ", ..."
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.document_ids = ids
