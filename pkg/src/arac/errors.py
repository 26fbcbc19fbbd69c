"""Exception hierarchy shared by every ARAC module.

Each error carries a stable machine code (used verbatim in API error
bodies) next to a human message. HTTP status mapping lives in the API
layer; nothing here knows about HTTP.
"""
from __future__ import annotations


class AracError(Exception):
    """Base class for all platform errors."""

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


# -- authentication / authorization ------------------------------------------

class AuthenticationRequired(AracError):
    """No session, or the session token is invalid or expired."""

    code = "authentication_required"


class InvalidCredentials(AracError):
    """Login failure. Deliberately identical for unknown login and wrong
    password so the two cases cannot be told apart."""

    code = "invalid_credentials"


class NotAuthorized(AracError):
    """The caller's role does not permit the operation."""

    code = "not_authorized"


# -- unknown references -------------------------------------------------------

class UnknownEntity(AracError):
    code = "unknown_entity"


class UnknownTheme(UnknownEntity):
    code = "unknown_theme"


class UnknownText(UnknownEntity):
    code = "unknown_text"


class UnknownTaxonomy(UnknownEntity):
    code = "unknown_taxonomy"


class UnknownExercise(UnknownEntity):
    code = "unknown_exercise"


class UnknownExam(UnknownEntity):
    code = "unknown_exam"


class UnknownUser(UnknownEntity):
    code = "unknown_user"


class NoAssignment(UnknownEntity):
    code = "no_assignment"


# -- duplicates and state conflicts -------------------------------------------

class ConflictError(AracError):
    code = "conflict"


class DuplicateName(ConflictError):
    code = "duplicate_name"


class DuplicateLogin(ConflictError):
    code = "duplicate_login"


class DuplicateAnnotation(ConflictError):
    code = "duplicate_annotation"


class DuplicateExercise(ConflictError):
    code = "duplicate_exercise"


class DuplicateGapIndex(ConflictError):
    code = "duplicate_gap_index"


class AlreadyAssigned(ConflictError):
    code = "already_assigned"


class AlreadyAccomplished(ConflictError):
    code = "already_accomplished"


class NotAccomplished(ConflictError):
    code = "not_accomplished"


class StaleExercise(ConflictError):
    """The exercise's source text changed after the answers were
    snapshotted; grading or rendering it would be meaningless."""

    code = "stale_exercise"


# -- validation ----------------------------------------------------------------

class ValidationError(AracError):
    code = "validation_error"


class EncodingError(ValidationError):
    code = "encoding_error"


class EmptyBody(ValidationError):
    code = "empty_body"


class InvalidMetadata(ValidationError):
    code = "invalid_metadata"


class InvalidTaxonomyEntry(ValidationError):
    code = "invalid_taxonomy_entry"


class WeakPassword(ValidationError):
    code = "weak_password"


class EmptyGapSet(ValidationError):
    code = "empty_gap_set"


class IndexOutOfRange(ValidationError):
    code = "index_out_of_range"


class EmptyExam(ValidationError):
    code = "empty_exam"


class InvalidCounts(ValidationError):
    code = "invalid_counts"


class InvalidSubmission(ValidationError):
    code = "invalid_submission"


class ConfigInvalid(ValidationError):
    code = "config_invalid"


# -- persistence ----------------------------------------------------------------

class ConstraintViolation(AracError):
    """A transaction batch violated a storage constraint; nothing from the
    batch was applied."""

    code = "constraint_violation"

    def __init__(self, constraint: str, kind: str, entity_id: str | None = None):
        detail = f"{constraint} on {kind}" + (f" {entity_id}" if entity_id else "")
        super().__init__(detail)
        self.constraint = constraint
        self.kind = kind
        self.entity_id = entity_id


class UnsupportedVersion(AracError):
    code = "unsupported_version"


class ConflictingIds(ConflictError):
    code = "conflicting_ids"


class BindFailure(AracError):
    code = "bind_failure"
