"""Exception types shared across the workbench."""


class TaxonomistError(Exception):
    """Base class for all workbench errors."""


# -- corpus ---------------------------------------------------------------

class InvalidConfig(TaxonomistError):
    pass


class EmptyAfterCleaning(TaxonomistError):
    def __init__(self, doc_id: str):
        super().__init__(f"document {doc_id!r} is empty after cleaning")
        self.doc_id = doc_id


class ParseError(TaxonomistError):
    def __init__(self, line: int, detail: str = ""):
        super().__init__(f"parse error at line {line}: {detail}")
        self.line = line


class DuplicateId(TaxonomistError):
    def __init__(self, doc_id: str):
        super().__init__(f"duplicate document id {doc_id!r}")
        self.doc_id = doc_id


class MissingAssignment(TaxonomistError):
    def __init__(self, doc_ids):
        super().__init__(f"documents without assignment: {sorted(doc_ids)}")
        self.doc_ids = sorted(doc_ids)


# -- gateway --------------------------------------------------------------

class BackendError(TaxonomistError):
    pass


class Timeout(BackendError):
    pass


class TransportError(BackendError):
    pass


class RateLimited(BackendError):
    pass


class UnparseableResponse(TaxonomistError):
    def __init__(self, raw: str):
        super().__init__(f"could not parse backend response: {raw[:200]!r}")
        self.raw = raw


class UnknownLabel(TaxonomistError):
    def __init__(self, label: str):
        super().__init__(f"label {label!r} does not exist in the schema")
        self.label = label


# -- prompting ------------------------------------------------------------

class OrphanExample(TaxonomistError):
    def __init__(self, label: str):
        super().__init__(f"few-shot example labeled with unknown class {label!r}")
        self.label = label


class UnknownClass(TaxonomistError):
    def __init__(self, name: str):
        super().__init__(f"no class named {name!r}")
        self.name = name


class ThresholdUnreachable(TaxonomistError):
    def __init__(self, score: float, threshold: float):
        super().__init__(
            f"input prompt scores {score:.4f}, below threshold {threshold:.4f}"
        )
        self.score = score
        self.threshold = threshold


# -- alignment ------------------------------------------------------------

class KeyMismatch(TaxonomistError):
    def __init__(self, doc_ids):
        super().__init__(f"ids present in only one assignment map: {sorted(doc_ids)}")
        self.doc_ids = sorted(doc_ids)


# -- stats ----------------------------------------------------------------

class NoDiscordantPairs(TaxonomistError):
    pass


class DegenerateTest(TaxonomistError):
    pass


class UnsmoothedZero(TaxonomistError):
    pass


# -- fewshot --------------------------------------------------------------

class DimensionMismatch(TaxonomistError):
    pass


class ZeroVector(TaxonomistError):
    pass


class MissingDescription(TaxonomistError):
    def __init__(self, class_name: str):
        super().__init__(f"no description for class {class_name!r}")
        self.class_name = class_name


class DuplicateJudgment(TaxonomistError):
    pass


class LabelEqualsLoser(TaxonomistError):
    pass


class WinnerNotCandidate(TaxonomistError):
    def __init__(self, label: str, candidates):
        super().__init__(f"judge returned {label!r}, not among {list(candidates)}")
        self.label = label


class InsufficientOverlap(TaxonomistError):
    pass


# -- drift ----------------------------------------------------------------

class ProviderMismatch(TaxonomistError):
    pass


class ZeroCentroid(TaxonomistError):
    def __init__(self, class_name: str):
        super().__init__(f"member vectors of {class_name!r} cancel to zero")
        self.class_name = class_name


class MissingCentroid(TaxonomistError):
    def __init__(self, class_name: str):
        super().__init__(f"no centroid for class {class_name!r}")
        self.class_name = class_name


class EmptyGoldenSet(TaxonomistError):
    pass


# -- store ----------------------------------------------------------------

class NotFound(TaxonomistError):
    pass


class IntegrityError(TaxonomistError):
    pass


class StoreLocked(TaxonomistError):
    pass
