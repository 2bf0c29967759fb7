"""Exception hierarchy shared by all corpus_lens modules."""


class CorpusLensError(Exception):
    """Base class for every error raised by this package."""


# corpus
class EmptyCorpus(CorpusLensError):
    pass


class EncodingError(CorpusLensError):
    pass


class DuplicateChapterIndex(CorpusLensError):
    pass


# tokenize
class AlignmentError(CorpusLensError):
    pass


class MalformedRecord(CorpusLensError):
    def __init__(self, line_no, line, reason="no tab separator"):
        super().__init__(f"line {line_no}: {reason}: {line!r}")
        self.line_no = line_no
        self.line = line


# stats / mds
class EmptyDocument(CorpusLensError):
    pass


class UnknownTerm(CorpusLensError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NonConvergence(CorpusLensError):
    pass


# sentiment
class EmptyLexicon(CorpusLensError):
    pass


class NoScoredSentences(CorpusLensError):
    pass


# network / report
class UnsupportedFormat(CorpusLensError, ValueError):
    pass


class EmptySeries(CorpusLensError, ValueError):
    pass


class ConfigError(CorpusLensError):
    """Run configuration failed validation; nothing was executed."""


class StageError(CorpusLensError):
    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
