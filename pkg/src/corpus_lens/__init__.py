"""Analytics for chaptered Japanese prose: frequency, TF-IDF, sentiment, networks, MDS."""

__version__ = "0.1.0"

from .corpus import Chapter, Corpus, CorpusStats, Sentence, corpus_stats, load_corpus, split_sentences
from .tokenize import (SegmentationLexicon, Token, TokenizedCorpus, filter_pos, import_tokens,
                       tokenize_corpus, tokenize_longest_match)
from .stats import (TermDocMatrix, chapter_keywords, inverse_document_frequency, pos_frequency,
                    term_frequency, tfidf)
from .sentiment import (chapter_series, histogram, load_polarity_lexicon, negativity_fraction,
                        score_sentence)
from .network import build_cooccurrence, export_graph, prune
from .mds import DissimilarityMatrix, Embedding2D, chapter_dissimilarity, classical_mds, smacof, stress
