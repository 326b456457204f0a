"""Surrogates for archived web pages: image scoring, text extraction and an in-process API."""

from ._core import (
    ImageFeatures,
    MockService,
    Response,
    ScoredSentence,
    ScoringWeights,
    compute_image_features,
    extract_description,
    extract_title,
    rank_sentences,
    remove_boilerplate,
    score_image,
    tokenize_words,
    word_frequencies,
)

__all__ = [
    "ImageFeatures",
    "MockService",
    "Response",
    "ScoredSentence",
    "ScoringWeights",
    "compute_image_features",
    "extract_description",
    "extract_title",
    "rank_sentences",
    "remove_boilerplate",
    "score_image",
    "tokenize_words",
    "word_frequencies",
]
