from .derive import (
    SUMMARIZE_MARKER,
    derive_templates,
    load_corpus,
    save_corpus,
    summarize_analysis_items,
)
from .kmeans import ClusterModel, kmeans
from .sections import (
    DEFAULT_KEYWORDS,
    extract_organ_section,
    keywords_for,
    split_sentences,
)
from .types import CorpusReport, Template, load_templates, save_templates

__all__ = [
    "ClusterModel",
    "CorpusReport",
    "DEFAULT_KEYWORDS",
    "SUMMARIZE_MARKER",
    "Template",
    "derive_templates",
    "extract_organ_section",
    "keywords_for",
    "kmeans",
    "load_corpus",
    "load_templates",
    "save_corpus",
    "save_templates",
    "split_sentences",
    "summarize_analysis_items",
]
