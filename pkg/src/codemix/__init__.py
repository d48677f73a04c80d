"""Sentiment classification toolkit for code-mixed (Spanglish) social media text.

Pipeline: parse language-tagged tweet corpora, normalize the text, build
concatenated word/char TF-IDF features, train a classical classifier
(logistic regression, multinomial naive Bayes, or a linear SVM) and score
predictions with macro-averaged F1.
"""

from .corpus import (
    ClassDistribution,
    Dataset,
    LangTag,
    Sentiment,
    Token,
    Tweet,
    class_distribution,
    concat_datasets,
    format_conll,
    parse_conll,
    parse_monolingual_csv,
)
from .errors import CodemixError, ConfigError, DataError, NumericError, ParseError
from .evaluation import ConfusionMatrix, EvalReport, GridRow, comparison_grid, score
from .models import (
    Classifier,
    LinearModel,
    MnbModel,
    ModelKind,
    TrainConfig,
    fit,
    predict,
    predict_batch,
    predict_scores,
)
from .preprocess import EmojiLexicon, PipelineConfig, default_lexicon, run_pipeline
from .vectorize import (
    Analyzer,
    AnalyzerKind,
    DocMode,
    SparseVector,
    TfIdfModel,
    Vocabulary,
    fit_tfidf,
    fit_vocabulary,
    prepare_documents,
    transform,
    transform_batch,
)

__version__ = "0.1.0"

__all__ = [
    "Analyzer",
    "AnalyzerKind",
    "ClassDistribution",
    "Classifier",
    "CodemixError",
    "ConfigError",
    "ConfusionMatrix",
    "DataError",
    "Dataset",
    "DocMode",
    "EmojiLexicon",
    "EvalReport",
    "GridRow",
    "LangTag",
    "LinearModel",
    "MnbModel",
    "ModelKind",
    "NumericError",
    "ParseError",
    "PipelineConfig",
    "Sentiment",
    "SparseVector",
    "TfIdfModel",
    "Token",
    "TrainConfig",
    "Tweet",
    "Vocabulary",
    "class_distribution",
    "comparison_grid",
    "concat_datasets",
    "default_lexicon",
    "fit",
    "fit_tfidf",
    "fit_vocabulary",
    "format_conll",
    "parse_conll",
    "parse_monolingual_csv",
    "predict",
    "predict_batch",
    "predict_scores",
    "prepare_documents",
    "run_pipeline",
    "score",
    "transform",
    "transform_batch",
]
