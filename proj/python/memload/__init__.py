"""Sentence-level syntactic memory-load measures over CoNLL-U treebanks.

The heavy lifting lives in the compiled extension ``memload._core``; this
package re-exports its public surface.
"""

from memload._core import (  # noqa: F401
    ConlluParseError,
    DepGraph,
    FeatureRow,
    FormulaSyntaxError,
    LmmFit,
    MemloadError,
    MetricConfig,
    ModelSpec,
    SentenceRecord,
    TokenRow,
    __version__,
    build_graph,
    dependency_length,
    feature_interference,
    feature_misbinding,
    featurize,
    fit_lmm,
    fit_lmm_arrays,
    fit_statistics,
    head_positions,
    intervener_complexity,
    memory_load,
    parse_conllu,
    parse_formula,
    read_features_csv,
    render_formula,
    sentence_length,
    write_features_csv,
)

__all__ = [
    "ConlluParseError",
    "DepGraph",
    "FeatureRow",
    "FormulaSyntaxError",
    "LmmFit",
    "MemloadError",
    "MetricConfig",
    "ModelSpec",
    "SentenceRecord",
    "TokenRow",
    "__version__",
    "build_graph",
    "dependency_length",
    "feature_interference",
    "feature_misbinding",
    "featurize",
    "fit_lmm",
    "fit_lmm_arrays",
    "fit_statistics",
    "head_positions",
    "intervener_complexity",
    "memory_load",
    "parse_conllu",
    "parse_formula",
    "read_features_csv",
    "render_formula",
    "sentence_length",
    "write_features_csv",
]
