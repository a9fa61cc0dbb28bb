"""Python bindings for the poolbench C++ core."""

from ._poolbench import (  # noqa: F401
    ConfigError,
    DataError,
    TrainingError,
    accuracy,
    consolidate,
    fnv1a64,
    load_corpus_tally,
    macro_f1,
    pad,
    parse_liar_tsv,
    pool,
    pseudo_embed,
    read_steb,
    render_report,
    run_experiment,
    tokenize_simple,
    write_steb,
)

__all__ = [
    "ConfigError",
    "DataError",
    "TrainingError",
    "accuracy",
    "consolidate",
    "fnv1a64",
    "load_corpus_tally",
    "macro_f1",
    "pad",
    "parse_liar_tsv",
    "pool",
    "pseudo_embed",
    "read_steb",
    "render_report",
    "run_experiment",
    "tokenize_simple",
    "write_steb",
]
