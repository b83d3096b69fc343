"""Two-stage contextual word list filtering over streaming phone posteriors.

Stage one (Posterior Sum Confidence) keeps words whose phones all appear
somewhere in the sliding window; stage two (Sequence Order Confidence) keeps
those whose phones also appear in order.
"""

__version__ = "0.1.0"

from .attention import attention_weights, bias_attention
from .core import (
    Accumulation,
    ContextualWord,
    FilterConfig,
    PosteriorMatrix,
    ValidationMode,
    ValidationResult,
    WordList,
    validate_posteriors,
)
from .corpus import Corpus, Utterance, load_corpus, load_corpus_dir, write_corpus
from .errors import CtxFilterError, FormatError, ValidationError
from .evaluate import EvalReport, calibrate, evaluate, sweep
from .filtering import (
    FilterSession,
    ScoredWord,
    filter_window,
    finalize,
    push_chunk,
    session_new,
)
from .io import (
    dump_word_list,
    load_symbol_table,
    load_word_list,
    read_manifest,
    read_posteriors,
    write_posteriors,
)
from .scoring import Scorer, psc_score, score_word, soc_score
from .synth import ScenarioSpec, SyntheticCorpus, generate
from .bench import bench_scaling
