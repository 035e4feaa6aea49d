"""Temporal-logic question answering benchmarks from temporal video annotations."""

from .annotations import (
    ActionPhrase,
    ActionVocabulary,
    SegmentSchema,
    VideoAnnotation,
    load_action_vocabulary,
    parse_scene_graph_annotations,
    parse_segment_annotations,
)
from .builder import (
    Benchmark,
    GenerationConfig,
    QAPair,
    benchmark_stats,
    build_benchmark,
    read_benchmark,
    validate_benchmark,
    write_benchmark,
)
from .errors import TemporalQAError
from .language import inflect, render_boolean, render_mcq
from .logic import TemporalCategory, Verdict, classify_tuples, evaluate
from .oracle import brute_force_eval, oracle_check
from .scoring import MetricsTable, PredictionRecord, parse_response_boolean, parse_response_choice, score
from .timeline import PairVerdict, Timeline, build_instance_states, sanitize_pair

__version__ = "0.1.0"
