"""Toolkit for parsing and scoring implicit arguments in anchored graphs."""

from .graph import (Category, Edge, EdgeAttr, EdgeLabel, Graph, ImplicitGroup,
                    InvalidGraphError, Node, NodeKind, Refinement, Violation,
                    canonical_signature, graphs_equal, implicit_groups,
                    primary_yield, validate)
from .codec import (CodecError, CorpusStats, Document, GraphValidationError,
                    MalformedJsonError, SchemaError, corpus_stats,
                    document_from_obj, document_to_obj, iter_corpus,
                    read_corpus, read_document, write_corpus, write_document)
from .metrics import (UNMATCHED, ConfusionMatrix, MetricError, PRF,
                      TokenMismatchError, agreement_report, cohen_kappa,
                      confusion_from_pairs, corpus_prf, edge_f1, implicit_f1)
from .transitions import (Action, ActionKind, IllegalActionError, ParserState,
                          SystemKind, TerminalStateError, apply,
                          extract_graph, initial_state, is_legal,
                          legal_actions, maxsteps, parse_action)
from .oracle import (OracleConfig, OracleStuckError, RoundTrip,
                     RoundTripReport, oracle_next, oracle_sequence, replay,
                     verify_roundtrip)
from .features import HASH_BITS, extract_features
from .perceptron import AveragedPerceptron
from .parser import (ImplicitArgumentParser, Model, ModelFormatError,
                     ParseResult, action_accuracy, evaluate_model, load_model,
                     parse_tokens, save_model, train)

__version__ = "0.1.0"

__all__ = [
    "Action", "ActionKind", "AveragedPerceptron", "Category", "CodecError",
    "ConfusionMatrix", "CorpusStats", "Document", "Edge", "EdgeAttr",
    "EdgeLabel", "Graph", "GraphValidationError", "HASH_BITS",
    "IllegalActionError", "ImplicitArgumentParser", "ImplicitGroup",
    "InvalidGraphError", "MalformedJsonError", "MetricError", "Model",
    "ModelFormatError", "Node", "NodeKind", "OracleConfig",
    "OracleStuckError", "PRF", "ParseResult", "ParserState", "Refinement",
    "RoundTrip", "RoundTripReport", "SchemaError", "SystemKind",
    "TerminalStateError", "TokenMismatchError", "UNMATCHED", "Violation",
    "action_accuracy", "agreement_report", "apply", "canonical_signature",
    "cohen_kappa", "confusion_from_pairs", "corpus_prf", "corpus_stats",
    "document_from_obj", "document_to_obj", "edge_f1", "evaluate_model",
    "extract_features", "extract_graph", "graphs_equal", "implicit_f1",
    "implicit_groups", "initial_state", "is_legal", "iter_corpus",
    "legal_actions", "load_model", "maxsteps", "oracle_next",
    "oracle_sequence", "parse_action", "parse_tokens", "primary_yield",
    "read_corpus", "read_document", "replay", "save_model", "train",
    "validate", "verify_roundtrip", "write_corpus", "write_document",
]
