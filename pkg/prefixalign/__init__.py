"""prefixalign: streaming conformance checking with incremental prefix-alignments."""

from prefixalign.alignment import Move, MoveKind, PrefixAlignment, SynchronousProduct, build_spn
from prefixalign.config import VERSION
from prefixalign.engine import AlignmentResult, CaseAggregate, RunOutcome, Worker, process_event
from prefixalign.exceptions import CliError, ModelError
from prefixalign.petri import Marking, PetriNet, WFNet
from prefixalign.pnml import load_model, write_model
from prefixalign.search import continue_search, shortest_path

__all__ = [
    "VERSION",
    "AlignmentResult",
    "CaseAggregate",
    "CliError",
    "Marking",
    "ModelError",
    "Move",
    "MoveKind",
    "PetriNet",
    "PrefixAlignment",
    "RunOutcome",
    "SynchronousProduct",
    "WFNet",
    "Worker",
    "build_spn",
    "continue_search",
    "load_model",
    "process_event",
    "shortest_path",
    "write_model",
]
