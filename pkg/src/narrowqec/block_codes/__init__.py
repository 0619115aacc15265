"""Distance-3 block codes with flagged extraction, decoder tables and rounds-to-failure simulation."""
from .codes import CSS1573, STEANE, BlockCode, get_code
from .decoder_table import DecoderConflict, DecoderTable, check_table, generate_decoder_table
from .extraction import BlockSimConfig, ExtractionRound, build_extraction_round
from .simulate import (
    NEVER_FAILED,
    BlockSimulator,
    estimate_logical_rate,
    logical_rate_fit,
    pseudo_threshold,
    simulate_to_failure,
)
