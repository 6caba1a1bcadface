from .beam import DecodeConfig, decode_beam, length_penalty
from .checkpoint import CHECKPOINT_FORMAT_VERSION, load_checkpoint, save_checkpoint
from .extractors import (
    BinaryRelationExtractor,
    RelationClassifierExtractor,
    Seq2SeqFactExtractor,
)
from .models import (
    FULL_SCALE,
    FULL_SCALE_BATCH_CLASSIFIER,
    FULL_SCALE_BATCH_SEQ2SEQ,
    FULL_SCALE_STEPS,
    ModelConfig,
    RelationClassifierNet,
    Seq2SeqNet,
)
from .train import TrainConfig, train_classifier, train_seq2seq
from .vocab import BOS_ID, END_ID, PAD_ID, UNK_ID, Vocabulary

__all__ = [
    "BinaryRelationExtractor",
    "BOS_ID",
    "CHECKPOINT_FORMAT_VERSION",
    "DecodeConfig",
    "decode_beam",
    "END_ID",
    "FULL_SCALE",
    "FULL_SCALE_BATCH_CLASSIFIER",
    "FULL_SCALE_BATCH_SEQ2SEQ",
    "FULL_SCALE_STEPS",
    "length_penalty",
    "load_checkpoint",
    "ModelConfig",
    "PAD_ID",
    "RelationClassifierExtractor",
    "RelationClassifierNet",
    "save_checkpoint",
    "Seq2SeqFactExtractor",
    "Seq2SeqNet",
    "TrainConfig",
    "train_classifier",
    "train_seq2seq",
    "UNK_ID",
    "Vocabulary",
]
