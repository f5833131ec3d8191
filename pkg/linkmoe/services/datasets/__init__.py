from .planted import (
    FEAT_EXPERT,
    FEATURES_FILE,
    STRUCT_EXPERT,
    PlantedDataset,
    generate_planted_dataset,
    write_dataset,
)

__all__ = [
    "STRUCT_EXPERT",
    "FEAT_EXPERT",
    "FEATURES_FILE",
    "PlantedDataset",
    "generate_planted_dataset",
    "write_dataset",
]
