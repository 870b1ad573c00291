"""Bundled example data."""

from importlib import resources
from pathlib import Path


def toy_dataset_path() -> Path:
    """212-molecule binary activity dataset (columns: smiles, activity)."""
    return Path(resources.files(__package__) / "toy.csv")
