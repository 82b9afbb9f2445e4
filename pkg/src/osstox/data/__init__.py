"""Default lexicon data shipped with the package.

All files use the documented open formats, so licensed or larger
dictionaries can be dropped in via --lexicon-dir without code changes.
"""

from importlib import resources

from ..lexicon import Lexicon
from ..sentiment import ValenceLexicon, load_valence_lexicon


def _path(name: str):
    return resources.files(__package__) / name


def default_psych_lexicon() -> Lexicon:
    return Lexicon.from_json_file(_path("psycholinguistic.json"))


def default_moral_lexicon() -> Lexicon:
    return Lexicon.from_json_file(_path("moral_foundations.json"))


def default_valence_lexicon() -> ValenceLexicon:
    return load_valence_lexicon(_path("valence.tsv"), _path("valence_modifiers.json"))
