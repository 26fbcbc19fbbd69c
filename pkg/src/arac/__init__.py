"""ARAC: pedagogically indexed Arabic text base with taxonomy-driven
annotation, gap-fill activities, exam grading and performance tracking."""

from .activities import ActivityService, compute_performance, render_performance
from .accounts import AccountService
from .archive import export_corpus, import_corpus
from .config import ServiceConfig, load_config
from .corpus import CorpusService, find_taxonomy_matches, parse_taxonomy_file
from .lom import Difficulty, EducationalContext, LomRecord, lom_from_dict, lom_to_dict
from .models import QueryCriteria, Role
from .normalization import NormalizationConfig, normalize
from .service import Platform
from .store import EntityStore
from .tokenizer import Token, tokenize

__version__ = "0.1.0"

__all__ = [
    "AccountService",
    "ActivityService",
    "CorpusService",
    "Difficulty",
    "EducationalContext",
    "EntityStore",
    "LomRecord",
    "NormalizationConfig",
    "Platform",
    "QueryCriteria",
    "Role",
    "ServiceConfig",
    "Token",
    "compute_performance",
    "export_corpus",
    "find_taxonomy_matches",
    "import_corpus",
    "load_config",
    "lom_from_dict",
    "lom_to_dict",
    "normalize",
    "parse_taxonomy_file",
    "render_performance",
    "tokenize",
    "__version__",
]
