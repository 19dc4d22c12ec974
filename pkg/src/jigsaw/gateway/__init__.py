"""CLI and HTTP service over the synthesis pipeline; owns bank persistence."""

from .cli import build_parser, cli, main
from .server import ApiError, make_server, serve
from .state import AppState, data_dir, default_bank_paths, load_banks

__all__ = [
    "ApiError", "AppState", "build_parser", "cli", "data_dir",
    "default_bank_paths", "load_banks", "main", "make_server", "serve",
]
