"""Small helpers for reading the JSON input formats."""
import json
from pathlib import Path

from .errors import FormatError


def read_json(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FormatError(f"file not found: {path}") from None
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno, exc.colno, str(path)) from None


def load_source(source, base_dir=None):
    """Return ``(data, directory)`` for a path or an already parsed mapping."""
    if isinstance(source, dict):
        return source, Path(base_dir) if base_dir else Path.cwd()
    path = Path(source)
    if base_dir is not None and not path.is_absolute():
        path = Path(base_dir) / path
    return read_json(path), path.parent


def require(data, key, what):
    if not isinstance(data, dict):
        raise FormatError(f"{what}: expected a JSON object")
    if key not in data:
        raise FormatError(f"{what}: missing key '{key}'")
    return data[key]
