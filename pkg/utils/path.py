from pathlib import Path


def resolve_path(base: str | Path, path: str | Path) -> Path:
    """
    Resolves a path relative to a base directory.

    Args:
        base: The base directory (usually the working directory).
        path: A file name or a relative or absolute path.

    Returns:
        The resolved path.
    """
    path = Path(path)
    if path.is_absolute():
        return path.resolve()
    return Path(base).resolve() / path


def display_path_rel_to_cwd(path: str | Path, cwd: Path | None) -> str:
    """
    Shortens a path for display by making it relative to the working directory when possible.
    """
    p = Path(path)
    if cwd:
        try:
            return str(p.resolve().relative_to(cwd.resolve()))
        except ValueError:
            pass
    return str(p)


def write_output(text: str, path: str | Path, cwd: Path | None = None) -> Path:
    """Writes `text` to `path`, creating parent directories."""
    target = resolve_path(cwd or Path.cwd(), path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    return target
