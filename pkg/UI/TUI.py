"""
This module handles the terminal presentation for tickwork.

Results are machine-readable and go to standard output. Everything meant
for a human (log lines, the summary table) goes through one themed Rich
console bound to standard error.
"""

from pathlib import Path
from typing import Any

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text
from rich.theme import Theme

from utils.path import display_path_rel_to_cwd
from utils.text import format_float

TICKWORK_THEME = Theme(
    {
        # General
        "info": "cyan",
        "warning": "yellow",
        "error": "bright_red bold",
        "success": "green",
        "dim": "dim",
        "muted": "grey50",
        "border": "grey35",
        "highlight": "bold cyan",
        # Task kinds
        "task": "bright_magenta bold",
        "task.model": "cyan",
        "task.evolution": "bright_blue",
        "task.statistics": "green",
        "task.sampling": "yellow",
        "task.structure": "magenta",
        "code": "white",
    }
)

_console: Console | None = None


def get_console() -> Console:
    """
    Retrieves the singleton stderr Console shared by logging and the summary table.
    """
    global _console
    if _console is None:
        _console = Console(theme=TICKWORK_THEME, stderr=True)
    return _console


def _display(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return format_float(value) if abs(value) < 1e-3 or abs(value) >= 1e6 else f"{value:.10g}"
    return str(value)


class TUI:
    """
    Renders run summaries and errors for human readers.
    """
    def __init__(self, console: Console | None = None) -> None:
        self.console = console or get_console()
        self.cwd: Path = Path.cwd()

    @property
    def interactive(self) -> bool:
        return self.console.is_terminal

    def _render_summary_table(self, summary: dict[str, Any]) -> Table:
        table = Table.grid(padding=(0, 1))
        table.add_column(style="muted", justify="right", no_wrap=True)
        table.add_column(style="code", overflow="fold")
        for key, value in summary.items():
            table.add_row(key, _display(value))
        return table

    def print_summary(
        self,
        name: str,
        kind: str,
        summary: dict[str, Any],
        output: Path | None = None,
    ) -> None:
        """
        Prints the headline numbers of a finished run.

        Args:
            name: Subcommand name.
            kind: Task kind, which selects the border colour.
            summary: Headline values.
            output: File the full result was written to, if any.
        """
        border_style = f"task.{kind}"
        title = Text.assemble(("● ", "muted"), (name, f"{border_style} bold"))
        subtitle = Text(
            f"written to {display_path_rel_to_cwd(output, self.cwd)}" if output else "stdout", style="muted"
        )
        body = self._render_summary_table(summary) if summary else Text("No summary", style="muted")
        self.console.print(
            Panel(
                body,
                title=title,
                title_align="left",
                subtitle=subtitle,
                subtitle_align="right",
                box=box.ROUNDED,
                padding=(1, 2),
                border_style=border_style,
            )
        )

    def print_error(self, name: str, error_kind: str, detail: str) -> None:
        self.console.print(
            Panel(
                Text(detail, style="code"),
                title=Text.assemble(("✗ ", "error"), (f"{name}: {error_kind}", "error")),
                title_align="left",
                box=box.ROUNDED,
                padding=(1, 2),
                border_style="error",
            )
        )
