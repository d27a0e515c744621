"""Placeholders and formatting for CLI diagnostics"""

from colorama import Fore, Style

from pyrecency.errors import PyrecencyError

HL_OPEN = "``"
HL_CLOSE = "''"

HIGHLIGHTS = ("color", "quotes")


def hl(what) -> str:  # pylint: disable=invalid-name
    """Return highlighted string"""
    return f"{HL_OPEN}{what}{HL_CLOSE}"


def render(message: str, highlights: str) -> str:
    """Replace highlight placeholders using the selected method"""
    if highlights == "color":
        return message.replace(HL_OPEN, Fore.RED).replace(HL_CLOSE, Style.RESET_ALL)
    if highlights == "quotes":
        return message.replace(HL_OPEN, "'").replace(HL_CLOSE, "'")

    raise ValueError("Highlight should be one of: " + str(HIGHLIGHTS))


def diagnostic(error: PyrecencyError, command: str) -> str:
    """One-line diagnostic naming the failed command, the error kind and its exit code"""
    return (
        f"pyrecency {hl(command)} failed with {hl(type(error).__name__)} "
        f"(exit code {error.exit_code}): {error}"
    )
