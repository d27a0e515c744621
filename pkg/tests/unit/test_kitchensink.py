# pylint: disable=missing-docstring

from pytest import raises
from colorama import Fore, Style
from pyrecency.errors import InputError, InvalidParameter
from pyrecency.kitchensink import HL_OPEN, HL_CLOSE, diagnostic, hl, render


def test_highlights():
    output = f"1 {HL_OPEN}2{HL_CLOSE} 3 {HL_OPEN}4{HL_CLOSE}"
    colorized = f"1 {Fore.RED}2{Style.RESET_ALL} 3 {Fore.RED}4{Style.RESET_ALL}"
    quoted = "1 '2' 3 '4'"
    assert render(output, "color") == colorized
    assert render(output, "quotes") == quoted
    assert hl("filter") == f"{HL_OPEN}filter{HL_CLOSE}"

    with raises(ValueError):
        render(output, "whatever")


def test_diagnostic():
    message = render(diagnostic(InputError("malformed JSON", 3), "filter"), "quotes")
    assert message == (
        "pyrecency 'filter' failed with 'InputError' (exit code 2): line 3: malformed JSON"
    )
    message = render(diagnostic(InvalidParameter("beta must lie in [0, 1]"), "chain"), "quotes")
    assert "(exit code 4)" in message
