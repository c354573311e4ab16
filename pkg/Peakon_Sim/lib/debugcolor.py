"""
from debugcolor import co, say
say(co(msg="[STICKY]merge at t=0.12", color="pink", fmt="bold"))

Every class in the simulator logs through its own debug_print/error_print,
each tag with its own colour, so interleaved runs stay readable.
"""

import sys

_h = "\033["
_e = "\033[0;39;49m"

_c = {
    "red": "1",
    "green": "2",
    "orange": "3",
    "blue": "4",
    "pink": "5",
    "teal": "6",
    "white": "7",
    "gray": "9",
}

_f = {"normal": "0", "bold": "1", "ulined": "4"}


def co(msg, color="gray", fmt="normal"):
    return _h + _f[fmt] + ";3" + _c[color] + "m" + msg + _e


def say(line):
    print(line, file=sys.stderr)


def status_table(rows, title="Suite", stream=None):
    """Prints a pass/fail table, one coloured row per entry.

    Args:
        rows (dict): name -> bool
        title (str): header of the name column
        stream: file object, defaults to stdout
    """
    stream = sys.stdout if stream is None else stream
    width = max([len(title)] + [len(key) for key in rows])
    print("=" * (width + 12), file=stream)
    print(f"{title.ljust(width)} | Status", file=stream)
    for key, value in rows.items():
        padded_key = key.ljust(width)
        if value:
            print(co(f"|{padded_key} | PASS |", "green"), file=stream)
        else:
            print(co(f"|{padded_key} | FAIL |", "red"), file=stream)
    print("=" * (width + 12), file=stream)
