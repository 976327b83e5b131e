import sys
import time
from typing import Literal, TextIO
import colorama


class Printr(object):
    _instance = None

    BLUE = "\033[94m"
    CYAN = "\033[96m"
    YELLOW = "\033[93m"
    RED = "\033[91m"
    CLEAR = "\033[0m"
    BOLD = "\033[1m"
    FAINT = "\033[2m"
    NORMAL_WEIGHT = "\033[22m"

    CHANNEL = Literal["main", "error", "warning", "info"]

    # main is the machine-readable channel, everything else goes to stderr
    _channel_colors: dict[CHANNEL, str] = dict(
        main="", error=RED, warning=YELLOW, info=BLUE
    )

    # NOTE this is a singleton class
    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(Printr, cls).__new__(cls)
            colorama.just_fix_windows_console()

            cls.debug = False
            cls.execution_start: None | float = None
        return cls._instance

    def set_debug(self, debug: bool):
        self.debug = debug

    def _stream(self, output_channel: CHANNEL) -> TextIO:
        return sys.stdout if output_channel == "main" else sys.stderr

    def print(self, text, output_channel: CHANNEL = "main", color: str | None = None):
        stream = self._stream(output_channel)
        color = self._channel_colors.get(output_channel, "") if color is None else color
        if color and stream.isatty():
            text = Printr.clr(text, color)
        print(text, file=stream)

    def print_err(self, text):
        self.print(text, output_channel="error")

    def print_warn(self, text):
        self.print(text, output_channel="warning")

    def print_info(self, text):
        self.print(text, output_channel="info")

    def print_debug(self, text):
        if self.debug:
            self.print(text, output_channel="info", color=Printr.FAINT)

    # ───────────────────────────── benchmarking ───────────────────────────── #

    def start_execution_benchmark(self):
        """Starts the execution benchmark timer."""
        self.execution_start = time.perf_counter()

    def print_execution_time(self, label: str = ""):
        """Prints the time since the benchmark started (in seconds). Only in debug mode."""
        if self.execution_start and self.debug:
            elapsed_seconds = time.perf_counter() - self.execution_start
            self.print_info(f"...{label + ' ' if label else ''}took {elapsed_seconds:.2f}s")

    # ───────────────────────────── static helpers ───────────────────────────── #

    @staticmethod
    def clr(text, color_format):
        return f"{color_format}{text}{Printr.CLEAR}"

    @staticmethod
    def sys_print(text, headline="", color=RED):
        print("", file=sys.stderr)
        if headline.strip():
            print(
                Printr.clr(f"{Printr.BOLD}{headline}{Printr.NORMAL_WEIGHT}", color),
                file=sys.stderr,
            )
        print(Printr.clr(f"⎢ {text}", color), file=sys.stderr)
        print("", file=sys.stderr)

    @staticmethod
    def err_print(text):
        Printr.sys_print(text, "Something went wrong!")

    @staticmethod
    def box_print(lines: list[str], headline: str = ""):
        """Prints a framed summary block to stderr."""
        print(Printr.clr(f"⎡ {headline}", Printr.CYAN), file=sys.stderr)
        for line in lines:
            print(f"{Printr.clr('⎜', Printr.CYAN)}  {line}", file=sys.stderr)
        print(Printr.clr("⎣", Printr.CYAN), file=sys.stderr)
