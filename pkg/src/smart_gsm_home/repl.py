"""
Interactive virtual phone.

The user plays the phone: ``sms`` injects a message and runs the simulation
until it is quiet again, the other commands inspect the home.
"""

from __future__ import annotations

# =============================================================================
# METADATA
# =============================================================================
__author__ = "Yeremia Gunawan Adhisantoso"
__email__ = "adhisant@tnt.uni-hannover.de"
__license__ = "Clear BSD"

from loguru import logger
from prompt_toolkit import PromptSession
from prompt_toolkit.completion import WordCompleter
from tabulate import tabulate

from .config import SimConfig, apply_overrides
from .engine import Simulation
from .formatting import format_us
from .parsing import safe_int
from .scenario import DEFAULT_SENDER

COMMANDS = ("sms", "loads", "inbox", "trace", "help", "quit", "exit")

HELP_TEXT = """\
Commands:
  sms [--from <number>] <text>   send an SMS to the home and run until quiet
  loads                          show the relay states
  inbox [<number>]               show SMS received by a phone
  trace [<count>]                show the last serial frames (default 20)
  help                           show this text
  quit                           leave the session"""


class ReplSession:
    """Line interpreter over one :class:`~smart_gsm_home.engine.Simulation`.

    Parameters
    ----------
    sim : Simulation
        Booted or fresh simulation; the session drives it.
    sender : str, optional
        Number used by ``sms`` without ``--from``.
    """

    def __init__(self, sim: Simulation, sender: str = DEFAULT_SENDER) -> None:
        self.sim = sim
        self.sender = sender
        self.finished = False
        self.sim.run_until_idle()

    def handle(self, line: str) -> str:
        """Execute one input line and return the text to print."""
        head, _, rest = line.strip().partition(" ")
        if not head:
            return ""
        command, args = head.lower(), rest.split()
        match command:
            case "sms":
                return self._sms(rest.lstrip(" "))
            case "loads":
                return self._loads()
            case "inbox":
                return self._inbox(args)
            case "trace":
                return self._trace(args)
            case "help":
                return HELP_TEXT
            case "quit" | "exit":
                self.finished = True
                return "bye"
            case _:
                return f"unknown command {command!r}\n{HELP_TEXT}"

    def _sms(self, text: str) -> str:
        """Send ``text`` verbatim after an optional ``--from <number>`` prefix."""
        sender, body = self.sender, text
        option, _, tail = text.partition(" ")
        if option == "--from":
            sender, _, body = tail.lstrip(" ").partition(" ")
            if not sender:
                return "error: --from needs a number"
            body = body.lstrip(" ")
        try:
            self.sim.send_sms(sender, body)
        except ValueError as exc:
            return f"error: {exc}"
        sent_at = self.sim.now
        self.sim.run_until_idle()
        return (
            f"sent {body!r} from {sender} at {format_us(sent_at)}; "
            f"clock now {format_us(self.sim.now)}"
        )

    def _loads(self) -> str:
        rows = [
            (load.load_id, load.label, "ON" if load.energized else "OFF")
            for load in self.sim.loads.loads
        ]
        return tabulate(rows, headers=["Load", "Label", "State"], tablefmt="simple")

    def _inbox(self, args: list[str]) -> str:
        number = args[0] if args else self.sender
        phone = self.sim.phones.get(number)
        if phone is None or not phone.inbox:
            return f"inbox of {number} is empty"
        rows = [
            (format_us(msg.received_us), msg.sender, msg.body) for msg in phone.inbox
        ]
        return tabulate(rows, headers=["At", "From", "Text"], tablefmt="simple")

    def _trace(self, args: list[str]) -> str:
        count = safe_int(args[0], min=0) if args else 20
        if count is None:
            return f"error: {args[0]!r} is not a count"
        entries = self.sim.trace[-count:] if count > 0 else []
        if not entries:
            return "trace is empty"
        rows = [
            (
                format_us(e.emitted_us),
                format_us(e.start_us),
                format_us(e.delivered_us),
                e.direction.value,
                e.data,
            )
            for e in entries
        ]
        headers = ["Sent", "Start", "Arrived", "Direction", "Bytes"]
        return tabulate(rows, headers=headers, tablefmt="simple")


def repl(
    seed: int = 0, config: SimConfig | None = None, sender: str = DEFAULT_SENDER
) -> None:
    """Run the interactive session on the terminal until ``quit`` or EOF."""
    base = config if config is not None else SimConfig()
    session = ReplSession(Simulation(apply_overrides(base, {"seed": seed})), sender)
    prompt = PromptSession(completer=WordCompleter(list(COMMANDS)))
    logger.info("REPL started with seed {}", seed)
    print(HELP_TEXT)
    while not session.finished:
        try:
            line = prompt.prompt(f"[{format_us(session.sim.now)}] phone> ")
        except (EOFError, KeyboardInterrupt):
            break
        output = session.handle(line)
        if output:
            print(output)


__all__ = ["ReplSession", "repl", "HELP_TEXT"]
