"""Entry point for `python -m wentzell`."""

from wentzell.main import cli_entry

if __name__ == "__main__":
    cli_entry()
