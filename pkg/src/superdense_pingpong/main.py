import logging

from ._cli import cli

logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


def main():
    cli(prog_name="superdense-pingpong")


if __name__ == "__main__":
    main()
